from __future__ import annotations

import math

SQRT2 = math.sqrt(2.0)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Below this point erfc underflows too close to the subnormal range and the
# asymptotic Mills-ratio series takes over.
LOG_CDF_ASYMPTOTIC_BELOW = -37.0


def std_normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z - LOG_SQRT_2PI)


def std_normal_cdf(z: float) -> float:
    """Φ(z) via erf near the origin and erfc in both tails."""
    x = z / SQRT2
    if abs(x) < 1.0 / SQRT2:
        return 0.5 + 0.5 * math.erf(x)
    tail = 0.5 * math.erfc(abs(x))
    return 1.0 - tail if z > 0 else tail


def log_std_normal_cdf(z: float) -> float:
    """ln Φ(z) without underflow, for any z."""
    if z >= 0:
        return math.log1p(-0.5 * math.erfc(z / SQRT2))
    if z >= LOG_CDF_ASYMPTOTIC_BELOW:
        return math.log(0.5 * math.erfc(-z / SQRT2))
    # Φ(z) = φ(z)/|z| · (1 - 1/z² + 3/z⁴ - 15/z⁶ + 105/z⁸ - 945/z¹⁰ + ...)
    inv_z2 = 1.0 / (z * z)
    series = inv_z2 * (-1.0 + inv_z2 * (3.0 + inv_z2 * (-15.0 + inv_z2 * (105.0 - 945.0 * inv_z2))))
    return -0.5 * z * z - math.log(-z) - LOG_SQRT_2PI + math.log1p(series)
