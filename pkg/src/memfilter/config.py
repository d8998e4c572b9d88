from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Paths
_default_data = str(Path(__file__).resolve().parents[2] / "data")
DATA_DIR: Path = Path(os.getenv("MEMFILTER_DATA_DIR", _default_data))
OUTPUT_DIR: Path = Path(os.getenv("MEMFILTER_OUTPUT_DIR", str(DATA_DIR / "runs")))

# Monte Carlo
MASTER_SEED: int = int(os.getenv("MEMFILTER_SEED", "20240101"))
REPLICATES: int = int(os.getenv("MEMFILTER_REPLICATES", "1000"))
WORKERS: int = int(os.getenv("MEMFILTER_WORKERS", "1"))

# Gibbs chain
BURN_IN: int = int(os.getenv("MEMFILTER_BURN_IN", "500"))
N_DRAWS: int = int(os.getenv("MEMFILTER_DRAWS", "2000"))

LOG_LEVEL: str = os.getenv("MEMFILTER_LOG_LEVEL", "INFO").upper()

# Simulation study defaults: exponential rate, noise sd, sample size, MEM prior guess
THETA_TRUE: float = 1.0
DELTA: float = 0.5
SAMPLE_SIZE: int = 3
ALPHA_MEM: float = 0.0

# Histograms of E(x) estimates
HISTOGRAM_BINS: int = 30
HISTOGRAM_RANGE: tuple[float, float] = (0.0, 5.0)

# ML search interval is scaled by the sample mean: [THETA_MIN_SCALE/ŷ, THETA_MAX_SCALE/ŷ]
THETA_MIN_SCALE: float = 1e-3
THETA_MAX_SCALE: float = 1e3
ML_TOL: float = 1e-8


def ensure_dirs(out_dir: Path | None = None) -> Path:
    target = out_dir or OUTPUT_DIR
    target.mkdir(parents=True, exist_ok=True)
    return target
