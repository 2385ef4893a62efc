"""Regenerate the synthetic score fixtures in this directory.

The files are NOT real market data: one path of the built-in DGP
(dimension 5, evaluation length 223) is scored by seven synthetic
forecasters whose volatility/correlation parameters carry different levels
of multiplicative noise.  Running this script reproduces the files
byte-for-byte.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from copulascore.cli import SCORES_HEADER, SINGLE_MODEL_HEADER
from copulascore.copulas import GaussianEquiCorr
from copulascore.dist_math import EquiCorr
from copulascore.scoring import MarginalForecast, s_cop, s_marg
from copulascore.sim_harness import DgpSpec, simulate_path

SEED = 223223
N = 223

# (marginal noise half-width, correlation noise half-width) per model
MODELS = {
    "model_a": (0.0, 0.0),
    "model_b": (0.1, 0.1),
    "model_c": (0.1, 0.5),
    "model_d": (0.5, 0.1),
    "model_e": (0.5, 0.5),
    "model_f": (0.2, 0.3),
    "model_g": (0.3, 0.2),
}


def fmt(x: float) -> str:
    return f"{x:.12g}"


def model_scores(spec, y, sigma, widths, rng):
    dm = rng.uniform(1.0 - widths[0], 1.0 + widths[0], size=N)
    dc = rng.uniform(1.0 - widths[1], 1.0 + widths[1], size=N)
    rows = []
    for t in range(N):
        f = MarginalForecast(math.sqrt(dm[t]) * sigma[t])
        c = GaussianEquiCorr(EquiCorr(spec.dim, spec.rho * dc[t]))
        rows.append((s_marg(f, y[t]), s_cop(c, f, y[t])))
    return rows


def main() -> None:
    out_dir = Path(__file__).parent
    spec = DgpSpec(n=N)
    y, sigma = simulate_path(spec, seed=SEED)

    per_model = {}
    for k, (name, widths) in enumerate(sorted(MODELS.items())):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=SEED, spawn_key=(k + 1,)))
        per_model[name] = model_scores(spec, y, sigma, widths, rng)

    model_dir = out_dir / "synthetic_model_scores"
    model_dir.mkdir(exist_ok=True)
    for name, rows in per_model.items():
        lines = [",".join(SINGLE_MODEL_HEADER)]
        for t, (sm, sc) in enumerate(rows, start=1):
            lines.append(f"{t},{fmt(sm)},{fmt(sc)}")
        (model_dir / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # pairwise file: model_c versus model_b (differently noisy correlations)
    lines = [",".join(SCORES_HEADER)]
    for t in range(N):
        sm1, sc1 = per_model["model_c"][t]
        sm2, sc2 = per_model["model_b"][t]
        lines.append(f"{t + 1},{fmt(sm1)},{fmt(sc1)},{fmt(sm2)},{fmt(sc2)}")
    (out_dir / "synthetic_scores.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
