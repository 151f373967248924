"""Cross-check of the harmonic-regression design used by the seasonal
forecaster, run before the C++ implementation.

Design (must match src/timeline.cpp):
    y_t = a + b*t + sum_{k=1..3} [ c_k sin(2*pi*k*t/52.18) + d_k cos(...) ]
          + sum_h e_h * 1[holiday h falls in week t]
    t = 0..n-1 over the fitted (non-missing) weeks, least squares,
    sigma = sqrt(RSS / max(1, n - rank)).

Verifies exact recovery on a noise-free planted series and near-recovery
with Gaussian noise, including a +0.1 holiday bump.
"""

import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from xoshiro import Xoshiro  # noqa: E402

PERIOD = 52.18
ORDER = 3


def design(n, holiday_cols=()):
    cols = [np.ones(n), np.arange(n, dtype=float)]
    for k in range(1, ORDER + 1):
        t = np.arange(n, dtype=float)
        cols.append(np.sin(2.0 * math.pi * k * t / PERIOD))
        cols.append(np.cos(2.0 * math.pi * k * t / PERIOD))
    for h in holiday_cols:
        cols.append(np.asarray(h, dtype=float))
    return np.column_stack(cols)


def fit(y, holiday_cols=()):
    X = design(len(y), holiday_cols)
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    sigma = math.sqrt(rss / max(1, len(y) - rank))
    return coef, sigma


def main():
    n = 156
    t = np.arange(n, dtype=float)

    # Noise-free planted series: exact recovery.
    y = 0.1 + 0.0005 * t + 0.05 * np.sin(2 * math.pi * t / PERIOD) \
        + 0.02 * np.cos(2 * math.pi * 2 * t / PERIOD)
    coef, sigma = fit(y)
    assert abs(coef[0] - 0.1) < 1e-10
    assert abs(coef[1] - 0.0005) < 1e-12
    assert abs(coef[2] - 0.05) < 1e-10      # c1
    assert abs(coef[5] - 0.02) < 1e-10      # d2
    assert sigma < 1e-10
    print("noise-free recovery ok, sigma =", sigma)

    # Noisy series with a holiday column carrying a +0.1 bump.
    rng = Xoshiro(11)
    hol = np.zeros(n)
    hol[[0, 52, 104]] = 1.0                 # roughly yearly indicator weeks
    noise = np.array([0.01 * rng.normal() for _ in range(n)])
    y2 = 0.1 + 0.0003 * t + 0.05 * np.sin(2 * math.pi * t / PERIOD) + 0.1 * hol + noise
    coef2, sigma2 = fit(y2, [hol])
    amp = math.hypot(coef2[2], coef2[3])
    print(f"noisy: amplitude {amp:.4f} (planted 0.05), holiday {coef2[-1]:.4f} "
          f"(planted 0.1), sigma {sigma2:.4f} (planted 0.01)")
    assert abs(amp - 0.05) < 0.005
    assert abs(coef2[-1] - 0.1) < 0.02
    assert abs(sigma2 - 0.01) < 0.003

    # In-sample 95%-band coverage across 100 seeds stays within [0.92, 0.98].
    covs = []
    for seed in range(100):
        r = Xoshiro(seed)
        noise = np.array([0.01 * r.normal() for _ in range(n)])
        ys = 0.1 + 0.0003 * t + 0.05 * np.sin(2 * math.pi * t / PERIOD) + noise
        c, s = fit(ys)
        yhat = design(n) @ c
        cov = np.mean(np.abs(ys - yhat) <= 1.96 * s)
        covs.append(cov)
    print(f"mean 95%-band coverage over 100 seeds: {np.mean(covs):.4f} "
          f"(min {min(covs):.3f}, max {max(covs):.3f})")
    assert 0.92 <= np.mean(covs) <= 0.98


if __name__ == "__main__":
    main()
