"""Fit ARIMA models by exact maximum likelihood and let the search pick one.

    python3 demos/02_model_selection.py
"""

import numpy as np

from mineprod import (
    ArimaSpec,
    auto_arima,
    diagnose,
    fit_arima,
    simulate_arima,
)

# simulate a known process so we can judge the answer
y = simulate_arima(phi=[0.7], n=500, seed=1)
print(f"simulated AR(1), phi=0.7, n={y.n}")

fit = fit_arima(y, ArimaSpec(1, 0, 0))
print(f"\nfixed-order fit: phi_hat={fit.phi[0]:.4f}  "
      f"sigma2={fit.sigma2:.4f}  aic={fit.aic:.2f}")

best = auto_arima(y)
print(f"stepwise search picked ({best.spec.p},{best.spec.d},{best.spec.q}) "
      f"with aic={best.aic:.2f}")

# residual checks: whiteness and normality
rep = diagnose(best)
lb = rep.ljung_box
sw = rep.shapiro_wilk
print(f"\nLjung-Box  Q={lb.statistic:.3f}  p={lb.p_value:.4f}  "
      f"({'pass' if rep.ljung_box_pass else 'fail'} at alpha=0.05)")
print(f"Shapiro-Wilk  W={sw.statistic:.5f}  p={sw.p_value:.4f}  "
      f"({'pass' if rep.shapiro_wilk_pass else 'fail'})")

# the same machinery refuses series the order cannot be estimated from
short = simulate_arima(n=8, seed=2)
try:
    fit_arima(short, ArimaSpec(4, 0, 4))
except Exception as exc:
    print(f"\nARMA(4,4) on 8 points -> {type(exc).__name__}: {exc}")

# differencing is selected automatically for integrated series
walk = simulate_arima(d=1, n=300, seed=3)
chosen = auto_arima(walk)
print(f"\nrandom walk input: search chose d={chosen.spec.d} "
      f"({chosen.spec.p},{chosen.spec.d},{chosen.spec.q})")
print("notes:", list(chosen.notes) or "none")
