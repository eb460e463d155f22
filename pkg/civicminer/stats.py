"""Conservative probability estimates.

The conservative estimate of a proportion with k successes in n trials is the
alpha-quantile of its Beta(k + 1, n - k + 1) posterior under a uniform prior,
i.e. the L solving I_L(k + 1, n - k + 1) = alpha. With n = 0 the posterior is
uniform and L = alpha.
"""

import math
from functools import lru_cache

from pydantic import ValidationError
from scipy import optimize, special

from .errors import DataError
from .models import BoundParams

# Absolute tolerance on the root; far below the 3-decimal display precision
BOUND_XTOL = 1e-14


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not (math.isfinite(x) and 0.0 <= x <= 1.0):
        raise DataError(f"reg_inc_beta: x={x} outside [0, 1]")
    if not (math.isfinite(a) and a > 0.0):
        raise DataError(f"reg_inc_beta: a={a} must be positive")
    if not (math.isfinite(b) and b > 0.0):
        raise DataError(f"reg_inc_beta: b={b} must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    return float(special.betainc(a, b, x))


@lru_cache(maxsize=65536)
def _lower_bound(k: int, n: int, alpha: float) -> float:
    a, b = k + 1.0, n - k + 1.0
    # f(0) = -alpha < 0 < 1 - alpha = f(1), so the bracket always holds
    return float(
        optimize.brentq(
            lambda x: special.betainc(a, b, x) - alpha,
            0.0,
            1.0,
            xtol=BOUND_XTOL,
            maxiter=500,
        )
    )


def lower_credible_bound(p: BoundParams) -> float:
    """Alpha-quantile of Beta(k + 1, n - k + 1)."""
    return _lower_bound(p.k, p.n, p.alpha)


def lower_bound(k: int, n: int, alpha: float) -> float:
    """Convenience wrapper validating raw arguments through BoundParams."""
    try:
        params = BoundParams(k=k, n=n, alpha=alpha)
    except ValidationError as exc:
        raise DataError(f"invalid bound parameters (k={k}, n={n}, alpha={alpha}): {exc.errors()[0]['msg']}") from exc
    return lower_credible_bound(params)
