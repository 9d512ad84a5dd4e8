"""roadcalc: exact min-plus bounds for ring roads and tree road networks."""

from .curve import INF, Curve, CurveError, Seg, from_points
from .minplus import (
    UnboundedError,
    atom,
    closure,
    conv,
    deconv,
    delta,
    e,
    eps,
    gamma,
    hdev,
    min_plus_add,
    positive_shift,
    rate_latency,
    residual,
    staircase,
    token_bucket,
    vdev,
    zero,
)


def eval(f: Curve, t):  # noqa: A001 - mirrors the algebra's vocabulary
    """Exact value f(t); 0 for t < 0."""
    return f(t)


__version__ = "0.1.0"

__all__ = [
    "INF",
    "Curve",
    "CurveError",
    "Seg",
    "UnboundedError",
    "atom",
    "closure",
    "conv",
    "deconv",
    "delta",
    "e",
    "eps",
    "eval",
    "from_points",
    "gamma",
    "hdev",
    "min_plus_add",
    "positive_shift",
    "rate_latency",
    "residual",
    "staircase",
    "token_bucket",
    "vdev",
    "zero",
]
