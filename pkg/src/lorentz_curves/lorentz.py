"""
Lorentzian linear algebra on 3-vectors.

Vectors are ordered ``(x0, x1, x2)`` with the timelike coordinate first, so the
metric is ``diag(-1, +1, +1)``.  The helpers below only index and multiply, so
they accept float arrays as well as object arrays whose entries are
:class:`~lorentz_curves.jet.Jet` instances.
"""

from __future__ import annotations

import enum

import numpy as np

ETA = np.array([-1.0, 1.0, 1.0])

#: relative tolerance for calling a vector lightlike
TOL_NULL = 1e-9


class CausalClass(enum.Enum):
    SPACELIKE = "Spacelike"
    TIMELIKE = "Timelike"
    LIGHTLIKE = "Lightlike"


def vec3(x0, x1, x2) -> np.ndarray:
    """Build a finite float 3-vector."""
    v = np.array([x0, x1, x2], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector component in {v!r}")
    return v


def metric_g(x, y):
    """Lorentzian inner product ``-x0*y0 + x1*y1 + x2*y2``."""
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def lorentz_norm(x) -> float:
    return float(np.sqrt(abs(metric_g(x, x))))


def causal_class(v, scale: float | None = None, tol: float = TOL_NULL) -> CausalClass:
    """Classify ``v`` by the sign of ``g(v, v)``.

    Parameters
    ----------
    v : array_like
        Vector to classify.
    scale : float, optional
        Characteristic magnitude against which ``|g(v, v)|`` is judged; the
        squared Euclidean norm of ``v`` when omitted.
    tol : float
        Relative band around zero treated as lightlike.

    Notes
    -----
    The zero vector is lightlike.
    """
    v = np.asarray(v, dtype=float)
    if scale is None:
        scale = float(v @ v)
    q = metric_g(v, v)
    if abs(q) <= tol * scale:
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE if q > 0 else CausalClass.TIMELIKE


def sign_of(q: float) -> int:
    """Causal sign (+1 or -1) of a non-zero squared norm."""
    return 1 if q > 0 else -1


def _cross(x, y):
    return [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]


def lorentz_cross(x, y):
    """Lorentz cross product.

    The unique bilinear map with ``g(lorentz_cross(x, y), z) == det3(x, y, z)``
    for every ``z``: the Euclidean cross product with its time component negated.
    """
    c = _cross(x, y)
    c[0] = -c[0]
    return np.array(c, dtype=float if _all_float(c) else object)


def det3(a, b, c):
    """Coordinate determinant of the 3x3 matrix with rows ``a``, ``b``, ``c``."""
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _all_float(items) -> bool:
    return all(isinstance(v, (float, int, np.floating, np.integer)) for v in items)
