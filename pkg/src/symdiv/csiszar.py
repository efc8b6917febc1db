"""Generic Csiszar f-divergence and the catalog of generating functions.

``csiszar_divergence(f, P, Q) = sum_i q_i f(p_i / q_i)``.  Each catalog entry
carries closed-form first and second derivatives.  Second derivatives
that vanish at ``x = 1`` also carry ``reduced_d2``, the second derivative
divided by ``(sqrt(x) - 1)**2``, which stays positive there and lets
ratios of such functions be evaluated at ``x = 1``.

The quartic entry ``F_DSTAR``, ``f(x) = (x - 1)**4 / x**1.5``, reproduces
``sum (p - q)**4 / (p q)**1.5``.  Its derivatives were obtained once with
sympy (``diff`` then ``factor``)::

    f'(x)  = (x - 1)**3 (5x + 3) / (2 x**2.5)
    f''(x) = 3 (x - 1)**2 (5x**2 + 6x + 5) / (4 x**3.5)
"""

from dataclasses import dataclass
from enum import Enum
import math
from typing import Callable, Optional

import numpy as np

from .distributions import check_pair
from .errors import DomainError
from .measures import MeasureId

MIN_ARGUMENT = 1e-300
_LOG4 = math.log(4.0)


class GeneratorId(str, Enum):
    F_H = "F_H"
    F_DELTA = "F_DELTA"
    F_PSI = "F_PSI"
    F_J = "F_J"
    F_I = "F_I"
    F_T = "F_T"
    F_DSTAR = "F_DSTAR"


def _domain(x):
    x = np.asarray(x, dtype=float)
    if not np.all(x >= MIN_ARGUMENT):
        bad = x[~(x >= MIN_ARGUMENT)].ravel()[0]
        raise DomainError(f"generating functions need x >= {MIN_ARGUMENT:g}, got {bad!r}")
    return x


def _scalar_or_array(fn):
    def wrapped(x):
        out = fn(_domain(x))
        return float(out) if np.ndim(out) == 0 else out

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _logs(x):
    """(u, atanh(u), log1p(-u**2)) for u = (x - 1) / (x + 1), without cancellation."""
    u = (x - 1.0) / (x + 1.0)
    small = np.abs(u) < 0.5
    su = np.where(small, u, 0.0)
    a = np.where(small, np.arctanh(su), 0.5 * np.log(x))
    g = np.where(small, np.log1p(-su * su), _LOG4 + np.log(x) - 2.0 * np.log(x + 1.0))
    return u, a, g


@_scalar_or_array
def _f_h(x):
    r = np.sqrt(x) + 1.0
    return 0.5 * (x - 1.0) ** 2 / (r * r)


@_scalar_or_array
def _d1_h(x):
    s = np.sqrt(x)
    return (x - 1.0) / ((s + 1.0) * 2.0 * s)


@_scalar_or_array
def _d2_h(x):
    return 1.0 / (4.0 * x * np.sqrt(x))


@_scalar_or_array
def _f_delta(x):
    return (x - 1.0) ** 2 / (x + 1.0)


@_scalar_or_array
def _d1_delta(x):
    return (x - 1.0) * (x + 3.0) / (x + 1.0) ** 2


@_scalar_or_array
def _d2_delta(x):
    return 8.0 / (x + 1.0) ** 3


@_scalar_or_array
def _f_psi(x):
    return (x - 1.0) ** 2 * (x + 1.0) / x


@_scalar_or_array
def _d1_psi(x):
    return (x - 1.0) * (2.0 * x * x + x + 1.0) / (x * x)


@_scalar_or_array
def _d2_psi(x):
    return 2.0 * (x**3 + 1.0) / x**3


@_scalar_or_array
def _f_j(x):
    _, a, _ = _logs(x)
    return 2.0 * (x - 1.0) * a


@_scalar_or_array
def _d1_j(x):
    return 1.0 - 1.0 / x + np.log(x)


@_scalar_or_array
def _d2_j(x):
    return (x + 1.0) / (x * x)


@_scalar_or_array
def _f_i(x):
    u, a, g = _logs(x)
    return 0.5 * (x + 1.0) * (u * a + 0.5 * g)


@_scalar_or_array
def _d1_i(x):
    return 0.5 * np.log(2.0 * x / (x + 1.0))


@_scalar_or_array
def _d2_i(x):
    return 1.0 / (2.0 * x * (x + 1.0))


@_scalar_or_array
def _f_t(x):
    _, _, g = _logs(x)
    return -0.25 * (x + 1.0) * g


@_scalar_or_array
def _d1_t(x):
    return 0.25 * (1.0 - 1.0 / x + 2.0 * np.log((x + 1.0) / (2.0 * np.sqrt(x))))


@_scalar_or_array
def _d2_t(x):
    return (x * x + 1.0) / (4.0 * x * x * (x + 1.0))


@_scalar_or_array
def _f_dstar(x):
    return (x - 1.0) ** 4 / x**1.5


@_scalar_or_array
def _d1_dstar(x):
    return (x - 1.0) ** 3 * (5.0 * x + 3.0) / (2.0 * x**2.5)


@_scalar_or_array
def _d2_dstar(x):
    return 3.0 * (x - 1.0) ** 2 * (5.0 * x * x + 6.0 * x + 5.0) / (4.0 * x**3.5)


@_scalar_or_array
def _reduced_d2_dstar(x):
    return 3.0 * (np.sqrt(x) + 1.0) ** 2 * (5.0 * x * x + 6.0 * x + 5.0) / (4.0 * x**3.5)


@dataclass(frozen=True)
class GeneratingFunction:
    id: GeneratorId
    measure_id: MeasureId
    eval: Callable
    eval_d1: Callable
    eval_d2: Callable
    reduced_d2: Optional[Callable] = None

    @property
    def name(self):
        return self.id.value

    def __call__(self, x):
        return self.eval(x)


_CATALOG = {
    g.id: g
    for g in (
        GeneratingFunction(GeneratorId.F_H, MeasureId.H, _f_h, _d1_h, _d2_h),
        GeneratingFunction(GeneratorId.F_DELTA, MeasureId.DELTA, _f_delta, _d1_delta, _d2_delta),
        GeneratingFunction(GeneratorId.F_PSI, MeasureId.PSI, _f_psi, _d1_psi, _d2_psi),
        GeneratingFunction(GeneratorId.F_J, MeasureId.J, _f_j, _d1_j, _d2_j),
        GeneratingFunction(GeneratorId.F_I, MeasureId.I, _f_i, _d1_i, _d2_i),
        GeneratingFunction(GeneratorId.F_T, MeasureId.T, _f_t, _d1_t, _d2_t),
        GeneratingFunction(
            GeneratorId.F_DSTAR, MeasureId.DSTAR, _f_dstar, _d1_dstar, _d2_dstar, _reduced_d2_dstar
        ),
    )
}

BASE_GENERATORS = tuple(g for g in GeneratorId if g is not GeneratorId.F_DSTAR)


def catalog(gen_id):
    """Look up a generating function by id (enum member or its string)."""
    return _CATALOG[GeneratorId(gen_id)]


def csiszar_divergence(f, p, q):
    """Sum of ``q_i f(p_i / q_i)`` over the atoms of a distribution pair."""
    p, q = check_pair(p, q)
    return math.fsum(q * np.asarray(f.eval(p / q)))
