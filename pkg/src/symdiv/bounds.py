"""Extrema of second-derivative ratios and the sandwich bounds they imply.

If ``m <= f1''(x) / f2''(x) <= M`` on ``(0, inf)`` with ``f2'' > 0``, then
``m C_f2 <= C_f1 <= M C_f2`` for every distribution pair.  The constants are
estimated numerically: a dense log-spaced scan locates the extremum and a
golden-section search polishes it.

Many ratios here are ``0/0`` at ``x = 1`` because both second derivatives
carry a ``(sqrt(x) - 1)**2`` factor.  Within ``REMOVABLE_RADIUS`` of 1 the
ratio of the ``reduced_d2`` cofactors is used instead.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
import math
from typing import Optional

import numpy as np

from .csiszar import GeneratingFunction, GeneratorId, catalog, csiszar_divergence
from .differences import DifferenceSpec, difference_value, get_difference
from .distributions import make_distribution
from .errors import DenominatorVanishes, NonFiniteRatio

REMOVABLE_RADIUS = 1e-6
VERIFY_TOLERANCE = 1e-6
SANDWICH_TOLERANCE = 1e-10
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

INFIMUM = "infimum"
SUPREMUM = "supremum"


@dataclass(frozen=True)
class GridSpec:
    x_min: float = 1e-8
    x_max: float = 1e8
    points: int = 200_001
    x_tol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.x_min < self.x_max) or self.points < 3:
            raise ValueError(f"bad grid {self}")

    def grid(self):
        return np.logspace(math.log10(self.x_min), math.log10(self.x_max), self.points)


def resolve_term(name):
    """Map ``F_*``, ``D_*``, ``D1``..``D15`` or ``DSTAR`` to its function object."""
    if isinstance(name, (GeneratingFunction, DifferenceSpec)):
        return name
    key = name.strip().upper()
    if key == "DSTAR":
        key = "F_DSTAR"
    if key.startswith("F_"):
        return catalog(key)
    return get_difference(key)


def term_label(term):
    if isinstance(term, GeneratingFunction) and term.id is GeneratorId.F_DSTAR:
        return "DSTAR"
    return term.name


def _reduced(term):
    return term.reduced_d2 if term.reduced_d2 is not None else None


@dataclass(frozen=True)
class RatioFunction:
    """``x -> f1''(x) / f2''(x)`` for two generating or difference functions."""

    numerator: object
    denominator: object

    @classmethod
    def parse(cls, ratio_id):
        num, sep, den = ratio_id.partition("/")
        if not sep:
            raise KeyError(ratio_id)
        return cls(resolve_term(num), resolve_term(den))

    @property
    def id(self):
        return f"{term_label(self.numerator)}/{term_label(self.denominator)}"

    def _cancels(self):
        return _reduced(self.numerator) is not None and _reduced(self.denominator) is not None

    def eval(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = self.numerator.eval_d2(x) / self.denominator.eval_d2(x)
            if self._cancels():
                near = np.abs(x - 1.0) < REMOVABLE_RADIUS
                if np.any(near):
                    xs = np.where(near, x, 1.0)
                    red = self.numerator.reduced_d2(xs) / self.denominator.reduced_d2(xs)
                    raw = np.where(near, red, raw)
        return float(raw[0]) if scalar else raw

    __call__ = eval

    def check_denominator(self, x):
        """Raise :class:`DenominatorVanishes` unless ``f2'' > 0`` on ``x``."""
        den = np.asarray(self.denominator.eval_d2(x))
        if _reduced(self.denominator) is not None:
            near = np.abs(x - 1.0) < REMOVABLE_RADIUS
            den = np.where(near, self.denominator.reduced_d2(np.where(near, x, 1.0)), den)
        bad = ~(den > 0)
        if np.any(bad):
            raise DenominatorVanishes(
                f"{self.id}: denominator second derivative is not positive at x={x[bad][0]!r}"
            )


@dataclass
class BoundCertificate:
    numerator: str
    denominator: str
    kind: str
    numeric_estimate: float
    attaining_x: float
    grid: GridSpec
    analytic_value: Optional[Fraction] = None
    inequality: Optional[str] = None
    verified: Optional[bool] = None

    @property
    def ratio_id(self):
        return f"{self.numerator}/{self.denominator}"

    def to_dict(self):
        return {
            "num": self.numerator,
            "den": self.denominator,
            "kind": self.kind,
            "estimate": self.numeric_estimate,
            "attaining_x": self.attaining_x,
            "analytic": None if self.analytic_value is None else float(self.analytic_value),
            "analytic_exact": None if self.analytic_value is None else str(self.analytic_value),
            "inequality": self.inequality,
            "verified": self.verified,
            "grid": asdict(self.grid),
        }


def golden_section(fn, lo, hi, tol=1e-12, max_iter=200):
    """Maximize a unimodal ``fn`` on ``[lo, hi]``; return ``(x, fn(x))``."""
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def estimate_extremum(ratio, kind, grid=None):
    """Locate the infimum or supremum of ``ratio`` over the grid's range."""
    if kind not in (INFIMUM, SUPREMUM):
        raise ValueError(f"kind must be {INFIMUM!r} or {SUPREMUM!r}, got {kind!r}")
    grid = grid or GridSpec()
    xs = grid.grid()
    ratio.check_denominator(xs)
    vals = ratio.eval(xs)
    if not np.all(np.isfinite(vals)):
        bad = xs[~np.isfinite(vals)][0]
        raise NonFiniteRatio(f"{ratio.id}: ratio is not finite at x={bad!r}")

    sign = 1.0 if kind == SUPREMUM else -1.0
    i = int(np.argmax(sign * vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    lo, hi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, xs.size - 1)])
    x, v = golden_section(lambda t: sign * ratio.eval(t), lo, hi, tol=grid.x_tol)
    v = sign * v
    if sign * v > sign * best_v:
        best_x, best_v = x, v
    return BoundCertificate(
        numerator=term_label(ratio.numerator),
        denominator=term_label(ratio.denominator),
        kind=kind,
        numeric_estimate=best_v,
        attaining_x=best_x,
        grid=grid,
    )


@dataclass(frozen=True)
class ConstantRow:
    numerator: str
    denominator: str
    kind: str
    value: Fraction
    inequality: str

    @property
    def ratio_id(self):
        return f"{self.numerator}/{self.denominator}"

    def ratio(self):
        return RatioFunction(resolve_term(self.numerator), resolve_term(self.denominator))


def _row(num, den, kind, value, inequality):
    return ConstantRow(num, den, kind, Fraction(value), inequality)


_F = Fraction
SHARP_CONSTANTS = (
    _row("F_I", "F_DELTA", INFIMUM, _F(1, 4), "DELTA/4 <= I"),
    _row("F_I", "F_H", SUPREMUM, 1, "I <= H"),
    _row("F_J", "F_H", INFIMUM, 8, "H <= J/8"),
    _row("F_J", "F_T", SUPREMUM, 8, "J/8 <= T"),
    _row("F_T", "F_PSI", SUPREMUM, _F(1, 16), "T <= PSI/16"),
    _row("D_IDELTA", "D_HDELTA", SUPREMUM, _F(2, 3), "D_IDELTA <= 2/3 D_HDELTA"),
    _row("D_HDELTA", "D_HI", SUPREMUM, 3, "D_HDELTA <= 3 D_HI"),
    _row("D_HI", "D_TJ", SUPREMUM, _F(1, 2), "D_HI <= 1/2 D_TJ"),
    _row("D_HDELTA", "D_JDELTA", SUPREMUM, _F(3, 4), "D_HDELTA <= 3/4 D_JDELTA"),
    _row("D_JDELTA", "D_TDELTA", SUPREMUM, _F(2, 3), "D_JDELTA <= 2/3 D_TDELTA"),
    _row("D_TDELTA", "D_TJ", SUPREMUM, 3, "D_TDELTA <= 3 D_TJ"),
    _row("D_TJ", "D_TH", SUPREMUM, _F(2, 3), "D_TJ <= 2/3 D_TH"),
    _row("D_TH", "D_JH", SUPREMUM, 3, "D_TH <= 3 D_JH"),
    _row("D_JH", "D_PSIDELTA", SUPREMUM, _F(1, 12), "D_JH <= 1/12 D_PSIDELTA"),
    _row("D_PSIDELTA", "D_PSII", SUPREMUM, _F(6, 5), "D_PSIDELTA <= 6/5 D_PSII"),
    _row("D_PSII", "D_PSIH", SUPREMUM, _F(10, 9), "D_PSII <= 10/9 D_PSIH"),
    _row("D_PSIH", "D_PSIJ", SUPREMUM, _F(9, 8), "D_PSIH <= 9/8 D_PSIJ"),
    _row("D_PSIJ", "D_PSIT", SUPREMUM, _F(4, 3), "D_PSIJ <= 4/3 D_PSIT"),
    _row("D_PSIT", "DSTAR", SUPREMUM, _F(1, 64), "D_PSIT <= 1/64 DSTAR"),
)


def sharp_constants():
    """The sharp constants to certify, one row per ratio."""
    return list(SHARP_CONSTANTS)


def find_constant(ratio_id):
    """Fixture row for ``"NUM/DEN"``, accepting any spelling of the terms."""
    want = RatioFunction.parse(ratio_id).id
    for row in SHARP_CONSTANTS:
        if row.ratio().id == want:
            return row
    raise KeyError(ratio_id)


def certify(row, grid=None):
    """Estimate the extremum for a fixture row and compare with its constant."""
    cert = estimate_extremum(row.ratio(), row.kind, grid)
    cert.analytic_value = row.value
    cert.inequality = row.inequality
    cert.verified = bool(abs(cert.numeric_estimate - float(row.value)) <= VERIFY_TOLERANCE)
    return cert


def certify_all(grid=None):
    return [certify(row, grid) for row in SHARP_CONSTANTS]


# -- sandwich ----------------------------------------------------------------


def divergence_of(term, p, q):
    """``C_f(P||Q)`` for a generating function or a difference."""
    term = resolve_term(term)
    if isinstance(term, DifferenceSpec):
        return difference_value(term, p, q)
    return csiszar_divergence(term, p, q)


@dataclass(frozen=True)
class SandwichViolation:
    pair_index: int
    side: str  # "lower" or "upper"
    c1: float
    c2: float
    bound: float
    slack: float


@dataclass
class SandwichReport:
    f1: str
    f2: str
    m: float
    M: float
    pairs: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def verify_sandwich(f1, f2, m, M, pairs):
    """Check ``m C_f2 <= C_f1 <= M C_f2`` on every pair.

    ``pairs`` yields ``(P, Q)`` or ``(index, P, Q)``.  ``M`` may be
    ``math.inf`` for a one-sided check.  Each side is allowed a slack of
    ``1e-10 * max(1, |C_f2|)``; failures are returned, not raised.
    """
    if not m <= M:
        raise ValueError(f"need m <= M, got m={m!r}, M={M!r}")
    f1, f2 = resolve_term(f1), resolve_term(f2)
    report = SandwichReport(term_label(f1), term_label(f2), m, M)
    for k, item in enumerate(pairs):
        index, p, q = item if len(item) == 3 else (k, *item)
        p, q = make_distribution(p), make_distribution(q)
        c1, c2 = divergence_of(f1, p, q), divergence_of(f2, p, q)
        tol = SANDWICH_TOLERANCE * max(1.0, abs(c2))
        lower = m * c2
        if c1 - lower < -tol:
            report.violations.append(SandwichViolation(index, "lower", c1, c2, lower, c1 - lower))
        if math.isfinite(M):
            upper = M * c2
            if upper - c1 < -tol:
                report.violations.append(
                    SandwichViolation(index, "upper", c1, c2, upper, upper - c1)
                )
        report.pairs += 1
    return report


def sandwich_bounds(row):
    """``(m, M)`` for a fixture row, with the trivial bound on the other side."""
    if row.kind == SUPREMUM:
        return 0.0, float(row.value)
    return float(row.value), math.inf


def near_uniform_pairs(deltas=None):
    """Two-atom pairs ``((1/2 + d, 1/2 - d), (1/2 - d, 1/2 + d))`` with shrinking ``d``."""
    if deltas is None:
        deltas = np.logspace(-0.5, -6, 56)
    for d in deltas:
        d = float(d)
        yield make_distribution([0.5 + d, 0.5 - d]), make_distribution([0.5 - d, 0.5 + d])


def search_sharpness_violation(f1, f2, m, M, candidates=None):
    """Brute-force the near-uniform family for a pair breaking the sandwich.

    Returns the first violation found with its pair, or ``None``.  A
    constant that is attained at ``x = 1`` is sharp, so nudging it inward
    must fail on some pair close to ``P == Q``.
    """
    pairs = list(candidates if candidates is not None else near_uniform_pairs())
    report = verify_sandwich(f1, f2, m, M, pairs)
    if not report.violations:
        return None
    v = report.violations[0]
    return v, pairs[v.pair_index]
