"""Nonnegative differences of scaled symmetric measures, and inequality chains.

Each of the fifteen differences ``D_XY = a X - b Y`` is itself an
f-divergence whose generating function ``a f_X - b f_Y`` is convex.  The
closed-form second derivatives below all factor as ``(sqrt(x) - 1)**2``
times a function positive on ``(0, inf)``; that cofactor is exposed as
``reduced_d2``.

Aliases ``D1`` .. ``D15`` follow the order of :data:`DIFFERENCES`.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math
from typing import Callable

import numpy as np

from .csiszar import catalog
from .distributions import make_distribution
from .errors import DomainError
from .measures import MEASURES, MeasureId

CHAIN_TOLERANCE = 1e-10


class DiffId(str, Enum):
    D_PSIT = "D_PSIT"
    D_PSIJ = "D_PSIJ"
    D_PSIH = "D_PSIH"
    D_PSII = "D_PSII"
    D_PSIDELTA = "D_PSIDELTA"
    D_TJ = "D_TJ"
    D_TH = "D_TH"
    D_TI = "D_TI"
    D_TDELTA = "D_TDELTA"
    D_JH = "D_JH"
    D_JI = "D_JI"
    D_JDELTA = "D_JDELTA"
    D_HI = "D_HI"
    D_HDELTA = "D_HDELTA"
    D_IDELTA = "D_IDELTA"


def _root_minus_one(x):
    """sqrt(x) - 1 without cancellation near x = 1."""
    return (x - 1) / (np.sqrt(x) + 1)


def _x(x):
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        bad = x[~(x > 0)].ravel()[0]
        raise DomainError(f"second derivatives are defined for x > 0, got {bad!r}")
    return x


@dataclass(frozen=True)
class DifferenceSpec:
    id: DiffId
    alias: int
    minuend: tuple
    subtrahend: tuple
    closed_d2: Callable
    closed_reduced_d2: Callable

    @property
    def name(self):
        return self.id.value

    @property
    def alias_name(self):
        return f"D{self.alias}"

    def d2(self, x):
        out = self.closed_d2(_x(x))
        return float(out) if np.ndim(out) == 0 else out

    eval_d2 = d2

    def reduced_d2(self, x):
        out = self.closed_reduced_d2(_x(x))
        return float(out) if np.ndim(out) == 0 else out

    def coefficients(self):
        """``{measure_id: coefficient}`` of the defining linear combination."""
        (m, a), (s, b) = self.minuend, self.subtrahend
        return {m: Fraction(a), s: -Fraction(b)}

    def combination_d2(self, x):
        """Second derivative rebuilt from the catalog, for cross-checking."""
        (m, a), (s, b) = self.minuend, self.subtrahend
        fm, fs = _generator_for(m), _generator_for(s)
        return float(a) * fm.eval_d2(x) - float(b) * fs.eval_d2(x)

    def generator(self, x):
        """Difference generating function ``a f_X(x) - b f_Y(x)``."""
        (m, a), (s, b) = self.minuend, self.subtrahend
        return float(a) * _generator_for(m).eval(x) - float(b) * _generator_for(s).eval(x)


def _generator_for(measure_id):
    return catalog("F_" + measure_id.value)


def _spec(diff_id, alias, minuend, subtrahend, d2, reduced):
    (m, a), (s, b) = minuend, subtrahend
    return DifferenceSpec(
        diff_id, alias, (m, Fraction(a)), (s, Fraction(b)), d2, reduced
    )


H, DELTA, PSI, J, I, T = (
    MeasureId.H,
    MeasureId.DELTA,
    MeasureId.PSI,
    MeasureId.J,
    MeasureId.I,
    MeasureId.T,
)
_16 = Fraction(1, 16)
_8 = Fraction(1, 8)
_4 = Fraction(1, 4)

# (closed second derivative, closed second derivative / (sqrt(x) - 1)**2).
# sqrt(x) - 1 and x**1.5 - 1 are expanded through (x - 1) to keep digits near 1.
DIFFERENCES = {
    s.id: s
    for s in (
        _spec(
            DiffId.D_PSIT, 1, (PSI, _16), (T, 1),
            lambda x: (x - 1) ** 2 * (x * x + x + 1) / (8 * x**3 * (x + 1)),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x * x + x + 1) / (8 * x**3 * (x + 1)),
        ),
        _spec(
            DiffId.D_PSIJ, 2, (PSI, _16), (J, _8),
            lambda x: (x - 1) ** 2 * (x + 1) / (8 * x**3),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x + 1) / (8 * x**3),
        ),
        _spec(
            DiffId.D_PSIH, 3, (PSI, _16), (H, 1),
            lambda x: (_root_minus_one(x) * (x + np.sqrt(x) + 1)) ** 2 / (8 * x**3),
            lambda x: (x + np.sqrt(x) + 1) ** 2 / (8 * x**3),
        ),
        _spec(
            DiffId.D_PSII, 4, (PSI, _16), (I, 1),
            lambda x: (x - 1) ** 2 * (x * x + 3 * x + 1) / (8 * x**3 * (x + 1)),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x * x + 3 * x + 1) / (8 * x**3 * (x + 1)),
        ),
        _spec(
            DiffId.D_PSIDELTA, 5, (PSI, _16), (DELTA, _4),
            lambda x: (x - 1) ** 2 * (x**4 + 5 * x**3 + 12 * x**2 + 5 * x + 1)
            / (8 * x**3 * (x + 1) ** 3),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x**4 + 5 * x**3 + 12 * x**2 + 5 * x + 1)
            / (8 * x**3 * (x + 1) ** 3),
        ),
        _spec(
            DiffId.D_TJ, 6, (T, 1), (J, _8),
            lambda x: (x - 1) ** 2 / (8 * x * x * (x + 1)),
            lambda x: (np.sqrt(x) + 1) ** 2 / (8 * x * x * (x + 1)),
        ),
        _spec(
            DiffId.D_TH, 7, (T, 1), (H, 1),
            lambda x: _root_minus_one(x) ** 2 * (x + np.sqrt(x) + 1) / (4 * x * x * (x + 1)),
            lambda x: (x + np.sqrt(x) + 1) / (4 * x * x * (x + 1)),
        ),
        _spec(
            DiffId.D_TI, 8, (T, 1), (I, 1),
            lambda x: (x - 1) ** 2 / (4 * x * x * (x + 1)),
            lambda x: (np.sqrt(x) + 1) ** 2 / (4 * x * x * (x + 1)),
        ),
        _spec(
            DiffId.D_TDELTA, 9, (T, 1), (DELTA, _4),
            lambda x: (x - 1) ** 2 * (x * x + 4 * x + 1) / (4 * x * x * (x + 1) ** 3),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x * x + 4 * x + 1) / (4 * x * x * (x + 1) ** 3),
        ),
        _spec(
            DiffId.D_JH, 10, (J, _8), (H, 1),
            lambda x: _root_minus_one(x) ** 2 / (8 * x * x),
            lambda x: 1 / (8 * x * x),
        ),
        _spec(
            DiffId.D_JI, 11, (J, _8), (I, 1),
            lambda x: (x - 1) ** 2 / (8 * x * x * (x + 1)),
            lambda x: (np.sqrt(x) + 1) ** 2 / (8 * x * x * (x + 1)),
        ),
        _spec(
            DiffId.D_JDELTA, 12, (J, _8), (DELTA, _4),
            lambda x: (x - 1) ** 2 * (x * x + 6 * x + 1) / (8 * x * x * (x + 1) ** 3),
            lambda x: (np.sqrt(x) + 1) ** 2 * (x * x + 6 * x + 1) / (8 * x * x * (x + 1) ** 3),
        ),
        _spec(
            DiffId.D_HI, 13, (H, 1), (I, 1),
            lambda x: _root_minus_one(x) ** 2 / (4 * x**1.5 * (x + 1)),
            lambda x: 1 / (4 * x**1.5 * (x + 1)),
        ),
        _spec(
            DiffId.D_HDELTA, 14, (H, 1), (DELTA, _4),
            lambda x: _root_minus_one(x) ** 2 * ((np.sqrt(x) + 1) ** 2 * (x + 1) + 4 * x)
            / (4 * x**1.5 * (x + 1) ** 3),
            lambda x: ((np.sqrt(x) + 1) ** 2 * (x + 1) + 4 * x) / (4 * x**1.5 * (x + 1) ** 3),
        ),
        _spec(
            DiffId.D_IDELTA, 15, (I, 1), (DELTA, _4),
            lambda x: (x - 1) ** 2 / (2 * x * (x + 1) ** 3),
            lambda x: (np.sqrt(x) + 1) ** 2 / (2 * x * (x + 1) ** 3),
        ),
    )
}

_BY_ALIAS = {f"D{s.alias}": s for s in DIFFERENCES.values()}


def get_difference(key):
    """Look up a difference by id (``"D_TJ"``) or alias (``"D6"``)."""
    if isinstance(key, DifferenceSpec):
        return key
    if isinstance(key, str) and key.upper() in _BY_ALIAS:
        return _BY_ALIAS[key.upper()]
    return DIFFERENCES[DiffId(key)]


def second_derivative(spec, x):
    """Closed-form second derivative of the difference's generating function."""
    return get_difference(spec).d2(x)


def difference_value(spec, p, q):
    """``a X(P||Q) - b Y(P||Q)`` from the two base measures."""
    spec = get_difference(spec)
    p, q = make_distribution(p), make_distribution(q)
    (m, a), (s, b) = spec.minuend, spec.subtrahend
    return math.fsum([float(a) * MEASURES[m](p, q), -float(b) * MEASURES[s](p, q)])


# -- inequality chains -------------------------------------------------------


@dataclass(frozen=True)
class Expression:
    """A rational linear combination of measure values."""

    label: str
    terms: tuple  # ((MeasureId, Fraction), ...)

    def evaluate(self, values):
        return math.fsum(float(c) * values[m] for m, c in self.terms)

    def measures(self):
        return {m for m, _ in self.terms}


def expr(label, *parts):
    """Build an expression from ``(coefficient, measure or difference)`` parts."""
    acc = {}
    for coef, item in parts:
        coef = Fraction(coef)
        if isinstance(item, MeasureId):
            acc[item] = acc.get(item, 0) + coef
        else:
            for m, c in get_difference(item).coefficients().items():
                acc[m] = acc.get(m, 0) + coef * c
    terms = tuple((m, c) for m, c in acc.items() if c != 0)
    return Expression(label, terms)


def dexpr(coef, diff):
    """Expression for ``coef * D`` labelled with the difference's alias."""
    spec = get_difference(diff)
    coef = Fraction(coef)
    label = spec.name if coef == 1 else f"{coef}*{spec.name}"
    return expr(label, (coef, spec.id))


ZERO = Expression("0", ())


@dataclass(frozen=True)
class Chain:
    """Ordered expressions ``e0 rel0 e1 rel1 e2 ...``; ``rel`` is ``<=`` or ``=``."""

    id: str
    group: str
    expressions: tuple
    relations: tuple = None

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", ("<=",) * (len(self.expressions) - 1))
        if len(self.relations) != len(self.expressions) - 1:
            raise ValueError(f"chain {self.id}: relation count does not match")

    @property
    def links(self):
        return len(self.relations)

    def measures(self):
        out = set()
        for e in self.expressions:
            out |= e.measures()
        return out

    def evaluate(self, values):
        """Return ``(expression values, link slacks, tolerance)`` on one pair.

        Slack is ``rhs - lhs`` for ``<=`` links and ``-|rhs - lhs|`` for
        equalities.  The tolerance scales with the largest expression.
        """
        vals = [e.evaluate(values) for e in self.expressions]
        slacks = []
        for rel, lhs, rhs in zip(self.relations, vals, vals[1:]):
            if rel == "=":
                slacks.append(-abs(rhs - lhs))
            else:
                slacks.append(rhs - lhs)
        scale = max([1.0] + [abs(v) for v in vals])
        return vals, slacks, CHAIN_TOLERANCE * scale

    def __str__(self):
        out = [self.expressions[0].label]
        for rel, e in zip(self.relations, self.expressions[1:]):
            out += [rel, e.label]
        return " ".join(out)


def _m(coef, measure, label=None):
    coef = Fraction(coef)
    if label is None:
        label = measure.value if coef == 1 else f"{coef}*{measure.value}"
    return expr(label, (coef, measure))


DSTAR = MeasureId.DSTAR
D = DiffId


def chain_definitions():
    """Every inequality chain the audit knows about, in report order."""
    psi16 = _m(_16, PSI)
    chains = [
        Chain("BASIC", "BASIC", (
            _m(_4, DELTA), _m(1, I), _m(1, H), _m(_8, J), _m(1, T), psi16,
        )),
        Chain("OBVIOUS_PSI", "OBVIOUS", tuple(
            dexpr(1, d) for d in (D.D_PSIT, D.D_PSIJ, D.D_PSIH, D.D_PSII, D.D_PSIDELTA)
        )),
        Chain("OBVIOUS_T", "OBVIOUS", tuple(
            dexpr(1, d) for d in (D.D_TJ, D.D_TH, D.D_TI, D.D_TDELTA)
        )),
        Chain("OBVIOUS_J", "OBVIOUS", tuple(dexpr(1, d) for d in (D.D_JH, D.D_JI, D.D_JDELTA))),
        Chain("OBVIOUS_H", "OBVIOUS", tuple(dexpr(1, d) for d in (D.D_HI, D.D_HDELTA))),
        Chain(
            "EQUALITY", "EQUALITY",
            (dexpr(1, D.D_JI), dexpr(Fraction(1, 2), D.D_TI), dexpr(1, D.D_TJ)),
            ("=", "="),
        ),
        Chain("REFINE_A", "REFINE", (
            dexpr(1, D.D_IDELTA), dexpr(Fraction(2, 3), D.D_HDELTA),
            dexpr(2, D.D_HI), dexpr(1, D.D_TJ),
        )),
        Chain("REFINE_B", "REFINE", (
            dexpr(1, D.D_IDELTA), dexpr(Fraction(2, 3), D.D_HDELTA),
            dexpr(Fraction(1, 2), D.D_JDELTA), dexpr(Fraction(1, 3), D.D_TDELTA),
            dexpr(1, D.D_TJ),
        )),
        Chain("REFINE_C", "REFINE", (
            dexpr(1, D.D_TJ), dexpr(Fraction(2, 3), D.D_TH), dexpr(2, D.D_JH),
            dexpr(Fraction(1, 6), D.D_PSIDELTA), dexpr(Fraction(1, 5), D.D_PSII),
            dexpr(Fraction(2, 9), D.D_PSIH), dexpr(Fraction(1, 4), D.D_PSIJ),
            dexpr(Fraction(1, 3), D.D_PSIT),
        )),
    ]

    h_delta = expr("2/3*H + 1/12*DELTA", (Fraction(2, 3), H), (Fraction(1, 12), DELTA))
    j_i = expr("1/16*J + 1/2*I", (_16, J), (Fraction(1, 2), I))
    t_h = expr("(T + 2*H)/3", (Fraction(1, 3), T), (Fraction(2, 3), H))
    t_delta = expr("2/3*T + 1/12*DELTA", (Fraction(2, 3), T), (Fraction(1, 12), DELTA))
    psi_j = expr("(PSI/2 + 3*J)/32", (Fraction(1, 64), PSI), (Fraction(3, 32), J))
    psi_i = expr("(PSI/16 + 9*I)/10", (Fraction(1, 160), PSI), (Fraction(9, 10), I))
    psi_h = expr("(PSI/16 + 8*H)/9", (Fraction(1, 144), PSI), (Fraction(8, 9), H))
    j8 = _m(_8, J)

    chains.append(Chain("FINAL", "FINAL", (
        _m(_4, DELTA), _m(1, I), h_delta, _m(1, H), j_i, t_h, j8, t_delta, _m(1, T),
        psi_j, psi16,
    )))

    remarks = [
        ("REMARK_H_DELTA", (_m(1, I), h_delta, _m(1, H))),
        ("REMARK_J_I", (_m(1, H), j_i, j8)),
        ("REMARK_J_DELTA", (
            _m(1, H),
            expr("3/32*J + 1/16*DELTA", (Fraction(3, 32), J), (_16, DELTA)),
            j8,
        )),
        ("REMARK_T_DELTA", (j8, t_delta, _m(1, T))),
        ("REMARK_T_H", (_m(1, H), t_h, j8)),
        ("REMARK_PSI_H_J_DELTA", (
            expr("3/2*J + 1/4*DELTA", (Fraction(3, 2), J), (_4, DELTA)),
            expr("PSI/16 + 12*H", (_16, PSI), (12, H)),
        )),
        ("REMARK_PSI_DELTA", (
            _m(1, I),
            expr("(PSI/16 + 5/4*DELTA)/6", (Fraction(1, 96), PSI), (Fraction(5, 24), DELTA)),
            psi16,
        )),
        ("REMARK_PSI_I", (_m(1, H), psi_i, psi16)),
        ("REMARK_PSI_H", (j8, psi_h, psi16)),
        ("REMARK_PSI_J", (_m(1, T), psi_j, psi16)),
    ]
    chains += [Chain(cid, "REMARKS", exprs) for cid, exprs in remarks]

    chains += [
        Chain("DRAGOMIR_J", "DRAGOMIR", (
            ZERO,
            expr("J/2 - DELTA", (Fraction(1, 2), J), (-1, DELTA)),
            _m(Fraction(1, 12), DSTAR),
        )),
        Chain("DRAGOMIR_PSI", "DRAGOMIR", (
            ZERO,
            expr("PSI/2 - J", (Fraction(1, 2), PSI), (-1, J)),
            _m(Fraction(1, 6), DSTAR),
        )),
        Chain("DRAGOMIR_IMPROVED", "DRAGOMIR_IMPROVED", (
            dexpr(1, D.D_JDELTA), dexpr(Fraction(1, 2), D.D_PSIJ),
            dexpr(Fraction(2, 3), D.D_PSIT), _m(Fraction(1, 96), DSTAR),
        )),
        Chain("EXTRA_J", "EXTRA", (
            j8,
            expr(
                "(PSI/16 + 12*H - DELTA/4)/12",
                (Fraction(1, 192), PSI), (1, H), (Fraction(-1, 48), DELTA),
            ),
            psi_h,
            psi16,
        )),
        Chain("EXTRA_H", "EXTRA", (_m(1, H), psi_i, psi_h, psi16)),
        Chain("DSTAR_CAP", "DSTAR_CAP", (dexpr(1, D.D_PSIT), _m(Fraction(1, 64), DSTAR))),
    ]
    return chains


def select_chains(selection="all"):
    """Resolve chain ids and group names (comma separated or iterable)."""
    chains = chain_definitions()
    if isinstance(selection, str):
        selection = [s.strip() for s in selection.split(",") if s.strip()]
    selection = [s.upper() for s in selection]
    if "ALL" in selection:
        return chains
    picked = []
    for key in selection:
        hits = [c for c in chains if c.id == key or c.group == key]
        if not hits:
            raise KeyError(key)
        picked += [c for c in hits if c not in picked]
    return [c for c in chains if c in picked]


def evaluate_chain(chain, p, q):
    """Evaluate one chain on a pair; see :meth:`Chain.evaluate`."""
    p, q = make_distribution(p), make_distribution(q)
    values = {m: MEASURES[m](p, q) for m in chain.measures()}
    return chain.evaluate(values)
