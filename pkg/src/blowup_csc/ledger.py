"""Exact exponent bookkeeping for the gluing estimates.

Every quantity is a finite sum of terms coef * eps^(a + b*delta) with a, b
rational.  The gluing radii are substituted as r = eps^((2n-1)/(2n+1)) and
R = eps^(-2/(2n+1)), so each smallness claim reduces to comparing the
smallest exponents on both sides.  No verdict ever touches a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

F = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("exponents must be exact; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


def r_exponent(n: int) -> Fraction:
    return F(2 * n - 1, 2 * n + 1)


def R_exponent(n: int) -> Fraction:
    return F(-2, 2 * n + 1)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsPower:
    """sum of coef * eps^(const + slope * delta), merged and sorted by exponent."""

    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for coef, const, slope in self.terms:
            key = (as_fraction(const), as_fraction(slope))
            merged[key] = merged.get(key, F(0)) + as_fraction(coef)
        terms = tuple(sorted(((c, a, b) for (a, b), c in merged.items() if c != 0),
                             key=lambda t: (t[1], t[2])))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def eps(cls, const, slope=0, coef=1) -> "EpsPower":
        return cls(((coef, const, slope),))

    @classmethod
    def one(cls) -> "EpsPower":
        return cls.eps(0)

    @classmethod
    def r(cls, n: int, k0, k1=0) -> "EpsPower":
        """r^(k0 + k1 delta)."""
        rho = r_exponent(n)
        return cls.eps(rho * as_fraction(k0), rho * as_fraction(k1))

    @classmethod
    def R(cls, n: int, k0, k1=0) -> "EpsPower":
        """R^(k0 + k1 delta)."""
        sig = R_exponent(n)
        return cls.eps(sig * as_fraction(k0), sig * as_fraction(k1))

    def __add__(self, other: "EpsPower") -> "EpsPower":
        return EpsPower(self.terms + other.terms)

    def __mul__(self, other: "EpsPower") -> "EpsPower":
        return EpsPower(tuple((c1 * c2, a1 + a2, b1 + b2)
                              for c1, a1, b1 in self.terms for c2, a2, b2 in other.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def depends_on_delta(self) -> bool:
        return any(b != 0 for _, _, b in self.terms)

    def exponents(self, delta=None) -> list[Fraction]:
        if self.depends_on_delta and delta is None:
            raise ValueError("expression depends on delta; pass a value")
        d = F(0) if delta is None else as_fraction(delta)
        return [a + b * d for _, a, b in self.terms]

    def leading_exponent(self, delta=None) -> Fraction:
        if self.is_zero:
            raise ValueError("zero expression has no leading exponent")
        return min(self.exponents(delta))

    def value(self, eps: float, delta=None) -> float:
        """Float evaluation for display only."""
        return sum(float(c) * eps ** float(q) for (c, _, _), q in zip(self.terms, self.exponents(delta)))

    def __str__(self):
        parts = []
        for c, a, b in self.terms:
            q = str(a) if b == 0 else f"{a}{'+' if b > 0 else '-'}{abs(b)}*delta"
            parts.append(("" if c == 1 else f"{c}*") + f"eps^({q})")
        return " + ".join(parts) if parts else "0"


def exponent_gap(lhs: EpsPower, rhs: EpsPower, delta=None) -> Fraction:
    """Leading exponent of lhs minus that of rhs; positive means lhs << rhs as eps -> 0."""
    if lhs.is_zero or rhs.is_zero:
        raise ValueError("exponent_gap needs nonzero expressions")
    return lhs.leading_exponent(delta) - rhs.leading_exponent(delta)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) of rationals; None marks an infinite end."""

    lo: Fraction | None = None
    hi: Fraction | None = None

    @property
    def empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo >= self.hi

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return (not self.empty and (self.lo is None or x > self.lo)
                and (self.hi is None or x < self.hi))

    def contains_interval(self, other: "Interval") -> bool:
        if other.empty:
            return True
        lo_ok = self.lo is None or (other.lo is not None and other.lo >= self.lo)
        hi_ok = self.hi is None or (other.hi is not None and other.hi <= self.hi)
        return lo_ok and hi_ok

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.lo if other.lo is None else other.lo if self.lo is None else max(self.lo, other.lo)
        hi = self.hi if other.hi is None else other.hi if self.hi is None else min(self.hi, other.hi)
        return Interval(lo, hi)

    @property
    def midpoint(self) -> Fraction:
        if self.empty or self.lo is None or self.hi is None:
            raise ValueError(f"no midpoint for {self}")
        return (self.lo + self.hi) / 2

    def __str__(self):
        if self.empty:
            return "empty"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"({lo}, {hi})"


def base_window(n: int) -> Interval:
    """Default weight window for the glued side: (4-2n, 5-2n), and (0, 2/3) for n = 2."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n == 2:
        return Interval(F(0), F(2, 3))
    return Interval(F(4 - 2 * n), F(5 - 2 * n))


MODEL_WINDOW = Interval(F(0), F(1))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Callable[[int], EpsPower]
    rhs: Callable[[int], EpsPower]
    relation: str  # "<<" or "->0"
    claim: str
    variable: str = "delta"  # "delta" or "delta_model"
    asserted: bool = True


INEQUALITIES = (
    Inequality("i.a", lambda n: EpsPower.eps(2 * n - 2) * EpsPower.r(n, 6 - 4 * n, -1),
               lambda n: EpsPower.one(), "->0", "eps^(2n-2) r^(6-4n-delta) -> 0"),
    Inequality("i.b", lambda n: EpsPower.eps(2 * n - 2) * EpsPower.r(n, 2 - 2 * n),
               lambda n: EpsPower.one(), "->0", "eps^(2n-2) r^(2-2n) -> 0"),
    Inequality("ii", lambda n: EpsPower.r(n, 5) + EpsPower.eps(4 * n - 4) * EpsPower.r(n, 10 - 6 * n, -1),
               lambda n: EpsPower.r(n, 4), "<<", "r^5 + eps^(4n-4) r^(10-6n-delta) << r^4"),
    Inequality("iii", lambda n: EpsPower.r(n, 6, -1), lambda n: EpsPower.r(n, 2 * n + 1), "<<",
               "r^(6-delta) << r^(2n+1)"),
    Inequality("iv.a", lambda n: EpsPower.R(n, 2 - 2 * n), lambda n: EpsPower.R(n, 3 - 2 * n, -1), "<<",
               "R^(2-2n) << R^(3-2n-delta)", variable="delta_model"),
    Inequality("iv.b", lambda n: EpsPower.R(n, 4 - 4 * n), lambda n: EpsPower.R(n, 3 - 2 * n, -1), "<<",
               "R^(4-4n) << R^(3-2n-delta)", variable="delta_model"),
    Inequality("iv.c", lambda n: EpsPower.R(n, 3 - 2 * n, -1), lambda n: EpsPower.one(), "->0",
               "R^(3-2n-delta) -> 0", variable="delta_model"),
)

BY_NAME = {ineq.name: ineq for ineq in INEQUALITIES}


def _lookup(entries):
    if entries is None:
        return list(INEQUALITIES)
    out = []
    for e in entries:
        if isinstance(e, Inequality):
            out.append(e)
        elif e in BY_NAME:
            out.append(BY_NAME[e])
        else:
            group = [q for q in INEQUALITIES if q.name.split(".")[0] == e]
            if not group:
                raise KeyError(f"unknown inequality {e!r}")
            out.extend(group)
    return out


@dataclass
class LedgerRow:
    name: str
    claim: str
    variable: str
    lhs_exponent: Fraction
    rhs_exponent: Fraction
    gap: Fraction
    passed: bool
    in_window: bool

    def to_dict(self):
        return {"name": self.name, "claim": self.claim, "variable": self.variable,
                "lhs_exponent": str(self.lhs_exponent), "rhs_exponent": str(self.rhs_exponent),
                "gap": str(self.gap), "verdict": "pass" if self.passed else "fail",
                "in_window": self.in_window}


@dataclass
class EstimateLedger:
    n: int
    delta: Fraction
    delta_model: Fraction
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str) -> LedgerRow:
        return next(r for r in self.rows if r.name == name)

    def failing(self) -> list[str]:
        return [r.name for r in self.rows if not r.passed]

    def to_dict(self):
        return {"n": self.n, "delta": str(self.delta), "delta_model": str(self.delta_model),
                "passed": self.passed, "rows": [r.to_dict() for r in self.rows]}


def verify_ledger(n: int, delta, delta_model=F(1, 2), entries=None) -> EstimateLedger:
    """Evaluate every inequality at the given weights, exactly.

    Weights outside their default windows are still evaluated; the row is
    then marked ``in_window = False``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    delta, delta_model = as_fraction(delta), as_fraction(delta_model)
    ledger = EstimateLedger(n, delta, delta_model)
    for ineq in _lookup(entries):
        d = delta if ineq.variable == "delta" else delta_model
        window = base_window(n) if ineq.variable == "delta" else MODEL_WINDOW
        lhs, rhs = ineq.lhs(n), ineq.rhs(n)
        gap = exponent_gap(lhs, rhs, d)
        ledger.rows.append(LedgerRow(ineq.name, ineq.claim, ineq.variable,
                                     lhs.leading_exponent(d), rhs.leading_exponent(d),
                                     gap, gap > 0, window.contains(d)))
    return ledger


def delta_window(n: int, entries=None, variable: str = "delta") -> Interval:
    """Exact set of weights on which all selected inequalities hold.

    Each lhs term must beat the single rhs term, and each such comparison is
    affine in the weight, so the solution is an open interval.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    out = Interval()
    for ineq in _lookup(entries):
        if ineq.variable != variable:
            continue
        rhs = ineq.rhs(n)
        if len(rhs.terms) != 1:
            raise NotImplementedError("delta_window needs a single-term right side")
        _, ra, rb = rhs.terms[0]
        for _, a, b in ineq.lhs(n).terms:
            # (a - ra) + (b - rb) * d > 0
            c0, c1 = a - ra, b - rb
            if c1 == 0:
                piece = Interval() if c0 > 0 else Interval(F(0), F(0))
            elif c1 > 0:
                piece = Interval(-c0 / c1, None)
            else:
                piece = Interval(None, -c0 / c1)
            out = out.intersect(piece)
    return out


@dataclass(frozen=True)
class GlueRadii:
    n: int
    eps: float
    r: float
    R: float
    r_exp: Fraction
    R_exp: Fraction


def glue_radii(eps: float, n: int) -> GlueRadii:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if n < 2:
        raise ValueError("n must be >= 2")
    re, Re = r_exponent(n), R_exponent(n)
    return GlueRadii(n, eps, math.exp(math.log(eps) * re), math.exp(math.log(eps) * Re), re, Re)


def reparameterization_exponent(n: int) -> Fraction:
    """Exponent of eps in eps^(2n-2) r^(4-2n)."""
    return (EpsPower.eps(2 * n - 2) * EpsPower.r(n, 4 - 2 * n)).leading_exponent()
