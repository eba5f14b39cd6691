"""Monomial orderings lp, Dp, Wp(w), ls, Ds, Ws(w) and leading data.

Every ordering is realized by a sort key: ``key(a) > key(b)`` iff
``x^a > x^b``.  Weighted keys use integer-scaled weights internally, which
is a positive rescaling and so yields the same order as the rational weights.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import ConfigurationError, DimensionError, ParseError, UndefinedLeadingTermError
from .polyring import Polynomial, ParamPolynomial

KINDS = ("Lex", "DegLex", "WeightedDegLex", "NegLex", "NegDegLex", "NegWeightedDegLex")
SPELLING = {"lp": "Lex", "Dp": "DegLex", "Wp": "WeightedDegLex",
            "ls": "NegLex", "Ds": "NegDegLex", "Ws": "NegWeightedDegLex"}
_NAME = {v: k for k, v in SPELLING.items()}
_WEIGHTED = ("WeightedDegLex", "NegWeightedDegLex")

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class MonomialOrdering:
    kind: str
    weights: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown ordering kind {self.kind!r}")
        if self.kind in _WEIGHTED:
            if not self.weights:
                raise ConfigurationError(f"{_NAME[self.kind]} needs weights")
            ws = tuple(Fraction(w) for w in self.weights)
            if any(w <= 0 for w in ws):
                raise ConfigurationError("weights must be positive")
            object.__setattr__(self, "weights", ws)
        elif self.weights is not None:
            object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))

    @property
    def is_global(self) -> bool:
        return self.kind in ("Lex", "DegLex", "WeightedDegLex")

    @property
    def int_weights(self) -> tuple:
        scale = lcm(*(w.denominator for w in self.weights))
        return tuple(int(w * scale) for w in self.weights)

    def key_function(self, nvars: int | None = None):
        kind = self.kind
        if kind in _WEIGHTED:
            if nvars is not None and len(self.weights) != nvars:
                raise DimensionError(f"{len(self.weights)} weights for {nvars} variables")
            w = self.int_weights
            if kind == "WeightedDegLex":
                return lambda e: (sum(a * b for a, b in zip(w, e)), e)
            return lambda e: (-sum(a * b for a, b in zip(w, e)), e)
        if kind == "Lex":
            return lambda e: e
        if kind == "DegLex":
            return lambda e: (sum(e), e)
        if kind == "NegLex":
            return lambda e: tuple(-x for x in e)
        return lambda e: (-sum(e), e)

    def key(self, e):
        return self.key_function(len(e))(tuple(e))

    def __str__(self):
        name = _NAME[self.kind]
        if self.weights is None or self.kind not in _WEIGHTED:
            return name
        return name + "(" + ",".join(str(w) for w in self.weights) + ")"


def lp():
    return MonomialOrdering("Lex")


def Dp():
    return MonomialOrdering("DegLex")


def Wp(weights):
    return MonomialOrdering("WeightedDegLex", tuple(weights))


def ls():
    return MonomialOrdering("NegLex")


def Ds():
    return MonomialOrdering("NegDegLex")


def Ws(weights):
    return MonomialOrdering("NegWeightedDegLex", tuple(weights))


def weights_for(alpha) -> tuple:
    return tuple(Fraction(1, a) for a in alpha)


_ORD_RE = re.compile(r"\s*(lp|Dp|Wp|ls|Ds|Ws)\s*(?:\((.*)\))?\s*")


def parse_ordering(text: str, nvars: int | None = None) -> MonomialOrdering:
    m = _ORD_RE.fullmatch(text)
    if not m:
        raise ParseError(f"unknown ordering spelling {text!r}")
    kind = SPELLING[m.group(1)]
    weights = None
    if m.group(2) is not None:
        if kind not in _WEIGHTED:
            raise ParseError(f"ordering {m.group(1)} takes no weights")
        try:
            weights = tuple(Fraction(x.strip()) for x in m.group(2).split(","))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad weights in {text!r}") from None
    ordering = MonomialOrdering(kind, weights)
    if nvars is not None and weights is not None and len(weights) != nvars:
        raise ConfigurationError(f"{len(weights)} weights for {nvars} variables")
    return ordering


def compare(a, b, ordering: MonomialOrdering) -> int:
    if len(a) != len(b):
        raise DimensionError("exponent vectors of different length")
    ka, kb = ordering.key(a), ordering.key(b)
    return GREATER if ka > kb else LESS if ka < kb else EQUAL


def is_global(ordering: MonomialOrdering) -> bool:
    return ordering.is_global


def leading_monomial(p, ordering: MonomialOrdering):
    if not p.terms:
        raise UndefinedLeadingTermError("the zero polynomial has no leading term")
    return max(p.terms, key=ordering.key_function(p.nvars))


def leading_data(p, ordering: MonomialOrdering):
    """Return (LM, LC, LT, tail) with LT + tail == p."""
    lm = leading_monomial(p, ordering)
    if isinstance(p, ParamPolynomial):
        lc = p.coefficient(lm)
        lt = ParamPolynomial._raw(p.nvars, {lm: dict(p.terms[lm])}, p.cap, p.params)
        tail = ParamPolynomial._raw(p.nvars, {e: c for e, c in p.terms.items() if e != lm}, p.cap, p.params)
    else:
        lc = p.terms[lm]
        lt = Polynomial._raw(p.nvars, {lm: lc})
        tail = Polynomial._raw(p.nvars, {e: c for e, c in p.terms.items() if e != lm})
    return lm, lc, lt, tail


def sort_desc(exps, ordering: MonomialOrdering):
    exps = list(exps)
    if not exps:
        return exps
    return sorted(exps, key=ordering.key_function(len(exps[0])), reverse=True)
