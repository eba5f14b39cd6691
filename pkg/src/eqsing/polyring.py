"""Exact sparse polynomials over Q, plain and with parametric coefficients.

A plain :class:`Polynomial` maps exponent tuples to nonzero ``Fraction``s.
A :class:`ParamPolynomial` maps exponent tuples to coefficient dicts whose
keys are sorted tuples of parameter names (a multiset, so ``("a[1]", "a[1]")``
is ``a[1]^2``).  Parameter products may be truncated at a parameter-degree
cap; the cap defaults to 3 and can be changed with ``EQSING_MAX_PARAM_DEG``
(``none`` switches truncation off).
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ConfigurationError, DimensionError, ParseError

Exp = tuple
PMono = tuple

_UNSET = object()


def default_cap() -> int | None:
    raw = os.environ.get("EQSING_MAX_PARAM_DEG")
    if raw is None or raw.strip() == "":
        return 3
    if raw.strip().lower() in ("none", "off", "inf"):
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigurationError(f"EQSING_MAX_PARAM_DEG must be an integer or 'none', got {raw!r}")
    if cap < 0:
        raise ConfigurationError("EQSING_MAX_PARAM_DEG must be non-negative")
    return cap


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# exponent helpers

def total_degree(e: Exp) -> int:
    return sum(e)


def weighted_degree(e: Exp, w) -> Fraction:
    return sum((Fraction(wi) * ei for wi, ei in zip(w, e)), Fraction(0))


def divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def exp_add(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def canonical_key(e: Exp):
    # deterministic display order: total degree, then lex
    return (sum(e), e)


# raw coefficient-dict arithmetic (keys are parameter monomials)

def _pm_mul(a: PMono, b: PMono) -> PMono:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def pc_add_into(target: dict, src: Mapping, scale=1) -> None:
    for m, c in src.items():
        v = target.get(m, 0) + c * scale
        if v:
            target[m] = v
        else:
            target.pop(m, None)


def pc_mul(a: Mapping, b: Mapping, cap: int | None) -> dict:
    out: dict = {}
    if len(a) < len(b):
        a, b = b, a
    blist = sorted(b.items(), key=lambda t: len(t[0]))
    for ma, ca in a.items():
        la = len(ma)
        for mb, cb in blist:
            if cap is not None and la + len(mb) > cap:
                break
            m = _pm_mul(ma, mb)
            v = out.get(m, 0) + ca * cb
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def pc_scale(a: Mapping, s) -> dict:
    if not s:
        return {}
    return {m: c * s for m, c in a.items()}


def pc_truncate(a: Mapping, cap: int | None) -> dict:
    if cap is None:
        return dict(a)
    return {m: c for m, c in a.items() if len(m) <= cap}


def pc_inverse(a: Mapping, cap: int | None) -> dict:
    """Inverse of a unit ``c0 + r`` in the parameter ring truncated at ``cap``."""
    c0 = a.get((), 0)
    if not c0:
        raise ZeroDivisionError("coefficient is not a unit")
    rest = {m: c for m, c in a.items() if m}
    inv0 = 1 / Fraction(c0)
    if not rest:
        return {(): inv0}
    if cap is None:
        raise ZeroDivisionError("inverting a non-constant unit needs a parameter-degree cap")
    # 1/(c0(1+s)) = inv0 * sum (-s)^k, s = rest/c0
    s = pc_scale(rest, -inv0)
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for _ in range(cap):
        power = pc_mul(power, s, cap)
        if not power:
            break
        pc_add_into(out, power)
    return pc_scale(out, inv0)


def pc_evaluate(a: Mapping, values: Mapping) -> Fraction:
    total = Fraction(0)
    for m, c in a.items():
        v = Fraction(c)
        for name in m:
            v *= values[name]
        total += v
    return total


def pc_substitute(a: Mapping, mapping: Mapping, cap: int | None) -> dict:
    """Replace parameters by coefficient dicts (missing names stay)."""
    out: dict = {}
    cache: dict = {}
    for m, c in a.items():
        acc = {(): Fraction(c)}
        for name in m:
            if name in mapping:
                rep = mapping[name]
            else:
                rep = cache.setdefault(name, {(name,): Fraction(1)})
            acc = pc_mul(acc, rep, cap)
            if not acc:
                break
        pc_add_into(out, acc)
    return out


class Polynomial:
    """Sparse polynomial with rational coefficients in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping | Iterable = ()):
        if nvars < 1:
            raise DimensionError("a polynomial needs at least one variable")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise DimensionError(f"bad exponent {e} for {nvars} variables")
            v = clean.get(e, 0) + Fraction(c)
            if v:
                clean[e] = v
            else:
                clean.pop(e, None)
        self.nvars = nvars
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def monomial(cls, e: Exp, c=1) -> "Polynomial":
        return cls(len(e), {tuple(e): c})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise DimensionError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        pc_add_into(out, other.terms)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        pc_add_into(out, other.terms, -1)
        return Polynomial._raw(self.nvars, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial._raw(self.nvars, pc_scale(self.terms, Fraction(other)))
        if isinstance(other, ParamPolynomial):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = exp_add(ea, eb)
                v = out.get(e, 0) + ca * cb
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial._raw(self.nvars, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if isinstance(other, ParamPolynomial):
            return other == self
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def coefficient(self, e: Exp) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: canonical_key(t[0]), reverse=True)

    def support(self):
        return sorted(self.terms, key=canonical_key)

    def partial_derivative(self, var: int) -> "Polynomial":
        return partial_derivative(self, var)

    def jet(self, k: int) -> "Polynomial":
        return jet(self, k)

    def substitute(self, var: int, replacement: "Polynomial") -> "Polynomial":
        res = substitute(ParamPolynomial.lift(self, cap=None), var, ParamPolynomial.lift(replacement, cap=None))
        return res.specialize({})

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total


class ParamCoefficient:
    """Sparse polynomial in named parameters with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean: dict = {}
        for m, c in (terms or {}).items():
            m = tuple(sorted(m))
            v = clean.get(m, 0) + Fraction(c)
            if v:
                clean[m] = v
            else:
                clean.pop(m, None)
        self.terms = clean

    @classmethod
    def _raw(cls, terms: dict) -> "ParamCoefficient":
        p = object.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def param(cls, name: str, c=1) -> "ParamCoefficient":
        return cls._raw({(name,): Fraction(c)})

    @classmethod
    def constant(cls, c) -> "ParamCoefficient":
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    def __add__(self, other):
        other = _as_pc(other)
        out = dict(self.terms)
        pc_add_into(out, other.terms)
        return ParamCoefficient._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamCoefficient._raw(pc_scale(self.terms, -1))

    def __sub__(self, other):
        other = _as_pc(other)
        out = dict(self.terms)
        pc_add_into(out, other.terms, -1)
        return ParamCoefficient._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_pc(other)
        return ParamCoefficient._raw(pc_mul(self.terms, other.terms, None))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamCoefficient.constant(other)
        if not isinstance(other, ParamCoefficient):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ParamCoefficient({format_coefficient(self)!r})"

    def __str__(self):
        return format_coefficient(self)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def part(self, k: int) -> "ParamCoefficient":
        return ParamCoefficient._raw({m: c for m, c in self.terms.items() if len(m) == k})

    def linear_part(self) -> "ParamCoefficient":
        return self.part(1)

    def quadratic_part(self) -> "ParamCoefficient":
        return self.part(2)

    def remainder_above(self, k: int) -> "ParamCoefficient":
        return ParamCoefficient._raw({m: c for m, c in self.terms.items() if len(m) > k})

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((len(m) for m in self.terms), default=-1)

    def truncate(self, cap: int | None) -> "ParamCoefficient":
        return ParamCoefficient._raw(pc_truncate(self.terms, cap))

    def parameters(self) -> set:
        return {name for m in self.terms for name in m}

    def evaluate(self, values: Mapping) -> Fraction:
        return pc_evaluate(self.terms, {k: Fraction(v) for k, v in values.items()})

    def substitute(self, mapping: Mapping, cap: int | None = None) -> "ParamCoefficient":
        raw = {k: _as_pc(v).terms for k, v in mapping.items()}
        return ParamCoefficient._raw(pc_substitute(self.terms, raw, cap))

    def derivative(self, name: str) -> "ParamCoefficient":
        out: dict = {}
        for m, c in self.terms.items():
            k = m.count(name)
            if k:
                i = m.index(name)
                mm = m[:i] + m[i + 1:]
                v = out.get(mm, 0) + c * k
                if v:
                    out[mm] = v
                else:
                    out.pop(mm, None)
        return ParamCoefficient._raw(out)


def _as_pc(x) -> ParamCoefficient:
    if isinstance(x, ParamCoefficient):
        return x
    if isinstance(x, (int, Fraction)):
        return ParamCoefficient.constant(x)
    if isinstance(x, Mapping):
        return ParamCoefficient(x)
    raise TypeError(f"cannot use {type(x).__name__} as a parameter coefficient")


class ParamPolynomial:
    """Polynomial in x whose coefficients are parameter polynomials.

    ``terms`` maps exponent tuples to raw coefficient dicts.  ``cap`` is the
    parameter-degree cap applied to products (``None`` means exact).
    """

    __slots__ = ("nvars", "terms", "cap", "params")

    def __init__(self, nvars: int, terms: Mapping | None = None, cap=_UNSET, params: Iterable[str] = ()):
        if nvars < 1:
            raise DimensionError("a polynomial needs at least one variable")
        self.nvars = nvars
        self.cap = default_cap() if cap is _UNSET else cap
        clean: dict = {}
        for e, coef in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise DimensionError(f"bad exponent {e} for {nvars} variables")
            raw = _as_pc(coef).terms
            raw = pc_truncate(raw, self.cap)
            if raw:
                acc = clean.setdefault(e, {})
                pc_add_into(acc, raw)
                if not acc:
                    del clean[e]
        self.terms = clean
        self.params = _merge_params(tuple(params), clean)

    @classmethod
    def _raw(cls, nvars, terms, cap, params=()):
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p.cap = cap
        p.params = _merge_params(tuple(params), terms)
        return p

    @classmethod
    def lift(cls, p: Polynomial, cap=_UNSET, params: Iterable[str] = ()) -> "ParamPolynomial":
        cap = default_cap() if cap is _UNSET else cap
        return cls._raw(p.nvars, {e: {(): c} for e, c in p.terms.items()}, cap, params)

    def with_cap(self, cap) -> "ParamPolynomial":
        terms = {}
        for e, coef in self.terms.items():
            t = pc_truncate(coef, cap)
            if t:
                terms[e] = t
        return ParamPolynomial._raw(self.nvars, terms, cap, self.params)

    def _coerce(self, other):
        if isinstance(other, ParamPolynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"variable counts differ: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"variable counts differ: {self.nvars} vs {other.nvars}")
            return ParamPolynomial.lift(other, cap=self.cap)
        if isinstance(other, (int, Fraction)):
            return ParamPolynomial.lift(Polynomial.constant(self.nvars, other), cap=self.cap)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ParamPolynomial._raw(self.nvars, _pp_add(self.terms, other.terms, 1),
                                    _min_cap(self.cap, other.cap), self.params + other.params)

    __radd__ = __add__

    def __neg__(self):
        return ParamPolynomial._raw(self.nvars, {e: pc_scale(c, -1) for e, c in self.terms.items()},
                                    self.cap, self.params)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ParamPolynomial._raw(self.nvars, _pp_add(self.terms, other.terms, -1),
                                    _min_cap(self.cap, other.cap), self.params + other.params)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ParamCoefficient):
            terms = {}
            for e, c in self.terms.items():
                t = pc_mul(c, other.terms, self.cap)
                if t:
                    terms[e] = t
            return ParamPolynomial._raw(self.nvars, terms, self.cap, self.params)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        cap = _min_cap(self.cap, other.cap)
        return ParamPolynomial._raw(self.nvars, _pp_mul(self.terms, other.terms, cap), cap,
                                    self.params + other.params)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ParamPolynomial.lift(Polynomial.constant(self.nvars, 1), cap=self.cap)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (Polynomial, int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, ParamPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset((e, frozenset(c.items())) for e, c in self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ParamPolynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e: Exp) -> ParamCoefficient:
        return ParamCoefficient._raw(dict(self.terms.get(tuple(e), {})))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def support(self):
        return sorted(self.terms, key=canonical_key)

    def parameter_names(self) -> tuple:
        return self.params

    def partial_derivative(self, var: int) -> "ParamPolynomial":
        return partial_derivative(self, var)

    def jet(self, k: int) -> "ParamPolynomial":
        return jet(self, k)

    def specialize(self, values: Mapping) -> Polynomial:
        """Substitute rationals for every parameter, giving a plain polynomial."""
        vals = {k: Fraction(v) for k, v in values.items()}
        out: dict = {}
        for e, coef in self.terms.items():
            try:
                v = pc_evaluate(coef, vals)
            except KeyError as exc:
                raise DimensionError(f"no value given for parameter {exc.args[0]}") from None
            if v:
                out[e] = v
        return Polynomial._raw(self.nvars, out)

    def substitute_params(self, mapping: Mapping, cap=_UNSET) -> "ParamPolynomial":
        """Replace parameters by parameter coefficients (missing names stay)."""
        cap = self.cap if cap is _UNSET else cap
        raw = {k: _as_pc(v).terms for k, v in mapping.items()}
        terms = {}
        for e, coef in self.terms.items():
            t = pc_substitute(coef, raw, cap)
            if t:
                terms[e] = t
        return ParamPolynomial._raw(self.nvars, terms, cap)

    def parameter_part(self, k: int) -> "ParamPolynomial":
        terms = {}
        for e, coef in self.terms.items():
            t = {m: c for m, c in coef.items() if len(m) == k}
            if t:
                terms[e] = t
        return ParamPolynomial._raw(self.nvars, terms, self.cap, self.params)

    def map_exponents(self, fn, nvars: int | None = None) -> "ParamPolynomial":
        terms: dict = {}
        for e, coef in self.terms.items():
            ne = tuple(fn(e))
            acc = terms.setdefault(ne, {})
            pc_add_into(acc, coef)
            if not acc:
                del terms[ne]
        return ParamPolynomial._raw(nvars or self.nvars, terms, self.cap, self.params)


def _merge_params(declared: tuple, terms: Mapping) -> tuple:
    seen = dict.fromkeys(declared)
    extra = set()
    for coef in terms.values():
        for m in coef:
            for name in m:
                if name not in seen:
                    extra.add(name)
    return tuple(seen) + tuple(sorted(extra, key=param_sort_key))


def _pp_add(a: Mapping, b: Mapping, s) -> dict:
    out = {e: dict(c) for e, c in a.items()}
    for e, c in b.items():
        acc = out.setdefault(e, {})
        pc_add_into(acc, c, s)
        if not acc:
            del out[e]
    return out


def _pp_mul(a: Mapping, b: Mapping, cap) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            prod = pc_mul(ca, cb, cap)
            if not prod:
                continue
            e = exp_add(ea, eb)
            acc = out.setdefault(e, {})
            pc_add_into(acc, prod)
            if not acc:
                del out[e]
    return out


# module-level operations

def add(p, q):
    return p + q


def mul(p, q):
    return p * q


def partial_derivative(p, var: int):
    if not 0 <= var < p.nvars:
        raise DimensionError(f"variable index {var} out of range for {p.nvars} variables")
    out: dict = {}
    for e, c in p.terms.items():
        k = e[var]
        if k:
            ne = e[:var] + (k - 1,) + e[var + 1:]
            out[ne] = pc_scale(c, k) if isinstance(p, ParamPolynomial) else c * k
    if isinstance(p, ParamPolynomial):
        return ParamPolynomial._raw(p.nvars, out, p.cap, p.params)
    return Polynomial._raw(p.nvars, out)


def jet(p, k: int):
    if k < 0:
        raise ValueError("jet order must be non-negative")
    out = {e: c for e, c in p.terms.items() if sum(e) <= k}
    if isinstance(p, ParamPolynomial):
        return ParamPolynomial._raw(p.nvars, out, p.cap, p.params)
    return Polynomial._raw(p.nvars, out)


def substitute(p, var: int, replacement, max_degree: int | None = None):
    """Compose: replace ``x_var`` by ``replacement`` (same variable space).

    ``max_degree`` drops every term of total x-degree above it; this is exact
    for the retained terms whenever the replacement has no constant term.
    """
    if isinstance(p, Polynomial):
        p = ParamPolynomial.lift(p, cap=None)
    if isinstance(replacement, Polynomial):
        replacement = ParamPolynomial.lift(replacement, cap=p.cap)
    if replacement.nvars != p.nvars:
        raise DimensionError("replacement lives in a different variable space")
    if not 0 <= var < p.nvars:
        raise DimensionError(f"variable index {var} out of range")
    cap = _min_cap(p.cap, replacement.cap)
    n = p.nvars
    rep = replacement.terms
    if max_degree is not None:
        rep = {e: c for e, c in rep.items() if sum(e) <= max_degree}
    powers = [{(0,) * n: {(): Fraction(1)}}]
    out: dict = {}
    for e, coef in p.terms.items():
        k = e[var]
        if k == 0:
            acc = out.setdefault(e, {})
            pc_add_into(acc, coef)
            if not acc:
                del out[e]
            continue
        while len(powers) <= k:
            nxt = _pp_mul(powers[-1], rep, cap)
            if max_degree is not None:
                nxt = {x: c for x, c in nxt.items() if sum(x) <= max_degree}
            powers.append(nxt)
        base = e[:var] + (0,) + e[var + 1:]
        bdeg = sum(base)
        for re_, rc in powers[k].items():
            if max_degree is not None and bdeg + sum(re_) > max_degree:
                continue
            prod = pc_mul(coef, rc, cap)
            if not prod:
                continue
            ne = exp_add(base, re_)
            acc = out.setdefault(ne, {})
            pc_add_into(acc, prod)
            if not acc:
                del out[ne]
    return ParamPolynomial._raw(n, out, cap, p.params + replacement.params)


# text format

_PARAM_RE = re.compile(r"a\[(\d+(?:,\d+)*)\]")


def param_name(index: Iterable[int]) -> str:
    return "a[" + ",".join(str(int(i)) for i in index) + "]"


def param_index(name: str) -> tuple:
    m = _PARAM_RE.fullmatch(name)
    if not m:
        raise ParseError(f"not a parameter name: {name!r}")
    return tuple(int(x) for x in m.group(1).split(","))


def param_sort_key(name: str):
    m = _PARAM_RE.fullmatch(name)
    if m:
        idx = tuple(int(x) for x in m.group(1).split(","))
        return (0, sum(idx), idx, "")
    return (1, 0, (), name)


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_xmono(e: Exp) -> list:
    out = []
    for i, k in enumerate(e):
        if k == 1:
            out.append(f"x{i + 1}")
        elif k > 1:
            out.append(f"x{i + 1}^{k}")
    return out


def _format_pmono(m: PMono) -> list:
    out = []
    i = 0
    while i < len(m):
        j = i
        while j < len(m) and m[j] == m[i]:
            j += 1
        out.append(m[i] if j - i == 1 else f"{m[i]}^{j - i}")
        i = j
    return out


def _pmono_key(m: PMono):
    return (len(m), tuple(param_sort_key(x) for x in m))


def _join_terms(items) -> str:
    parts = []
    for c, factors in items:
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if factors:
            body = "*".join(factors) if a == 1 else _format_fraction(a) + "*" + "*".join(factors)
        else:
            body = _format_fraction(a)
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def format_coefficient(p: ParamCoefficient) -> str:
    items = [(c, _format_pmono(m)) for m, c in sorted(p.terms.items(), key=lambda t: _pmono_key(t[0]))]
    return _join_terms(items)


def format_polynomial(p) -> str:
    items = []
    for e in sorted(p.terms, key=canonical_key, reverse=True):
        xs = _format_xmono(e)
        if isinstance(p, ParamPolynomial):
            for m, c in sorted(p.terms[e].items(), key=lambda t: _pmono_key(t[0])):
                items.append((c, _format_pmono(m) + xs))
        else:
            items.append((p.terms[e], xs))
    return _join_terms(items)


_FACTOR_RE = re.compile(r"(\d+)(?:/(\d+))?|x(\d+)(?:\^(\d+))?|(a\[\d+(?:,\d+)*\])(?:\^(\d+))?")


def _parse_terms(text: str):
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial")
    pos = 0
    terms = []
    while pos < len(s):
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif terms:
            raise ParseError(f"expected '+' or '-' at position {pos} in {text!r}")
        coef = Fraction(sign)
        xs: dict = {}
        ps: list = []
        while True:
            m = _FACTOR_RE.match(s, pos)
            if not m:
                raise ParseError(f"unexpected input at position {pos} in {text!r}")
            if m.group(1) is not None:
                den = int(m.group(2)) if m.group(2) is not None else 1
                if den == 0:
                    raise ParseError("zero denominator")
                coef *= Fraction(int(m.group(1)), den)
            elif m.group(3) is not None:
                i = int(m.group(3))
                if i < 1:
                    raise ParseError("variables are numbered from x1")
                xs[i] = xs.get(i, 0) + (int(m.group(4)) if m.group(4) is not None else 1)
            else:
                k = int(m.group(6)) if m.group(6) is not None else 1
                ps.extend([m.group(5)] * k)
            pos = m.end()
            if pos < len(s) and s[pos] == "*":
                pos += 1
                continue
            break
        terms.append((coef, xs, tuple(sorted(ps))))
    return terms


def parse_any(text: str, nvars: int | None = None, cap=_UNSET):
    """Parse the textual grammar; returns a ParamPolynomial iff parameters occur."""
    terms = _parse_terms(text)
    top = max((max(xs) for _, xs, _ in terms if xs), default=1)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise DimensionError(f"variable x{top} exceeds {nvars} variables")
    has_params = any(ps for _, _, ps in terms)
    if not has_params:
        out: dict = {}
        for c, xs, _ in terms:
            e = tuple(xs.get(i + 1, 0) for i in range(nvars))
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(nvars, out)
    cap = default_cap() if cap is _UNSET else cap
    raw: dict = {}
    for c, xs, ps in terms:
        if cap is not None and len(ps) > cap:
            continue
        e = tuple(xs.get(i + 1, 0) for i in range(nvars))
        acc = raw.setdefault(e, {})
        pc_add_into(acc, {ps: c})
        if not acc:
            del raw[e]
    return ParamPolynomial._raw(nvars, raw, cap)


def parse_polynomial(text: str, nvars: int | None = None) -> Polynomial:
    p = parse_any(text, nvars)
    if isinstance(p, ParamPolynomial):
        raise ParseError("parameters are not allowed here")
    return p


def parse_param_polynomial(text: str, nvars: int | None = None, cap=_UNSET) -> ParamPolynomial:
    p = parse_any(text, nvars, cap)
    if isinstance(p, Polynomial):
        return ParamPolynomial.lift(p, cap=default_cap() if cap is _UNSET else cap)
    return p
