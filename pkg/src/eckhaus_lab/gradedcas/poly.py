"""Weight-graded differential polynomials with exact coefficients.

A symbol is ``d_X^n B`` for a base field B.  Critical fields (Vc, Wc and
the original Vi) have weight (n + 1)/4, slaved fields (Vs, Ws, Vr) weight
(n + 2)/4, reflecting B ~ T^{-1/4} or T^{-1/2} and d_X ~ T^{-1/4}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalar import ZERO, ExactScalar

CRITICAL = ("Vc", "Wc", "Vi")
SLAVED = ("Vs", "Ws", "Vr")
BASES = CRITICAL + SLAVED
INF = None  # truncation at "infinity" keeps everything


@dataclass(frozen=True, order=True)
class GradedSymbol:
    base: str
    n: int = 0

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown base {self.base!r}")
        if self.n < 0:
            raise ValueError("derivative order must be >= 0")

    @property
    def weight(self) -> Fraction:
        return Fraction(self.n + (1 if self.base in CRITICAL else 2), 4)

    def d(self, m=1):
        return GradedSymbol(self.base, self.n + m)


def monomial_weight(mono) -> Fraction:
    return sum((s.weight for s in mono), Fraction(0))


class GradedPoly:
    """Immutable map from monomials (sorted symbol tuples) to ExactScalar."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = ExactScalar.coerce(c)
            if not c.is_zero():
                clean[tuple(sorted(mono))] = c
        object.__setattr__(self, "_terms", clean)

    # construction
    @classmethod
    def symbol(cls, base, n=0, coeff=1):
        return cls({(GradedSymbol(base, n),): coeff})

    @classmethod
    def constant(cls, c):
        return cls({(): c})

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        object.__setattr__(p, "_terms", terms)
        return p

    # inspection
    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono) -> ExactScalar:
        return self._terms.get(tuple(sorted(mono)), ZERO)

    def is_zero(self):
        return not self._terms

    def weights(self):
        return sorted({monomial_weight(m) for m in self._terms})

    def symbols(self):
        return sorted({s for m in self._terms for s in m})

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # arithmetic
    def __add__(self, other):
        other = _lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, ZERO) + c
            if v.is_zero():
                out.pop(m, None)
            else:
                out[m] = v
        return GradedPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def scale(self, c):
        c = ExactScalar.coerce(c)
        if c.is_zero():
            return GradedPoly()
        return GradedPoly._raw({m: c * v for m, v in self._terms.items()})

    def mul(self, other, max_weight=INF):
        other = _lift(other)
        out = {}
        for m1, c1 in self._terms.items():
            w1 = monomial_weight(m1)
            for m2, c2 in other._terms.items():
                if max_weight is not None and w1 + monomial_weight(m2) > max_weight:
                    continue
                m = tuple(sorted(m1 + m2))
                v = out.get(m, ZERO) + c1 * c2
                if v.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = v
        return GradedPoly._raw(out)

    def __mul__(self, other):
        if isinstance(other, GradedPoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def pow(self, n, max_weight=INF):
        out = GradedPoly.constant(1)
        for _ in range(n):
            out = out.mul(self, max_weight)
        return out

    def differentiate(self, times=1):
        """d_X by the Leibniz rule, applied ``times`` times."""
        p = self
        for _ in range(times):
            out = GradedPoly()
            for m, c in p._terms.items():
                for j in range(len(m)):
                    if j and m[j] == m[j - 1]:
                        continue
                    mult = sum(1 for s in m if s == m[j])
                    new = m[:j] + (m[j].d(),) + m[j + 1:]
                    out = out + GradedPoly({new: c * mult})
            p = out
        return p

    def truncate(self, w=INF):
        """Drop every monomial of weight above ``w``."""
        if w is None:
            return self
        w = Fraction(w)
        return GradedPoly._raw({m: c for m, c in self._terms.items() if monomial_weight(m) <= w})

    def weight_part(self, w):
        w = Fraction(w)
        return GradedPoly._raw({m: c for m, c in self._terms.items() if monomial_weight(m) == w})

    def without(self, base):
        """Monomials free of ``base``."""
        return GradedPoly._raw({m: c for m, c in self._terms.items() if all(s.base != base for s in m)})

    def substitute(self, mapping, max_weight=INF):
        """Replace base fields by polynomials; d_X^n B becomes d_X^n of the image."""
        cache = {}

        def image(sym):
            if sym not in cache:
                if sym.base in mapping:
                    cache[sym] = _lift(mapping[sym.base]).differentiate(sym.n).truncate(max_weight)
                else:
                    cache[sym] = GradedPoly({(sym,): 1})
            return cache[sym]

        out = GradedPoly()
        for m, c in self._terms.items():
            acc = GradedPoly.constant(c)
            for s in m:
                acc = acc.mul(image(s), max_weight)
            out = out + acc
        return out.truncate(max_weight)

    def rename(self, mapping):
        return GradedPoly({tuple(GradedSymbol(mapping.get(s.base, s.base), s.n) for s in m): c
                           for m, c in self._terms.items()})

    def __repr__(self):
        from .latex import emit_latex

        return f"GradedPoly({emit_latex(self)})"


def _lift(x):
    if isinstance(x, GradedPoly):
        return x
    return GradedPoly.constant(x)


def apply_operator(coeffs, p: GradedPoly, max_weight=INF):
    """sum_n coeffs[n] d_X^n p for a dict or list of exact coefficients."""
    items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
    out = GradedPoly()
    for n, c in items:
        c = ExactScalar.coerce(c)
        if c.is_zero():
            continue
        out = out + p.differentiate(n).truncate(max_weight).scale(c)
    return out.truncate(max_weight)


def sym(base, n=0):
    return GradedPoly.symbol(base, n)
