"""Canonical LaTeX rendering of graded polynomials, and its parser."""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import GradedPoly, GradedSymbol, monomial_weight
from .scalar import ExactScalar

BASE_TEX = {"Vc": "V_c", "Vs": "V_s", "Wc": "W_c", "Ws": "W_s", "Vr": "V_r", "Vi": "V_i"}
TEX_BASE = {v: k for k, v in BASE_TEX.items()}


def monomial_key(mono):
    """Canonical order: total weight, then degree, then the symbol sequence."""
    return (monomial_weight(mono), len(mono), tuple((s.base, s.n) for s in mono))


def _rat(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"\\frac{{{x.numerator}}}{{{x.denominator}}}"


def _atoms(c: ExactScalar):
    """Signed atoms (value, unit) of a scalar, unit in {'', sqrt3, i, sqrt3 i}."""
    units = ("", "\\sqrt{3}", "i", "\\sqrt{3} i")
    return [(v, u) for v, u in zip(c.parts, units) if v]


def _atom_tex(mag: Fraction, unit: str) -> str:
    if unit and mag == 1:
        return unit
    return _rat(mag) + (" " + unit if unit else "")


def _scalar_body(c: ExactScalar):
    """(sign, text) with text the magnitude-like rendering of c."""
    atoms = _atoms(c)
    if len(atoms) == 1:
        v, u = atoms[0]
        return ("-" if v < 0 else "+"), _atom_tex(abs(v), u)
    parts = []
    for j, (v, u) in enumerate(atoms):
        sign = "-" if v < 0 else "+"
        t = _atom_tex(abs(v), u)
        parts.append((sign if sign == "-" else "") + t if j == 0 else f" {sign} {t}")
    return "+", "\\left(" + "".join(parts) + "\\right)"


def _factor_tex(s: GradedSymbol, power: int) -> str:
    b = BASE_TEX[s.base]
    if s.n == 0:
        return b if power == 1 else f"{b}^{{{power}}}"
    d = "\\partial_X" if s.n == 1 else f"\\partial_X^{{{s.n}}}"
    body = f"({d} {b})"
    return body if power == 1 else f"{body}^{{{power}}}"


def _mono_tex(mono) -> str:
    out, j = [], 0
    while j < len(mono):
        p = 1
        while j + p < len(mono) and mono[j + p] == mono[j]:
            p += 1
        out.append(_factor_tex(mono[j], p))
        j += p
    return " ".join(out)


def emit_latex(p: GradedPoly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for mono, c in sorted(p.items(), key=lambda mc: monomial_key(mc[0])):
        sign, body = _scalar_body(c)
        m = _mono_tex(mono)
        if m:
            if body == "1":
                text = m
            else:
                text = f"{body} {m}"
        else:
            text = body
        if not pieces:
            pieces.append(("-" if sign == "-" else "") + text)
        else:
            pieces.append(f" {sign} {text}")
    return "".join(pieces)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<lparen>\\left\()|(?P<rparen>\\right\))"
    r"|(?P<frac>\\frac\{(?P<fn>\d+)\}\{(?P<fd>\d+)\})"
    r"|(?P<int>\d+)"
    r"|(?P<sqrt>\\sqrt\{3\})"
    r"|(?P<i>i(?![A-Za-z_]))"
    r"|(?P<sign>[+-])"
    r"|(?P<factor>(?:\((?P<d>\\partial_X(?:\^\{(?P<dn>\d+)\})?)\s+(?P<db>[VW]_[csri])\)|(?P<b>[VW]_[csri]))"
    r"(?:\^\{(?P<pow>\d+)\})?)"
    r")"
)


def _tokens(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse near {text[pos:pos + 20]!r}")
        out.append(m)
        pos = m.end()
    return out


def parse_latex(text: str) -> GradedPoly:
    """Inverse of :func:`emit_latex` on its own output."""
    if text.strip() == "0":
        return GradedPoly()
    toks = _tokens(text)
    terms = {}
    j = 0
    while j < len(toks):
        sign = 1
        if toks[j].group("sign"):
            sign = -1 if toks[j].group("sign") == "-" else 1
            j += 1
        coeff, j = _parse_coeff(toks, j)
        mono = []
        while j < len(toks) and toks[j].group("factor"):
            m = toks[j]
            if m.group("d"):
                n = int(m.group("dn") or 1)
                base = TEX_BASE[m.group("db")]
            else:
                n, base = 0, TEX_BASE[m.group("b")]
            mono += [GradedSymbol(base, n)] * int(m.group("pow") or 1)
            j += 1
        key = tuple(sorted(mono))
        terms[key] = terms.get(key, ExactScalar()) + coeff * sign
    return GradedPoly(terms)


def _parse_atom(toks, j):
    """One magnitude atom: [number] [sqrt3] [i]; returns (ExactScalar, j)."""
    val = None
    if j < len(toks) and toks[j].group("frac"):
        val = Fraction(int(toks[j].group("fn")), int(toks[j].group("fd")))
        j += 1
    elif j < len(toks) and toks[j].group("int"):
        val = Fraction(int(toks[j].group("int")))
        j += 1
    s3 = i = False
    if j < len(toks) and toks[j].group("sqrt"):
        s3, j = True, j + 1
    if j < len(toks) and toks[j].group("i"):
        i, j = True, j + 1
    if val is None and not (s3 or i):
        return None, j
    v = val if val is not None else Fraction(1)
    parts = [0, 0, 0, 0]
    parts[(2 if i else 0) + (1 if s3 else 0)] = v
    return ExactScalar(*parts), j


def _parse_coeff(toks, j):
    if j < len(toks) and toks[j].group("lparen"):
        j += 1
        total = ExactScalar()
        sign = 1
        while not toks[j].group("rparen"):
            if toks[j].group("sign"):
                sign = -1 if toks[j].group("sign") == "-" else 1
                j += 1
            atom, j = _parse_atom(toks, j)
            total = total + atom * sign
            sign = 1
        return total, j + 1
    atom, j2 = _parse_atom(toks, j)
    if atom is None:
        return ExactScalar(1), j
    return atom, j2


def jet_latex(jet, var="k") -> str:
    """Render a KJet as a polynomial in ``var`` plus the order remainder."""
    pieces = []
    for n, c in enumerate(jet.coeffs):
        if c.is_zero():
            continue
        sign, body = _scalar_body(c)
        mono = "" if n == 0 else (var if n == 1 else f"{var}^{{{n}}}")
        text = body if not mono else (mono if body == "1" else f"{body} {mono}")
        pieces.append((("-" if sign == "-" else "") + text) if not pieces else f" {sign} {text}")
    head = "".join(pieces) if pieces else "0"
    return f"{head} + O({var}^{{{jet.order + 1}}})"
