"""Truncated power series in k with exact coefficients."""

from __future__ import annotations

from .scalar import I, ONE, SQRT3, ZERO, ExactScalar, q


class OrderInconsistency(ArithmeticError):
    """An order-by-order solve produced an incompatible equation."""


class KJet:
    """sum_{n <= order} c_n k^n; all operations keep the truncation order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order=None):
        cs = [ExactScalar.coerce(c) for c in coeffs]
        if order is not None:
            cs = (cs + [ZERO] * (order + 1))[: order + 1]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def k(cls, order):
        return cls([0, 1], order)

    @classmethod
    def const(cls, c, order):
        return cls([c], order)

    def __getitem__(self, n):
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else ZERO

    def _match(self, other):
        if isinstance(other, KJet):
            return other
        return KJet.const(other, self.order)

    def __add__(self, other):
        o = self._match(other)
        n = min(self.order, o.order)
        return KJet([self[j] + o[j] for j in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return KJet([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._match(other))

    def __rsub__(self, other):
        return self._match(other) - self

    def __mul__(self, other):
        if not isinstance(other, KJet):
            c = ExactScalar.coerce(other)
            return KJet([c * x for x in self.coeffs])
        n = min(self.order, other.order)
        return KJet([sum((self[j] * other[m - j] for j in range(m + 1)), ZERO) for m in range(n + 1)])

    __rmul__ = __mul__

    def inverse(self):
        c0 = self[0]
        if c0.is_zero():
            raise ZeroDivisionError("jet with vanishing constant term is not invertible")
        inv0 = c0.inverse()
        out = [inv0]
        for m in range(1, self.order + 1):
            s = sum((self[j] * out[m - j] for j in range(1, m + 1)), ZERO)
            out.append(-s * inv0)
        return KJet(out)

    def __truediv__(self, other):
        return self * self._match(other).inverse()

    def sqrt(self):
        """Square root of a jet with constant term 1."""
        if self[0] != ONE:
            raise ValueError("sqrt needs constant term 1")
        out = [ONE]
        for m in range(1, self.order + 1):
            s = sum((out[j] * out[m - j] for j in range(1, m)), ZERO)
            out.append((self[m] - s) * q(1, 2))
        return KJet(out)

    def truncate(self, order):
        return KJet(self.coeffs[: order + 1])

    def __eq__(self, other):
        if not isinstance(other, KJet):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def vanishes_through(self, order):
        return all(self[j].is_zero() for j in range(order + 1))

    def as_operator(self):
        """Coefficients of the differential operator obtained by k -> -i d_X.

        Fourier symbol ik corresponds to d_X, so c_n k^n becomes
        c_n (-i)^n d_X^n; the result must be real for a real operator.
        """
        out = {}
        mi = -I
        for n, c in enumerate(self.coeffs):
            v = c * mi**n
            if not v.is_real():
                raise ValueError(f"operator coefficient of d^{n} is not real: {v}")
            if not v.is_zero():
                out[n] = v
        return out

    def __repr__(self):
        return "KJet(" + ", ".join(str(c) for c in self.coeffs) + ")"


class EigenJets(dict):
    """Result of :func:`jet_eigsystem` (a dict with attribute access)."""

    __getattr__ = dict.__getitem__


def jet_eigsystem(n_max=8):
    """Eigen-system of the linearization at q^2 = 1/3 as k-jets.

    The symbol is [[-k^2 - 4/3, -2 q i k], [2 q i k, -k^2]] with
    2 q = 2/sqrt3.  phi1 = (a(k), 1) and phi2 = (1, b(k)) are found order by
    order from one row of (M - lambda) phi = 0 each, and the other row is
    asserted at every order.
    """
    if not 1 <= n_max <= 8:
        raise ValueError("n_max must lie in 1..8")
    N = n_max
    k = KJet.k(N)
    two_q_i = SQRT3 * q(2, 3) * I  # 2 q i with q = 1/sqrt3
    root = (1 + 3 * k * k).sqrt()
    lam1 = -(k * k) - q(2, 3) + q(2, 3) * root
    lam2 = -(k * k) - q(2, 3) - q(2, 3) * root

    m11 = -(k * k) - q(4, 3)
    m12 = -(k * two_q_i)
    m21 = k * two_q_i
    m22 = -(k * k)

    # phi1 = (a, 1): row 1 solves for a, row 2 is the consistency condition
    alpha = m11 - lam1
    a = _solve_linear(alpha, -m12, N)
    _assert_zero(m21 * a + (m22 - lam1), "phi1 second row")
    # phi2 = (1, b): row 2 solves for b, row 1 is the consistency condition
    beta = m22 - lam2
    b = _solve_linear(beta, -m21, N)
    _assert_zero((m11 - lam2) + m12 * b, "phi2 first row")

    det = 1 - a * b
    dinv = det.inverse()
    S = ((KJet.const(1, N), a), (b, KJet.const(1, N)))
    S_inv = ((dinv, -(a * dinv)), (-(b * dinv), dinv))
    return EigenJets(lambda1=lam1, lambda2=lam2, phi1=(a, KJet.const(1, N)), phi2=(KJet.const(1, N), b),
                     S=S, S_inv=S_inv, det=det)


def _solve_linear(coef: KJet, rhs: KJet, n):
    """x with coef * x = rhs, solved order by order (coef[0] != 0)."""
    c0 = coef[0]
    if c0.is_zero():
        raise OrderInconsistency("leading coefficient vanishes")
    x = []
    for m in range(n + 1):
        s = sum((coef[j] * x[m - j] for j in range(1, m + 1)), ZERO)
        x.append((rhs[m] - s) / c0)
    return KJet(x)


def _assert_zero(jet: KJet, label):
    for m, c in enumerate(jet.coeffs):
        if not c.is_zero():
            raise OrderInconsistency(f"{label}: order k^{m} leaves {c}")


def matmul(A, B):
    """Product of 2x2 jet matrices given as nested tuples."""
    return tuple(tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)) for i in range(2))

