"""Exact polynomials over Q and truncated power series over any field.

``Poly`` is immutable with Fraction coefficients, lowest degree first.
``Series`` only assumes its coefficients support + - * /, so the same code
runs on Fraction, float, mpmath numbers or ``Dual``.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [_frac(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree, coeff=1):
        return cls([0] * degree + [coeff])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly([-_frac(other)]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = _frac(other)
            return Poly([a * s for a in self.coeffs])
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out, base = Poly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        acc = 0 * x
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def divmod(self, other):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = other.coeffs[-1]
        for k in range(len(rem) - 1 - other.degree, -1, -1):
            f = rem[k + other.degree] / lead
            q[k] = f
            if f:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= f * b
        return Poly(q), Poly(rem)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def derivative(self):
        return Poly([k * a for k, a in enumerate(self.coeffs)][1:])

    def shift_down(self):
        """Strip factors of the variable: returns (poly / x^k, k)."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return Poly(self.coeffs[k:]), k

    def primitive(self):
        """Split as ``content * P`` with P integral, gcd 1, positive lowest term."""
        if not self:
            return Fraction(0), self
        den = 1
        for a in self.coeffs:
            den = den * a.denominator // math.gcd(den, a.denominator)
        ints = [int(a * den) for a in self.coeffs]
        g = 0
        for a in ints:
            g = math.gcd(g, a)
        low = next(a for a in ints if a)
        if low < 0:
            g = -g
        return Fraction(g, den), Poly([a // g for a in ints])

    def is_integral(self):
        return all(a.denominator == 1 for a in self.coeffs)

    def to_float(self):
        return [float(a) for a in self.coeffs]


def poly_gcd(a, b):
    while b:
        a, b = b, a.divmod(b)[1]
    if not a:
        return a
    return a * (1 / a.coeffs[-1])


class Series:
    """Power series truncated after ``order`` terms (coefficients of x^0..x^(order-1))."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order=None):
        c = list(coeffs)
        if order is not None:
            zero = c[0] * 0 if c else 0
            c = (c + [zero] * order)[:order]
        self.c = c

    @property
    def order(self):
        return len(self.c)

    def __getitem__(self, k):
        return self.c[k]

    def __repr__(self):
        return f"Series({self.c})"

    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        zero = self.c[0] * 0
        return Series([zero + other] + [zero] * (self.order - 1))

    def __add__(self, other):
        other = self._coerce(other)
        return Series([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([a * other for a in self.c])
        n = min(self.order, other.order)
        out = []
        for k in range(n):
            acc = self.c[0] * other.c[k]
            for i in range(1, k + 1):
                acc = acc + self.c[i] * other.c[k - i]
            out.append(acc)
        return Series(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series([a / other for a in self.c])
        return self * other.power(-1)

    def power(self, q):
        """self**q for rational q; the constant term must be 1 unless q is an integer."""
        f = self.c
        f0 = f[0]
        if isinstance(q, int) or (isinstance(q, Fraction) and q.denominator == 1):
            lead = f0 ** int(q)
        elif f0 == 1:
            lead = f0
        else:
            raise ValueError("fractional power needs a unit constant term")
        # g = f^q  =>  f g' = q f' g
        g = [lead]
        for n in range(1, self.order):
            acc = 0 * f0
            for k in range(1, n + 1):
                acc = acc + (q * k - (n - k)) * f[k] * g[n - k]
            g.append(acc / (n * f0))
        return Series(g)

    def compose(self, inner):
        """self(inner(x)); inner must have zero constant term."""
        out = self._coerce(self.c[-1])
        for a in reversed(self.c[:-1]):
            out = out * inner + a
        return out

    def shift(self, k):
        """Multiply by x^k (k >= 0), keeping the truncation order."""
        zero = self.c[0] * 0
        return Series(([zero] * k + self.c)[: self.order])

    @classmethod
    def from_poly(cls, poly, order):
        return cls([poly[k] for k in range(order)])

    @classmethod
    def variable(cls, order, one=Fraction(1)):
        zero = one * 0
        return cls([zero, one] + [zero] * (order - 2), order)


class Dual:
    """a + b*eps with eps^2 = 0, used to keep first-order dependence exact."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"

    def _v(self, o):
        return o if isinstance(o, Dual) else Dual(o, 0 * self.a)

    def __add__(self, o):
        o = self._v(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._v(o))

    def __rsub__(self, o):
        return self._v(o) - self

    def __mul__(self, o):
        o = self._v(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._v(o)
        return Dual(self.a / o.a, (self.b * o.a - self.a * o.b) / (o.a * o.a))

    def __rtruediv__(self, o):
        return self._v(o) / self

    def __eq__(self, o):
        o = self._v(o)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return 1 / (self ** (-k))
        return Dual(self.a**k, k * self.a ** (k - 1) * self.b if k else 0 * self.b)
