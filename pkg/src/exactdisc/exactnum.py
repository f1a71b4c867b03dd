"""Exact scalar arithmetic: rationals and sums of square roots.

Values of the form ``c_1 + c_2*sqrt(d_2) + ...`` with rational ``c_i`` and
squarefree positive integer radicands ``d_i`` form a field that is closed
under the four arithmetic operations and has a unique normal form: the
square roots of distinct squarefree integers are linearly independent over
the rationals, so two values are equal iff their coefficient maps are
equal.  Equality is therefore decidable by inspection, and the sign of a
nonzero value is decidable by interval refinement with a provable
separation bound.

Rationals are plain :class:`fractions.Fraction` (aliased ``Rat``);
:class:`Radical` carries the sqrt combinations.
"""

from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from functools import lru_cache

Rat = Fraction

#: trial-division limit for extracting square factors from radicands
DEFAULT_FACTOR_BOUND = 10**6

#: environment variable overriding the sign oracle's starting precision
SIGN_PRECISION_ENV = "DISQ_PRECISION_BITS"


class ExactNumError(ArithmeticError):
    """An exact operation could not be certified (bad input or bound hit)."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    # Miller-Rabin; the fixed base set is deterministic for n < 3.3e24.
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _split_square(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> tuple[int, int]:
    """Write ``n = s**2 * d`` with ``d`` squarefree; return ``(s, d)``.

    Trial division runs up to ``bound``.  A cofactor that survives it is
    certified squarefree when it is prime, a perfect square, or small
    enough (<= bound**3) that it cannot hide a square factor; otherwise we
    refuse rather than guess.
    """
    if n <= 0:
        raise ExactNumError(f"radicand must be positive, got {n}")
    s = d = 1
    m = n
    p = 2
    while p <= bound and p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p = 3 if p == 2 else p + 2
    if m == 1:
        return s, d
    if p * p > m:
        return s, d * m  # cofactor is prime
    r = math.isqrt(m)
    if r * r == m:
        return s * r, d
    if m <= bound**3 or _is_probable_prime(m):
        # no factor <= bound and not a square: at most two distinct primes
        return s, d * m
    raise ExactNumError(
        f"cannot certify a squarefree radicand for {n}; raise the factor bound"
    )


def _sqrt_interval(d: int, bits: int) -> tuple[Fraction, Fraction]:
    # enclosure of sqrt(d) of width 2**-bits
    s = math.isqrt(d << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


class Radical:
    """An exact value ``sum(c_d * sqrt(d))`` over squarefree integers ``d``.

    The rational part rides on the key ``d == 1``.  Terms are stored
    sorted by radicand with all-nonzero coefficients, which makes the
    representation canonical: ``x == y`` iff the term tuples match.
    Instances are immutable, hashable and safe to share across threads.
    """

    __slots__ = ("_terms",)

    def __init__(self, value: int | Fraction | "Radical" = 0):
        if isinstance(value, Radical):
            self._terms = value._terms
        elif isinstance(value, (int, Fraction)):
            q = Fraction(value)
            self._terms = ((1, q),) if q else ()
        else:
            raise TypeError(f"cannot build a Radical from {type(value).__name__}")

    @classmethod
    def _raw(cls, terms: tuple[tuple[int, Fraction], ...]) -> "Radical":
        self = object.__new__(cls)
        self._terms = terms
        return self

    @classmethod
    def _from_map(cls, terms: dict[int, Fraction]) -> "Radical":
        return cls._raw(tuple(sorted((d, c) for d, c in terms.items() if c)))

    @classmethod
    def single(cls, d: int, coeff: Fraction) -> "Radical":
        """The value ``coeff * sqrt(d)`` for an already-squarefree ``d``."""
        if d < 1:
            raise ExactNumError(f"radicand must be positive, got {d}")
        return cls._from_map({d: Fraction(coeff)})

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return len(self._terms) == 0 or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if self.is_rational:
            return self._terms[0][1]
        raise ExactNumError(f"{self} is irrational")

    # -- ring operations ------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Radical | None":
        if isinstance(other, Radical):
            return other
        if isinstance(other, (int, Fraction)):
            return Radical(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for d, c in o._terms:
            acc[d] = acc.get(d, Fraction(0)) + c
        return Radical._from_map(acc)

    __radd__ = __add__

    def __neg__(self):
        return Radical._raw(tuple((d, -c) for d, c in self._terms))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for d1, c1 in self._terms:
            for d2, c2 in o._terms:
                g = math.gcd(d1, d2)
                d = (d1 // g) * (d2 // g)
                acc[d] = acc.get(d, Fraction(0)) + c1 * c2 * g
        return Radical._from_map(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Radical(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Radical":
        """Exact reciprocal via the product of sign-flip conjugates.

        Flipping the signs of any subset of the sqrt terms yields another
        nonzero value (each flip pattern is again a canonical Radical, and
        a canonical form vanishes only when all coefficients do).  The
        product over all flip patterns is even in every sqrt separately and
        hence rational, so dividing the product of the nontrivial
        conjugates by it gives the reciprocal.
        """
        if not self._terms:
            raise ZeroDivisionError("Radical division by zero")
        rads = [d for d, _ in self._terms if d != 1]
        if not rads:
            return Radical(1 / self._terms[0][1])
        prod = Radical(1)
        for mask in range(1, 1 << len(rads)):
            flip = {rads[i] for i in range(len(rads)) if mask >> i & 1}
            conj = Radical._raw(
                tuple((d, -c if d in flip else c) for d, c in self._terms)
            )
            prod = prod * conj
        norm = self * prod
        if not norm.is_rational or norm.is_zero:
            raise ExactNumError("conjugate product did not yield a nonzero rational")
        return prod * Radical(1 / norm.as_fraction())

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational:
            q = o.as_fraction()
            if q == 0:
                raise ZeroDivisionError("Radical division by zero")
            return self * Radical(1 / q)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    # -- comparisons -----------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_rational:
            return hash(self.as_fraction())
        return hash(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def sign(self, start_bits: int | None = None) -> int:
        """Exact sign: -1, 0 or +1.

        Zero iff the term tuple is empty (canonical form).  Otherwise the
        value is enclosed in a rational interval whose width halves each
        round; a separation bound derived from the conjugate-product norm
        caps the refinement, so the loop provably terminates.
        """
        if not self._terms:
            return 0
        signs = {1 if c > 0 else -1 for _, c in self._terms}
        if len(signs) == 1:
            return signs.pop()  # all terms pull the same way
        if start_bits is None:
            start_bits = int(os.environ.get(SIGN_PRECISION_ENV, "64"))
        bits = max(8, start_bits)
        for _ in range(4):
            s = self._interval_sign(bits)
            if s is not None:
                return s
            bits *= 2
        # refine once more at the provable separation width
        sep = self._separation_bound()
        weight = sum(abs(c) for _, c in self._terms)
        while Fraction(weight, 1 << bits) >= sep:
            bits *= 2
        s = self._interval_sign(bits)
        if s is None:
            raise ExactNumError("sign refinement failed below the separation bound")
        return s

    def _interval_sign(self, bits: int) -> int | None:
        lo = hi = Fraction(0)
        for d, c in self._terms:
            if d == 1:
                lo += c
                hi += c
                continue
            slo, shi = _sqrt_interval(d, bits)
            if c > 0:
                lo += c * slo
                hi += c * shi
            else:
                lo += c * shi
                hi += c * slo
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        return None

    def _separation_bound(self) -> Fraction:
        """A positive rational ``b`` with ``|self| >= b`` (self nonzero)."""
        rads = [d for d, _ in self._terms if d != 1]
        k = len(rads)
        norm = self
        if k:
            prod = Radical(1)
            for mask in range(1, 1 << k):
                flip = {rads[i] for i in range(k) if mask >> i & 1}
                conj = Radical._raw(
                    tuple((d, -c if d in flip else c) for d, c in self._terms)
                )
                prod = prod * conj
            norm = self * prod
        val = abs(norm.as_fraction())
        big = sum(abs(c) * (math.isqrt(d) + 1) for d, c in self._terms)
        return val / max(Fraction(1), Fraction(big)) ** (2**k - 1)

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- rendering -------------------------------------------------------

    def to_float(self) -> float:
        """Advisory double-precision value (exact midpoint of a 128-bit enclosure)."""
        if not self._terms:
            return 0.0
        lo = hi = Fraction(0)
        for d, c in self._terms:
            slo, shi = (Fraction(1), Fraction(1)) if d == 1 else _sqrt_interval(d, 128)
            if c > 0:
                lo += c * slo
                hi += c * shi
            else:
                lo += c * shi
                hi += c * slo
        return float((lo + hi) / 2)

    __float__ = to_float

    def __str__(self):
        if not self._terms:
            return "0"
        parts: list[str] = []
        for d, c in self._terms:
            if d == 1:
                body = str(abs(c))
            elif abs(c) == 1:
                body = f"sqrt({d})"
            else:
                body = f"{abs(c)}*sqrt({d})"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Radical({str(self)!r})"

    _TERM_RE = re.compile(r"^(?:(\d+(?:/\d+)?)\*)?sqrt\((\d+)\)$")

    @classmethod
    def parse(cls, text: str) -> "Radical":
        """Inverse of ``str``: ``Radical.parse(str(x)) == x``.

        Accepts any sum of signed terms ``p/q`` or ``[c*]sqrt(d)``; input
        radicands need not be squarefree (they are normalized on entry).
        """
        compact = text.replace(" ", "")
        if not compact:
            raise ExactNumError("empty Radical literal")
        if compact == "0":
            return cls(0)
        tokens = re.findall(r"[+-]?[^+-]+", compact)
        if "".join(tokens) != compact:
            raise ExactNumError(f"cannot parse Radical literal {text!r}")
        total = cls(0)
        for tok in tokens:
            sign = -1 if tok.startswith("-") else 1
            body = tok.lstrip("+-")
            m = cls._TERM_RE.match(body)
            if m:
                coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
                term = rad_sqrt(int(m.group(2))) * Radical(sign * coeff)
            else:
                try:
                    term = cls(sign * Fraction(body))
                except (ValueError, ZeroDivisionError) as exc:
                    raise ExactNumError(f"cannot parse Radical term {tok!r}") from exc
            total = total + term
        return total


# -- operation-style entry points -----------------------------------------


def rad_sqrt(q: int | Fraction, bound: int = DEFAULT_FACTOR_BOUND) -> Radical:
    """Exact square root of a nonnegative rational.

    With ``q = p/r`` we have ``sqrt(q) = sqrt(p*r)/r``; the largest square
    factor ``s**2`` of ``p*r`` is extracted so the result is a single term
    ``(s/r)*sqrt(d)`` with ``d`` squarefree.
    """
    q = Fraction(q)
    if q < 0:
        raise ExactNumError(f"square root of negative rational {q}")
    if q == 0:
        return Radical(0)
    s, d = _split_square(q.numerator * q.denominator, bound)
    return Radical.single(d, Fraction(s, q.denominator))


def rad_add(x: Radical, y: Radical) -> Radical:
    return Radical(x) + Radical(y)


def rad_mul(x: Radical, y: Radical) -> Radical:
    return Radical(x) * Radical(y)


def rad_inv(x: Radical) -> Radical:
    return Radical(x).inverse()


def rad_sign(x: Radical, start_bits: int | None = None) -> int:
    return Radical(x).sign(start_bits)


def float_str(x: Radical | Fraction | int, sig: int = 17) -> str:
    """Advisory float rendering at ``sig`` significant digits."""
    if isinstance(x, Radical):
        v = x.to_float()
    else:
        v = float(Fraction(x))
    return format(v, f".{sig}g")
