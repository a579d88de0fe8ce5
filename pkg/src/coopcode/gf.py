"""Arithmetic in the binary extension fields GF(2^l), 1 <= l <= 16.

Field elements are plain ints in [0, 2^l).  The integer's bits are the
coefficients of the element written as a polynomial in the generator x,
high bit first: in GF(4) the value 2 is x and 3 is x + 1.  Addition is
XOR; multiplication and inversion go through log/antilog tables built
once per field, so a Field instance is cheap to use and safe to share
(treat it as immutable).
"""

from functools import lru_cache

import numpy as np

MAX_ELL = 16

# Default modulus per degree: primitive polynomials, so that x (value 2)
# generates the whole multiplicative group.  Table construction verifies
# primitivity and raises if a custom polynomial is not primitive.
DEFAULT_PRIM_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


class Field:
    """GF(2^ell) with table-based multiply/invert/power."""

    def __init__(self, ell: int, prim_poly: int | None = None):
        if not 1 <= ell <= MAX_ELL:
            raise ValueError(f"ell must be in [1, {MAX_ELL}], got {ell}")
        if prim_poly is None:
            prim_poly = DEFAULT_PRIM_POLY[ell]
        if prim_poly.bit_length() != ell + 1:
            raise ValueError(
                f"prim_poly must have degree {ell}, got 0b{prim_poly:b}"
            )
        self.ell = ell
        self.order = 1 << ell
        self.prim_poly = prim_poly
        self._build_tables()
        self._np = None  # numpy table mirror, built on demand

    def _build_tables(self):
        q = self.order
        exp = [0] * (q - 1)  # exp[i] = x^i
        log = [0] * q        # log[v] = i with x^i == v; log[0] unused
        seen = [False] * q
        acc = 1
        for i in range(q - 1):
            if seen[acc]:
                raise ValueError(
                    f"0b{self.prim_poly:b} is not primitive over GF(2)"
                )
            seen[acc] = True
            exp[i] = acc
            log[acc] = i
            acc <<= 1
            if acc & q:
                acc ^= self.prim_poly
        if acc != 1:  # x^(q-1) must close the cycle
            raise ValueError(f"0b{self.prim_poly:b} is not primitive over GF(2)")
        self._exp = exp
        self._log = log

    # -- scalar ops --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add  # characteristic 2

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by 0")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        """a**e with the convention 0**0 == 1; negative e inverts (a != 0)."""
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 cannot be raised to a negative power")
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    @property
    def generator(self) -> int:
        """An element of multiplicative order q-1 (x itself, or 1 in GF(2))."""
        return 2 if self.ell > 1 else 1

    def elements(self):
        return range(self.order)

    # -- numpy table mirror (used by the batched simulator kernels) --------

    def np_tables(self):
        """Return (log, exp2, inv) int32 arrays for vectorized arithmetic.

        log[0] is a sentinel 2*(q-1) and exp2 is zero-padded past 2*(q-1),
        so exp2[log[a] + log[b]] is a*b including the zero cases.
        """
        if self._np is None:
            q = self.order
            sentinel = 2 * (q - 1)
            log = np.empty(q, dtype=np.int32)
            log[0] = sentinel
            for v in range(1, q):
                log[v] = self._log[v]
            exp2 = np.zeros(2 * sentinel + 1, dtype=np.int32)
            for i in range(sentinel):
                exp2[i] = self._exp[i % (q - 1)]
            inv = np.zeros(q, dtype=np.int32)
            for v in range(1, q):
                inv[v] = self.inv(v)
            self._np = (log, exp2, inv)
        return self._np

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.ell == other.ell
            and self.prim_poly == other.prim_poly
        )

    def __hash__(self):
        return hash((self.ell, self.prim_poly))

    def __reduce__(self):
        return (Field, (self.ell, self.prim_poly))

    def __repr__(self):
        return f"Field(ell={self.ell}, prim_poly=0b{self.prim_poly:b})"


@lru_cache(maxsize=None)
def _cached_field(ell: int) -> Field:
    return Field(ell)


def field_new(ell: int) -> Field:
    """GF(2^ell) with the default primitive polynomial (cached)."""
    return _cached_field(ell)
