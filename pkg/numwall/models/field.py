"""
Exact arithmetic in prime fields F_p
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from numwall.core.constants import INVERSE_TABLE_LIMIT
from numwall.core.exceptions import FieldDivisionError, ModulusError, ModulusMismatchError

logger = logging.getLogger('numwall')

def is_prime(p):
    """
    Primality by trial division

    Args:
        p (int): Candidate

    Returns:
        bool: True if p is prime
    """
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    divisor = 3
    while divisor * divisor <= p:
        if p % divisor == 0:
            return False
        divisor += 2
    return True

def extended_gcd(a, b):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)"""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0

@lru_cache(maxsize=None)
def _inverse_table(p):
    table = np.zeros(p, dtype=np.int64)
    for value in range(1, p):
        table[value] = pow(value, p - 2, p)
    return table

@dataclass(frozen=True)
class Modulus:
    """
    A prime modulus p, checked at construction
    """
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ModulusError(f"Modulus must be a prime integer, got {self.p!r}")
        object.__setattr__(self, 'p', int(self.p))

    def __str__(self):
        return f"F_{self.p}"

    @property
    def dtype(self):
        """Smallest unsigned numpy dtype holding every residue"""
        if self.p < 256:
            return np.uint8
        if self.p < 65536:
            return np.uint16
        return np.int64

    def element(self, value):
        """Residue class of an integer as a FieldElement"""
        return FieldElement(int(value) % self.p, self)

    def inverse(self, value):
        """
        Inverse of a nonzero residue by the extended Euclidean algorithm

        Raises:
            FieldDivisionError: If value ≡ 0 (mod p)
        """
        value = int(value) % self.p
        if value == 0:
            raise FieldDivisionError(f"Zero has no inverse in {self}")
        _, x, _ = extended_gcd(value, self.p)
        return x % self.p

    def inverse_array(self, values):
        """
        Elementwise inverses of a residue array

        Args:
            values (numpy.ndarray): Nonzero residues

        Returns:
            numpy.ndarray: int64 array of inverses
        """
        values = np.asarray(values, dtype=np.int64) % self.p
        if np.any(values == 0):
            raise FieldDivisionError(f"Zero has no inverse in {self}")
        if self.p <= INVERSE_TABLE_LIMIT:
            return _inverse_table(self.p)[values]

        # Fermat exponentiation by repeated squaring on the whole array
        result = np.ones_like(values)
        base = values.copy()
        exponent = self.p - 2
        while exponent:
            if exponent & 1:
                result = result * base % self.p
            base = base * base % self.p
            exponent >>= 1
        return result

@dataclass(frozen=True)
class FieldElement:
    """
    An element of F_p stored as its residue 0 <= value < p
    """
    value: int
    modulus: Modulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.p:
            raise ValueError(f"Residue {self.value} out of range for {self.modulus}")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return self.modulus.element(other)
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"Cannot combine {self.modulus} and {other.modulus} elements")
        return other

    def __add__(self, other):
        return add(self, self._check(other))

    def __sub__(self, other):
        return sub(self, self._check(other))

    def __mul__(self, other):
        return mul(self, self._check(other))

    def __truediv__(self, other):
        return mul(self, inv(self._check(other)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.modulus.p})"

def _same_field(a, b):
    if a.modulus != b.modulus:
        raise ModulusMismatchError(f"Cannot combine {a.modulus} and {b.modulus} elements")
    return a.modulus

def add(a, b):
    """Sum of two elements of the same field"""
    modulus = _same_field(a, b)
    return FieldElement((a.value + b.value) % modulus.p, modulus)

def sub(a, b):
    """Difference of two elements of the same field"""
    modulus = _same_field(a, b)
    return FieldElement((a.value - b.value) % modulus.p, modulus)

def mul(a, b):
    """Product of two elements of the same field"""
    modulus = _same_field(a, b)
    return FieldElement(a.value * b.value % modulus.p, modulus)

def neg(a):
    """Additive inverse"""
    return FieldElement(-a.value % a.modulus.p, a.modulus)

def inv(a):
    """
    Multiplicative inverse

    Raises:
        FieldDivisionError: If a is zero
    """
    return FieldElement(a.modulus.inverse(a.value), a.modulus)

def determinant(matrix, modulus):
    """
    Determinant of a square matrix over F_p by Gaussian elimination

    Args:
        matrix (array-like): Square matrix of integers
        modulus (Modulus): The field

    Returns:
        int: Residue of the determinant
    """
    p = modulus.p
    work = np.array(matrix, dtype=np.int64) % p
    if work.ndim != 2 or work.shape[0] != work.shape[1]:
        raise ValueError(f"Determinant needs a square matrix, got shape {work.shape}")

    size = work.shape[0]
    det = 1
    for col in range(size):
        pivots = np.nonzero(work[col:, col])[0]
        if pivots.size == 0:
            return 0
        pivot = col + int(pivots[0])
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            det = -det
        pivot_value = int(work[col, col])
        det = det * pivot_value % p
        if col + 1 < size:
            factors = work[col + 1:, col] * modulus.inverse(pivot_value) % p
            work[col + 1:] = (work[col + 1:] - np.outer(factors, work[col])) % p
    return det % p
