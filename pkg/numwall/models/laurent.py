"""
Polynomials and truncated Laurent series over F_p, continued fractions in
F_p((1/t)) and Hankel determinants
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from numwall.core.constants import QUADRATIC_RELATIONS
from numwall.core.exceptions import ConfigurationError, ModulusMismatchError
from numwall.models.field import Modulus, determinant
from numwall.models.sequences import SequenceSource

logger = logging.getLogger('numwall')

NEG_INF = float('-inf')

class Poly:
    """
    Polynomial over F_p, coefficients stored constant term first without trailing zeros
    """

    def __init__(self, coefficients, modulus):
        values = [int(c) % modulus.p for c in coefficients]
        while values and values[-1] == 0:
            values.pop()
        self.coefficients = tuple(values)
        self.modulus = modulus

    @classmethod
    def monomial(cls, degree, modulus, coefficient=1):
        return cls([0] * degree + [coefficient], modulus)

    @property
    def degree(self):
        """Degree, or -inf for the zero polynomial"""
        return len(self.coefficients) - 1 if self.coefficients else NEG_INF

    def is_zero(self):
        return not self.coefficients

    def leading(self):
        return self.coefficients[-1] if self.coefficients else 0

    def _check(self, other):
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"Cannot combine {self.modulus} and {other.modulus} polynomials")

    def __eq__(self, other):
        return isinstance(other, Poly) and self.modulus == other.modulus \
            and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.coefficients, self.modulus))

    def __add__(self, other):
        self._check(other)
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (size - len(self.coefficients))
        b = other.coefficients + (0,) * (size - len(other.coefficients))
        return Poly([x + y for x, y in zip(a, b)], self.modulus)

    def __neg__(self):
        return Poly([-c for c in self.coefficients], self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self.modulus)
        product = np.convolve(np.array(self.coefficients, dtype=np.int64),
                              np.array(other.coefficients, dtype=np.int64))
        return Poly(product % self.modulus.p, self.modulus)

    def __divmod__(self, other):
        """Euclidean division (quotient, remainder)"""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("Polynomial division by zero")
        p = self.modulus.p
        remainder = list(self.coefficients)
        quotient = [0] * max(0, len(remainder) - len(other.coefficients) + 1)
        lead_inverse = self.modulus.inverse(other.leading())
        divisor_degree = len(other.coefficients) - 1
        for shift in range(len(quotient) - 1, -1, -1):
            factor = remainder[shift + divisor_degree] * lead_inverse % p
            quotient[shift] = factor
            if factor:
                for i, c in enumerate(other.coefficients):
                    remainder[shift + i] = (remainder[shift + i] - factor * c) % p
        return Poly(quotient, self.modulus), Poly(remainder, self.modulus)

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = [f"{c}t^{i}" for i, c in enumerate(self.coefficients) if c]
        return f"Poly({' + '.join(reversed(terms))} mod {self.modulus.p})"

class LaurentTruncation:
    """
    Laurent series in 1/t known exactly down to t^-precision

    coefficients[i] is the coefficient of t^(degree - i). A fractional series
    Θ = Σ θ_n t^-n has degree -1 and coefficients θ_1..θ_N.
    """

    def __init__(self, coefficients, modulus, precision, degree=-1):
        values = np.asarray(coefficients, dtype=np.int64) % modulus.p
        expected = degree + precision + 1
        if expected < 0:
            raise ConfigurationError(f"Precision {precision} lies above degree {degree}")
        if values.size < expected:
            values = np.concatenate([values, np.zeros(expected - values.size, dtype=np.int64)])
        self.coefficients = values[:expected]
        self.modulus = modulus
        self.precision = precision
        self.degree = degree

    @classmethod
    def from_source(cls, source, precision, shift=0):
        """Fractional part of t^shift·Θ: coefficients θ_{shift+1}..θ_{shift+precision}"""
        return cls(source.segment(shift + 1, shift + precision), source.modulus, precision)

    @classmethod
    def from_poly(cls, poly, precision):
        """An exact polynomial viewed as a series known down to t^-precision"""
        degree = max(int(poly.degree), 0) if not poly.is_zero() else 0
        coefficients = list(reversed(poly.coefficients)) if not poly.is_zero() else [0]
        coefficients = [0] * (degree + 1 - len(coefficients)) + coefficients
        return cls(coefficients, poly.modulus, precision, degree)

    @classmethod
    def monomial(cls, exponent, modulus, precision):
        """t^exponent, exact through t^-precision"""
        return cls([1], modulus, precision, exponent)

    def coefficient(self, exponent):
        if exponent > self.degree:
            return 0
        if exponent < -self.precision:
            raise ConfigurationError(f"t^{exponent} lies beyond the known precision {self.precision}")
        return int(self.coefficients[self.degree - exponent])

    def fractional(self):
        """Coefficients θ_1..θ_N of the part with negative exponents"""
        return np.array([self.coefficient(-n) for n in range(1, self.precision + 1)], dtype=np.int64)

    def polynomial_part(self):
        """The part with exponents >= 0 as a Poly"""
        if self.degree < 0:
            return Poly([], self.modulus)
        return Poly([self.coefficient(e) for e in range(0, self.degree + 1)], self.modulus)

    def valuation(self):
        """Largest exponent e with a nonzero known coefficient, or None if all known ones vanish"""
        nonzero = np.nonzero(self.coefficients)[0]
        if nonzero.size == 0:
            return None
        return self.degree - int(nonzero[0])

    def vanishes_through(self, order):
        """True iff every coefficient of t^e with e >= -order is zero"""
        if order > self.precision:
            raise ConfigurationError(f"Order {order} exceeds precision {self.precision}")
        return not np.any(self.coefficients[:self.degree + order + 1])

    def _check(self, other):
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"Cannot combine {self.modulus} and {other.modulus} series")

    def __add__(self, other):
        self._check(other)
        degree = max(self.degree, other.degree)
        precision = min(self.precision, other.precision)
        exponents = np.arange(degree, -precision - 1, -1)
        total = np.zeros(exponents.size, dtype=np.int64)
        for series in (self, other):
            offset = degree - series.degree
            count = series.degree + precision + 1
            if count > 0:
                total[offset:offset + count] += series.coefficients[:count]
        return LaurentTruncation(total, self.modulus, precision, degree)

    def __neg__(self):
        return LaurentTruncation(-self.coefficients, self.modulus, self.precision, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        degree = self.degree + other.degree
        precision = min(self.precision - other.degree, other.precision - self.degree)
        product = np.convolve(self.coefficients, other.coefficients) % self.modulus.p
        return LaurentTruncation(product, self.modulus, precision, degree)

    def shift(self, exponent):
        """Multiply by t^exponent"""
        return LaurentTruncation(self.coefficients, self.modulus,
                                 self.precision - exponent, self.degree + exponent)

    def inverse(self):
        """
        Multiplicative inverse

        Raises:
            ZeroDivisionError: If no known coefficient is nonzero
        """
        lead_exponent = self.valuation()
        if lead_exponent is None:
            raise ZeroDivisionError("Series vanishes at the known precision")
        p = self.modulus.p
        a = self.coefficients[self.degree - lead_exponent:]
        b = np.zeros(a.size, dtype=np.int64)
        b[0] = self.modulus.inverse(int(a[0]))
        for j in range(1, a.size):
            b[j] = -b[0] * (int(np.dot(a[1:j + 1], b[j - 1::-1])) % p) % p
        return LaurentTruncation(b, self.modulus, lead_exponent + a.size - 1, -lead_exponent)

    def __repr__(self):
        return f"LaurentTruncation(degree={self.degree}, precision={self.precision}, {self.modulus})"

@dataclass(frozen=True)
class CFProfile:
    """
    Degrees of the partial quotients of a fractional series

    Only the first `certified` degrees are determined by the known coefficients.
    """
    degrees: tuple
    certified: int
    precision: int
    positions: tuple = field(default=(), compare=False)

    @property
    def certified_degrees(self):
        return self.degrees[:self.certified]

    @property
    def max_certified(self):
        return max(self.certified_degrees, default=0)

    def partial_sums(self):
        """h_1, h_2, ... with h_m = d_1 + ... + d_m"""
        sums, total = [], 0
        for degree in self.degrees:
            total += degree
            sums.append(total)
        return sums

    def to_dict(self):
        return {"degrees": list(self.degrees), "certified": self.certified,
                "precision": self.precision}

def linear_complexity_profile(values, modulus):
    """
    Berlekamp-Massey linear complexity profile over F_p

    Args:
        values (array-like): s_1..s_N
        modulus (Modulus): The field

    Returns:
        numpy.ndarray: L_1..L_N, L_n the linear complexity of s_1..s_n
    """
    p = modulus.p
    s = np.asarray(values, dtype=np.int64) % p
    size = s.size
    connection = np.zeros(size + 1, dtype=np.int64)
    connection[0] = 1
    previous = connection.copy()
    length, gap, last_discrepancy = 0, 1, 1
    profile = np.zeros(size, dtype=np.int64)

    for n in range(size):
        discrepancy = int((s[n] + np.dot(connection[1:length + 1], s[n - length:n][::-1])) % p)
        if discrepancy == 0:
            gap += 1
        else:
            factor = discrepancy * modulus.inverse(last_discrepancy) % p
            updated = connection.copy()
            updated[gap:] = (updated[gap:] - factor * previous[:size + 1 - gap]) % p
            if 2 * length <= n:
                previous = connection
                length = n + 1 - length
                last_discrepancy = discrepancy
                gap = 1
            else:
                gap += 1
            connection = updated
        profile[n] = length
    return profile

def continued_fraction(theta, max_terms=None):
    """
    Partial-quotient degrees of a fractional series Θ = Σ θ_n t^-n

    The degrees are the jumps of the linear complexity profile of θ_1..θ_N. The
    jump that completes quotient i happens after h_{i-1} + h_i coefficients, and
    the quotient counts as certified only when that is strictly below N.

    Args:
        theta (LaurentTruncation): Fractional series (degree -1)
        max_terms (int, optional): Stop after this many quotients

    Returns:
        CFProfile: Degrees and certified count
    """
    if theta.precision < 1:
        raise ConfigurationError("Continued fraction needs precision N >= 1")
    profile = linear_complexity_profile(theta.fractional(), theta.modulus)

    degrees, positions = [], []
    previous = 0
    for index, length in enumerate(profile):
        if length != previous:
            degrees.append(int(length - previous))
            positions.append(index + 1)
            previous = int(length)
            if max_terms is not None and len(degrees) >= max_terms:
                break

    certified = sum(1 for position in positions if position < theta.precision)
    return CFProfile(tuple(degrees), certified, theta.precision, tuple(positions))

def partial_quotients(theta, max_terms=None):
    """
    Partial quotients a_1, a_2, ... of Θ = 1/(a_1 + 1/(a_2 + ...)) by repeated inversion

    Each step spends 2·deg(a_i) coefficients of precision; expansion stops when
    the next quotient is no longer determined.

    Returns:
        list: Poly quotients
    """
    quotients = []
    x = theta
    while max_terms is None or len(quotients) < max_terms:
        lead = x.valuation()
        if lead is None or lead >= 0:
            break
        if -2 * lead > x.precision:
            break
        y = x.inverse()
        quotient = y.polynomial_part()
        quotients.append(quotient)
        x = y - LaurentTruncation.from_poly(quotient, y.precision)
        if x.precision < 1:
            break
    return quotients

def convergents(quotients):
    """
    Convergents p_m/q_m of [0; a_1, a_2, ...]

    Returns:
        list: (p_m, q_m) Poly pairs for m = 1..len(quotients)
    """
    if not quotients:
        return []
    modulus = quotients[0].modulus
    p_prev, p_cur = Poly([1], modulus), Poly([], modulus)
    q_prev, q_cur = Poly([], modulus), Poly([1], modulus)
    result = []
    for quotient in quotients:
        p_prev, p_cur = p_cur, quotient * p_cur + p_prev
        q_prev, q_cur = q_cur, quotient * q_cur + q_prev
        result.append((p_cur, q_cur))
    return result

def approximation_order(theta, numerator, denominator):
    """
    Exponent h with q·Θ - p = c·t^-h + (lower terms)

    Returns:
        int or None: h, or None if q·Θ - p vanishes at the available precision
    """
    q_series = LaurentTruncation.from_poly(denominator, theta.precision + int(max(denominator.degree, 0)))
    error = q_series * theta - LaurentTruncation.from_poly(numerator, theta.precision)
    lead = error.valuation()
    return None if lead is None else -lead

def deficiency_via_cf(source, shifts, precision):
    """
    Largest certified partial-quotient degree over t^kΘ, 0 <= k <= shifts

    Args:
        source (SequenceSource): θ, defined on 1..shifts+precision
        shifts (int): K
        precision (int): N coefficients per shift

    Returns:
        int: Lower bound on the deficiency, exact once N and K are large enough
    """
    if shifts < 0:
        raise ConfigurationError("Shift count K must be non-negative")
    best = 0
    for shift in range(shifts + 1):
        profile = continued_fraction(LaurentTruncation.from_source(source, precision, shift))
        best = max(best, profile.max_certified)
        logger.debug(f"Shift {shift}: certified degrees {profile.certified_degrees}")
    logger.info(f"Continued-fraction deficiency of {source.name} over {source.modulus}: {best} "
                f"(K={shifts}, N={precision})")
    return best

def hankel_det(source, n, l):
    """
    Determinant of the (l+1)x(l+1) Hankel matrix [θ_{n+i+j}] over F_p

    Raises:
        SequenceDomainError: If θ_n..θ_{n+2l} is not defined
    """
    values = source.segment(n, n + 2 * l)
    indices = np.add.outer(np.arange(l + 1), np.arange(l + 1))
    return source.modulus.element(determinant(values[indices], source.modulus))

def hankel_sign(l):
    """(-1)^{l(l+1)/2}, the sign taking Toeplitz to Hankel determinants of size l+1"""
    return -1 if (l * (l + 1) // 2) % 2 else 1

def hankel_from_wall(wall, n, l):
    """
    Hankel determinant with top-left θ_n and size l+1 read off a wall

    It is the Toeplitz entry at row l, column n+l, times (-1)^{l(l+1)/2}.
    """
    return wall.modulus.element(hankel_sign(l) * wall.entry(l, n + l))

def _rational(numerator, denominator, modulus, precision):
    """numerator/denominator as a series; both are coefficient tuples, constant term first"""
    top = LaurentTruncation.from_poly(Poly(numerator, modulus), precision)
    return top * LaurentTruncation.from_poly(Poly(denominator, modulus), precision).inverse()

def check_quadratic_f2(which, order, source=None, relations=QUADRATIC_RELATIONS):
    """
    Check the quadratic relations over F_2 through t^-order

    phi: Φ² + Φ + t/(1 + t⁴) = 0 for the paper-folding series Φ
    pi:  Π² + ((1 + t²)/t)·Π + 1/t = 0 for the pagoda series Π

    Args:
        which (str): "phi" or "pi"
        order (int): N
        source (SequenceSource, optional): Replacement coefficients (defined on 1..N+2)
        relations (dict, optional): Name -> (linear numerator, linear denominator,
            constant numerator, constant denominator) of X² + (a/b)·X + c/d

    Returns:
        bool: True iff the relation holds through t^-N
    """
    if which not in relations:
        raise ConfigurationError(f"Unknown relation {which!r}, expected one of {sorted(relations)}")
    modulus = Modulus(2)
    if source is None:
        source = SequenceSource.paper_folding(modulus) if which == 'phi' else SequenceSource.pagoda(modulus)
    if source.modulus != modulus:
        raise ModulusMismatchError(f"Quadratic relations hold over F_2, got {source.modulus}")

    precision = order + 2
    series = LaurentTruncation.from_source(source, precision)
    exact = precision + 8
    linear_top, linear_bottom, constant_top, constant_bottom = relations[which]
    linear = _rational(linear_top, linear_bottom, modulus, exact)
    total = series * series + linear * series + _rational(constant_top, constant_bottom, modulus, exact)

    holds = total.vanishes_through(order)
    logger.info(f"Quadratic relation {which} through t^-{order}: {'holds' if holds else 'fails'}")
    return holds
