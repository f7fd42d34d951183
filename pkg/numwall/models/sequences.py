"""
Sequence generators over F_p and one-dimensional substitution systems
"""
import logging
import re
from dataclasses import dataclass

import numpy as np

from numwall.core.constants import (
    DEFAULT_MODULUS, PAPER_FOLDING_CODING, PAPER_FOLDING_SEEDS,
    PAPER_FOLDING_SUBSTITUTION, SequenceKind,
)
from numwall.core.exceptions import ConfigurationError, SequenceDomainError, SequenceFormatError
from numwall.core.utils import ceil_div, representative
from numwall.models.field import Modulus

logger = logging.getLogger('numwall')

_HEADER = re.compile(r'^seq\s+p=(\d+)\s+lo=(-?\d+)\s+hi=(-?\d+)\s*$')

def paper_folding_bits(indices):
    """
    Paper-folding values f_n as 0/1 integers, vectorised

    f_n is read off the odd part k of |n|: 0 if k ≡ 1 (mod 4), 1 if k ≡ 3;
    f_0 = 0 and f_{-n} = 1 - f_n.

    Args:
        indices (array-like): Integer indices

    Returns:
        numpy.ndarray: int64 array of bits
    """
    n = np.asarray(indices, dtype=np.int64)
    magnitude = np.abs(n)
    safe = np.where(magnitude == 0, 1, magnitude)
    odd = safe // (safe & -safe)
    bits = (odd % 4 == 3).astype(np.int64)
    bits = np.where(n < 0, 1 - bits, bits)
    return np.where(n == 0, 0, bits)

def thue_morse_bits(indices):
    """Parity of the binary digit sum of each (non-negative) index"""
    x = np.asarray(indices, dtype=np.int64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1

class SequenceSource:
    """
    A sequence θ over F_p together with the interval on which it is defined

    Values are produced by a vectorised generator mapping an index array to
    residues; `lo`/`hi` of None mean unbounded in that direction.
    """

    def __init__(self, kind, modulus, generator, lo=None, hi=None, name=None):
        """
        Args:
            kind (SequenceKind): Generator family
            modulus (Modulus): The field
            generator (callable): Maps an int64 index array to residues
            lo (int, optional): First defined index
            hi (int, optional): Last defined index
            name (str, optional): Label used in reports
        """
        self.kind = kind
        self.modulus = modulus
        self._generator = generator
        self.lo = lo
        self.hi = hi
        self.name = name or kind.value

    def __repr__(self):
        return f"SequenceSource({self.name}, {self.modulus}, domain=[{self.lo}, {self.hi}])"

    def is_defined(self, lo, hi):
        """Whether every index in lo..hi is defined"""
        return (self.lo is None or lo >= self.lo) and (self.hi is None or hi <= self.hi)

    def check_domain(self, lo, hi):
        """
        Raises:
            SequenceDomainError: If some index in lo..hi is undefined
        """
        if not self.is_defined(lo, hi):
            raise SequenceDomainError(
                f"{self.name} is defined on [{self.lo}, {self.hi}], "
                f"indices {lo}..{hi} requested")

    def segment(self, lo, hi):
        """
        Values θ_lo..θ_hi

        Returns:
            numpy.ndarray: int64 residues, length hi - lo + 1
        """
        if lo > hi:
            return np.zeros(0, dtype=np.int64)
        self.check_domain(lo, hi)
        indices = np.arange(lo, hi + 1, dtype=np.int64)
        return np.asarray(self._generator(indices), dtype=np.int64) % self.modulus.p

    def value(self, n):
        """Residue θ_n as an int"""
        return int(self.segment(n, n)[0])

    def __call__(self, n):
        """θ_n as a FieldElement"""
        return self.modulus.element(self.value(n))

    # Factories

    @classmethod
    def paper_folding(cls, modulus=None):
        modulus = modulus or Modulus(DEFAULT_MODULUS)
        return cls(SequenceKind.PAPER_FOLDING, modulus, paper_folding_bits)

    @classmethod
    def pagoda(cls, modulus=None):
        modulus = modulus or Modulus(DEFAULT_MODULUS)
        return cls(SequenceKind.PAGODA, modulus,
                   lambda n: paper_folding_bits(n + 1) - paper_folding_bits(n - 1))

    @classmethod
    def thue_morse(cls, modulus=None):
        modulus = modulus or Modulus(2)
        return cls(SequenceKind.THUE_MORSE, modulus, thue_morse_bits, lo=0)

    @classmethod
    def constant(cls, value, modulus=None):
        modulus = modulus or Modulus(DEFAULT_MODULUS)
        residue = int(value) % modulus.p
        return cls(SequenceKind.CONSTANT, modulus,
                   lambda n: np.full(n.shape, residue, dtype=np.int64),
                   name=f"const{residue}")

    @classmethod
    def from_array(cls, values, lo, modulus, name="array"):
        """
        File-style sequence held in memory, defined exactly on lo..lo+len-1
        """
        stored = np.asarray(values, dtype=np.int64) % modulus.p
        if stored.ndim != 1 or stored.size == 0:
            raise SequenceFormatError("A sequence needs at least one value")
        return cls(SequenceKind.FILE, modulus, lambda n: stored[n - lo],
                   lo=lo, hi=lo + stored.size - 1, name=name)

    @classmethod
    def from_system(cls, system):
        """Sequence ρ(T) of a one-dimensional substitution system"""
        return cls(SequenceKind.SUBST_SYSTEM, system.modulus,
                   lambda n: expand_1d(system, int(n[0]), int(n[-1])) if n.size else n,
                   name="subst-system")

    @classmethod
    def load(cls, file_path):
        """
        Load a sequence file: header `seq p=<modulus> lo=<int> hi=<int>` then residues

        Raises:
            SequenceFormatError: On a malformed header, wrong count or out-of-range residue
        """
        with open(file_path, 'r') as f:
            header = f.readline()
            body = f.read()

        match = _HEADER.match(header.strip())
        if not match:
            raise SequenceFormatError(f"Bad sequence header in {file_path}: {header.strip()!r}")
        p, lo, hi = (int(group) for group in match.groups())
        modulus = Modulus(p)

        try:
            values = np.array([int(token) for token in body.split()], dtype=np.int64)
        except ValueError as e:
            raise SequenceFormatError(f"Non-integer residue in {file_path}: {e}")
        if values.size != hi - lo + 1:
            raise SequenceFormatError(
                f"{file_path} declares {hi - lo + 1} values but holds {values.size}")
        if np.any((values < 0) | (values >= p)):
            raise SequenceFormatError(f"{file_path} holds residues outside 0..{p - 1}")

        logger.debug(f"Loaded {values.size} residues mod {p} from {file_path}")
        return cls.from_array(values, lo, modulus, name=f"file:{file_path}")

    def save(self, file_path, lo, hi):
        """Write θ_lo..θ_hi in the sequence file format"""
        values = self.segment(lo, hi)
        with open(file_path, 'w') as f:
            f.write(f"seq p={self.modulus.p} lo={lo} hi={hi}\n")
            for start in range(0, values.size, 40):
                f.write(' '.join(str(v) for v in values[start:start + 40]) + '\n')

def parse_sequence_spec(spec, modulus):
    """
    Build a source from a command-line name

    Args:
        spec (str): paperfolding, pagoda, thuemorse, const<d> or file:<path>
        modulus (Modulus): Field for generated sequences (file sequences carry their own)

    Returns:
        SequenceSource: The source
    """
    name = spec.strip().lower()
    if name in ('paperfolding', 'paper-folding', 'dragon'):
        return SequenceSource.paper_folding(modulus)
    if name == 'pagoda':
        return SequenceSource.pagoda(modulus)
    if name in ('thuemorse', 'thue-morse'):
        return SequenceSource.thue_morse(modulus)
    if name.startswith('const') and name[5:].lstrip('-').isdigit():
        return SequenceSource.constant(int(name[5:]), modulus)
    if spec.startswith('file:'):
        return SequenceSource.load(spec[5:])
    raise ConfigurationError(f"Unknown sequence {spec!r}")

def paper_folding(n, modulus=None):
    """Paper-folding value f_n in F_p (F_3 by default)"""
    return SequenceSource.paper_folding(modulus)(n)

def pagoda(n, modulus=None):
    """Pagoda value π_n = f_{n+1} - f_{n-1} in F_p (F_3 by default)"""
    return SequenceSource.pagoda(modulus)(n)

def thue_morse(n, modulus=None):
    """
    Thue-Morse value t_n (binary digit-sum parity) in F_p (F_2 by default)

    Raises:
        SequenceDomainError: For n < 0
    """
    return SequenceSource.thue_morse(modulus)(n)

@dataclass(frozen=True, eq=False)
class SubstSystem1D:
    """
    Uniform one-dimensional substitution ψ with coding ρ and orthant seeds

    seeds[0] is the letter fixed at index 0 (n <= 0 side), seeds[1] the one
    fixed at index 1 (n >= 1 side).
    """
    substitution: dict
    coding: dict
    seeds: tuple
    modulus: Modulus

    def __post_init__(self):
        self.validate()

    @property
    def alphabet(self):
        return tuple(sorted(self.substitution))

    @property
    def k(self):
        return len(next(iter(self.substitution.values())))

    def validate(self):
        """
        Raises:
            ConfigurationError: On ragged images, partial coding or non-prolongable seeds
        """
        if not self.substitution:
            raise ConfigurationError("Empty substitution")
        k = self.k
        if k < 2:
            raise ConfigurationError("Substitution images need length k >= 2")
        for letter, image in self.substitution.items():
            if len(image) != k:
                raise ConfigurationError(f"Image of {letter} has length {len(image)}, expected {k}")
            for target in image:
                if target not in self.substitution:
                    raise ConfigurationError(f"Image of {letter} uses unknown letter {target}")
            if letter not in self.coding:
                raise ConfigurationError(f"Coding undefined on letter {letter}")

        left, right = self.seeds
        if self.substitution.get(left, (None,))[-1] != left:
            raise ConfigurationError(f"Seed {left} is not 0-prolongable")
        if self.substitution.get(right, (None,))[0] != right:
            raise ConfigurationError(f"Seed {right} is not 1-prolongable")

    def image_table(self):
        size = max(self.alphabet) + 1
        table = np.zeros((size, self.k), dtype=np.int64)
        for letter, image in self.substitution.items():
            table[letter] = image
        return table

    def coding_table(self):
        table = np.zeros(max(self.alphabet) + 1, dtype=np.int64)
        for letter, value in self.coding.items():
            table[letter] = value
        return table % self.modulus.p

    def power(self, exponent):
        """
        The system (ψ^j, ρ) with the same seeds

        Args:
            exponent (int): j >= 1

        Returns:
            SubstSystem1D: Substitution of length k^j
        """
        images = {letter: (letter,) for letter in self.substitution}
        for _ in range(exponent):
            images = {letter: tuple(target for symbol in word for target in self.substitution[symbol])
                      for letter, word in images.items()}
        return SubstSystem1D(images, dict(self.coding), self.seeds, self.modulus)

def paper_folding_system(modulus=None):
    """The 2-substitution and coding that generate the paper-folding sequence"""
    return SubstSystem1D(dict(PAPER_FOLDING_SUBSTITUTION), dict(PAPER_FOLDING_CODING),
                         PAPER_FOLDING_SEEDS, modulus or Modulus(DEFAULT_MODULUS))

def letters_1d(system, lo, hi):
    """
    Letters T(lo..hi) of the fixed point, T(n) = ψ(T(⌈n/k⌉))([n]_k)

    Returns:
        numpy.ndarray: int64 letters
    """
    if lo > hi:
        raise ConfigurationError(f"Empty range {lo}..{hi}")
    if lo >= 0 and hi <= 1:
        seeds = np.array(system.seeds, dtype=np.int64)
        return seeds[np.arange(lo, hi + 1)]

    k = system.k
    parent_lo, parent_hi = ceil_div(lo, k), ceil_div(hi, k)
    parents = letters_1d(system, parent_lo, parent_hi)
    indices = np.arange(lo, hi + 1, dtype=np.int64)
    parent_letters = parents[ceil_div(indices, k) - parent_lo]
    return system.image_table()[parent_letters, representative(indices, k) - 1]

def expand_1d(system, lo, hi):
    """
    Segment lo..hi of ρ applied to the fixed point of the system

    Returns:
        numpy.ndarray: int64 residues mod p
    """
    return system.coding_table()[letters_1d(system, lo, hi)]
