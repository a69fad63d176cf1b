"""Exact rational energy-level sets and their revival parameters.

Level arithmetic is done entirely with :class:`fractions.Fraction`: the
revival condition "all levels lie on an integer ladder E = spacing*N + offset"
is an exact statement, and a gcd over floats is not well defined.  Floating
point enters only later, when potentials are sampled on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

RationalLike = Union[Fraction, int, str]

TWO_PI = 2.0 * math.pi


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings and Fractions to an exact Fraction.

    Floats are rejected on purpose: a float cannot express the caller's
    intent exactly and would poison the gcd arithmetic downstream.
    """
    if isinstance(value, float):
        raise TypeError(
            f"refusing to coerce float {value!r} to an exact rational; "
            "pass a Fraction, int or 'p/q' string"
        )
    return Fraction(value)


def fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    """gcd extended to rationals: largest r with a/r and b/r both integers."""
    num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(num, a.denominator * b.denominator)


@dataclass(frozen=True)
class LevelSet:
    """A strictly increasing, nonempty set of exact rational energy levels.

    ``origin`` records which generator produced the set and with which
    parameters, so a designed potential can be traced back to its target.
    """

    levels: tuple[Fraction, ...]
    origin: str = "custom"

    def __post_init__(self) -> None:
        levels = tuple(as_fraction(x) for x in self.levels)
        if not levels:
            raise ValueError("level set must be nonempty")
        for lo, hi in zip(levels, levels[1:]):
            if not lo < hi:
                raise ValueError(f"levels must be strictly increasing, got {lo} then {hi}")
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.levels)

    def __getitem__(self, index):
        return self.levels[index]

    def transformed(self, scale: RationalLike = 1, shift: RationalLike = 0) -> "LevelSet":
        """Affine image scale*E + shift (scale > 0 keeps the ordering)."""
        s, c = as_fraction(scale), as_fraction(shift)
        if s <= 0:
            raise ValueError("scale must be positive")
        return LevelSet(
            tuple(s * e + c for e in self.levels),
            origin=f"{self.origin} * {s} + {c}",
        )

    def to_text(self) -> str:
        """One `numerator/denominator` token per line."""
        return "".join(f"{e.numerator}/{e.denominator}\n" for e in self.levels)

    @classmethod
    def from_text(cls, text: str, origin: str = "file") -> "LevelSet":
        tokens = [line.strip() for line in text.splitlines() if line.strip()]
        return cls(tuple(Fraction(tok) for tok in tokens), origin=origin)


@dataclass(frozen=True)
class RevivalParams:
    """Ladder decomposition E_n = spacing*N_n + offset of a level set.

    ``spacing`` is maximal: the integer indices N_n have pairwise differences
    with collective gcd 1.  The revival time is 2*pi/spacing; it is kept as
    the exact rational ``period_factor`` = 1/spacing in units of 2*pi.
    """

    spacing: Fraction
    offset: Fraction
    indices: tuple[int, ...]

    @property
    def period_factor(self) -> Fraction:
        """Revival time as an exact multiple of 2*pi."""
        return 1 / self.spacing

    @property
    def revival_time(self) -> float:
        return TWO_PI * float(self.period_factor)

    def level(self, n: int) -> Fraction:
        return self.spacing * self.indices[n] + self.offset


def revival_params(levels: LevelSet) -> RevivalParams:
    """Maximal ladder decomposition of a rational level set.

    spacing = gcd of all pairwise level differences (gcd over consecutive
    gaps is enough: every pairwise difference is a sum of consecutive ones).
    The offset is reduced into [0, spacing) so that, e.g., integer levels get
    offset 0 and indices equal to the levels themselves.  A single level has
    no constrained spacing; by convention it gets spacing 1, index 0.
    """
    values = levels.levels
    if len(values) == 1:
        return RevivalParams(spacing=Fraction(1), offset=values[0], indices=(0,))
    spacing = Fraction(0)
    for lo, hi in zip(values, values[1:]):
        spacing = fraction_gcd(spacing, hi - lo)
    offset = values[0] % spacing
    indices = tuple(int((e - offset) / spacing) for e in values)
    return RevivalParams(spacing=spacing, offset=offset, indices=indices)


def harmonic_levels(count: int) -> LevelSet:
    """The first `count` harmonic-oscillator levels n + 1/2."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return LevelSet(
        tuple(Fraction(2 * n + 1, 2) for n in range(count)),
        origin=f"harmonic(count={count})",
    )


def biperiodic_levels(n_added: int, harmonic_count: int = 10) -> LevelSet:
    """Harmonic ladder with `n_added` extra levels -1, -3, ... spaced 2 below it.

    The full spectrum alternates between gap 2 (below zero) and gap 1 (above),
    so its maximal ladder spacing is 1/2 and the revival time is 4*pi.
    """
    if n_added < 1:
        raise ValueError("n_added must be >= 1")
    added = tuple(Fraction(-(2 * k - 1)) for k in range(n_added, 0, -1))
    top = harmonic_levels(harmonic_count).levels
    return LevelSet(
        added + top,
        origin=f"biperiodic(n_added={n_added}, harmonic_count={harmonic_count})",
    )


def reverse_biperiodic_levels(n_added: int, harmonic_count: int = 10) -> LevelSet:
    """Harmonic ladder with `n_added` extra levels 0, -1/2, -1, ... spaced 1/2 below."""
    if n_added < 1:
        raise ValueError("n_added must be >= 1")
    added = tuple(Fraction(-k, 2) for k in range(n_added - 1, -1, -1))
    top = harmonic_levels(harmonic_count).levels
    return LevelSet(
        added + top,
        origin=f"reverse_biperiodic(n_added={n_added}, harmonic_count={harmonic_count})",
    )


def alternating_gap_levels(
    gap1: RationalLike,
    gap2: RationalLike,
    count: int,
    ground: RationalLike = 0,
) -> LevelSet:
    """`count` levels climbing from `ground` with gaps alternating gap1, gap2, ..."""
    g1, g2 = as_fraction(gap1), as_fraction(gap2)
    if g1 <= 0 or g2 <= 0:
        raise ValueError("gaps must be positive")
    if count < 1:
        raise ValueError("count must be >= 1")
    level = as_fraction(ground)
    values = [level]
    for i in range(count - 1):
        level += g1 if i % 2 == 0 else g2
        values.append(level)
    return LevelSet(
        tuple(values),
        origin=f"alternating(gap1={g1}, gap2={g2}, count={count}, ground={as_fraction(ground)})",
    )


def _primes(count: int) -> list[int]:
    """First `count` primes by trial division (desk-scale counts only)."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1 if candidate == 2 else 2
    return primes


def prime_levels(count: int) -> tuple[LevelSet, Fraction]:
    """First `count` primes as levels, plus the next prime as base constant.

    The base constant is the flat starting potential from which the prime
    spectrum is grown bottom-up; sitting one prime above the top level keeps
    every target strictly below it.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    ps = _primes(count + 1)
    levels = LevelSet(
        tuple(Fraction(p) for p in ps[:count]),
        origin=f"primes(count={count})",
    )
    return levels, Fraction(ps[count])


def fibonacci_levels(count: int) -> tuple[LevelSet, Fraction]:
    """Fibonacci levels 1, 2, 3, 5, ... plus a base constant.

    The leading Fibonacci number 1 appears once (a level set cannot hold
    duplicates), so the set is F_2 .. F_{count+1}.  The base constant is the
    next Fibonacci number above the top level.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    fibs = [1, 2]
    while len(fibs) < count + 1:
        fibs.append(fibs[-1] + fibs[-2])
    levels = LevelSet(
        tuple(Fraction(f) for f in fibs[:count]),
        origin=f"fibonacci(count={count})",
    )
    return levels, Fraction(fibs[count])
