"""Exact finite-dimensional vector-lattice model.

Everything lives in a coordinate space over the rationals with the
componentwise partial order. The weak order unit, written ``e``, is the
all-ones vector and is never stored per element. 0/1 vectors are the
components of ``e``; they are in bijection with band projections, which
act by componentwise multiplication. The same componentwise product
makes the space an f-algebra with ``e`` as its multiplicative unit, and
on components the product coincides with the lattice meet.

All arithmetic is exact (``fractions.Fraction``); nothing in this module
or anywhere in the core library rounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionMismatch(ValueError):
    """Two operands belong to spaces of different dimension."""


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions, and rational strings like ``"3/4"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        if value == 0:
            return ZERO
        if value == 1:
            return ONE
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class Space:
    """Coordinate model of dimension ``dim``; the unit is all-ones."""

    dim: int

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")

    def element(self, coords: Iterable[RationalLike]) -> "Element":
        return Element(self, tuple(as_fraction(c) for c in coords))

    def zero(self) -> "Element":
        return Element(self, (ZERO,) * self.dim)

    def unit(self) -> "Element":
        """The weak order unit e."""
        return Element(self, (ONE,) * self.dim)

    def basis(self, index: int) -> "Element":
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} out of range for dim {self.dim}")
        coords = [ZERO] * self.dim
        coords[index] = ONE
        return Element(self, tuple(coords))

    def component(self, bits: Iterable[int]) -> "Element":
        """Component of e from an iterable of 0/1 entries."""
        elem = self.element(bits)
        if not is_component(elem):
            raise ValueError(f"not a component (entries must be 0 or 1): {elem}")
        return elem

    def components(self) -> Iterator["Element"]:
        """All 2**dim components of e, in lexicographic bit order.

        Exponential; callers guard the dimension.
        """
        for bits in itertools.product((0, 1), repeat=self.dim):
            yield self.element(bits)


@dataclass(frozen=True)
class Element:
    """Immutable vector with exact rational coordinates."""

    space: Space
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.space.dim:
            raise DimensionMismatch(
                f"{len(self.coords)} coordinates for dimension {self.space.dim}"
            )

    def __repr__(self) -> str:
        return "Element[" + ", ".join(str(c) for c in self.coords) + "]"

    def __add__(self, other: "Element") -> "Element":
        _check_same_space(self, other)
        # skipping zero operands avoids Fraction normalization on sparse data
        return Element(
            self.space,
            tuple(
                (a + b) if (a and b) else (a if a else b)
                for a, b in zip(self.coords, other.coords)
            ),
        )

    def __sub__(self, other: "Element") -> "Element":
        _check_same_space(self, other)
        return Element(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Element":
        return Element(self.space, tuple(-a for a in self.coords))

    def __mul__(self, scalar: RationalLike) -> "Element":
        if isinstance(scalar, Element):
            raise TypeError("use f_product for the componentwise product")
        return self.scale(scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: RationalLike) -> "Element":
        return self.scale(Fraction(1) / as_fraction(scalar))

    def __abs__(self) -> "Element":
        return Element(self.space, tuple(abs(a) for a in self.coords))

    def __le__(self, other: "Element") -> bool:
        _check_same_space(self, other)
        return all(a <= b for a, b in zip(self.coords, other.coords))

    def __ge__(self, other: "Element") -> bool:
        return other.__le__(self)

    def scale(self, scalar: RationalLike) -> "Element":
        s = as_fraction(scalar)
        return Element(self.space, tuple(s * a for a in self.coords))

    def is_nonneg(self) -> bool:
        return all(a >= 0 for a in self.coords)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def sup_norm(self) -> Fraction:
        return max(abs(a) for a in self.coords)


def _check_same_space(a: Element, b: Element) -> None:
    if a.space.dim != b.space.dim:
        raise DimensionMismatch(f"dimensions {a.space.dim} and {b.space.dim} differ")


def meet(a: Element, b: Element) -> Element:
    """Componentwise minimum (lattice infimum)."""
    _check_same_space(a, b)
    return Element(a.space, tuple(min(x, y) for x, y in zip(a.coords, b.coords)))


def join(a: Element, b: Element) -> Element:
    """Componentwise maximum (lattice supremum)."""
    _check_same_space(a, b)
    return Element(a.space, tuple(max(x, y) for x, y in zip(a.coords, b.coords)))


def f_product(a: Element, b: Element) -> Element:
    """Componentwise product; the f-algebra multiplication with unit e.

    On components of e this agrees with ``meet``.
    """
    _check_same_space(a, b)
    return Element(a.space, tuple(x * y for x, y in zip(a.coords, b.coords)))


def is_component(a: Element) -> bool:
    """True iff every coordinate is 0 or 1, i.e. 0 <= a <= e and a ∧ (e-a) = 0."""
    return all(c == 0 or c == 1 for c in a.coords)


def band_project(p: Element, f: Element) -> Element:
    """Band projection generated by the component p, acting as p·f."""
    if not is_component(p):
        raise ValueError(f"band projections are generated by components, got {p}")
    return f_product(p, f)


def component_of_band(x: Element) -> Element:
    """Component of e generating the band of the positive element x.

    Bit i is set exactly where x_i > 0.
    """
    if not x.is_nonneg():
        raise ValueError(f"band generator must be positive, got {x}")
    return Element(x.space, tuple(Fraction(1 if c > 0 else 0) for c in x.coords))
