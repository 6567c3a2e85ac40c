"""Expectation operators, composition homomorphisms, and validated systems.

A conditional expectation operator here is a weighted block average: a
partition of the coordinates together with strictly positive weights. In
the finite coordinate model this is the general form of a strictly
positive, unit-preserving, positive projection onto a sublattice, and it
makes both the range (block-constant vectors) and strict positivity
purely syntactic.

The lattice homomorphisms fixing the unit are exactly the composition
operators f -> f∘σ for a total map σ on coordinates, so that is the
stored form.

A system bundles both maps after checking the preservation law T∘S = T.
By linearity it is enough to check the standard basis vectors, which are
themselves components of the unit; an exhaustive check over all 2^n
components is kept as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import Element, RationalLike, Space, as_fraction
from .rng import SplitMix64

GENERATOR_PROFILES = ("block-permutation", "global", "identity")


class NotMeasurePreserving(ValueError):
    """The preservation law T∘S = T fails on at least one basis vector."""

    def __init__(self, witnesses: Sequence[int]):
        self.witnesses = tuple(witnesses)
        self.witness = self.witnesses[0]
        super().__init__(
            f"T∘S = T fails on basis vectors {list(self.witnesses)}"
        )


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    cleaned = tuple(tuple(sorted(b)) for b in blocks)
    return tuple(sorted(cleaned, key=lambda b: b[0]))


@dataclass(frozen=True)
class ConditionalExpectationOp:
    """Weighted block average: partition of coordinates plus positive weights."""

    space: Space
    blocks: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        n = self.space.dim
        object.__setattr__(self, "blocks", _canonical_blocks(self.blocks))
        object.__setattr__(
            self, "weights", tuple(as_fraction(w) for w in self.weights)
        )
        if len(self.weights) != n:
            raise ValueError(f"{len(self.weights)} weights for dimension {n}")
        if any(w <= 0 for w in self.weights):
            raise ValueError("all weights must be strictly positive")
        seen: list[int] = []
        for block in self.blocks:
            if not block:
                raise ValueError("empty block in partition")
            seen.extend(block)
        if sorted(seen) != list(range(n)):
            raise ValueError(f"blocks {self.blocks} do not partition 0..{n - 1}")
        block_of = [0] * n
        for b, block in enumerate(self.blocks):
            for i in block:
                block_of[i] = b
        sums = tuple(
            sum((self.weights[i] for i in block), Fraction(0)) for block in self.blocks
        )
        object.__setattr__(self, "_block_of", tuple(block_of))
        object.__setattr__(self, "_block_sums", sums)

    def apply(self, f: Element) -> Element:
        """Weighted average of f over each block, constant per block."""
        if f.space.dim != self.space.dim:
            raise ValueError(
                f"operator on dim {self.space.dim} applied to dim {f.space.dim}"
            )
        averages = [
            sum((self.weights[i] * f.coords[i] for i in block), Fraction(0)) / s
            for block, s in zip(self.blocks, self._block_sums)
        ]
        return Element(f.space, tuple(averages[b] for b in self._block_of))

    def column(self, j: int) -> Element:
        """Image of the j-th basis vector."""
        b = self._block_of[j]
        value = self.weights[j] / self._block_sums[b]
        return Element(
            self.space,
            tuple(value if self._block_of[i] == b else Fraction(0) for i in range(self.space.dim)),
        )

    def range_basis(self) -> list[Element]:
        """Block indicators; they span the range (the fixed space)."""
        return [
            self.space.component(
                [1 if i in block else 0 for i in range(self.space.dim)]
            )
            for block in self.blocks
        ]

    def is_identity(self) -> bool:
        return all(len(block) == 1 for block in self.blocks)


def identity_expectation(space: Space) -> ConditionalExpectationOp:
    return ConditionalExpectationOp(
        space,
        tuple((i,) for i in range(space.dim)),
        (Fraction(1),) * space.dim,
    )


def uniform_expectation(
    space: Space, blocks: Iterable[Iterable[int]] | None = None
) -> ConditionalExpectationOp:
    """Equal-weight block average; single global block by default."""
    if blocks is None:
        blocks = (tuple(range(space.dim)),)
    return ConditionalExpectationOp(
        space, tuple(tuple(b) for b in blocks), (Fraction(1, space.dim),) * space.dim
    )


@dataclass(frozen=True)
class RieszHomMap:
    """Composition operator (Sf)_i = f_{σ(i)}; preserves lattice ops and e."""

    space: Space
    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", tuple(self.sigma))
        n = self.space.dim
        if len(self.sigma) != n:
            raise ValueError(f"map of length {len(self.sigma)} for dimension {n}")
        if any(not 0 <= s < n for s in self.sigma):
            raise ValueError(f"map values out of range 0..{n - 1}: {self.sigma}")

    def apply(self, f: Element) -> Element:
        if f.space.dim != self.space.dim:
            raise ValueError(
                f"operator on dim {self.space.dim} applied to dim {f.space.dim}"
            )
        return Element(f.space, tuple(f.coords[s] for s in self.sigma))

    def is_identity(self) -> bool:
        return all(s == i for i, s in enumerate(self.sigma))


def identity_map(space: Space) -> RieszHomMap:
    return RieszHomMap(space, tuple(range(space.dim)))


def rotation_map(space: Space, step: int = 1) -> RieszHomMap:
    """σ(i) = i + step mod dim."""
    n = space.dim
    return RieszHomMap(space, tuple((i + step) % n for i in range(n)))


@dataclass(frozen=True)
class CEPS:
    """Validated expectation-preserving system: T∘S = T holds exactly.

    Construction checks the law on every basis vector (each one is a
    component of the unit; linearity extends the law to the whole space)
    and raises NotMeasurePreserving with all failing indices otherwise.
    """

    space: Space
    T: ConditionalExpectationOp
    S: RieszHomMap

    def __post_init__(self) -> None:
        if not (self.space.dim == self.T.space.dim == self.S.space.dim):
            raise ValueError("system parts live in different dimensions")
        failing = []
        for j in range(self.space.dim):
            delta = self.space.basis(j)
            if self.T.apply(self.S.apply(delta)) != self.T.apply(delta):
                failing.append(j)
        if failing:
            raise NotMeasurePreserving(failing)


def validate_ceps(space: Space, T: ConditionalExpectationOp, S: RieszHomMap) -> CEPS:
    """Accept iff T∘S = T on all basis vectors; raises NotMeasurePreserving."""
    return CEPS(space, T, S)


def _random_partition(rng: SplitMix64, n: int) -> list[list[int]]:
    block_count = 1 + rng.below(n)
    labels = [rng.below(block_count) for _ in range(n)]
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    return [groups[lab] for lab in sorted(groups)]


def _cycles_of_permutation(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i)
            i = perm[i]
        cycles.append(cycle)
    return cycles


def _cycle_constant_weights(rng: SplitMix64, perm: Sequence[int]) -> list[Fraction]:
    """Strictly positive weights, constant along each cycle, normalized to sum 1.

    Constancy along cycles is forced: the preservation law moves the
    weight at i onto σ(i), so any valid weighting is constant on orbits.
    """
    n = len(perm)
    weights = [Fraction(0)] * n
    for cycle in _cycles_of_permutation(perm):
        w = Fraction(1 + rng.below(9))
        for i in cycle:
            weights[i] = w
    total = sum(weights, Fraction(0))
    return [w / total for w in weights]


def generate_ceps(
    seed: int,
    max_dim: int,
    profile: str = "block-permutation",
    *,
    dim: int | None = None,
) -> CEPS:
    """Seeded random valid system.

    Profiles:
      block-permutation -- random partition; σ permutes within each block.
      global            -- single block; σ a permutation of all coordinates.
      identity          -- σ is the identity; the partition is unconstrained
                           (one draw in three uses all-singleton blocks so
                           unit-range systems actually appear in corpora).

    Weights are always constant along σ-cycles and normalized; every
    emitted system passes validate_ceps.
    """
    if max_dim < 1:
        raise ValueError(f"max_dim must be >= 1, got {max_dim}")
    if profile not in GENERATOR_PROFILES:
        raise ValueError(f"unknown profile {profile!r}, expected one of {GENERATOR_PROFILES}")
    rng = SplitMix64(seed)
    n = dim if dim is not None else 1 + rng.below(max_dim)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    space = Space(n)

    while True:
        if profile == "block-permutation":
            blocks = _random_partition(rng, n)
            sigma = list(range(n))
            for block in blocks:
                images = list(block)
                rng.shuffle(images)
                for src, dst in zip(block, images):
                    sigma[src] = dst
        elif profile == "global":
            blocks = [list(range(n))]
            sigma = list(range(n))
            rng.shuffle(sigma)
        else:  # identity
            if rng.below(3) == 0:
                blocks = [[i] for i in range(n)]
            else:
                blocks = _random_partition(rng, n)
            sigma = list(range(n))

        weights = _cycle_constant_weights(rng, sigma)
        T = ConditionalExpectationOp(space, tuple(tuple(b) for b in blocks), tuple(weights))
        S = RieszHomMap(space, tuple(sigma))
        try:
            return validate_ceps(space, T, S)
        except NotMeasurePreserving:
            # construction should always be valid; retry defensively
            continue
