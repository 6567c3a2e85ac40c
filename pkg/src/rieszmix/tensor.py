"""Tensor products of model spaces, operators, and systems.

In finite dimensions the completed lattice tensor product of two
coordinate spaces is the full matrix space, realized here as a flat
coordinate space of dimension n*m with the fixed row-major pairing
(i, j) -> i*m + j. The pairing is part of the wire format.

Components of the product unit are 0/1 matrices. Rectangles p⊗q are the
elementary components; every component is the join of the (finitely
many) maximal rectangles beneath it, and ``component_decompose`` returns
exactly that family together with an explicitly verified reconstruction
flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .dynamics import EventuallyPeriodicSeq
from .lattice import Element, Space, is_component
from .operators import CEPS, ConditionalExpectationOp, RieszHomMap, validate_ceps

# component_decompose enumerates subsets of the shorter axis
_DECOMPOSE_LIMIT = 20


@dataclass(frozen=True)
class TensorSpace:
    """Product of two model spaces with row-major index pairing."""

    left: Space
    right: Space

    @property
    def space(self) -> Space:
        return Space(self.left.dim * self.right.dim)

    def index(self, i: int, j: int) -> int:
        return i * self.right.dim + j

    def pair(self, flat: int) -> tuple[int, int]:
        return divmod(flat, self.right.dim)


def tensor_elements(f: Element, g: Element) -> Element:
    """Outer product, flattened row-major; bilinear, positive on positives."""
    tspace = TensorSpace(f.space, g.space)
    coords = tuple(a * b for a in f.coords for b in g.coords)
    return Element(tspace.space, coords)


def tensor_component(p: Element, q: Element) -> Element:
    """Tensor of two components: the combinatorial rectangle, a component
    of the product unit."""
    if not is_component(p) or not is_component(q):
        raise ValueError("tensor_component requires components (0/1 vectors)")
    return tensor_elements(p, q)


def _row_masks(tspace: TensorSpace, u: Element) -> list[int]:
    n, m = tspace.left.dim, tspace.right.dim
    masks = []
    for i in range(n):
        mask = 0
        for j in range(m):
            if u.coords[tspace.index(i, j)] == 1:
                mask |= 1 << j
        masks.append(mask)
    return masks


def component_decompose(
    tspace: TensorSpace, u: Element
) -> tuple[tuple[tuple[Element, Element], ...], bool]:
    """Maximal rectangles beneath a component of the product unit.

    Returns the family of pairs (p, q) with p⊗q <= u, each
    inclusion-maximal, together with a flag certifying that their join
    reconstructs u. Every closure (rows containing some column set,
    paired with the common columns of those rows) is such a maximal
    rectangle, and all of them arise from closures, so the enumeration
    runs over subsets of the shorter axis.
    """
    if u.space.dim != tspace.left.dim * tspace.right.dim:
        raise ValueError(
            f"component of dim {u.space.dim} for product of dim "
            f"{tspace.left.dim * tspace.right.dim}"
        )
    if not is_component(u):
        raise ValueError("component_decompose requires a component (0/1 vector)")

    n, m = tspace.left.dim, tspace.right.dim
    transposed = n > m
    if transposed:
        rows = [
            [u.coords[tspace.index(i, j)] for i in range(n)] for j in range(m)
        ]
        masks = [sum(1 << i for i, c in enumerate(row) if c == 1) for row in rows]
        n_rows, n_cols = m, n
    else:
        masks = _row_masks(tspace, u)
        n_rows, n_cols = n, m
    if n_rows > _DECOMPOSE_LIMIT:
        raise ValueError(
            f"decomposition enumerates 2^{n_rows} subsets; "
            f"limit is 2^{_DECOMPOSE_LIMIT}"
        )

    full = (1 << n_cols) - 1
    rectangles: set[tuple[int, int]] = set()
    for subset in range(1, 1 << n_rows):
        cols = full
        s = subset
        i = 0
        while s:
            if s & 1:
                cols &= masks[i]
            s >>= 1
            i += 1
        if cols == 0:
            continue
        row_set = 0
        for r, mask in enumerate(masks):
            if mask & cols == cols:
                row_set |= 1 << r
        rectangles.add((row_set, cols))

    pairs = []
    for row_set, cols in sorted(rectangles):
        row_bits = [(row_set >> i) & 1 for i in range(n_rows)]
        col_bits = [(cols >> j) & 1 for j in range(n_cols)]
        if transposed:
            row_bits, col_bits = col_bits, row_bits
        pairs.append(
            (tspace.left.component(row_bits), tspace.right.component(col_bits))
        )

    rebuilt = [Fraction(0)] * u.space.dim
    for p, q in pairs:
        for i in range(tspace.left.dim):
            if p.coords[i] == 1:
                for j in range(tspace.right.dim):
                    if q.coords[j] == 1:
                        rebuilt[tspace.index(i, j)] = Fraction(1)
    verified = tuple(rebuilt) == u.coords
    return tuple(pairs), verified


def tensor_T(
    T1: ConditionalExpectationOp, T2: ConditionalExpectationOp
) -> ConditionalExpectationOp:
    """Product expectation: blocks are products of blocks, weights multiply.

    Agrees with (T1 f)⊗(T2 g) on all pure tensors; strictly positive
    because the factor weights are.
    """
    tspace = TensorSpace(T1.space, T2.space)
    blocks = tuple(
        tuple(tspace.index(i, j) for i in b1 for j in b2)
        for b1 in T1.blocks
        for b2 in T2.blocks
    )
    weights = [Fraction(0)] * tspace.space.dim
    for i, w1 in enumerate(T1.weights):
        for j, w2 in enumerate(T2.weights):
            weights[tspace.index(i, j)] = w1 * w2
    return ConditionalExpectationOp(tspace.space, blocks, tuple(weights))


def tensor_S(S1: RieszHomMap, S2: RieszHomMap) -> RieszHomMap:
    """Product composition map: (i, j) -> (σ1(i), σ2(j))."""
    tspace = TensorSpace(S1.space, S2.space)
    sigma = [0] * tspace.space.dim
    for i in range(S1.space.dim):
        for j in range(S2.space.dim):
            sigma[tspace.index(i, j)] = tspace.index(S1.sigma[i], S2.sigma[j])
    return RieszHomMap(tspace.space, tuple(sigma))


def tensor_ceps(sys1: CEPS, sys2: CEPS) -> CEPS:
    """Product system; always passes validation (a failure here is a defect)."""
    T = tensor_T(sys1.T, sys2.T)
    S = tensor_S(sys1.S, sys2.S)
    return validate_ceps(T.space, T, S)


def j_multiply(tspace: TensorSpace, M: Element) -> Element:
    """Diagonal extraction on a square tensor: the linear, positive map
    sending f⊗g to the componentwise product f·g."""
    if tspace.left.dim != tspace.right.dim:
        raise ValueError(
            f"diagonal extraction needs a square tensor, got "
            f"{tspace.left.dim}x{tspace.right.dim}"
        )
    if M.space.dim != tspace.left.dim * tspace.right.dim:
        raise ValueError(
            f"element of dim {M.space.dim} for product of dim "
            f"{tspace.left.dim * tspace.right.dim}"
        )
    return Element(
        tspace.left,
        tuple(M.coords[tspace.index(i, i)] for i in range(tspace.left.dim)),
    )


ComponentSeq = Union[EventuallyPeriodicSeq, Sequence[Element]]


def _check_component_terms(values) -> None:
    for v in values:
        if not is_component(v):
            raise ValueError(f"sequence term is not a component: {v}")


def tensor_component_sequences(pseq: ComponentSeq, qseq: ComponentSeq):
    """Termwise tensor r_k = p_k ⊗ q_k of two component sequences.

    Exact mode (two eventually periodic inputs) yields an eventually
    periodic output; otherwise both inputs are finite prefixes and the
    output is the termwise list over the shorter horizon. Density zero of
    either factor passes to the output (certify via density_zero_check).
    """
    if isinstance(pseq, EventuallyPeriodicSeq) and isinstance(qseq, EventuallyPeriodicSeq):
        _check_component_terms(pseq.preperiod + pseq.period)
        _check_component_terms(qseq.preperiod + qseq.period)
        return pseq.zip_with(qseq, tensor_component)
    if isinstance(pseq, EventuallyPeriodicSeq) or isinstance(qseq, EventuallyPeriodicSeq):
        raise TypeError("mixed exact/prefix inputs; expand the exact one first")
    _check_component_terms(pseq)
    _check_component_terms(qseq)
    horizon = min(len(pseq), len(qseq))
    return [tensor_component(pseq[k], qseq[k]) for k in range(horizon)]
