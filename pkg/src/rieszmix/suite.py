"""Randomized theorem suites over generated system corpora.

A suite run generates a seeded corpus of valid systems, analyzes each
one, and then exercises every cross-system law the library claims:
route agreement for the ergodicity decision, the exhaustive component
oracle at small dimensions, weak mixing implying ergodicity, the
tensor-square characterization of weak mixing, ergodicity of products
of weak-mixing with ergodic systems, factor inheritance from product
systems, product limit consistency, the projection identities of the
ergodic limit, closure of valid systems under tensoring, rectangle
decomposition of product components, density-zero tensoring, and
agreement of the extraction route with the exact weak-mixing decision.

Every failed check lands in the defect list with the system JSON
embedded so it can be replayed. Reports depend only on the seed and
configuration: fixed key order, no timing data, order-preserving
parallel evaluation.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

from .dynamics import (
    EventuallyPeriodicSeq,
    cesaro_limit,
    functional_graph,
    shifted_product_expectations,
)
from .lattice import Element, f_product
from .matrixops import matmul, operator_matrix
from .mixing import (
    CesaroNotVanishing,
    MixingReport,
    analyze,
    decide_ergodicity,
    decide_weak_mixing,
    density_zero_check,
    weak_mixing_via_kvn,
)
from .operators import CEPS, GENERATOR_PROFILES, generate_ceps
from .rng import SplitMix64
from .serialize import system_to_dict
from .tensor import TensorSpace, component_decompose, tensor_ceps, tensor_component_sequences, tensor_elements

_ORACLE_DIM_LIMIT = 4  # exhaustive component enumeration is 4^n pairs


@dataclass(frozen=True)
class SuiteConfig:
    seed: int
    count: int = 500
    max_dim: int = 8
    profiles: tuple[str, ...] = GENERATOR_PROFILES
    horizon: int = 1000
    route_b_limit: int = 16
    tensor_pairs: int = 120
    pairs_per_wm: int = 50
    kvn_pairs_per_system: int = 2
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.max_dim < 1:
            raise ValueError(f"max_dim must be >= 1, got {self.max_dim}")
        if self.horizon < 100:
            raise ValueError(f"horizon must be >= 100, got {self.horizon}")
        for profile in self.profiles:
            if profile not in GENERATOR_PROFILES:
                raise ValueError(f"unknown profile {profile!r}")


@dataclass
class _Tally:
    passed: int = 0
    failed: int = 0
    defects: list = field(default_factory=list)

    def record(self, ok: bool, detail=None) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.defects.append(detail)


def _corpus_report(args) -> MixingReport:
    index, sys, route_b_limit = args
    return analyze(sys, system_id=str(index), route_b_limit=route_b_limit)


def _tensor_square_ergodic(sys: CEPS) -> bool:
    return decide_ergodicity(tensor_ceps(sys, sys), route_b_limit=0).ergodic


def _map_maybe_parallel(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with multiprocessing.get_context("fork").Pool(jobs) as pool:
        return pool.map(fn, items, chunksize=max(1, len(items) // (jobs * 4)))


def _exhaustive_pair_decisions(sys: CEPS) -> tuple[bool, bool]:
    """Decide both predicates over all 2^n x 2^n component pairs; the
    independent oracle for the basis-pair reduction."""
    graph = functional_graph(sys.S.sigma)
    k_pre, d = graph.preperiod, graph.period
    ergodic_all = True
    wm_all = True
    space = sys.space
    comps = list(space.components())
    for p in comps:
        tp = sys.T.apply(p)
        for q in comps:
            expected = f_product(tp, sys.T.apply(q))
            seq = shifted_product_expectations(sys, p, q)
            if cesaro_limit(seq) != expected:
                ergodic_all = False
            if any(seq.value(k) != expected for k in range(k_pre, k_pre + d)):
                wm_all = False
            if not ergodic_all and not wm_all:
                return False, False
    return ergodic_all, wm_all


def _projection_identities(sys: CEPS) -> bool:
    from .dynamics import ergodic_limit

    space = sys.space
    l_mat = operator_matrix(lambda f: ergodic_limit(sys, f), space)
    s_mat = operator_matrix(sys.S.apply, space)
    t_mat = operator_matrix(sys.T.apply, space)
    return (
        matmul(l_mat, l_mat) == l_mat
        and matmul(s_mat, l_mat) == l_mat
        and matmul(l_mat, s_mat) == l_mat
        and matmul(t_mat, l_mat) == t_mat
    )


def _random_component(rng: SplitMix64, space) -> Element:
    return space.component([rng.below(2) for _ in range(space.dim)])


def run_suite(config: SuiteConfig) -> dict:
    master = SplitMix64(config.seed)
    systems: list[CEPS] = []
    for _ in range(config.count):
        seed = master.next_word()
        profile = config.profiles[master.below(len(config.profiles))]
        systems.append(generate_ceps(seed, config.max_dim, profile))

    reports: list[MixingReport] = _map_maybe_parallel(
        _corpus_report,
        [(i, sys, config.route_b_limit) for i, sys in enumerate(systems)],
        config.jobs,
    )

    checks: dict[str, _Tally] = {}

    def tally(name: str) -> _Tally:
        return checks.setdefault(name, _Tally())

    def defect(indices, detail: str) -> dict:
        return {
            "systems": list(indices),
            "system_json": [system_to_dict(systems[i]) for i in indices],
            "detail": detail,
        }

    # ergodicity route agreement on the whole corpus
    for i, rep in enumerate(reports):
        if rep.route_agreement is None:
            continue
        tally("route_agreement").record(
            rep.route_agreement, defect([i], "operator equality and component limits disagree")
        )

    # exhaustive component-pair oracle at small dimensions
    for i, (sys, rep) in enumerate(zip(systems, reports)):
        if sys.space.dim > _ORACLE_DIM_LIMIT:
            continue
        erg_all, wm_all = _exhaustive_pair_decisions(sys)
        tally("component_pair_oracle").record(
            erg_all == rep.ergodic and wm_all == rep.weak_mixing,
            defect([i], f"exhaustive pairs gave ergodic={erg_all} wm={wm_all}, "
                        f"reports say ergodic={rep.ergodic} wm={rep.weak_mixing}"),
        )

    # weak mixing implies ergodicity
    for i, rep in enumerate(reports):
        tally("wm_implies_ergodic").record(
            (not rep.weak_mixing) or rep.ergodic,
            defect([i], "weak mixing without ergodicity"),
        )

    # weak mixing iff the tensor square is ergodic
    square_ergodic = _map_maybe_parallel(_tensor_square_ergodic, systems, config.jobs)
    for i, (rep, sq) in enumerate(zip(reports, square_ergodic)):
        tally("wm_iff_tensor_square_ergodic").record(
            rep.weak_mixing == sq,
            defect([i], f"weak_mixing={rep.weak_mixing} but tensor square ergodic={sq}"),
        )

    # products of weak-mixing with ergodic systems are ergodic
    rng = SplitMix64(master.next_word())
    wm_indices = [i for i, rep in enumerate(reports) if rep.weak_mixing]
    ergodic_indices = [i for i, rep in enumerate(reports) if rep.ergodic]
    if ergodic_indices:
        for a in wm_indices:
            for _ in range(config.pairs_per_wm):
                b = ergodic_indices[rng.below(len(ergodic_indices))]
                product = tensor_ceps(systems[a], systems[b])
                ok = decide_ergodicity(product, route_b_limit=0).ergodic
                tally("wm_times_ergodic_products").record(
                    ok, defect([a, b], "product of weak-mixing and ergodic not ergodic")
                )

    # sampled product systems: closure, factor inheritance, limit consistency
    ergodic_products = []
    for _ in range(config.tensor_pairs):
        a = rng.below(config.count)
        b = rng.below(config.count)
        try:
            product = tensor_ceps(systems[a], systems[b])
        except Exception as exc:  # noqa: BLE001 - a validation failure is a defect
            tally("tensor_system_closure").record(
                False, defect([a, b], f"tensor system failed validation: {exc}")
            )
            continue
        tally("tensor_system_closure").record(True, None)
        p_erg = decide_ergodicity(product, route_b_limit=0).ergodic
        p_wm = decide_weak_mixing(product).weak_mixing
        tally("product_ergodic_implies_factors").record(
            (not p_erg) or (reports[a].ergodic and reports[b].ergodic),
            defect([a, b], "ergodic product with a non-ergodic factor"),
        )
        tally("product_wm_implies_factors").record(
            (not p_wm) or (reports[a].weak_mixing and reports[b].weak_mixing),
            defect([a, b], "weak-mixing product with a non-weak-mixing factor"),
        )
        if p_erg:
            ergodic_products.append((a, b))

    for a, b in ergodic_products:
        sys_a, sys_b = systems[a], systems[b]
        for _ in range(2):
            i1, j1 = rng.below(sys_a.space.dim), rng.below(sys_a.space.dim)
            i2, j2 = rng.below(sys_b.space.dim), rng.below(sys_b.space.dim)
            seq_a = shifted_product_expectations(
                sys_a, sys_a.space.basis(i1), sys_a.space.basis(j1)
            )
            seq_b = shifted_product_expectations(
                sys_b, sys_b.space.basis(i2), sys_b.space.basis(j2)
            )
            prod_seq = seq_a.zip_with(seq_b, tensor_elements)
            alpha_a = f_product(sys_a.T.column(i1), sys_a.T.column(j1))
            alpha_b = f_product(sys_b.T.column(i2), sys_b.T.column(j2))
            tally("tensor_limit_consistency").record(
                cesaro_limit(prod_seq) == tensor_elements(alpha_a, alpha_b),
                defect([a, b], "tensored component limits miss the product target"),
            )

    # projection identities of the ergodic limit
    for i, sys in enumerate(systems):
        tally("ergodic_limit_projection_identities").record(
            _projection_identities(sys),
            defect([i], "ergodic limit fails a projection identity"),
        )

    # rectangle decomposition of random product components
    for _ in range(min(30, config.tensor_pairs)):
        a = rng.below(config.count)
        b = rng.below(config.count)
        tspace = TensorSpace(systems[a].space, systems[b].space)
        for _ in range(5):
            u = _random_component(rng, tspace.space)
            pairs, verified = component_decompose(tspace, u)
            rectangles_below = all(
                f_product(tensor_elements(p, q), u) == tensor_elements(p, q)
                for p, q in pairs
            )
            tally("tensor_component_rectangles").record(
                verified and rectangles_below,
                defect([a, b], "rectangle family does not reconstruct the component"),
            )

    # tensoring with a density-zero factor stays density zero
    for _ in range(min(50, config.tensor_pairs)):
        a = rng.below(config.count)
        b = rng.below(config.count)
        space_a, space_b = systems[a].space, systems[b].space
        pseq = EventuallyPeriodicSeq(
            tuple(_random_component(rng, space_a) for _ in range(rng.below(4))),
            (space_a.zero(),),
        )
        qseq = EventuallyPeriodicSeq(
            tuple(_random_component(rng, space_b) for _ in range(rng.below(3))),
            tuple(_random_component(rng, space_b) for _ in range(1 + rng.below(3))),
        )
        out = tensor_component_sequences(pseq, qseq)
        tally("density_zero_tensor").record(
            density_zero_check(out).density_zero is True,
            defect([a, b], "tensor of a density-zero sequence lost density zero"),
        )

    # extraction route agrees with the exact weak-mixing decision per pair
    for i, sys in enumerate(systems):
        graph = functional_graph(sys.S.sigma)
        for _ in range(config.kvn_pairs_per_system):
            pi, qi = rng.below(sys.space.dim), rng.below(sys.space.dim)
            p, q = sys.space.basis(pi), sys.space.basis(qi)
            seq = shifted_product_expectations(sys, p, q)
            expected = f_product(sys.T.apply(p), sys.T.apply(q))
            tail_zero = all(
                seq.value(k) == expected
                for k in range(graph.preperiod, graph.preperiod + graph.period)
            )
            try:
                verdict, _extraction = weak_mixing_via_kvn(sys, p, q, config.horizon)
            except CesaroNotVanishing:
                verdict = False
            tally("kvn_pair_agreement").record(
                verdict == tail_zero,
                defect([i], f"extraction verdict {verdict} vs exact tail {tail_zero} "
                            f"for pair ({pi}, {qi})"),
            )

    strata = {
        "weak_mixing": sum(1 for rep in reports if rep.weak_mixing),
        "ergodic_only": sum(1 for rep in reports if rep.ergodic and not rep.weak_mixing),
        "neither": sum(1 for rep in reports if not rep.ergodic and not rep.weak_mixing),
    }

    defects = []
    for name, t in checks.items():
        for d in t.defects:
            if d is not None:
                defects.append({"check": name, **d})

    return {
        "seed": config.seed,
        "config": {
            "count": config.count,
            "max_dim": config.max_dim,
            "profiles": list(config.profiles),
            "horizon": config.horizon,
            "route_b_limit": config.route_b_limit,
            "tensor_pairs": config.tensor_pairs,
            "pairs_per_wm": config.pairs_per_wm,
        },
        "strata": strata,
        "checks": {
            name: {"pass": t.passed, "fail": t.failed} for name, t in checks.items()
        },
        "defects": defects,
    }


def suite_failed(report: dict) -> bool:
    return any(entry["fail"] > 0 for entry in report["checks"].values())
