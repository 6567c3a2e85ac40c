"""JSON wire formats.

Rationals travel as reduced strings "p/q" (q > 0) or plain integer
strings; elements as arrays of such strings. System files carry
dimension, weights, partition, and map; tensor products additionally
embed both factors under "tensor_of" while storing the composite
explicitly so it can be re-validated independently. Emission is
canonical (fixed key order, two-space indent, trailing newline) so that
parse -> re-serialize round-trips byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Any

from .dynamics import EventuallyPeriodicSeq
from .lattice import Element, Space
from .mixing import DensityCertificate, KvnExtraction, MixingReport
from .operators import CEPS, ConditionalExpectationOp, RieszHomMap

_RATIONAL_RE = re.compile(r"\A-?\d+(/[1-9][0-9]*)?\Z")


class SchemaError(ValueError):
    """Input does not match the wire format."""


def rational_to_str(x: Fraction) -> str:
    return str(x)


def rational_from_str(s: Any) -> Fraction:
    if not isinstance(s, str) or not _RATIONAL_RE.match(s):
        raise SchemaError(f"not a rational string: {s!r}")
    return Fraction(s)


def element_to_list(x: Element) -> list[str]:
    return [rational_to_str(c) for c in x.coords]


def element_from_list(data: Any, space: Space) -> Element:
    if not isinstance(data, list) or len(data) != space.dim:
        raise SchemaError(f"expected {space.dim} coordinates, got {data!r}")
    return Element(space, tuple(rational_from_str(c) for c in data))


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def system_to_dict(sys: CEPS, tensor_of: tuple[CEPS, CEPS] | None = None) -> dict:
    out = {
        "dimension": sys.space.dim,
        "weights": [rational_to_str(w) for w in sys.T.weights],
        "partition": [list(block) for block in sys.T.blocks],
        "map": list(sys.S.sigma),
    }
    if tensor_of is not None:
        out["tensor_of"] = [system_to_dict(tensor_of[0]), system_to_dict(tensor_of[1])]
    return out


def parse_system(data: Any) -> tuple[Space, ConditionalExpectationOp, RieszHomMap]:
    """Parse the unvalidated parts of a system file; the preservation law
    is checked separately by validate_ceps."""
    if not isinstance(data, dict):
        raise SchemaError("system file must be a JSON object")
    for key in ("dimension", "weights", "partition", "map"):
        if key not in data:
            raise SchemaError(f"missing key {key!r}")
    dim = data["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"dimension must be a positive integer, got {dim!r}")
    space = Space(dim)
    weights = data["weights"]
    if not isinstance(weights, list) or len(weights) != dim:
        raise SchemaError(f"expected {dim} weights")
    partition = data["partition"]
    if not isinstance(partition, list) or not all(
        isinstance(b, list) and all(isinstance(i, int) for i in b) for b in partition
    ):
        raise SchemaError("partition must be a list of lists of indices")
    sigma = data["map"]
    if not isinstance(sigma, list) or len(sigma) != dim or not all(
        isinstance(s, int) for s in sigma
    ):
        raise SchemaError(f"map must be a list of {dim} indices")
    try:
        T = ConditionalExpectationOp(
            space,
            tuple(tuple(b) for b in partition),
            tuple(rational_from_str(w) for w in weights),
        )
        S = RieszHomMap(space, tuple(sigma))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return space, T, S


def system_digest(sys: CEPS) -> str:
    """Stable short identifier: content hash of the canonical system JSON."""
    blob = dumps_canonical(system_to_dict(sys)).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def seq_to_dict(seq: EventuallyPeriodicSeq) -> dict:
    return {
        "preperiod": [element_to_list(v) for v in seq.preperiod],
        "period": [element_to_list(v) for v in seq.period],
    }


def seq_from_dict(data: Any) -> EventuallyPeriodicSeq:
    if not isinstance(data, dict) or "period" not in data:
        raise SchemaError("sequence file must be an object with a 'period' key")
    period = data["period"]
    preperiod = data.get("preperiod", [])
    if not isinstance(period, list) or not period:
        raise SchemaError("'period' must be a nonempty list of elements")
    if not isinstance(preperiod, list):
        raise SchemaError("'preperiod' must be a list of elements")
    first = period[0]
    if not isinstance(first, list) or not first:
        raise SchemaError("sequence entries must be nonempty coordinate lists")
    space = Space(len(first))
    return EventuallyPeriodicSeq(
        tuple(element_from_list(v, space) for v in preperiod),
        tuple(element_from_list(v, space) for v in period),
    )


def prefix_from_dict(data: Any, horizon: int) -> list[Element]:
    """Load a value sequence for extraction runs: either an explicit
    "prefix" list or an eventually periodic form expanded to the horizon."""
    if not isinstance(data, dict):
        raise SchemaError("sequence file must be a JSON object")
    if "prefix" in data:
        prefix = data["prefix"]
        if not isinstance(prefix, list) or not prefix:
            raise SchemaError("'prefix' must be a nonempty list of elements")
        first = prefix[0]
        if not isinstance(first, list) or not first:
            raise SchemaError("sequence entries must be nonempty coordinate lists")
        space = Space(len(first))
        values = [element_from_list(v, space) for v in prefix]
        return values[:horizon]
    return seq_from_dict(data).prefix(horizon)


def _witnesses_to_list(report: MixingReport) -> list[dict]:
    out = []
    if report.ergodicity_witness is not None:
        w = report.ergodicity_witness
        out.append(
            {
                "kind": "ergodicity",
                "p": w.p,
                "q": w.q,
                "limit": element_to_list(w.limit),
                "expected": element_to_list(w.expected),
            }
        )
    if report.weak_mixing_witness is not None:
        w = report.weak_mixing_witness
        out.append(
            {
                "kind": "weak_mixing",
                "p": w.p,
                "q": w.q,
                "k": w.k,
                "deviation": element_to_list(w.deviation),
                "limit_residual": element_to_list(w.limit_residual),
            }
        )
    return out


def report_to_dict(report: MixingReport) -> dict:
    return {
        "id": report.system_id,
        "ergodic": report.ergodic,
        "weak_mixing": report.weak_mixing,
        "witnesses": _witnesses_to_list(report),
        "routes": {
            "operator_equality": report.operator_equality,
            "component_limits": report.component_limits,
        },
        "route_agreement": report.route_agreement,
    }


def certificate_to_dict(cert: DensityCertificate) -> dict:
    out: dict[str, Any] = {"mode": cert.mode}
    if cert.mode == "exact":
        out["density_zero"] = cert.density_zero
        out["limit"] = element_to_list(cert.limit) if cert.limit is not None else None
    else:
        out["horizon"] = cert.horizon
        out["checkpoints"] = list(cert.checkpoints)
        out["running_density"] = [element_to_list(m) for m in cert.running]
        out["consistent_with_density_zero"] = cert.consistent
    return out


def extraction_to_dict(extraction: KvnExtraction) -> dict:
    support = [
        k for k, comp in enumerate(extraction.components) if not comp.is_zero()
    ]
    return {
        "horizon": len(extraction.components),
        "thresholds": [rational_to_str(t) for t in extraction.thresholds],
        "switch_points": [list(s) for s in extraction.switch_points],
        "support": support,
        "certificate": certificate_to_dict(extraction.certificate),
    }
