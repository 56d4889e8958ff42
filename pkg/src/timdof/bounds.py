"""Symmetric-DoF upper bound from odd reduced-graph cycles and the 1/2-DoF test."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cycles import DEFAULT_MAX_COUNT, DEFAULT_MAX_LEN, CompletedCycle, CycleParams, best_completed_cycle
from .graphs import GraphBundle, build_bundle
from .topology import NetworkTopology


def theorem1_bound_value(p: CycleParams) -> Fraction:
    """(1/2)(1 - 1/(m + 2 lΣ)) as an exact fraction."""
    n = p.m + 2 * p.l_sigma
    return Fraction(n - 1, 2 * n)


@dataclass(frozen=True)
class HalfDofVerdict:
    feasible: bool
    c1_ok: bool
    c2_ok: bool
    reason: str


def half_dof_feasible(bundle: GraphBundle) -> HalfDofVerdict:
    c1 = not bundle.internal_conflicts
    c2 = bundle.reduced_bipartite.bipartite
    if c1 and c2:
        reason = "no internal conflicts and the reduced graph is bipartite"
    else:
        parts = []
        if not c1:
            parts.append("internal conflicts " + ", ".join(f"{{{a},{b}}}" for a, b in sorted(bundle.internal_conflicts)))
        if not c2:
            parts.append("the reduced graph has an odd cycle")
        reason = "; ".join(parts)
    return HalfDofVerdict(c1 and c2, c1, c2, reason)


@dataclass(frozen=True)
class AnalysisOptions:
    max_cycle_len: int | None = DEFAULT_MAX_LEN
    max_cycle_count: int | None = DEFAULT_MAX_COUNT

    @classmethod
    def exhaustive(cls) -> AnalysisOptions:
        return cls(None, None)


@dataclass(frozen=True)
class BoundReport:
    bundle: GraphBundle
    half_dof: HalfDofVerdict
    theorem1_bound: Fraction | None
    certificate: CompletedCycle | None
    possibly_not_tightest: bool
    notes: list[str] = field(default_factory=list)

    @property
    def half_dof_feasible(self) -> bool:
        return self.half_dof.feasible

    @property
    def c1_ok(self) -> bool:
        return self.half_dof.c1_ok

    @property
    def c2_ok(self) -> bool:
        return self.half_dof.c2_ok


def analyze(topology: NetworkTopology, options: AnalysisOptions | None = None) -> BoundReport:
    options = options or AnalysisOptions()
    bundle = build_bundle(topology)
    verdict = half_dof_feasible(bundle)
    notes = []
    bound = cert = None
    loose = False
    if not verdict.c2_ok:
        search = best_completed_cycle(bundle, options.max_cycle_len, options.max_cycle_count)
        cert, loose = search.cycle, search.possibly_not_tightest
        bound = theorem1_bound_value(cert.params)
        p = cert.params
        notes.append(f"odd reduced-graph cycle: m={p.m}, m2={p.m2}, l_sigma={p.l_sigma}; "
                     f"symmetric DoF per user <= {bound}")
        if loose:
            notes.append("cycle search was capped; a smaller bound may exist")
    if not verdict.c1_ok:
        notes.append("symmetric DoF strictly below 1/2 (necessity of C1, external quantification out of scope)")
    if verdict.feasible:
        if bundle.conflict_edges:
            notes.append("1/2 DoF per user is achievable and optimal (C1 and C2 hold, at least one conflict edge)")
        else:
            notes.append("1/2 DoF per user is achievable (C1 and C2 hold); no conflict edges, "
                         "so optimality of 1/2 is not asserted")
    elif bound == Fraction(4, 9) and verdict.c1_ok:
        notes.append("4/9 matches the three-slot common/private scheme when it can be built for this network")
    return BoundReport(bundle, verdict, bound, cert, loose, notes)


def _pairs(edges) -> list[list[int]]:
    return [list(e) for e in sorted(edges)]


def report_to_json(report: BoundReport) -> dict:
    from .topology import emit_topology

    b = report.bundle
    return {
        "topology": emit_topology(b.topology),
        "alignment_edges": _pairs(b.alignment_edges),
        "conflict_edges": _pairs(b.conflict_edges),
        "alignment_sets": [list(s) for s in b.sets],
        "internal_conflicts": _pairs(b.internal_conflicts),
        "reduced_graph": {
            "vertices": [list(s) for s in b.reduced_sets()],
            "edges": [[list(b.sets[i]), list(b.sets[j])] for i, j in sorted(b.reduced_edges)],
            "bipartite": b.reduced_bipartite.bipartite,
        },
        "best_completed_cycle": report.certificate.to_json() if report.certificate else None,
        "theorem1_bound": (
            {"num": report.theorem1_bound.numerator, "den": report.theorem1_bound.denominator}
            if report.theorem1_bound is not None else None
        ),
        "half_dof": {
            "feasible": report.half_dof.feasible,
            "c1_ok": report.half_dof.c1_ok,
            "c2_ok": report.half_dof.c2_ok,
        },
        "possibly_not_tightest": report.possibly_not_tightest,
        "notes": list(report.notes),
    }
