"""Top-level pipeline: SFM decision, three-stage selection, special cases.

A structured system with complete feedback pattern is free of structurally
fixed modes exactly when (a) every state lies in an SCC of the system
digraph containing a feedback edge and (b) all states can be spanned by
disjoint cycles.  For discrete-time systems only condition (a) matters.

``select_min_cost_io`` runs the three-stage approximation:

1. greedy weighted set cover on the accessibility reduction  -> I_A
2. the same on the transposed dual (sensability)             -> J_A
3. minimum-cost perfect matching on the full bipartite graph -> (I_C, J_C)

and returns the union (I_A u I_C, J_A u J_C), which is always feasible.
Stage 3 alone is a certified lower bound on the optimum; enabling the exact
cover oracle tightens the bound with the exact stage-1/2 optima.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ioselect import matching as matching_mod
from ioselect.graph_core import (
    build_graphs,
    condition_a_holds,
    condition_a_witness,
    decompose_sccs,
    vertex_name,
)
from ioselect.set_cover import (
    Cover,
    cover_to_selection,
    exact_solve,
    greedy_solve,
    reduce_accessibility_to_wsc,
)
from ioselect.system_model import (
    COST_SCALE,
    ModelError,
    Selection,
    StructuredSystem,
    format_cost,
    format_ratio,
    restrict,
    selection_cost,
    transpose_dual,
    validate,
)


class SfmStatus(enum.Enum):
    NO_SFM = "none"
    TYPE1 = "Type-1"
    TYPE2 = "Type-2"
    BOTH = "Type-1 and Type-2"

    @property
    def ok(self) -> bool:
        return self is SfmStatus.NO_SFM


class SystemHasSFMs(ModelError):
    """The full system already has structurally fixed modes; no selection can help."""

    def __init__(self, status: SfmStatus, witness: dict):
        self.status = status
        self.witness = witness
        super().__init__(f"system has structurally fixed modes ({status.value})")


class ValidationFailed(ModelError):
    def __init__(self, violations: tuple[str, ...]):
        self.violations = violations
        super().__init__("; ".join(violations))


def check_no_sfm(system: StructuredSystem, sel: Selection) -> SfmStatus:
    """Classify the system under the given selection.

    Continuous mode tests both conditions; discrete mode only condition (a),
    so Type-2 is never reported there.
    """
    cond_a = condition_a_holds(system, sel)
    if system.mode == "discrete":
        return SfmStatus.NO_SFM if cond_a else SfmStatus.TYPE1
    cond_b = matching_mod.cycle_cover_check(system, sel)
    if cond_a and cond_b:
        return SfmStatus.NO_SFM
    if cond_a:
        return SfmStatus.TYPE2
    if cond_b:
        return SfmStatus.TYPE1
    return SfmStatus.BOTH


CASE_DISCRETE = "discrete"
CASE_IRREDUCIBLE = "irreducible"
CASE_STATE_PM = "state_pm"
CASE_SINGLE_NONTOP = "single_nontop"
CASE_SINGLE_NONBOTTOM = "single_nonbottom"
CASE_GENERAL = "general"

_CASE_PRECEDENCE = (
    CASE_DISCRETE,
    CASE_IRREDUCIBLE,
    CASE_STATE_PM,
    CASE_SINGLE_NONTOP,
    CASE_SINGLE_NONBOTTOM,
)

_GUARANTEES = {
    CASE_DISCRETE: "two greedy cover stages; cycle condition not required",
    CASE_IRREDUCIBLE: "exact optimum",
    CASE_STATE_PM: "within 2(log mu_max + log eta_max) of the optimum",
    CASE_SINGLE_NONTOP: "within 3 log(eta_max) of the optimum",
    CASE_SINGLE_NONBOTTOM: "within 3 log(mu_max) of the optimum",
    CASE_GENERAL: "greedy covers + min-cost matching; cycle stage is a certified lower bound",
}


def applicable_special_cases(system: StructuredSystem) -> tuple[str, ...]:
    """Every structural tag that applies (may be several)."""
    tags = []
    if system.mode == "discrete":
        tags.append(CASE_DISCRETE)
    sg, _dg = build_graphs(system)
    scc = decompose_sccs(sg)
    if len(scc.components) == 1:
        tags.append(CASE_IRREDUCIBLE)
    if matching_mod.state_pattern_has_pm(system):
        tags.append(CASE_STATE_PM)
    if scc.q == 1:
        tags.append(CASE_SINGLE_NONTOP)
    if scc.k == 1:
        tags.append(CASE_SINGLE_NONBOTTOM)
    return tuple(tags)


def detect_special_case(system: StructuredSystem) -> str:
    """The strongest applicable tag (precedence: discrete, irreducible,
    state_pm, single_nontop, single_nonbottom), or ``general``."""
    tags = applicable_special_cases(system)
    for tag in _CASE_PRECEDENCE:
        if tag in tags:
            return tag
    return CASE_GENERAL


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of the pipeline with machine-checkable certificates.

    ``stage_costs`` is (accessibility greedy weight, sensability greedy
    weight, matching cost); the cycle entry is None in discrete mode.  The
    union of the stage selections may cost less than the stage-cost sum.
    Costs are scaled integers; serialize with
    :func:`ioselect.system_model.format_cost`.
    """

    selection: Selection
    total_cost: int
    stage_costs: tuple[Optional[int], Optional[int], Optional[int]]
    lower_bound: int
    special_case: str
    special_cases: tuple[str, ...]
    guarantee: str
    no_sfm: bool
    stage1: Optional[Cover]
    stage2: Optional[Cover]
    stage1_labels: tuple[tuple[int, ...], ...]
    stage2_labels: tuple[tuple[int, ...], ...]
    matching: Optional[matching_mod.Matching]
    scc_witness: dict
    exact_stage_bound: Optional[int]
    timings: dict[str, float]


def sfm_witness(
    system: StructuredSystem, status: SfmStatus, sel: Optional[Selection] = None
) -> dict:
    """Machine-checkable evidence for a failed SFM check: the states outside
    any feedback-carrying SCC (Type-1) and a Hall violator (Type-2).

    Labels always use the original system's indices, also when ``sel``
    restricts the candidate inputs/outputs.
    """
    if sel is None:
        sel = Selection.full(system)
    witness: dict = {}
    if status in (SfmStatus.TYPE1, SfmStatus.BOTH):
        cert = condition_a_witness(system, sel)
        witness["type1_states"] = sorted(
            (label for label, info in cert.items() if info["feedback_edge"] is None),
            key=lambda s: int(s[1:]),
        )
    if status in (SfmStatus.TYPE2, SfmStatus.BOTH) and system.mode == "continuous":
        sub = restrict(system, sel)
        left_ids, right_ids = matching_mod.hall_indices(matching_mod.build_bipartite(sub))
        ins, outs = sel.sorted_inputs(), sel.sorted_outputs()

        def label(v: int) -> str:
            if v < sub.n:
                return f"x{v + 1}"
            if v < sub.n + sub.m:
                return f"u{ins[v - sub.n] + 1}"
            return f"y{outs[v - sub.n - sub.m] + 1}"

        witness["hall_violator"] = {
            "left": [label(v) + "'" for v in left_ids],
            "neighbors": [label(v) for v in right_ids],
        }
    return witness


def _cheapest_connected_pair(system: StructuredSystem) -> tuple[int, int]:
    """Lowest-cost input with a star in B and output with a star in C
    (ties to the lowest index)."""
    in_candidates = sorted(
        (system.cost_u[i], i) for i in {j for _r, j in system.B.stars}
    )
    out_candidates = sorted(
        (system.cost_y[j], j) for j in {r for r, _c in system.C.stars}
    )
    if not in_candidates or not out_candidates:
        raise ModelError("no connected input/output available")
    return in_candidates[0][1], out_candidates[0][1]


def select_min_cost_io(
    system: StructuredSystem, exact_covers: bool = False
) -> SelectionReport:
    """Three-stage minimum-cost input/output selection.

    Raises :class:`ValidationFailed` on malformed systems,
    :class:`ModelError` on a non-complete feedback pattern, and
    :class:`SystemHasSFMs` (with a witness) when even the full selection has
    structurally fixed modes.  With ``exact_covers`` the stage-1/2 cover
    instances are also solved exactly (guarded brute force) to tighten the
    reported lower bound.
    """
    report = validate(system)
    if not report.ok:
        raise ValidationFailed(report.violations)
    if not system.k_is_complete():
        raise ModelError("selection requires a complete feedback pattern")

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    status = check_no_sfm(system, Selection.full(system))
    timings["sfm_check"] = time.perf_counter() - t0
    if not status.ok:
        raise SystemHasSFMs(status, sfm_witness(system, status))

    tags = applicable_special_cases(system)
    primary = detect_special_case(system)

    stage1 = stage2 = None
    labels1: tuple[tuple[int, ...], ...] = ()
    labels2: tuple[tuple[int, ...], ...] = ()
    match_result = None
    exact_bound: Optional[int] = None

    if primary == CASE_IRREDUCIBLE and system.mode == "continuous":
        # One SCC: any feasible selection uses at least one connected input
        # and output.  With a state-only perfect matching the cheapest such
        # pair is therefore optimal; otherwise the matching stage alone is
        # (its cost is a lower bound met with equality).
        t0 = time.perf_counter()
        if matching_mod.state_pattern_has_pm(system):
            i, j = _cheapest_connected_pair(system)
            selection = Selection.of([i], [j])
            stage_costs: tuple[Optional[int], ...] = (
                system.cost_u[i],
                system.cost_y[j],
                0,
            )
            lower = system.cost_u[i] + system.cost_y[j]
        else:
            g = matching_mod.build_bipartite(system)
            match_result = matching_mod.min_cost_perfect_matching(g)
            selection, cyc_cost = matching_mod.extract_io(match_result)
            stage_costs = (0, 0, cyc_cost)
            lower = cyc_cost
        timings["cycle"] = time.perf_counter() - t0
    else:
        t0 = time.perf_counter()
        inst1, labels1 = reduce_accessibility_to_wsc(system)
        stage1 = greedy_solve(inst1)
        sel1 = cover_to_selection(stage1)
        timings["accessibility"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        dual = transpose_dual(system)
        inst2, labels2 = reduce_accessibility_to_wsc(dual)
        stage2 = greedy_solve(inst2)
        sel2 = Selection(outputs=stage2.chosen)
        timings["sensability"] = time.perf_counter() - t0

        if exact_covers:
            exact_bound = exact_solve(inst1).weight + exact_solve(inst2).weight

        if system.mode == "discrete":
            selection = sel1.union(sel2)
            stage_costs = (stage1.weight, stage2.weight, None)
            lower = exact_bound if exact_bound is not None else 0
        else:
            t0 = time.perf_counter()
            g = matching_mod.build_bipartite(system)
            match_result = matching_mod.min_cost_perfect_matching(g)
            sel3, cyc_cost = matching_mod.extract_io(match_result)
            timings["cycle"] = time.perf_counter() - t0
            selection = sel1.union(sel2).union(sel3)
            stage_costs = (stage1.weight, stage2.weight, cyc_cost)
            lower = max(cyc_cost, exact_bound or 0)

    total = selection_cost(system, selection)
    final_status = check_no_sfm(system, selection)
    assert final_status.ok, "pipeline produced an infeasible selection"
    assert lower <= total, "lower bound exceeds achieved cost"

    witness = condition_a_witness(system, selection)
    return SelectionReport(
        selection=selection,
        total_cost=total,
        stage_costs=tuple(stage_costs),
        lower_bound=lower,
        special_case=primary,
        special_cases=tags if tags else (CASE_GENERAL,),
        guarantee=_GUARANTEES[primary],
        no_sfm=True,
        stage1=stage1,
        stage2=stage2,
        stage1_labels=labels1,
        stage2_labels=labels2,
        matching=match_result,
        scc_witness=witness,
        exact_stage_bound=exact_bound,
        timings=timings,
    )


def _cover_trace_json(cover: Cover, labels) -> list[dict]:
    out = []
    for step in cover.trace:
        scaled_ratio = step.ratio / COST_SCALE  # scaled weight -> cost units
        out.append(
            {
                "set": step.set_index + 1,
                "newly_covered": sorted(e + 1 for e in step.newly_covered),
                "covered_states": [
                    list(labels[e]) for e in sorted(step.newly_covered)
                ],
                "ratio": format_ratio(scaled_ratio),
            }
        )
    return out


def _matching_trace_json(m: matching_mod.Matching) -> list[dict]:
    out = []
    for e in sorted(m.edges, key=lambda e: e.left):
        out.append(
            {
                "left": vertex_name(e.left, m.n, m.m) + "'",
                "right": vertex_name(e.right, m.n, m.m),
                "class": e.cls,
                "cost": format_cost(e.cost),
            }
        )
    return out


def report_to_json(
    report: SelectionReport,
    include_traces: bool = False,
    oracle: Optional[tuple[Selection, int]] = None,
) -> dict:
    """Render a report in the external JSON shape (1-based indices,
    decimal-string costs)."""
    acc, sen, cyc = report.stage_costs
    out: dict = {
        "selection": {
            "inputs": [i + 1 for i in report.selection.sorted_inputs()],
            "outputs": [j + 1 for j in report.selection.sorted_outputs()],
        },
        "total_cost": format_cost(report.total_cost),
        "stage_costs": {
            "accessibility": None if acc is None else format_cost(acc),
            "sensability": None if sen is None else format_cost(sen),
            "cycle": None if cyc is None else format_cost(cyc),
        },
        "lower_bound": format_cost(report.lower_bound),
        "special_case": report.special_case,
        "special_cases": list(report.special_cases),
        "guarantee": report.guarantee,
        "no_sfm": report.no_sfm,
    }
    if report.exact_stage_bound is not None:
        out["exact_stage_bound"] = format_cost(report.exact_stage_bound)
    if oracle is not None:
        oracle_sel, oracle_cost = oracle
        entry: dict = {
            "selection": {
                "inputs": [i + 1 for i in oracle_sel.sorted_inputs()],
                "outputs": [j + 1 for j in oracle_sel.sorted_outputs()],
            },
            "cost": format_cost(oracle_cost),
        }
        if oracle_cost > 0:
            entry["ratio"] = format_ratio(
                Fraction(report.total_cost, oracle_cost)
            )
        else:
            entry["ratio"] = "1"
            entry["ratio_convention"] = "zero-cost optimum reported as ratio 1"
        out["oracle"] = entry
    if include_traces:
        trace: dict = {"scc_feedback_witness": report.scc_witness}
        if report.stage1 is not None:
            trace["accessibility_cover"] = {
                "chosen": sorted(i + 1 for i in report.stage1.chosen),
                "steps": _cover_trace_json(report.stage1, report.stage1_labels),
            }
        if report.stage2 is not None:
            trace["sensability_cover"] = {
                "chosen": sorted(j + 1 for j in report.stage2.chosen),
                "steps": _cover_trace_json(report.stage2, report.stage2_labels),
            }
        if report.matching is not None:
            trace["matching"] = _matching_trace_json(report.matching)
        out["trace"] = trace
    return out
