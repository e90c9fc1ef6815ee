"""Weighted set cover: greedy and exact solvers plus both reductions.

The accessibility problem reduces to weighted set cover (universe = non-top
SCCs, one set per input, weight = input cost) and, conversely, any weighted
set cover instance embeds into an accessibility problem over a diagonal
state pattern.  Both directions preserve weights and optima exactly, which
is what the round-trip tests exercise.

Universe elements and set indices are 0-based internally; the JSON format
(`{"N": 2, "sets": [[], [1], [1, 2]], "weights": ["1", "1", "1"]}`) is
1-based like every other external format.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ioselect.graph_core import coverage, decompose_sccs, build_graphs
from ioselect.system_model import (
    COMPLETE,
    FormatError,
    ModelError,
    Selection,
    SparsityPattern,
    StructuredSystem,
    format_cost,
    parse_cost,
)


class Infeasible(ModelError):
    """Some universe element is not covered by any available set."""

    def __init__(self, element: int):
        self.element = element
        super().__init__(f"element {element + 1} is in no set")


class InfeasibleSelection(ModelError):
    """A selection mapped back to a cover does not cover the universe."""

    def __init__(self, element: int):
        self.element = element
        super().__init__(f"selection leaves element {element + 1} uncovered")


class TooLarge(ModelError):
    """Instance exceeds a brute-force guard."""


@dataclass(frozen=True)
class WeightedSetCoverInstance:
    """Universe {0..N-1}, sets S_0..S_{r-1}, nonnegative scaled-integer weights.

    Feasibility (the union of the sets equals the universe) is checked at
    solve time, not assumed here.
    """

    universe_size: int
    sets: tuple[frozenset[int], ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.sets) != len(self.weights):
            raise ModelError(
                f"{len(self.sets)} sets but {len(self.weights)} weights"
            )
        for idx, s in enumerate(self.sets):
            for e in s:
                if not 0 <= e < self.universe_size:
                    raise ModelError(
                        f"set {idx + 1}: element {e + 1} outside universe 1..{self.universe_size}"
                    )

    @property
    def r(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class GreedyStep:
    set_index: int
    newly_covered: frozenset[int]
    ratio: Fraction  # scaled weight per newly covered element


@dataclass(frozen=True)
class Cover:
    chosen: frozenset[int]
    weight: int
    trace: tuple[GreedyStep, ...] = ()


def _ratio_better(w_new: int, k_new: int, w_old: int, k_old: int) -> bool:
    """w_new/k_new < w_old/k_old via integer cross-multiplication."""
    return w_new * k_old < w_old * k_new


def greedy_solve(inst: WeightedSetCoverInstance) -> Cover:
    """Chvatal's greedy: repeatedly take the set with the smallest
    weight-per-newly-covered-element ratio.

    Ties break toward the set covering more new elements, then the lowest
    index, making the trace fully deterministic.  Zero-weight sets have
    ratio 0 and win against any positive ratio; sets covering nothing new
    are never taken.  The result is within H(d) of the optimum, where d is
    the largest set size and H the harmonic number.
    """
    uncovered = set(range(inst.universe_size))
    chosen: list[int] = []
    trace: list[GreedyStep] = []
    while uncovered:
        best_idx = -1
        best_new: set[int] = set()
        best_w = 0
        for idx, s in enumerate(inst.sets):
            new = s & uncovered
            if not new:
                continue
            w = inst.weights[idx]
            if best_idx < 0 or _ratio_better(w, len(new), best_w, len(best_new)) or (
                w * len(best_new) == best_w * len(new) and len(new) > len(best_new)
            ):
                best_idx, best_new, best_w = idx, new, w
        if best_idx < 0:
            raise Infeasible(min(uncovered))
        uncovered -= best_new
        chosen.append(best_idx)
        trace.append(
            GreedyStep(best_idx, frozenset(best_new), Fraction(best_w, len(best_new)))
        )
    return Cover(
        chosen=frozenset(chosen),
        weight=sum(inst.weights[i] for i in chosen),
        trace=tuple(trace),
    )


EXACT_GUARD = 25


def exact_solve(inst: WeightedSetCoverInstance) -> Cover:
    """Minimum-weight cover by branch and bound over set bitmasks.

    Guarded at r <= 25 sets; this is a desk-scale verification oracle, not a
    production solver.  Ties break toward the lexicographically smallest
    chosen index set.
    """
    if inst.r > EXACT_GUARD:
        raise TooLarge(f"exact cover limited to {EXACT_GUARD} sets, got {inst.r}")
    full = (1 << inst.universe_size) - 1
    masks = []
    for s in inst.sets:
        mask = 0
        for e in s:
            mask |= 1 << e
        masks.append(mask)
    reach = 0
    for mask in masks:
        reach |= mask
    if reach != full:
        for e in range(inst.universe_size):
            if not reach >> e & 1:
                raise Infeasible(e)

    candidates: list[list[int]] = [[] for _ in range(inst.universe_size)]
    for idx, mask in enumerate(masks):
        for e in range(inst.universe_size):
            if mask >> e & 1:
                candidates[e].append(idx)

    seed = greedy_solve(inst)
    best_weight = seed.weight
    best_chosen = tuple(sorted(seed.chosen))

    def dfs(covered: int, weight: int, chosen: tuple[int, ...], banned: int) -> None:
        nonlocal best_weight, best_chosen
        if covered == full:
            if (weight, chosen) < (best_weight, best_chosen):
                best_weight, best_chosen = weight, chosen
            return
        if weight > best_weight:
            return
        # fail-first: branch on the uncovered element with fewest usable sets
        pick_cands: list[int] | None = None
        for e in range(inst.universe_size):
            if covered >> e & 1:
                continue
            cands = [i for i in candidates[e] if not banned >> i & 1]
            if pick_cands is None or len(cands) < len(pick_cands):
                pick_cands = cands
                if not cands:
                    return
        assert pick_cands is not None
        # exclusion branching: after exploring a candidate, ban it in the
        # remaining branches so no cover is enumerated twice
        sub_banned = banned
        for idx in pick_cands:
            dfs(
                covered | masks[idx],
                weight + inst.weights[idx],
                tuple(sorted(chosen + (idx,))),
                sub_banned,
            )
            sub_banned |= 1 << idx

    dfs(0, 0, (), 0)
    return Cover(chosen=frozenset(best_chosen), weight=best_weight, trace=())


def reduce_accessibility_to_wsc(
    system: StructuredSystem,
) -> tuple[WeightedSetCoverInstance, tuple[tuple[int, ...], ...]]:
    """Accessibility as weighted set cover.

    Universe element t is the t-th non-top SCC of D(A) (SCCs numbered by
    minimum contained state); set i collects the non-top SCCs input i
    covers; weights are the input costs.  Also returns the universe labels:
    per element, the sorted 1-based states of that SCC.
    """
    sg, _dg = build_graphs(system)
    scc = decompose_sccs(sg)
    cov = coverage(system, scc)
    labels = tuple(
        tuple(v + 1 for v in scc.components[ci]) for ci in scc.non_top
    )
    inst = WeightedSetCoverInstance(
        universe_size=scc.q,
        sets=cov.input_covers,
        weights=system.cost_u,
    )
    return inst, labels


def cover_to_selection(cover: Cover) -> Selection:
    """Chosen set indices are input indices (inputs-only selection)."""
    return Selection(inputs=cover.chosen, outputs=frozenset())


def reduce_wsc_to_accessibility(inst: WeightedSetCoverInstance) -> StructuredSystem:
    """Embed a set cover instance into an accessibility problem.

    States are universe elements with self-loop-only dynamics (diagonal A),
    input j feeds exactly the states in S_j, input costs are the weights,
    and there are no outputs.
    """
    n = inst.universe_size
    if n < 1:
        raise ModelError("reverse reduction needs a nonempty universe")
    a = SparsityPattern(n, n, frozenset((i, i) for i in range(n)))
    b_stars = frozenset(
        (e, j) for j, s in enumerate(inst.sets) for e in s
    )
    return StructuredSystem(
        A=a,
        B=SparsityPattern(n, inst.r, b_stars),
        C=SparsityPattern(0, n),
        K=COMPLETE,
        cost_u=inst.weights,
        cost_y=(),
        mode="continuous",
    )


def selection_to_cover(inst: WeightedSetCoverInstance, sel: Selection) -> Cover:
    """Map an accessibility selection on the reduced system back to a cover.

    Raises :class:`InfeasibleSelection` if the selected sets leave an
    element uncovered (equivalently: some state of the reduced system is
    inaccessible).
    """
    covered: set[int] = set()
    for i in sel.inputs:
        if not 0 <= i < inst.r:
            raise IndexError(f"set index {i + 1} out of range 1..{inst.r}")
        covered |= inst.sets[i]
    for e in range(inst.universe_size):
        if e not in covered:
            raise InfeasibleSelection(e)
    return Cover(
        chosen=frozenset(sel.inputs),
        weight=sum(inst.weights[i] for i in sel.inputs),
        trace=(),
    )


# --- JSON format -------------------------------------------------------------


def wsc_from_json(data: dict) -> WeightedSetCoverInstance:
    if not isinstance(data, dict):
        raise FormatError("set cover document must be a JSON object")
    if "N" not in data or isinstance(data["N"], bool) or not isinstance(data["N"], int):
        raise FormatError('field "N": expected an integer')
    n = data["N"]
    raw_sets = data.get("sets")
    if not isinstance(raw_sets, list):
        raise FormatError('field "sets": expected a list of element lists')
    sets = []
    for k, entry in enumerate(raw_sets):
        if not isinstance(entry, list) or any(
            isinstance(e, bool) or not isinstance(e, int) for e in entry
        ):
            raise FormatError(f'field "sets"[{k}]: expected a list of integers')
        sets.append(frozenset(e - 1 for e in entry))
    raw_weights = data.get("weights")
    if not isinstance(raw_weights, list) or any(
        not isinstance(w, str) for w in raw_weights
    ):
        raise FormatError('field "weights": expected a list of decimal strings')
    try:
        weights = tuple(parse_cost(w) for w in raw_weights)
    except ModelError as exc:
        raise FormatError(f'field "weights": {exc}') from exc
    try:
        return WeightedSetCoverInstance(n, tuple(sets), weights)
    except ModelError as exc:
        raise FormatError(str(exc)) from exc


def wsc_to_json(inst: WeightedSetCoverInstance) -> dict:
    return {
        "N": inst.universe_size,
        "sets": [sorted(e + 1 for e in s) for s in inst.sets],
        "weights": [format_cost(w) for w in inst.weights],
    }
