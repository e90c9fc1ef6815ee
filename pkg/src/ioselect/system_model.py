"""Structured-system data model.

A structured system is a tuple (A, B, C, K) of {0, *} sparsity patterns with
per-input costs p_u and per-output costs p_y.  Only the positions of the
stars matter; properties computed here hold generically, i.e. for almost all
numerical realizations of the patterns.

Conventions
-----------
* Indices are 0-based everywhere inside the package.  External formats
  (JSON files, CLI flags, human-readable messages) are 1-based.
* Costs are exact.  Decimal strings are scaled by ``10**COST_DECIMALS``
  into integers so comparisons in greedy ratios and matchings never touch
  floating point.  Costs that need more precision, or do not fit into the
  signed 64-bit scaled range, are rejected.
* All values are immutable after construction; every function is pure.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence, Union

COST_DECIMALS = 6
COST_SCALE = 10**COST_DECIMALS
_COST_LIMIT = 2**63


class ModelError(Exception):
    """Base class for errors raised by this package."""


class CostError(ModelError):
    """A cost cannot be represented exactly at the configured precision."""


class FormatError(ModelError):
    """A JSON document does not match the instance format."""


def parse_cost(value: Union[str, int]) -> int:
    """Parse a decimal cost string into a scaled integer.

    Integers are taken as whole cost units (a convenience for tests and
    generated data).  Strings go through :class:`decimal.Decimal` so that
    e.g. ``"0.1"`` is exact.

    >>> parse_cost("1.5")
    1500000
    >>> parse_cost(2)
    2000000
    """
    if isinstance(value, bool):
        raise CostError(f"not a decimal cost: {value!r}")
    if isinstance(value, int):
        scaled = value * COST_SCALE
    else:
        try:
            dec = decimal.Decimal(str(value))
        except decimal.InvalidOperation as exc:
            raise CostError(f"not a decimal cost: {value!r}") from exc
        if not dec.is_finite():
            raise CostError(f"cost must be finite: {value!r}")
        quantized = dec.scaleb(COST_DECIMALS)
        scaled = int(quantized)
        if scaled != quantized:
            raise CostError(
                f"cost {value!r} needs more than {COST_DECIMALS} decimal places"
            )
    if abs(scaled) >= _COST_LIMIT:
        raise CostError(f"cost {value!r} overflows the scaled 64-bit range")
    return scaled


def format_cost(scaled: int) -> str:
    """Render a scaled cost as its canonical decimal string.

    Inverse of :func:`parse_cost` up to canonicalization: trailing zeros in
    the fractional part are dropped and ``-0`` never appears.
    """
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), COST_SCALE)
    if frac == 0:
        return f"{sign}{whole}"
    digits = f"{frac:0{COST_DECIMALS}d}".rstrip("0")
    return f"{sign}{whole}.{digits}"


def format_ratio(ratio: Fraction) -> str:
    """Render an exact ratio, as a decimal when it terminates.

    Non-terminating ratios are printed as ``num/den`` so nothing is ever
    rounded.
    """
    den = ratio.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den != 1:
        return f"{ratio.numerator}/{ratio.denominator}"
    dec = decimal.Decimal(ratio.numerator) / decimal.Decimal(ratio.denominator)
    text = format(dec.normalize(), "f")
    return text


@dataclass(frozen=True)
class SparsityPattern:
    """A {0, *} matrix stored as the set of starred (row, col) cells.

    Zero-sized patterns are legal: restricting to an empty input or output
    selection yields a pattern with zero columns or rows, and the reverse
    set-cover reduction builds systems with no outputs at all.  Range checks
    on the stars live in :func:`validate` (report-style) rather than here.
    """

    rows: int
    cols: int
    stars: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "stars", frozenset(map(tuple, self.stars)))

    @classmethod
    def from_pairs(cls, rows: int, cols: int, pairs: Iterable[Sequence[int]]) -> "SparsityPattern":
        """Build from 1-based [row, col] pairs (the JSON convention)."""
        return cls(rows, cols, frozenset((i - 1, j - 1) for i, j in pairs))

    def to_pairs(self) -> list[list[int]]:
        """Sorted 1-based [row, col] pairs for serialization."""
        return [[i + 1, j + 1] for i, j in sorted(self.stars)]

    def transpose(self) -> "SparsityPattern":
        return SparsityPattern(self.cols, self.rows, frozenset((j, i) for i, j in self.stars))

    def column(self, j: int) -> frozenset[int]:
        return frozenset(i for i, jj in self.stars if jj == j)

    def row_set(self, i: int) -> frozenset[int]:
        return frozenset(j for ii, j in self.stars if ii == i)

    def __contains__(self, pos: tuple[int, int]) -> bool:
        return tuple(pos) in self.stars


@dataclass(frozen=True)
class CompleteK:
    """Marker for a complete feedback pattern: every output may feed every input."""


COMPLETE = CompleteK()

KPattern = Union[CompleteK, SparsityPattern]

MODES = ("continuous", "discrete")


@dataclass(frozen=True)
class StructuredSystem:
    """Bundle (A, B, C, K, p_u, p_y, mode) with sizes n = |states|, m = |inputs|, p = |outputs|.

    ``K`` is normally the :data:`COMPLETE` token.  An explicit pattern is
    accepted by the file format and validated, but the selection pipeline
    refuses feedback patterns that are not complete.
    """

    A: SparsityPattern
    B: SparsityPattern
    C: SparsityPattern
    K: KPattern = COMPLETE
    cost_u: tuple[int, ...] = ()
    cost_y: tuple[int, ...] = ()
    mode: str = "continuous"

    def __post_init__(self) -> None:
        object.__setattr__(self, "cost_u", tuple(self.cost_u))
        object.__setattr__(self, "cost_y", tuple(self.cost_y))

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.B.cols

    @property
    def p(self) -> int:
        return self.C.rows

    def k_stars(self) -> frozenset[tuple[int, int]]:
        """Feedback stars as explicit (input, output) pairs."""
        if isinstance(self.K, CompleteK):
            return frozenset((i, j) for i in range(self.m) for j in range(self.p))
        return self.K.stars

    def k_is_complete(self) -> bool:
        if isinstance(self.K, CompleteK):
            return True
        return len(self.K.stars) == self.m * self.p


@dataclass(frozen=True)
class Selection:
    """A choice of input and output indices (0-based)."""

    inputs: frozenset[int] = frozenset()
    outputs: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))

    @classmethod
    def of(cls, inputs: Iterable[int] = (), outputs: Iterable[int] = ()) -> "Selection":
        return cls(frozenset(inputs), frozenset(outputs))

    @classmethod
    def full(cls, system: StructuredSystem) -> "Selection":
        return cls(frozenset(range(system.m)), frozenset(range(system.p)))

    def sorted_inputs(self) -> tuple[int, ...]:
        return tuple(sorted(self.inputs))

    def sorted_outputs(self) -> tuple[int, ...]:
        return tuple(sorted(self.outputs))

    def union(self, other: "Selection") -> "Selection":
        return Selection(self.inputs | other.inputs, self.outputs | other.outputs)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_pattern(name: str, pat: SparsityPattern, out: list[str]) -> None:
    if pat.rows < 0 or pat.cols < 0:
        out.append(f"{name}: negative dimensions {pat.rows}x{pat.cols}")
        return
    for i, j in sorted(pat.stars):
        if not 0 <= i < pat.rows:
            out.append(f"{name}: star ({i + 1}, {j + 1}) row out of range")
        elif not 0 <= j < pat.cols:
            out.append(f"{name}: star ({i + 1}, {j + 1}) col out of range")


def validate(system: StructuredSystem) -> ValidationReport:
    """Check dimension consistency, star ranges, cost signs, and mode.

    Report-style: never raises, returns the full list of violations.
    """
    out: list[str] = []
    n = system.A.rows
    if system.A.cols != n:
        out.append(f"A: must be square, got {system.A.rows}x{system.A.cols}")
    if n < 1:
        out.append("A: at least one state required")
    if system.B.rows != n:
        out.append(f"B: expected {n} rows, got {system.B.rows}")
    if system.C.cols != n:
        out.append(f"C: expected {n} cols, got {system.C.cols}")
    _check_pattern("A", system.A, out)
    _check_pattern("B", system.B, out)
    _check_pattern("C", system.C, out)
    if not isinstance(system.K, CompleteK):
        if system.K.rows != system.m or system.K.cols != system.p:
            out.append(
                f"K: expected {system.m}x{system.p}, got {system.K.rows}x{system.K.cols}"
            )
        _check_pattern("K", system.K, out)
    if len(system.cost_u) != system.m:
        out.append(f"cost_u: expected {system.m} entries, got {len(system.cost_u)}")
    if len(system.cost_y) != system.p:
        out.append(f"cost_y: expected {system.p} entries, got {len(system.cost_y)}")
    for i, c in enumerate(system.cost_u):
        if c < 0:
            out.append(f"negative cost at input {i + 1}")
    for j, c in enumerate(system.cost_y):
        if c < 0:
            out.append(f"negative cost at output {j + 1}")
    if system.mode not in MODES:
        out.append(f"mode: expected one of {MODES}, got {system.mode!r}")
    return ValidationReport(tuple(out))


def _check_selection(system: StructuredSystem, sel: Selection) -> None:
    for i in sel.inputs:
        if not 0 <= i < system.m:
            raise IndexError(f"input index {i + 1} out of range 1..{system.m}")
    for j in sel.outputs:
        if not 0 <= j < system.p:
            raise IndexError(f"output index {j + 1} out of range 1..{system.p}")


def restriction_maps(sel: Selection) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Retained-index maps for :func:`restrict`.

    Column ``k`` of the restricted B is column ``maps[0][k]`` of the
    original; row ``k`` of the restricted C is row ``maps[1][k]``.
    """
    return sel.sorted_inputs(), sel.sorted_outputs()


def restrict(system: StructuredSystem, sel: Selection) -> StructuredSystem:
    """Restrict B to the selected input columns and C to the selected output rows.

    Retained indices keep their relative order; K restricts to the selected
    block (the COMPLETE token stays complete).  Empty selections are legal
    and produce zero-width patterns.
    """
    _check_selection(system, sel)
    in_keep, out_keep = restriction_maps(sel)
    in_pos = {orig: k for k, orig in enumerate(in_keep)}
    out_pos = {orig: k for k, orig in enumerate(out_keep)}
    n = system.n
    b_stars = frozenset(
        (i, in_pos[j]) for i, j in system.B.stars if j in in_pos
    )
    c_stars = frozenset(
        (out_pos[i], j) for i, j in system.C.stars if i in out_pos
    )
    if isinstance(system.K, CompleteK):
        k_new: KPattern = COMPLETE
    else:
        k_new = SparsityPattern(
            len(in_keep),
            len(out_keep),
            frozenset(
                (in_pos[i], out_pos[j])
                for i, j in system.K.stars
                if i in in_pos and j in out_pos
            ),
        )
    return StructuredSystem(
        A=system.A,
        B=SparsityPattern(n, len(in_keep), b_stars),
        C=SparsityPattern(len(out_keep), n, c_stars),
        K=k_new,
        cost_u=tuple(system.cost_u[i] for i in in_keep),
        cost_y=tuple(system.cost_y[j] for j in out_keep),
        mode=system.mode,
    )


def selection_cost(system: StructuredSystem, sel: Selection) -> int:
    """p(I, J) = sum of selected input costs plus selected output costs (scaled)."""
    _check_selection(system, sel)
    return sum(system.cost_u[i] for i in sel.inputs) + sum(
        system.cost_y[j] for j in sel.outputs
    )


def transpose_dual(system: StructuredSystem) -> StructuredSystem:
    """The sensability-to-accessibility transform.

    Returns the system (A^T, C^T, p_y): outputs become inputs on the
    transposed state pattern and the output side is empty.  Solving
    accessibility on the result solves sensability on the original with the
    same index mapping.
    """
    return StructuredSystem(
        A=system.A.transpose(),
        B=system.C.transpose(),
        C=SparsityPattern(0, system.n),
        K=COMPLETE,
        cost_u=system.cost_y,
        cost_y=(),
        mode=system.mode,
    )


def with_mode(system: StructuredSystem, mode: str) -> StructuredSystem:
    return replace(system, mode=mode)


# --- JSON instance format ---------------------------------------------------
#
# {"n": 4, "m": 3, "p": 2,
#  "A": [[1, 1], [1, 2], ...], "B": [...], "C": [[1, 3], [2, 1]],
#  "K": "complete",            # or a 1-based [input, output] pair list
#  "cost_u": ["1", "1", "1"], "cost_y": ["1", "1"],
#  "mode": "continuous"}


def _require(data: dict, field: str, kind) -> object:
    if field not in data:
        raise FormatError(f"missing field {field!r}")
    value = data[field]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FormatError(f"field {field!r}: expected an integer")
    if kind is list and not isinstance(value, list):
        raise FormatError(f"field {field!r}: expected a list")
    return value


def _pairs(data: dict, field: str, rows: int, cols: int) -> SparsityPattern:
    raw = _require(data, field, list)
    pairs = []
    for entry in raw:
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) for v in entry)
        ):
            raise FormatError(f"field {field!r}: entries must be [row, col] integer pairs")
        pairs.append(entry)
    return SparsityPattern.from_pairs(rows, cols, pairs)


def _costs(data: dict, field: str) -> tuple[int, ...]:
    raw = _require(data, field, list)
    out = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, str):
            raise FormatError(f"field {field!r}[{k}]: costs must be decimal strings")
        try:
            out.append(parse_cost(entry))
        except CostError as exc:
            raise FormatError(f"field {field!r}[{k}]: {exc}") from exc
    return tuple(out)


def system_from_json(data: dict) -> StructuredSystem:
    """Decode the JSON instance format.  Raises :class:`FormatError` naming the field."""
    if not isinstance(data, dict):
        raise FormatError("instance document must be a JSON object")
    n = _require(data, "n", int)
    m = _require(data, "m", int)
    p = _require(data, "p", int)
    a = _pairs(data, "A", n, n)
    b = _pairs(data, "B", n, m)
    c = _pairs(data, "C", p, n)
    k_raw = data.get("K", "complete")
    if k_raw == "complete":
        k: KPattern = COMPLETE
    elif isinstance(k_raw, list):
        k = _pairs(data, "K", m, p)
    else:
        raise FormatError('field "K": expected "complete" or a pair list')
    mode = data.get("mode", "continuous")
    if mode not in MODES:
        raise FormatError(f'field "mode": expected one of {MODES}, got {mode!r}')
    return StructuredSystem(
        A=a,
        B=b,
        C=c,
        K=k,
        cost_u=_costs(data, "cost_u"),
        cost_y=_costs(data, "cost_y"),
        mode=mode,
    )


def system_to_json(system: StructuredSystem) -> dict:
    """Encode to the JSON instance format (costs echoed as decimal strings)."""
    k = "complete" if isinstance(system.K, CompleteK) else system.K.to_pairs()
    return {
        "n": system.n,
        "m": system.m,
        "p": system.p,
        "A": system.A.to_pairs(),
        "B": system.B.to_pairs(),
        "C": system.C.to_pairs(),
        "K": k,
        "cost_u": [format_cost(c) for c in system.cost_u],
        "cost_y": [format_cost(c) for c in system.cost_y],
        "mode": system.mode,
    }
