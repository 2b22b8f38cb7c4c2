"""Instance files for the bundled problems.

All formats are whitespace-separated integers; newlines are cosmetic:

- bkp:   ``n C``, then values, weights, per-item quantities (n each)
- tsptw: ``n``, an n x n distance matrix, then n ``earliest latest`` rows
  (row 0 is the depot; its latest time is the horizon)
- psp:   ``n H``, an n x n changeover matrix, n stocking costs, then an
  H x n 0/1 demand matrix (one row per period)
- srflp: ``n``, n department lengths, an n x n traffic matrix
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union


class InstanceFormatError(ValueError):
    """Malformed instance text; knows the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InstanceValidationError(ValueError):
    """Parseable text that does not describe a valid instance."""


@dataclass(frozen=True)
class BkpInstance:
    capacity: int
    values: tuple[int, ...]
    weights: tuple[int, ...]
    quantities: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class TsptwInstance:
    distances: tuple[tuple[int, ...], ...]
    windows: tuple[tuple[int, int], ...]  # row 0 is the depot

    @property
    def n(self) -> int:
        return len(self.distances)

    @property
    def horizon(self) -> int:
        return self.windows[0][1]


@dataclass(frozen=True)
class PspInstance:
    changeover: tuple[tuple[int, ...], ...]
    stocking: tuple[int, ...]
    demand: tuple[tuple[int, ...], ...]  # demand[period][item]

    @property
    def n_items(self) -> int:
        return len(self.stocking)

    @property
    def n_periods(self) -> int:
        return len(self.demand)


@dataclass(frozen=True)
class SrflpInstance:
    lengths: tuple[int, ...]
    traffic: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.lengths)


Instance = Union[BkpInstance, TsptwInstance, PspInstance, SrflpInstance]


class _Tokens:
    def __init__(self, text: str):
        self._items: list[tuple[int, str]] = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            for token in line.split():
                self._items.append((line_no, token))
        self._pos = 0

    def next_int(self, what: str) -> int:
        if self._pos >= len(self._items):
            last = self._items[-1][0] if self._items else 1
            raise InstanceFormatError(f"missing {what}", line=last)
        line_no, token = self._items[self._pos]
        self._pos += 1
        try:
            return int(token)
        except ValueError:
            raise InstanceFormatError(
                f"expected an integer for {what}, got {token!r}", line=line_no
            ) from None

    def expect_end(self) -> None:
        if self._pos < len(self._items):
            line_no, token = self._items[self._pos]
            raise InstanceFormatError(
                f"unexpected trailing data starting at {token!r}", line=line_no
            )

    def vector(self, n: int, what: str) -> tuple[int, ...]:
        return tuple(self.next_int(f"{what}[{i}]") for i in range(n))

    def matrix(self, rows: int, cols: int, what: str) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(self.next_int(f"{what}[{r}][{c}]") for c in range(cols))
            for r in range(rows)
        )


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InstanceValidationError(message)


def _check_symmetric(matrix, what: str) -> None:
    n = len(matrix)
    for i in range(n):
        for j in range(i + 1, n):
            _require(
                matrix[i][j] == matrix[j][i],
                f"{what} must be symmetric (differs at [{i}][{j}])",
            )


def _check_nonneg(values, what: str) -> None:
    for v in values:
        _require(v >= 0, f"{what} must be non-negative")


def parse_bkp(text: str) -> BkpInstance:
    toks = _Tokens(text)
    n = toks.next_int("item count")
    _require(n >= 1, "item count must be >= 1")
    capacity = toks.next_int("capacity")
    values = toks.vector(n, "value")
    weights = toks.vector(n, "weight")
    quantities = toks.vector(n, "quantity")
    toks.expect_end()
    _require(capacity >= 0, "capacity must be non-negative")
    _check_nonneg(values, "values")
    _check_nonneg(weights, "weights")
    _check_nonneg(quantities, "quantities")
    return BkpInstance(capacity, values, weights, quantities)


def parse_tsptw(text: str) -> TsptwInstance:
    toks = _Tokens(text)
    n = toks.next_int("node count")
    _require(n >= 1, "node count must be >= 1")
    distances = toks.matrix(n, n, "distance")
    windows = tuple(
        (toks.next_int(f"earliest[{i}]"), toks.next_int(f"latest[{i}]"))
        for i in range(n)
    )
    toks.expect_end()
    for row in distances:
        _check_nonneg(row, "distances")
    _check_symmetric(distances, "distance matrix")
    for i, (e, l) in enumerate(windows):
        _require(0 <= e <= l, f"window of node {i} must satisfy 0 <= earliest <= latest")
    return TsptwInstance(distances, windows)


def parse_psp(text: str) -> PspInstance:
    toks = _Tokens(text)
    n = toks.next_int("item count")
    _require(n >= 1, "item count must be >= 1")
    horizon = toks.next_int("period count")
    _require(horizon >= 1, "period count must be >= 1")
    changeover = toks.matrix(n, n, "changeover")
    stocking = toks.vector(n, "stocking")
    demand = toks.matrix(horizon, n, "demand")
    toks.expect_end()
    for row in changeover:
        _check_nonneg(row, "changeover costs")
    for i in range(n):
        _require(changeover[i][i] == 0, "changeover diagonal must be zero")
    _check_nonneg(stocking, "stocking costs")
    for row in demand:
        for v in row:
            _require(v in (0, 1), "demand entries must be 0 or 1")
    return PspInstance(changeover, stocking, demand)


def parse_srflp(text: str) -> SrflpInstance:
    toks = _Tokens(text)
    n = toks.next_int("department count")
    _require(n >= 1, "department count must be >= 1")
    lengths = toks.vector(n, "length")
    traffic = toks.matrix(n, n, "traffic")
    toks.expect_end()
    for length in lengths:
        _require(length >= 1, "department lengths must be >= 1")
    for row in traffic:
        _check_nonneg(row, "traffic")
    _check_symmetric(traffic, "traffic matrix")
    return SrflpInstance(lengths, traffic)


_PARSERS = {
    "bkp": parse_bkp,
    "tsptw": parse_tsptw,
    "psp": parse_psp,
    "srflp": parse_srflp,
}

PROBLEM_NAMES = tuple(sorted(_PARSERS))


def parse_instance(problem: str, text: str) -> Instance:
    try:
        parser = _PARSERS[problem]
    except KeyError:
        raise ValueError(f"unknown problem {problem!r}") from None
    return parser(text)


def load_instance(problem: str, path) -> Instance:
    return parse_instance(problem, Path(path).read_text())


def _rows(matrix) -> str:
    return "\n".join(" ".join(str(v) for v in row) for row in matrix)


def format_bkp(inst: BkpInstance) -> str:
    return "\n".join(
        [
            f"{inst.n} {inst.capacity}",
            " ".join(map(str, inst.values)),
            " ".join(map(str, inst.weights)),
            " ".join(map(str, inst.quantities)),
        ]
    ) + "\n"


def format_tsptw(inst: TsptwInstance) -> str:
    return "\n".join(
        [str(inst.n), _rows(inst.distances)]
        + [f"{e} {l}" for e, l in inst.windows]
    ) + "\n"


def format_psp(inst: PspInstance) -> str:
    return "\n".join(
        [
            f"{inst.n_items} {inst.n_periods}",
            _rows(inst.changeover),
            " ".join(map(str, inst.stocking)),
            _rows(inst.demand),
        ]
    ) + "\n"


def format_srflp(inst: SrflpInstance) -> str:
    return "\n".join(
        [str(inst.n), " ".join(map(str, inst.lengths)), _rows(inst.traffic)]
    ) + "\n"


FORMATTERS = {
    "bkp": format_bkp,
    "tsptw": format_tsptw,
    "psp": format_psp,
    "srflp": format_srflp,
}
