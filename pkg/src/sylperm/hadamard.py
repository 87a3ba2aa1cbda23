"""Sylvester Hadamard matrices and the small exact matrix algebra around them.

Group elements of Z_2^p are stored as integers.  The element g_i indexing
row/column ``i`` (1-based) is the binary representation of ``i - 1``, with the
last coordinate being the least significant bit, so ``g_1 = 0...0`` and
``g_2 = 0...01``.  Matrices are immutable tuples of Python ints, so every
product and sum is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionError, SizeLimitError

# Dense construction guard: refuse orders above 2**DEFAULT_MAX_P.
DEFAULT_MAX_P = 16
DEFAULT_MAX_ORDER = 1 << DEFAULT_MAX_P


@dataclass(frozen=True)
class GroupElement:
    """An element of Z_2^p, i.e. a ``p``-bit vector."""

    value: int
    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"group dimension must be positive, got {self.p}")
        if not 0 <= self.value < (1 << self.p):
            raise ValueError(f"value {self.value} does not fit in {self.p} bits")

    @classmethod
    def from_index(cls, i: int, p: int) -> GroupElement:
        """Return g_i, the element indexing row/column ``i`` (1-based)."""
        if not 1 <= i <= (1 << p):
            raise ValueError(f"index {i} outside 1..{1 << p}")
        return cls(i - 1, p)

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> GroupElement:
        value = 0
        for b in bits:
            b = int(b)
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b}")
            value = (value << 1) | b
        return cls(value, len(bits))

    @property
    def index(self) -> int:
        return self.value + 1

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.p - 1 - k)) & 1 for k in range(self.p))

    def __mul__(self, other: GroupElement) -> GroupElement:
        # the group law of Z_2^p, written multiplicatively
        _check_width(self, other)
        return GroupElement(self.value ^ other.value, self.p)

    def inner(self, other: GroupElement) -> int:
        """Mod-2 inner product."""
        _check_width(self, other)
        return (self.value & other.value).bit_count() & 1

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _check_width(a: GroupElement, b: GroupElement) -> None:
    if a.p != b.p:
        raise DimensionError(f"bit widths differ: {a.p} vs {b.p}")


def cocycle_entry(g_i: GroupElement, g_j: GroupElement) -> int:
    """Return (-1)**<g_i, g_j>, the inner-product cocycle on Z_2^p."""
    return -1 if g_i.inner(g_j) else 1


@dataclass(frozen=True)
class SignMatrix:
    """Square integer matrix.

    ``plus_minus`` records that every entry is asserted to be -1 or +1; it is
    False for Kronecker intermediates such as ``H x I`` that contain zeros.
    """

    entries: tuple[tuple[int, ...], ...]
    plus_minus: bool = False

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n == 0:
            raise DimensionError("matrix must have positive order")
        for row in self.entries:
            if len(row) != n:
                raise DimensionError(f"matrix is not square: row of length {len(row)} in order {n}")
        if self.plus_minus and any(a not in (-1, 1) for row in self.entries for a in row):
            raise ValueError("plus_minus matrix has an entry outside {-1, +1}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], plus_minus: bool | None = None) -> SignMatrix:
        entries = tuple(tuple(int(a) for a in row) for row in rows)
        if plus_minus is None:
            plus_minus = all(a in (-1, 1) for row in entries for a in row)
        return cls(entries, plus_minus)

    @property
    def order(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> SignMatrix:
        return SignMatrix(tuple(zip(*self.entries)), self.plus_minus)

    def negate_row(self, i: int) -> SignMatrix:
        rows = list(self.entries)
        rows[i] = tuple(-a for a in rows[i])
        return SignMatrix(tuple(rows), self.plus_minus)

    def scale(self, c: int) -> SignMatrix:
        return SignMatrix.from_rows([[c * a for a in row] for row in self.entries])

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


def _check_order(n: int, max_order: int) -> None:
    if n > max_order:
        raise SizeLimitError(f"order {n} exceeds the configured limit {max_order}")


@lru_cache(maxsize=16)
def _sylvester_entries(p: int) -> tuple[tuple[int, ...], ...]:
    n = 1 << p
    return tuple(
        tuple(-1 if (i & j).bit_count() & 1 else 1 for j in range(n)) for i in range(n)
    )


def sylvester(p: int, max_order: int = DEFAULT_MAX_ORDER) -> SignMatrix:
    """Return H_{2^p}, the cocyclic matrix of the inner-product cocycle over Z_2^p.

    Entry (i, j) is (-1)**<g_i, g_j>; this coincides with the p-fold
    Kronecker power of [[1, 1], [1, -1]].
    """
    if p < 1:
        raise SizeLimitError(f"p must be at least 1, got {p}")
    _check_order(1 << p, max_order)
    return SignMatrix(_sylvester_entries(p), plus_minus=True)


def identity(n: int) -> SignMatrix:
    if n < 1:
        raise DimensionError(f"order must be positive, got {n}")
    return SignMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def kronecker(a: SignMatrix, b: SignMatrix, max_order: int = DEFAULT_MAX_ORDER) -> SignMatrix:
    n, m = a.order, b.order
    _check_order(n * m, max_order)
    rows = []
    for ra in a.entries:
        for rb in b.entries:
            rows.append(tuple(x * y for x in ra for y in rb))
    return SignMatrix(tuple(rows), a.plus_minus and b.plus_minus)


def matmul(a: SignMatrix, b: SignMatrix) -> SignMatrix:
    if a.order != b.order:
        raise DimensionError(f"cannot multiply orders {a.order} and {b.order}")
    cols = tuple(zip(*b.entries))
    return SignMatrix.from_rows(
        [sum(x * y for x, y in zip(row, col)) for col in cols] for row in a.entries
    )


def is_hadamard(m: SignMatrix) -> bool:
    """True iff every entry is +-1 and M M^T = n I."""
    n = m.order
    if any(a not in (-1, 1) for row in m.entries for a in row):
        return False
    rows = m.entries
    for i in range(n):
        for j in range(i + 1, n):
            if sum(x * y for x, y in zip(rows[i], rows[j])) != 0:
                return False
    return True


def is_normalized(m: SignMatrix) -> bool:
    """True iff the first row and first column are all +1."""
    return all(a == 1 for a in m.entries[0]) and all(row[0] == 1 for row in m.entries)


def format_matrix(m: SignMatrix) -> str:
    """Serialize to the text format: the order on one line, then the rows."""
    lines = [str(m.order)]
    lines.extend(" ".join(str(a) for a in row) for row in m.entries)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SignMatrix:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 1:
        raise ValueError("matrix text must start with a line holding the order n")
    n = int(lines[0][0])
    body = lines[1:]
    if len(body) != n or any(len(row) != n for row in body):
        raise DimensionError(f"expected {n} rows of {n} entries")
    rows = [[int(tok) for tok in row] for row in body]
    if any(a not in (-1, 0, 1) for row in rows for a in row):
        raise ValueError("matrix entries must be -1, 0 or 1")
    return SignMatrix.from_rows(rows)
