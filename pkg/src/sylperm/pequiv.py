"""SIOR matrices, P-equivalence and the class distribution of row subsets.

An r x p SIOR matrix is stored as the strictly increasing tuple of its rows,
each row being a p-bit integer (column 1 is the most significant bit).  Row
permutations are quotiented out by keeping rows sorted, so the remaining
P-operations are column permutations and column complementations; together
they form the group of maps x -> sigma(x) XOR c, of order 2^p * p!.

The canonical form of a matrix is the lexicographically smallest row tuple
in its orbit.  Batch canonicalization works on bitmasks in which element x
sets bit n-1-x: for equal-size sets the lexicographically smallest sorted
tuple is then the largest mask, so the canonical form is a maximum over the
group.
"""

from __future__ import annotations

import csv
import io
import json
import os
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations, islice, permutations, repeat
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetError, DimensionError, SizeLimitError

CANONICAL_MAX_P = 6
CANONICAL_DESK_P = 4
DEFAULT_BUDGET = 20_000_000

RowSubset = tuple[int, ...]


def default_budget() -> int:
    """Subset budget for exhaustive sweeps; ``SYLPERM_BUDGET`` overrides it."""
    env = os.environ.get("SYLPERM_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class SiorMatrix:
    rows: tuple[int, ...]
    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        n = 1 << self.p
        if not self.rows:
            raise ValueError("SIOR matrix needs at least one row")
        if any(not 0 <= x < n for x in self.rows):
            raise ValueError(f"row value outside 0..{n - 1}")
        if any(a >= b for a, b in zip(self.rows, self.rows[1:])):
            raise ValueError(f"rows are not strictly increasing: {self.rows}")

    @classmethod
    def from_bits(cls, rows: Iterable[str]) -> SiorMatrix:
        rows = list(rows)
        p = len(rows[0])
        if any(len(r) != p for r in rows):
            raise DimensionError("rows have different lengths")
        return cls(tuple(int(r, 2) for r in rows), p)

    @classmethod
    def from_unsorted(cls, rows: Iterable[int], p: int) -> SiorMatrix:
        return cls(tuple(sorted(rows)), p)

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.r, self.p

    def row_strings(self) -> tuple[str, ...]:
        return tuple(format(x, f"0{self.p}b") for x in self.rows)

    def __str__(self) -> str:
        return "(" + ",".join(self.row_strings()) + ")"


@dataclass(frozen=True)
class EquivClass:
    canonical: SiorMatrix
    size: int
    phi: int | None = None


@dataclass(frozen=True)
class ClassDistribution:
    r: int
    p: int
    classes: tuple[EquivClass, ...]

    @property
    def total(self) -> int:
        return sum(c.size for c in self.classes)

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def __len__(self) -> int:
        return len(self.classes)

    def records(self) -> list[dict]:
        return [
            {
                "r": self.r,
                "p": self.p,
                "canonical": ",".join(c.canonical.row_strings()),
                "size": c.size,
                # decimal string: Phi can exceed 64 bits for larger p
                "phi": None if c.phi is None else str(c.phi),
            }
            for c in self.classes
        ]

    def to_json(self) -> str:
        return json.dumps(self.records(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["r", "p", "canonical", "size", "phi"], lineterminator="\n")
        writer.writeheader()
        for rec in self.records():
            writer.writerow({**rec, "phi": "" if rec["phi"] is None else rec["phi"]})
        return buf.getvalue()


def check_subset(alpha: Sequence[int], n: int) -> RowSubset:
    alpha = tuple(int(i) for i in alpha)
    if not alpha:
        raise ValueError("row subset must be nonempty")
    if any(not 1 <= i <= n for i in alpha):
        raise ValueError(f"row index outside 1..{n}: {alpha}")
    if any(a >= b for a, b in zip(alpha, alpha[1:])):
        raise ValueError(f"row subset must be strictly increasing: {alpha}")
    return alpha


def sior_from_subset(alpha: Sequence[int], p: int) -> SiorMatrix:
    """M_alpha: row l is g_{i_l}, the binary form of i_l - 1."""
    alpha = check_subset(alpha, 1 << p)
    return SiorMatrix(tuple(i - 1 for i in alpha), p)


def subset_from_sior(m: SiorMatrix) -> RowSubset:
    return tuple(x + 1 for x in m.rows)


def complement_column(m: SiorMatrix, k: int) -> SiorMatrix:
    """Flip every entry of column ``k`` (1-based), then re-sort the rows."""
    if not 1 <= k <= m.p:
        raise ValueError(f"column {k} outside 1..{m.p}")
    bit = 1 << (m.p - k)
    return SiorMatrix.from_unsorted((x ^ bit for x in m.rows), m.p)


def _permute_bits(x: int, sigma: Sequence[int], p: int) -> int:
    # new column k is old column sigma[k-1]
    out = 0
    for k, s in enumerate(sigma, start=1):
        out |= ((x >> (p - s)) & 1) << (p - k)
    return out


def _check_perm(sigma: Sequence[int], size: int) -> tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, size + 1)):
        raise ValueError(f"not a permutation of 1..{size}: {sigma}")
    return sigma


def permute_columns(m: SiorMatrix, sigma: Sequence[int]) -> SiorMatrix:
    """Reorder columns so that new column k is old column ``sigma[k-1]`` (1-based)."""
    sigma = _check_perm(sigma, m.p)
    return SiorMatrix.from_unsorted((_permute_bits(x, sigma, m.p) for x in m.rows), m.p)


def permute_rows(m: SiorMatrix, perm: Sequence[int]) -> SiorMatrix:
    """Reorder rows by ``perm`` (1-based) and re-sort, which always lands back on ``m``."""
    perm = _check_perm(perm, m.r)
    return SiorMatrix.from_unsorted((m.rows[i - 1] for i in perm), m.p)


def apply_operations(m: SiorMatrix, ops: Iterable[tuple[str, object]]) -> SiorMatrix:
    """Apply a sequence of ``("complement", k)``, ``("permute_columns", sigma)``
    or ``("permute_rows", perm)`` operations."""
    for kind, arg in ops:
        if kind == "complement":
            m = complement_column(m, arg)
        elif kind == "permute_columns":
            m = permute_columns(m, arg)
        elif kind == "permute_rows":
            m = permute_rows(m, arg)
        else:
            raise ValueError(f"unknown P-operation {kind!r}")
    return m


def _check_p(p: int) -> None:
    if p > CANONICAL_MAX_P:
        raise SizeLimitError(f"canonicalization needs 2^p*p! transforms; p <= {CANONICAL_MAX_P} required, got {p}")
    if p > CANONICAL_DESK_P:
        warnings.warn(f"canonicalization at p={p} runs over {(1 << p) * factorial(p)} transforms", stacklevel=3)


@lru_cache(maxsize=8)
def transform_tables(p: int) -> tuple[tuple[int, ...], ...]:
    """Every map x -> sigma(x) XOR c on Z_2^p as a lookup tuple, 2^p * p! of them."""
    n = 1 << p
    tables = []
    for sigma in permutations(range(1, p + 1)):
        base = [_permute_bits(x, sigma, p) for x in range(n)]
        for c in range(n):
            tables.append(tuple(y ^ c for y in base))
    return tuple(tables)


def canonical_form(m: SiorMatrix) -> SiorMatrix:
    """Lexicographically least SIOR matrix P-equivalent to ``m``."""
    _check_p(m.p)
    best = min(tuple(sorted(t[x] for x in m.rows)) for t in transform_tables(m.p))
    return SiorMatrix(best, m.p)


def are_p_equivalent(m1: SiorMatrix, m2: SiorMatrix) -> bool:
    if m1.shape != m2.shape:
        raise DimensionError(f"shapes differ: {m1.shape} vs {m2.shape}")
    return canonical_form(m1) == canonical_form(m2)


def orbit(m: SiorMatrix) -> set[SiorMatrix]:
    """All SIOR matrices reachable from ``m`` by P-operations."""
    _check_p(m.p)
    return {SiorMatrix.from_unsorted((t[x] for x in m.rows), m.p) for t in transform_tables(m.p)}


# -- batch canonicalization ---------------------------------------------------


def _mask_dtype(n: int):
    return np.uint64 if n > 32 else np.uint32


def _byte_tables(table: Sequence[int], n: int) -> np.ndarray:
    """Per-byte lookup tables mapping a subset mask to the mask of its image."""
    dtype = _mask_dtype(n)
    nbytes = (n + 7) // 8
    image_bit = np.zeros(nbytes * 8, dtype=dtype)
    for x in range(n):
        image_bit[n - 1 - x] = 1 << (n - 1 - table[x])
    values = np.arange(256)
    out = np.zeros((nbytes, 256), dtype=dtype)
    for b in range(nbytes):
        for j in range(8):
            out[b] |= np.where((values >> j) & 1, image_bit[8 * b + j], 0).astype(dtype)
    return out


@lru_cache(maxsize=4)
def _all_byte_tables(p: int) -> np.ndarray:
    n = 1 << p
    return np.stack([_byte_tables(t, n) for t in transform_tables(p)])


def canonical_masks(masks: np.ndarray, p: int) -> np.ndarray:
    """Canonical mask (orbit maximum) of every subset mask in ``masks``."""
    n = 1 << p
    dtype = _mask_dtype(n)
    masks = masks.astype(dtype)
    nbytes = (n + 7) // 8
    pieces = [((masks >> dtype(8 * b)) & dtype(0xFF)).astype(np.intp) for b in range(nbytes)]
    best = np.zeros_like(masks)
    tables = _all_byte_tables(p) if p <= CANONICAL_DESK_P else None
    for g, t in enumerate(transform_tables(p)):
        bt = tables[g] if tables is not None else _byte_tables(t, n)
        image = bt[0][pieces[0]]
        for b in range(1, nbytes):
            image |= bt[b][pieces[b]]
        np.maximum(best, image, out=best)
    return best


def subset_to_mask(rows: Iterable[int], n: int) -> int:
    mask = 0
    for x in rows:
        mask |= 1 << (n - 1 - x)
    return mask


def mask_to_rows(mask: int, n: int) -> tuple[int, ...]:
    return tuple(x for x in range(n) if (mask >> (n - 1 - x)) & 1)


def _subset_masks(r: int, n: int, chunk: int) -> Iterator[np.ndarray]:
    """Masks of every r-subset of {0..n-1}, in chunks."""
    if n <= 20:
        everything = np.arange(1 << n, dtype=np.uint32)
        masks = everything[np.bitwise_count(everything) == r]
        for start in range(0, len(masks), chunk):
            yield masks[start:start + chunk]
        return
    dtype = _mask_dtype(n)
    bits = [1 << (n - 1 - x) for x in range(n)]
    it = (sum(bits[x] for x in c) for c in combinations(range(n), r))
    while True:
        block = np.fromiter(islice(it, chunk), dtype=dtype)
        if not len(block):
            return
        yield block


def _count_canonical(masks: np.ndarray, p: int) -> Counter:
    keys, counts = np.unique(canonical_masks(masks, p), return_counts=True)
    return Counter(dict(zip(keys.tolist(), counts.tolist())))


def enumerate_classes(
    r: int,
    p: int,
    workers: int = 1,
    budget: int | None = None,
    chunk: int = 1 << 16,
) -> ClassDistribution:
    """Partition all C(2^p, r) SIOR matrices into P-equivalence classes.

    Classes are keyed by canonical form and listed in increasing canonical order.
    """
    n = 1 << p
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in 1..{n}, got {r}")
    _check_p(p)
    budget = default_budget() if budget is None else budget
    total = comb(n, r)
    if total > budget:
        raise BudgetError(f"C({n}, {r}) = {total} SIOR matrices exceeds budget {budget}")

    counts: Counter = Counter()
    blocks = _subset_masks(r, n, chunk)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_count_canonical, blocks, repeat(p)):
                counts.update(part)
    else:
        for block in blocks:
            counts.update(_count_canonical(block, p))

    classes = tuple(
        EquivClass(SiorMatrix(mask_to_rows(mask, n), p), size)
        for mask, size in sorted(counts.items(), reverse=True)
    )
    return ClassDistribution(r, p, classes)


def _related_by_search(x: SiorMatrix, y: SiorMatrix) -> bool:
    target = set(y.rows)
    return any({t[v] for v in x.rows} == target for t in transform_tables(x.p))


def enumerate_classes_pairwise(r: int, p: int) -> ClassDistribution:
    """Literal class search: compare each SIOR matrix against every class found so far.

    Quadratic in the number of classes; kept for differential testing of
    :func:`enumerate_classes`.  Representatives are the first matrix met in
    each class, classes in order of discovery.
    """
    _check_p(p)
    reps: list[SiorMatrix] = []
    sizes: list[int] = []
    for rows in combinations(range(1 << p), r):
        x = SiorMatrix(rows, p)
        for idx, y in enumerate(reps):
            if _related_by_search(x, y):
                sizes[idx] += 1
                break
        else:
            reps.append(x)
            sizes.append(1)
    return ClassDistribution(r, p, tuple(EquivClass(m, s) for m, s in zip(reps, sizes)))


def with_phi(dist: ClassDistribution, values: Sequence[int]) -> ClassDistribution:
    return replace(dist, classes=tuple(replace(c, phi=v) for c, v in zip(dist.classes, values, strict=True)))


def orbit_counting_report(p: int, budget: int | None = None) -> dict:
    """Check the orbit counting identities for every rank r at dimension p.

    For each r: class sizes sum to C(2^p, r), each size is at most (and
    divides) the group order 2^p * p!, and there are at least
    C(2^p, r) / (2^p * p!) classes.
    """
    n = 1 << p
    group_order = n * factorial(p)
    rows = []
    for r in range(1, n + 1):
        dist = enumerate_classes(r, p, budget=budget)
        total = comb(n, r)
        rows.append({
            "r": r,
            "classes": len(dist),
            "sum_sizes": dist.total,
            "binomial": total,
            "max_size": max(dist.sizes),
            "sum_ok": dist.total == total,
            "bound_ok": all(s <= group_order for s in dist.sizes),
            "divides_ok": all(group_order % s == 0 for s in dist.sizes),
            "count_ok": len(dist) * group_order >= total,
        })
    passed = all(row["sum_ok"] and row["bound_ok"] and row["divides_ok"] and row["count_ok"] for row in rows)
    return {"schema": "sylperm/1", "claim": "orbit-counting", "p": p, "group_order": group_order,
            "ranks": rows, "passed": passed}
