"""Exact permanent engines with operation counting.

Counting convention, shared by every engine in the package: one
multiplication per binary product, one addition per binary sum or
difference.  Sign applications, negations and binomial bookkeeping are free.
Accumulating T terms into a running total costs T - 1 additions no matter
how the terms are partitioned across workers.

Python integers are unbounded, so values never overflow or wrap.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial, prod
from operator import getitem
from typing import Callable

from .errors import SizeLimitError
from .hadamard import SignMatrix, sylvester

NAIVE_MAX_ORDER = 12
RYSER_MAX_ORDER = 24
GRAY_MAX_ORDER = 32


@dataclass(frozen=True)
class OpCount:
    additions: int = 0
    multiplications: int = 0

    @property
    def total(self) -> int:
        return self.additions + self.multiplications

    def __add__(self, other: OpCount) -> OpCount:
        return OpCount(self.additions + other.additions, self.multiplications + other.multiplications)

    def as_dict(self) -> dict[str, int]:
        return {"additions": self.additions, "multiplications": self.multiplications, "total": self.total}


@dataclass(frozen=True)
class PermanentResult:
    value: int
    ops: OpCount
    engine: str
    # named sub-counts, e.g. the preprocess/evaluation split of the cocyclic engine
    phases: dict[str, OpCount] = field(default_factory=dict, compare=False)


def _guard(a: SignMatrix, limit: int, engine: str, hint: str = "") -> int:
    n = a.order
    if n > limit:
        raise SizeLimitError(f"{engine} engine accepts order <= {limit}, got {n}{hint}")
    return n


def per_naive(a: SignMatrix) -> PermanentResult:
    """Sum over all n! permutations of the products a[i, sigma(i)]."""
    n = _guard(a, NAIVE_MAX_ORDER, "naive", "; use per_ryser or per_ryser_gray instead")
    rows = a.entries
    total = 0
    for sigma in permutations(range(n)):
        total += prod(map(getitem, rows, sigma))
    nf = factorial(n)
    return PermanentResult(total, OpCount(nf - 1, nf * (n - 1)), "naive")


def _ryser_shard(rows: tuple[tuple[int, ...], ...], r: int, first: int) -> tuple[int, int]:
    """Sum of prod(column sums) over the r-subsets whose smallest row is ``first``."""
    n = len(rows)
    head = rows[first]
    total = 0
    count = 0
    for rest in combinations(range(first + 1, n), r - 1):
        sums = map(sum, zip(head, *(rows[i] for i in rest)))
        total += prod(sums)
        count += 1
    return total, count


def per_ryser(a: SignMatrix, workers: int = 1) -> PermanentResult:
    """Ryser inclusion-exclusion over row subsets, enumerated by size then lexicographically.

    per(A) = (-1)^n sum_{S nonempty} (-1)^{|S|} prod_j sum_{i in S} a_ij
    """
    n = _guard(a, RYSER_MAX_ORDER, "ryser", "; use per_ryser_gray for larger orders")
    rows = a.entries
    shards = [(r, first) for r in range(1, n + 1) for first in range(n - r + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_ryser_shard, [rows] * len(shards), *zip(*shards)))
    else:
        partials = [_ryser_shard(rows, r, first) for r, first in shards]

    by_size = [0] * (n + 1)
    for (r, _), (partial, _) in zip(shards, partials):
        by_size[r] += partial
    total = sum(s if r % 2 == 0 else -s for r, s in enumerate(by_size))
    if n % 2:
        total = -total

    terms = (1 << n) - 1
    column_adds = sum(n * (r - 1) * comb(n, r) for r in range(1, n + 1))
    ops = OpCount(column_adds + terms - 1, (n - 1) * terms)
    return PermanentResult(total, ops, "ryser")


def per_ryser_gray(a: SignMatrix) -> PermanentResult:
    """Ryser's formula walking subsets in reflected Gray order.

    Consecutive subsets differ in one row, so the column sums are updated by
    adding or subtracting that row instead of being recomputed.
    """
    n = _guard(a, GRAY_MAX_ORDER, "gray")
    rows = a.entries
    sums = [0] * n
    member = [False] * n
    size = 0
    total = 0
    for k in range(1, 1 << n):
        i = (k & -k).bit_length() - 1
        row = rows[i]
        if member[i]:
            sums = [s - x for s, x in zip(sums, row)]
            size -= 1
        else:
            sums = [s + x for s, x in zip(sums, row)]
            size += 1
        member[i] = not member[i]
        term = prod(sums)
        total += -term if size & 1 else term
    if n % 2:
        total = -total

    terms = (1 << n) - 1
    ops = OpCount(n * terms + terms - 1, (n - 1) * terms)
    return PermanentResult(total, ops, "gray")


ENGINES: dict[str, Callable[[SignMatrix], PermanentResult]] = {
    "naive": per_naive,
    "ryser": per_ryser,
    "gray": per_ryser_gray,
}


@lru_cache(maxsize=None)
def sylvester_permanent(p: int) -> int:
    """per(H_{2^p}) via the Gray-code engine, memoized."""
    return per_ryser_gray(sylvester(p)).value


def per_kronecker_product_rhs(n: int, m: int) -> int:
    """per(H_{2^n})^{2^m} * per(H_{2^m})^{2^n}.

    This is per(H x I) * per(I x H) after per(I_k x A) = per(A)^k and
    per(A x B) = per(B x A).
    """
    return sylvester_permanent(n) ** (1 << m) * sylvester_permanent(m) ** (1 << n)
