"""Class-collapsed Ryser evaluation for Sylvester Hadamard matrices.

For a row subset alpha of H = H_{2^p}, ``phi(alpha)`` is the product of the
column sums of H restricted to alpha over columns 2..n.  It is constant on
P-equivalence classes, so Ryser's sum over all subsets of size r collapses
to a sum over classes weighted by orbit size:

    per(H) = sum_{r=1}^{n}   (-1)^r * r        * sum_classes size * phi
           = sum_{r=1}^{n/2} (-1)^r * (2r - n) * sum_classes size * phi

The second form pairs each subset with its complement, whose restricted
column sums (j >= 2) are the negatives of the original ones.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice
from math import comb, prod
from typing import Iterable, Iterator, Sequence

import numpy as np

from .engines import OpCount, PermanentResult
from .errors import BudgetError
from .hadamard import sylvester
from .pequiv import (
    ClassDistribution,
    EquivClass,
    SiorMatrix,
    apply_operations,
    canonical_masks,
    check_subset,
    default_budget,
    enumerate_classes,
    mask_to_rows,
    subset_from_sior,
    with_phi,
)

LEMMA_PROVEN_MAX_P = 4
SCHEMA = "sylperm/1"


def phi(alpha: Sequence[int], p: int) -> int:
    """Product over columns j = 2..n of sum_{i in alpha} h_ij, from H_{2^p} directly."""
    n = 1 << p
    alpha = check_subset(alpha, n)
    rows = sylvester(p).entries
    selected = [rows[i - 1] for i in alpha]
    sums = list(map(sum, zip(*selected)))
    return prod(sums[1:])


def fwht(values: Sequence[int]) -> list[int]:
    """Unnormalized Walsh-Hadamard transform in natural (Sylvester) order."""
    a = list(values)
    n = len(a)
    if n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for i in range(start, start + h):
                x, y = a[i], a[i + h]
                a[i], a[i + h] = x + y, x - y
        h *= 2
    return a


def phi_wht(alpha: Sequence[int], p: int) -> int:
    """Same value as :func:`phi`, through the transform of alpha's indicator vector."""
    n = 1 << p
    alpha = check_subset(alpha, n)
    indicator = [0] * n
    for i in alpha:
        indicator[i - 1] = 1
    return prod(fwht(indicator)[1:])


def _phi_cost(r: int, n: int) -> OpCount:
    # n-1 restricted column sums of r terms, multiplied together
    return OpCount((n - 1) * (r - 1), n - 2)


def class_distribution(r: int, p: int, workers: int = 1, budget: int | None = None) -> ClassDistribution:
    """Class distribution with phi evaluated once per class on its representative.

    A column complementation negates 2^(p-1) restricted column sums, so phi
    is a class invariant only for p >= 2.  At p = 1 every subset is kept as
    its own class.
    """
    if p == 1:
        dist = ClassDistribution(
            r, 1, tuple(EquivClass(SiorMatrix(rows, 1), 1) for rows in combinations(range(2), r))
        )
    else:
        dist = enumerate_classes(r, p, workers=workers, budget=budget)
    return with_phi(dist, [phi(subset_from_sior(c.canonical), p) for c in dist.classes])


def phi_spectrum(r: int, p: int, budget: int | None = None) -> dict[int, int]:
    """Multiset of phi over all r-row subsets of H_{2^p}, as {value: multiplicity}."""
    spectrum: dict[int, int] = {}
    for c in class_distribution(r, p, budget=budget).classes:
        spectrum[c.phi] = spectrum.get(c.phi, 0) + c.size
    return dict(sorted(spectrum.items()))


def _preprocess_cost(dist: ClassDistribution) -> OpCount:
    # one orbit-size increment per SIOR matrix that joins an existing class
    return OpCount(dist.total - len(dist), 0)


def _rank_term(dist: ClassDistribution, n: int) -> tuple[int, OpCount]:
    """sum size * phi over the classes, and the cost of evaluating it."""
    k = len(dist)
    s = sum(c.size * c.phi for c in dist.classes)
    cost = OpCount(k - 1, k)
    for _ in range(k):
        cost += _phi_cost(dist.r, n)
    return s, cost


def per_cocyclic_full(p: int, workers: int = 1, budget: int | None = None) -> PermanentResult:
    """Class-collapsed Ryser sum over every rank r = 1..n."""
    n = 1 << p
    pre = OpCount()
    ev = OpCount()
    total = 0
    for r in range(1, n + 1):
        dist = class_distribution(r, p, workers=workers, budget=budget)
        pre += _preprocess_cost(dist)
        s, cost = _rank_term(dist, n)
        ev += cost + OpCount(0, 1)
        total += (-1) ** r * r * s
    ev += OpCount(n - 1, 0)
    return PermanentResult(total, pre + ev, "cocyclic-full", {"preprocess": pre, "evaluation": ev})


def vanishing_ranks(p: int) -> set[int]:
    """Ranks r = 2^k, k = 1..p-1, whose classes all have phi = 0 by the vanishing-column lemma."""
    return {1 << k for k in range(1, p)}


def half_ranks(p: int, assume_lemma: bool = False) -> list[int]:
    n = 1 << p
    skip = vanishing_ranks(p) if (p <= LEMMA_PROVEN_MAX_P or assume_lemma) else set()
    return [r for r in range(1, n // 2 + 1) if r not in skip]


def per_cocyclic_half(
    p: int,
    assume_lemma: bool = False,
    workers: int = 1,
    budget: int | None = None,
) -> PermanentResult:
    """Two-step evaluation: enumerate classes for the needed ranks, then sum.

    Only ranks up to n/2 are visited.  Ranks that are powers of two are
    skipped for p <= 4, where the vanishing-column lemma is established, or
    for any p when ``assume_lemma`` is set.
    """
    n = 1 << p
    pre = OpCount()
    ev = OpCount()
    total = 0
    ranks = half_ranks(p, assume_lemma)
    for r in ranks:
        dist = class_distribution(r, p, workers=workers, budget=budget)
        pre += _preprocess_cost(dist)
        s, cost = _rank_term(dist, n)
        coeff = (-1) ** r * (2 * r - n)
        ev += cost + OpCount(0, 1)
        total += coeff * s
    ev += OpCount(max(len(ranks) - 1, 0), 0)
    return PermanentResult(total, pre + ev, "cocyclic-half", {"preprocess": pre, "evaluation": ev})


def verify_phi_invariance(m: SiorMatrix, ops: Iterable[tuple[str, object]]) -> bool:
    """True iff phi is unchanged by the composite P-operation ``ops``."""
    image = apply_operations(m, ops)
    return phi(subset_from_sior(m), m.p) == phi(subset_from_sior(image), m.p)


# -- sweeps over row subsets --------------------------------------------------


@dataclass
class VerificationReport:
    claim: str
    p: int
    k: int | None
    mode: str
    checked: int = 0
    counterexamples: list[list[int]] = field(default_factory=list)
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and self.details.get("cross_validated", True)

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA,
            "claim": self.claim,
            "p": self.p,
            "k": self.k,
            "mode": self.mode,
            "checked": self.checked,
            "counterexamples": self.counterexamples,
            "passed": self.passed,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        out.update(self.details)
        return out


SWEEP_CHUNK = 1 << 14


def _exhaustive_chunks(n: int, r: int) -> Iterator[np.ndarray]:
    it = combinations(range(n), r)
    while True:
        flat = np.fromiter((x for c in islice(it, SWEEP_CHUNK) for x in c), dtype=np.intp)
        if not len(flat):
            return
        yield flat.reshape(-1, r)


def _sampled_chunks(n: int, r: int, samples: int, seed: int) -> Iterator[np.ndarray]:
    # one child stream per chunk: the draws do not depend on how chunks are scheduled
    nchunks = -(-samples // SWEEP_CHUNK)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(nchunks)):
        rng = np.random.default_rng(child)
        size = min(SWEEP_CHUNK, samples - i * SWEEP_CHUNK)
        yield np.sort(rng.random((size, n)).argsort(axis=1)[:, :r], axis=1)


def _subset_chunks(n: int, r: int, mode: str, samples: int | None, seed: int | None, budget: int | None):
    if mode == "exhaustive":
        budget = default_budget() if budget is None else budget
        total = comb(n, r)
        if total > budget:
            raise BudgetError(f"exhaustive sweep over C({n}, {r}) = {total} subsets exceeds budget {budget}")
        return _exhaustive_chunks(n, r)
    if mode == "sampled":
        if samples is None or samples < 1 or seed is None:
            raise ValueError("sampled mode needs a positive sample count and a seed")
        return _sampled_chunks(n, r, samples, seed)
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=8)
def _sylvester_array(p: int) -> np.ndarray:
    return np.array(sylvester(p).entries, dtype=np.int64)


def _vanishing_chunk(idx: np.ndarray, p: int) -> np.ndarray:
    """Boolean per subset: some column j >= 2 has zero restricted sum."""
    sums = _sylvester_array(p)[idx].sum(axis=1)
    return (sums[:, 1:] == 0).any(axis=1)


def _sweep(chunks, fn, p: int, workers: int):
    """Yield (subsets, flags) per chunk, in chunk order."""
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            # materialize a bounded window so early exit does not wait on the whole stream
            pending = []
            for chunk in chunks:
                pending.append((chunk, pool.submit(fn, chunk, p)))
                if len(pending) >= 2 * workers:
                    c, fut = pending.pop(0)
                    yield c, fut.result()
            for c, fut in pending:
                yield c, fut.result()
        finally:
            pool.shutdown(wait=False, cancel_futures=True)
    else:
        for chunk in chunks:
            yield chunk, fn(chunk, p)


def _record(report: VerificationReport, subsets: np.ndarray, ok: np.ndarray, limit: int | None) -> bool:
    """Account one chunk; return True when the counterexample limit is reached."""
    bad = np.flatnonzero(~ok)
    if limit is not None and len(report.counterexamples) + len(bad) >= limit:
        take = bad[: limit - len(report.counterexamples)]
        report.checked += int(take[-1]) + 1 if len(take) else 0
        report.counterexamples.extend((subsets[i] + 1).tolist() for i in take)
        return True
    report.checked += len(subsets)
    report.counterexamples.extend((subsets[i] + 1).tolist() for i in bad)
    return False


def verify_lemma_vanishing(
    p: int,
    k: int,
    mode: str = "exhaustive",
    samples: int | None = None,
    seed: int | None = None,
    budget: int | None = None,
    workers: int = 1,
    max_counterexamples: int | None = 1,
) -> VerificationReport:
    """Check that every choice of 2^k rows of H_{2^p} has a column with zero sum.

    Counterexamples are reported as 1-based row subsets.  The sweep stops
    once ``max_counterexamples`` have been found (None: never stop early).
    """
    if not 1 <= k <= p - 1:
        raise ValueError(f"k must lie in 1..{p - 1}, got {k}")
    n = 1 << p
    report = VerificationReport("lemma-vanishing", p, k, mode, seed=seed if mode == "sampled" else None)
    chunks = _subset_chunks(n, 1 << k, mode, samples, seed, budget)
    for subsets, ok in _sweep(chunks, _vanishing_chunk, p, workers):
        if _record(report, subsets, ok, max_counterexamples):
            break
    return report


def _codeword_chunk(idx: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Per subset of columns: weight-2^(p-2) codeword exists, and lemma agreement.

    Generator matrices are built from the bits of the chosen columns and
    every message g in Z_2^p is encoded as g.G mod 2.
    """
    n = 1 << p
    shifts = np.arange(p - 1, -1, -1)
    gens = (idx[:, None, :] >> shifts[None, :, None]) & 1  # (B, p, m)
    messages = (np.arange(n)[:, None] >> shifts[None, :]) & 1  # (n, p)
    codewords = np.einsum("gp,bpm->bgm", messages, gens) % 2
    hit = codewords.sum(axis=2) == (1 << (p - 2))  # (B, n)
    # zero restricted column sum at column g+1 <=> weight 2^(p-2) codeword g.G
    sums = _sylvester_array(p)[idx].sum(axis=1)
    agree = ((sums == 0) == hit).all(axis=1)
    return hit.any(axis=1), agree


def _gf2_rank(columns: Sequence[int]) -> int:
    basis: list[int] = []
    for v in columns:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def verify_codeword_proposition(
    p: int,
    mode: str = "exhaustive",
    samples: int | None = None,
    seed: int | None = None,
    budget: int | None = None,
    workers: int = 1,
    max_counterexamples: int | None = 1,
) -> VerificationReport:
    """For generators G made of 2^(p-1) distinct columns of Z_2^p, look for a
    codeword of weight 2^(p-2).

    Each subset is also matched against the restricted column sums of
    H_{2^p}: the messages giving such a codeword must be exactly the columns
    with zero sum.  ``details`` records that agreement and how many of the
    generators have full rank p.
    """
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p}")
    n = 1 << p
    m = n // 2
    report = VerificationReport("codeword-weight", p, p - 1, mode, seed=seed if mode == "sampled" else None)
    chunks = _subset_chunks(n, m, mode, samples, seed, budget)
    agreed = True
    full_rank = 0
    for subsets, (ok, agree) in _sweep(chunks, _codeword_chunk, p, workers):
        before = report.checked
        stop = _record(report, subsets, ok, max_counterexamples)
        seen = subsets[: report.checked - before]
        agreed &= bool(agree[: len(seen)].all())
        full_rank += sum(_gf2_rank(row) == p for row in seen.tolist())
        if stop:
            break
    report.details = {"cross_validated": agreed, "full_rank_generators": full_rank}
    return report


def _random_operations(rng: random.Random, p: int, r: int, length: int) -> list[tuple[str, object]]:
    ops: list[tuple[str, object]] = []
    for _ in range(length):
        kind = rng.choice(("complement", "permute_columns", "permute_rows"))
        if kind == "complement":
            ops.append((kind, rng.randint(1, p)))
        else:
            perm = list(range(1, (p if kind == "permute_columns" else r) + 1))
            rng.shuffle(perm)
            ops.append((kind, tuple(perm)))
    return ops


def invariance_report(
    p: int,
    mode: str = "exhaustive",
    samples: int | None = None,
    seed: int | None = None,
    max_counterexamples: int | None = 1,
) -> VerificationReport:
    """Check that phi is constant on P-equivalence classes.

    Exhaustive mode groups every nonempty row subset by canonical form and
    looks for a class carrying two phi values.  Sampled mode draws a random
    subset and a random chain of 1..10 P-operations, and compares phi before
    and after.  Counterexamples are pairs of 1-based subsets with different
    phi.
    """
    n = 1 << p
    report = VerificationReport("phi-invariance", p, None, mode, seed=seed if mode == "sampled" else None)

    def found(a, b) -> bool:
        report.counterexamples.append([list(a), list(b)])
        return max_counterexamples is not None and len(report.counterexamples) >= max_counterexamples

    if mode == "exhaustive":
        if n > 16:
            raise BudgetError(f"exhaustive invariance sweep visits 2^n subsets; needs n <= 16, got {n}")
        everything = np.arange(1 << n, dtype=np.uint32)
        weights = np.bitwise_count(everything)
        for r in range(1, n + 1):
            masks = everything[weights == r]
            keys = canonical_masks(masks, p).tolist()
            seen: dict[int, tuple[int, tuple[int, ...]]] = {}
            for mask, key in zip(masks.tolist(), keys):
                alpha = tuple(x + 1 for x in mask_to_rows(mask, n))
                value = phi(alpha, p)
                report.checked += 1
                if key not in seen:
                    seen[key] = (value, alpha)
                elif seen[key][0] != value and found(seen[key][1], alpha):
                    return report
        return report

    if mode != "sampled" or samples is None or seed is None:
        raise ValueError("invariance check needs mode 'exhaustive', or 'sampled' with samples and seed")
    rng = random.Random(seed)
    for _ in range(samples):
        r = rng.randint(1, n)
        m = SiorMatrix(tuple(sorted(rng.sample(range(n), r))), p)
        image = apply_operations(m, _random_operations(rng, p, r, rng.randint(1, 10)))
        report.checked += 1
        a, b = subset_from_sior(m), subset_from_sior(image)
        if phi(a, p) != phi(b, p) and found(a, b):
            break
    return report
