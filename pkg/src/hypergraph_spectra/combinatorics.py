"""Exact counting and reproducible sampling of Erdos-Renyi r-uniform hypergraphs.

Vertices are 1-indexed.  Hyperedges are r-subsets of {1..n}, stored as sorted
tuples; a hypergraph is a set of such edges.  All counting is done in exact
integer arithmetic (binomials can be astronomically large), with log-space
fallbacks for quantities that are consumed as floats.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

__all__ = [
    "ModelParams",
    "HypergraphSample",
    "SamplingBudgetError",
    "binomial_coefficient",
    "log_binomial",
    "average_degree",
    "edge_overlap_count",
    "enumerate_edges",
    "derive_seed",
    "sample_hypergraph",
    "save_hypergraph_json",
    "load_hypergraph_json",
]

DEFAULT_EDGE_BUDGET = 10**7


class SamplingBudgetError(RuntimeError):
    """Expected edge count exceeds the sampling budget.

    Raised before any random drawing happens.  At scales where the Bernoulli
    hypergraph cannot be materialised, use the Gaussian surrogate ensemble
    instead (see ``gham.sample_surrogate``), which matches the covariance
    structure exactly without enumerating edges.
    """


def binomial_coefficient(n: int, k: int) -> int:
    """Exact C(n, k) as an arbitrary-precision integer.

    Raises ValueError unless 0 <= k <= n.
    """
    if k < 0 or k > n:
        raise ValueError(f"binomial coefficient requires 0 <= k <= n, got n={n}, k={k}")
    return math.comb(n, k)


def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k), computed via lgamma (safe for huge n)."""
    if k < 0 or k > n:
        raise ValueError(f"log binomial requires 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class ModelParams:
    """Model triple (n, r, p): n vertices, r-uniform edges, inclusion probability p.

    Derived counts:
      num_possible_edges  -- C(n, r), the number of potential hyperedges.
      edges_per_pair      -- C(n-2, r-2), potential hyperedges through a fixed
                             vertex pair; the variance normaliser of the
                             adjacency matrix.
      size_ratio          -- r/n.
    """

    n: int
    r: int
    p: float

    def __post_init__(self):
        if not (2 <= self.r <= self.n):
            raise ValueError(f"need 2 <= r <= n, got r={self.r}, n={self.n}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"need 0 <= p <= 1, got p={self.p}")

    @property
    def num_possible_edges(self) -> int:
        return binomial_coefficient(self.n, self.r)

    @property
    def edges_per_pair(self) -> int:
        return binomial_coefficient(self.n - 2, self.r - 2)

    @property
    def size_ratio(self) -> float:
        return self.r / self.n


@dataclass(frozen=True)
class HypergraphSample:
    """A sampled hypergraph: sorted tuple of edges, each a sorted vertex tuple."""

    params: ModelParams
    edges: tuple[tuple[int, ...], ...]
    seed: int

    def __post_init__(self):
        n, r = self.params.n, self.params.r
        for e in self.edges:
            if len(e) != r or len(set(e)) != r:
                raise ValueError(f"edge {e} is not an {r}-subset")
            if e[0] < 1 or e[-1] > n or any(a >= b for a, b in zip(e, e[1:])):
                raise ValueError(f"edge {e} not sorted within [1, {n}]")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges in sample")


def average_degree(params: ModelParams) -> float:
    """Expected number of hyperedges containing a fixed vertex: C(n-1, r-1) * p.

    Evaluated in log space when the binomial overflows float64.
    """
    if params.p == 0.0:
        return 0.0
    c = binomial_coefficient(params.n - 1, params.r - 1)
    if c < 2**53:
        return c * params.p
    return math.exp(log_binomial(params.n - 1, params.r - 1) + math.log(params.p))


def edge_overlap_count(n: int, r: int, s: int) -> int:
    """Number of r-subsets of {1..n} sharing exactly s vertices with a fixed one.

    Equals C(r, s) * C(n-r, r-s).  Summed over s = 0..r this recovers C(n, r).
    """
    if not (0 <= s <= r <= n):
        raise ValueError(f"need 0 <= s <= r <= n, got n={n}, r={r}, s={s}")
    return math.comb(r, s) * math.comb(n - r, r - s)


def enumerate_edges(n: int, r: int) -> list[tuple[int, ...]]:
    """All r-subsets of {1..n} in lexicographic order.  Only for small C(n, r)."""
    return list(itertools.combinations(range(1, n + 1), r))


_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial seed from (master_seed, trial_index) via splitmix64.

    The master seed selects a splitmix64 stream; the trial index selects the
    position in the stream.  Output is a 64-bit unsigned integer suitable for
    ``numpy.random.default_rng``.
    """
    if index < 0:
        raise ValueError("trial index must be nonnegative")
    z = (master_seed + (index + 1) * _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _draw_edge_count(rng: np.random.Generator, m: int, p: float) -> int:
    """One draw from Binomial(m, p).

    Exact CDF inversion (via the regularised incomplete beta function) while m
    fits in float64 integers; beyond that the count is approximated by a
    Gaussian when m*p*(1-p) > 1e6 and by Poisson(m*p) otherwise.  The budget
    check in ``sample_hypergraph`` guarantees m*p is moderate here.
    """
    if p == 0.0:
        return 0
    if p == 1.0:
        return m
    if m <= 2**53:
        u = rng.random()
        return int(stats.binom.ppf(u, m, p))
    mean = math.exp(math.log(m) + math.log(p))
    variance = mean * (1.0 - p)
    if variance > 1e6:
        k = int(round(mean + math.sqrt(variance) * rng.standard_normal()))
        return max(0, k)
    return int(rng.poisson(mean))


def _draw_subset_rows(rng: np.random.Generator, n: int, r: int, count: int) -> np.ndarray:
    """``count`` i.i.d. uniform r-subsets of {1..n}, one sorted row each.

    Duplicate rows are possible; distinctness is enforced by the caller.
    """
    if r <= 8 and 4 * r <= n:
        # rejection on within-row collisions; collision probability is
        # at most r^2/n <= 1/4 per row under the guard above
        rows = rng.integers(1, n + 1, size=(count, r), dtype=np.int64)
        rows.sort(axis=1)
        ok = np.all(rows[:, 1:] != rows[:, :-1], axis=1)
        return rows[ok]
    # random-keys method: the r smallest of n i.i.d. uniform keys index a
    # uniform r-subset; chunked to bound memory
    out = []
    chunk = max(1, min(count, int(2e7) // max(n, 1)))
    done = 0
    while done < count:
        take = min(chunk, count - done)
        keys = rng.random((take, n))
        rows = np.argpartition(keys, r - 1, axis=1)[:, :r].astype(np.int64) + 1
        rows.sort(axis=1)
        out.append(rows)
        done += take
    return np.concatenate(out, axis=0)


def _encode_rows(rows: np.ndarray, n: int) -> np.ndarray:
    # each sorted row packs into a single uint64 when (n+1)^r < 2^63
    codes = np.zeros(len(rows), dtype=np.uint64)
    base = np.uint64(n + 1)
    for j in range(rows.shape[1]):
        codes = codes * base + rows[:, j].astype(np.uint64)
    return codes


def _sample_distinct_edges(
    rng: np.random.Generator, n: int, r: int, k: int, m: int
) -> list[tuple[int, ...]]:
    """First k distinct subsets of an i.i.d. uniform subset stream (uniform over
    k-subsets of the m possible edges), or the complement trick when k > m/2."""
    if k == 0:
        return []
    if k == m:
        return enumerate_edges(n, r)
    if 2 * k > m:
        # sampling the complement preserves uniformity and avoids the long
        # coupon-collector tail; m <= 2k is small enough to enumerate
        excluded = set(_sample_distinct_edges(rng, n, r, m - k, m))
        return [e for e in enumerate_edges(n, r) if e not in excluded]

    use_codes = r * math.log2(n + 1) < 63
    edges: list[tuple[int, ...]] = []
    if use_codes:
        seen = np.empty(0, dtype=np.uint64)
        while len(edges) < k:
            batch = max(1024, 2 * (k - len(edges)))
            rows = _draw_subset_rows(rng, n, r, batch)
            codes = _encode_rows(rows, n)
            # first occurrence within the batch, in stream order
            _, first_idx = np.unique(codes, return_index=True)
            first_idx.sort()
            rows, codes = rows[first_idx], codes[first_idx]
            fresh = ~np.isin(codes, seen)
            rows, codes = rows[fresh], codes[fresh]
            take = min(len(rows), k - len(edges))
            edges.extend(map(tuple, rows[:take].tolist()))
            seen = np.concatenate([seen, codes[:take]])
    else:
        seen_set: set[tuple[int, ...]] = set()
        while len(edges) < k:
            batch = max(1024, 2 * (k - len(edges)))
            rows = _draw_subset_rows(rng, n, r, batch)
            for row in rows.tolist():
                t = tuple(row)
                if t not in seen_set:
                    seen_set.add(t)
                    edges.append(t)
                    if len(edges) == k:
                        break
    return edges


def sample_hypergraph(
    params: ModelParams, seed: int, max_expected_edges: float = DEFAULT_EDGE_BUDGET
) -> HypergraphSample:
    """Sample an Erdos-Renyi r-uniform hypergraph: each of the C(n, r) potential
    hyperedges is included independently with probability p.

    The edge count is drawn from Binomial(C(n,r), p) and that many distinct
    uniform r-subsets are then selected, which is distributionally identical to
    per-edge coin flips.  Identical (params, seed) reproduce identical output.

    Raises SamplingBudgetError when the expected edge count C(n,r)*p exceeds
    ``max_expected_edges``.

    Examples
    --------
    >>> sample = sample_hypergraph(ModelParams(6, 3, 1.0), seed=0)
    >>> len(sample.edges)
    20
    >>> sample.edges[0]
    (1, 2, 3)
    """
    m = params.num_possible_edges
    if params.p > 0.0:
        log_expected = math.log(m) + math.log(params.p)
        if log_expected > math.log(max_expected_edges):
            raise SamplingBudgetError(
                f"expected edge count C({params.n},{params.r})*{params.p} exceeds "
                f"budget {max_expected_edges:g}; use the Gaussian surrogate ensemble "
                f"(gham.sample_surrogate) at this scale"
            )
    rng = np.random.default_rng(seed)
    k = _draw_edge_count(rng, m, params.p)
    k = min(k, m)
    edges = _sample_distinct_edges(rng, params.n, params.r, k, m)
    edges.sort()
    return HypergraphSample(params=params, edges=tuple(edges), seed=seed)


def save_hypergraph_json(sample: HypergraphSample, path: str | Path) -> None:
    """Serialise to JSON: {"n","r","p","seed","edges"} with lexicographically
    sorted edges.  Byte-identical for identical samples."""
    payload = {
        "n": sample.params.n,
        "r": sample.params.r,
        "p": sample.params.p,
        "seed": sample.seed,
        "edges": [list(e) for e in sample.edges],
    }
    Path(path).write_text(json.dumps(payload, indent=None, separators=(",", ":")) + "\n")


def load_hypergraph_json(path: str | Path) -> HypergraphSample:
    payload = json.loads(Path(path).read_text())
    params = ModelParams(n=payload["n"], r=payload["r"], p=payload["p"])
    edges = tuple(tuple(sorted(e)) for e in payload["edges"])
    return HypergraphSample(params=params, edges=tuple(sorted(edges)), seed=payload["seed"])
