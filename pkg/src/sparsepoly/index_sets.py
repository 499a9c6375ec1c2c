r"""Multi-index truncation sets for tensorized polynomial expansions.

A multi-index set $\Lambda \subset \mathbb{N}_0^d$ selects which tensorized
basis functions enter a truncated expansion.  The workhorse here is the
hyperbolic cross of order $s$,

$$
\Lambda = \{ j \in \mathbb{N}_0^d : \prod_{k=1}^d (j_k + 1) \le s \},
$$

whose cardinality grows only moderately with the dimension $d$, which is what
makes sparse recovery in high dimension tractable at all.

Indices are stored in a deterministic graded order: ascending total degree,
ties broken lexicographically on the entries.  Downstream code (sensing-matrix
columns, weight vectors, greedy tie-breaking) relies on this ordering being
total and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MultiIndexSet:
    """An ordered set of d-dimensional nonnegative multi-indices.

    Attributes:
        dimension: ambient dimension d (>= 1).
        indices: (N, d) integer array, one multi-index per row, in graded
            lexicographic order.
        order_parameter: the hyperbolic-cross order s when the set was
            generated by :func:`hyperbolic_cross`, else None.
    """

    dimension: int
    indices: np.ndarray = field(repr=False)
    order_parameter: int | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 2 or idx.shape[1] != self.dimension:
            raise ValueError(
                f"indices must be (N, {self.dimension}), got shape {idx.shape}"
            )
        if np.any(idx < 0):
            raise ValueError("multi-index entries must be nonnegative")
        if len({tuple(row) for row in idx}) != idx.shape[0]:
            raise ValueError("duplicate multi-indices")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __iter__(self):
        return iter(self.indices)

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.indices]


def graded_lex_order(indices: np.ndarray) -> np.ndarray:
    """Permutation sorting rows by total degree, then lexicographically."""
    indices = np.asarray(indices)
    d = indices.shape[1]
    keys = tuple(indices[:, k] for k in reversed(range(d)))
    return np.lexsort(keys + (indices.sum(axis=1),))


def hyperbolic_cross(d: int, s: int) -> MultiIndexSet:
    """Build the hyperbolic cross of order s in dimension d.

    Enumerates exactly the indices j with prod(j_k + 1) <= s by depth-first
    recursion over coordinates, bounding each coordinate by the remaining
    product budget.  The full degree box (s^d points) is never materialized.

    Args:
        d: ambient dimension, >= 1.
        s: cross order, >= 1.

    Returns:
        MultiIndexSet in graded lexicographic order.

    Raises:
        ValueError: if d < 1 or s < 1.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if s < 1:
        raise ValueError(f"cross order must be >= 1, got {s}")

    rows: list[tuple[int, ...]] = []
    current = [0] * d

    def recurse(coord: int, prod: int) -> None:
        if coord == d:
            rows.append(tuple(current))
            return
        # (j+1) * prod <= s  <=>  j <= s // prod - 1
        for j in range(s // prod):
            current[coord] = j
            recurse(coord + 1, prod * (j + 1))
        current[coord] = 0

    recurse(0, 1)
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), d)
    arr = arr[graded_lex_order(arr)]
    return MultiIndexSet(dimension=d, indices=arr, order_parameter=s)


def cardinality(index_set: MultiIndexSet) -> int:
    """Number of indices N = |Lambda|."""
    return len(index_set)


def to_text(index_set: MultiIndexSet) -> str:
    """Serialize to the line-oriented text format.

    Header line ``d=<d> s=<s> N=<N>`` (s=0 when the set was not generated as
    a hyperbolic cross), then one space-separated multi-index per line.
    """
    s = index_set.order_parameter or 0
    lines = [f"d={index_set.dimension} s={s} N={len(index_set)}"]
    lines += [" ".join(str(int(v)) for v in row) for row in index_set.indices]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> MultiIndexSet:
    """Parse the format written by :func:`to_text`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty index-set text")
    header = dict(part.split("=", 1) for part in lines[0].split())
    try:
        d, s, n = int(header["d"]), int(header["s"]), int(header["N"])
    except KeyError as exc:
        raise ValueError(f"malformed header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"header claims N={n} but found {len(body)} indices")
    arr = np.array([[int(v) for v in ln.split()] for ln in body], dtype=np.int64)
    arr = arr.reshape(n, d)
    return MultiIndexSet(dimension=d, indices=arr, order_parameter=s or None)


def save_text(index_set: MultiIndexSet, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_text(index_set))


def load_text(path) -> MultiIndexSet:
    with open(path) as fh:
        return from_text(fh.read())
