"""Independent scalar reference implementations.

Plain nested-loop / textbook versions of everything the simulator computes,
used by tests and the ``verify`` command.  Deliberately shares no code or
state with the array model; inputs are plain integers and numpy arrays.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def oracle_add(a: int, b: int, m: int) -> int:
    return (a + b) % (1 << m)


def oracle_sub(a: int, b: int, m: int) -> int:
    return (a - b) % (1 << m)


def oracle_mult(a: int, b: int) -> int:
    return a * b


def oracle_ed(samples: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, samples x centers."""
    samples = np.asarray(samples, dtype=np.int64)
    centers = np.asarray(centers, dtype=np.int64)
    n, att = samples.shape
    out = np.zeros((n, centers.shape[0]), dtype=np.int64)
    for ci, center in enumerate(centers):
        for si in range(n):
            acc = 0
            for k in range(att):
                d = int(samples[si, k]) - int(center[k])
                acc += d * d
            out[si, ci] = acc
    return out


def oracle_dp(vectors: np.ndarray, hvec: np.ndarray) -> list[int]:
    vectors = np.asarray(vectors, dtype=np.int64)
    hvec = np.asarray(hvec, dtype=np.int64)
    out = []
    for row in vectors:
        acc = 0
        for x, h in zip(row, hvec):
            acc += int(x) * int(h)
        out.append(acc)
    return out


def oracle_hist(values: np.ndarray, m_bins: int = 256) -> np.ndarray:
    """Counts of samples by top byte (for 256 bins; top log2(m) bits otherwise)."""
    values = np.asarray(values, dtype=np.uint64)
    shift = 32 - m_bins.bit_length() + 1
    bins = (values >> np.uint64(shift)).astype(np.int64)
    out = np.zeros(m_bins, dtype=np.int64)
    for b in bins:
        out[b] += 1
    return out


def oracle_spmv(n: int, row_idx: np.ndarray, col_idx: np.ndarray,
                values: np.ndarray, b: np.ndarray) -> list[int]:
    """c = A b over exact integers, A given as sorted coordinate triples."""
    if len(b) != n:
        raise ValueError("vector length does not match matrix dimension")
    c = [0] * n
    for r, cidx, v in zip(row_idx, col_idx, values):
        c[int(r)] += int(v) * int(b[int(cidx)])
    return c


def oracle_bfs(n_vertices: int, edges: np.ndarray, source: int,
               sentinel: int = 255) -> tuple[np.ndarray, np.ndarray]:
    """Queue-based BFS distances and one valid predecessor per vertex.

    Unreached vertices keep ``sentinel`` distance and predecessor -1; the
    source's predecessor is itself.
    """
    adj: list[list[int]] = [[] for _ in range(n_vertices)]
    for u, v in np.asarray(edges, dtype=np.int64):
        adj[int(u)].append(int(v))
    dist = np.full(n_vertices, sentinel, dtype=np.int64)
    pred = np.full(n_vertices, -1, dtype=np.int64)
    dist[source] = 0
    pred[source] = source
    q = deque([source])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if dist[v] == sentinel and v != source:
                dist[v] = dist[u] + 1
                pred[v] = u
                q.append(v)
    return dist, pred


def bfs_predecessors_valid(dist: np.ndarray, pred: np.ndarray, edges: np.ndarray,
                           source: int, sentinel: int = 255) -> bool:
    """Check the BFS-tree property: every reached non-source vertex has a
    predecessor at distance exactly one less, across an existing edge."""
    edge_set = {(int(u), int(v)) for u, v in np.asarray(edges, dtype=np.int64)}
    for v in range(len(dist)):
        d = int(dist[v])
        if v == source or d == sentinel:
            continue
        p = int(pred[v])
        if p < 0 or int(dist[p]) != d - 1 or (p, v) not in edge_set:
            return False
    return True
