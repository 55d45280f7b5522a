"""Dataset loaders, writers and seeded synthetic generators.

Matrix values are read as reals and quantized to unsigned fixed point with
a documented scale, ``q = clamp(round(value * 2^16), 0, 2^32 - 1)``; the
verification oracle consumes the same quantized values, so kernel/oracle
equivalence is exact.  Negative values clamp to zero on the unsigned path.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParseError
from .kernels import CsrMatrix, GraphEdges, SampleSet

QUANT_SCALE = 1 << 16
VALUE_MAX = (1 << 32) - 1


def quantize(value: float, scale: int = QUANT_SCALE) -> int:
    return int(min(max(round(value * scale), 0), VALUE_MAX))


# -- Matrix Market coordinate format ----------------------------------------


def load_matrix_market(path) -> CsrMatrix:
    """Parse a Matrix Market coordinate file into sorted, unique CSR triples.

    Supports real/integer/pattern fields and general/symmetric symmetry;
    symmetric files are expanded.  Duplicate entries and malformed lines
    are errors carrying the offending line number.
    """
    with open(path) as f:
        lines = f.readlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].strip().split()
    if len(head) < 5 or head[0] != "%%MatrixMarket":
        raise ParseError("missing %%MatrixMarket header", 1)
    _, obj, fmt, fld, sym = head[:5]
    if obj.lower() != "matrix" or fmt.lower() != "coordinate":
        raise ParseError(f"unsupported object/format {obj}/{fmt}", 1)
    fld, sym = fld.lower(), sym.lower()
    if fld not in ("real", "integer", "pattern"):
        raise ParseError(f"unsupported field type {fld!r}", 1)
    if sym not in ("general", "symmetric"):
        raise ParseError(f"unsupported symmetry {sym!r}", 1)

    ln = 1
    size = None
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    for raw in lines[1:]:
        ln += 1
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if size is None:
            if len(parts) != 3:
                raise ParseError("size line must be 'rows cols nnz'", ln)
            try:
                size = tuple(int(p) for p in parts)
            except ValueError:
                raise ParseError("non-integer size entry", ln)
            continue
        want = 2 if fld == "pattern" else 3
        if len(parts) != want:
            raise ParseError(f"expected {want} tokens, got {len(parts)}", ln)
        try:
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            v = 1.0 if fld == "pattern" else float(parts[2])
        except ValueError:
            raise ParseError("malformed entry", ln)
        if not (0 <= i < size[0] and 0 <= j < size[1]):
            raise ParseError(f"entry ({i + 1}, {j + 1}) outside {size[0]}x{size[1]}", ln)
        q = quantize(v)
        add(i, j, q)
        if sym == "symmetric" and i != j:
            add(j, i, q)

    if size is None:
        raise ParseError("missing size line", ln)
    n_rows, n_cols, nnz = size
    declared = nnz if sym == "general" else None
    if declared is not None and len(rows) != declared:
        raise ParseError(f"declared {declared} entries, found {len(rows)}", ln)
    if n_rows != n_cols:
        # loadable, but kernels that need a square matrix must reject it
        n = max(n_rows, n_cols)
    else:
        n = n_rows
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    v = np.asarray(vals, dtype=np.uint64)
    keys = r * n + c
    if len(np.unique(keys)) != len(keys):
        order = np.lexsort((c, r))
        dup = np.nonzero(np.diff(keys[order]) == 0)[0]
        i, j = int(r[order][dup[0]]) + 1, int(c[order][dup[0]]) + 1
        raise ParseError(f"duplicate entry ({i}, {j})")
    m = CsrMatrix.from_coo(n, r, c, v, value_width=32, scale=QUANT_SCALE)
    m.square = n_rows == n_cols
    m.shape = (n_rows, n_cols)
    return m


def save_matrix_market(matrix: CsrMatrix, path) -> None:
    """Write quantized values back as exactly-representable dyadic reals."""
    with open(path, "w") as f:
        f.write("%%MatrixMarket matrix coordinate real general\n")
        f.write(f"{matrix.n} {matrix.n} {matrix.nnz}\n")
        for r, c, v in zip(matrix.row_idx, matrix.col_idx, matrix.values):
            f.write(f"{int(r) + 1} {int(c) + 1} {int(v) / matrix.scale!r}\n")


# -- edge-list format ---------------------------------------------------------


def load_edge_list(path) -> GraphEdges:
    """Whitespace-separated ``src dst`` lines; ``#`` starts a comment."""
    edges = []
    max_id = -1
    with open(path) as f:
        for ln, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'src dst', got {len(parts)} tokens", ln)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError("non-integer vertex id", ln)
            if u < 0 or v < 0:
                raise ParseError("vertex ids must be non-negative", ln)
            edges.append((u, v))
            max_id = max(max_id, u, v)
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return GraphEdges(max_id + 1, arr)


def save_edge_list(graph: GraphEdges, path) -> None:
    with open(path, "w") as f:
        f.write(f"# {graph.n_vertices} vertices, {graph.n_edges} edges\n")
        for u, v in graph.edges:
            f.write(f"{int(u)} {int(v)}\n")


# -- seeded synthetic generators ----------------------------------------------


def gen_samples(n: int, n_attrs: int = 16, attr_width: int = 8,
                seed: int = 0) -> SampleSet:
    if n < 1 or n_attrs < 1:
        raise DimensionError("sizes must be >= 1")
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, 1 << attr_width, size=(n, n_attrs), dtype=np.uint64)
    return SampleSet(vals, attr_width)


def gen_centers(n_centers: int, n_attrs: int = 16, attr_width: int = 8,
                seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed + 1)
    return rng.integers(0, 1 << attr_width, size=(n_centers, n_attrs), dtype=np.uint64)


def gen_hist_values(n: int, seed: int = 0) -> np.ndarray:
    """Uniform random 32-bit integers."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 1 << 32, size=n, dtype=np.uint64)


def gen_csr(n: int, density: float, value_width: int = 32, seed: int = 0) -> CsrMatrix:
    """Random square matrix with about ``density * n`` nonzeros."""
    if n < 1 or density <= 0:
        raise DimensionError("need n >= 1 and density > 0")
    nnz = min(int(round(density * n)), n * n)
    rng = np.random.default_rng(seed)
    keys = rng.choice(n * n, size=nnz, replace=False)
    rows, cols = np.divmod(keys.astype(np.int64), n)
    hi = (1 << value_width) - 1
    vals = rng.integers(1, min(hi, 1 << 16), size=nnz, dtype=np.uint64)
    return CsrMatrix.from_coo(n, rows, cols, vals, value_width=value_width)


def gen_bvec(n: int, value_width: int = 32, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed + 1)
    return rng.integers(0, min((1 << value_width) - 1, 1 << 16), size=n, dtype=np.uint64)


def gen_graph(n_vertices: int, n_edges: int, seed: int = 0) -> GraphEdges:
    """Random directed graph without duplicate edges (self loops allowed)."""
    if n_vertices < 1 or n_edges < 1:
        raise DimensionError("need at least one vertex and one edge")
    cap = n_vertices * n_vertices
    if n_edges > cap:
        raise DimensionError("more edges than vertex pairs")
    rng = np.random.default_rng(seed)
    keys = rng.choice(cap, size=n_edges, replace=False)
    u, v = np.divmod(keys.astype(np.int64), n_vertices)
    return GraphEdges(n_vertices, np.column_stack([u, v]))


def gen_synthetic(kind: str, seed: int = 0, **params):
    """Dispatch by dataset kind: ed, dp, hist, spmv, graph."""
    if kind == "ed":
        n = int(params.get("n", 1000))
        attrs = int(params.get("attrs", 16))
        width = int(params.get("width", 8))
        centers = int(params.get("centers", 4))
        return (gen_samples(n, attrs, width, seed),
                gen_centers(centers, attrs, width, seed))
    if kind == "dp":
        n = int(params.get("n", 1000))
        attrs = int(params.get("attrs", 16))
        width = int(params.get("width", 8))
        return (gen_samples(n, attrs, width, seed),
                gen_centers(1, attrs, width, seed)[0])
    if kind == "hist":
        return gen_hist_values(int(params.get("n", 100000)), seed)
    if kind == "spmv":
        n = int(params.get("n", 500))
        density = float(params.get("density", 8.0))
        m = gen_csr(n, density, seed=seed)
        return m, gen_bvec(n, seed=seed)
    if kind == "graph":
        v = int(params.get("v", 1000))
        e = int(params.get("e", 4000))
        return gen_graph(v, e, seed)
    raise DimensionError(f"unknown dataset kind {kind!r}")
