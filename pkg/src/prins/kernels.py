"""The five associative workloads, each returning results plus a ledger.

Every kernel is an instruction script over one array: its per-element work
is carried out by whole-array compare/write microcode, so the charged cycle
count depends only on data *shape* (bit widths, dimensions, matrix rows,
frontier size), never on how many rows participate.  Each kernel has a
matching ``*_model`` function that charges an identical ledger analytically,
which is how paper-scale configurations are accounted without materializing
cells.

Fixed-point semantics: operands are unsigned (32-bit by default), products
and accumulators are sized exactly, and kernels size their layouts so no
accumulator can overflow (a LayoutError otherwise).  Distance differences
wrap modulo 2^(2w) and are squared immediately, which makes the wraparound
exact for unsigned attributes of w bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, LayoutError
from .microcode import (LayoutBuilder, VectorLayout, addsub_cycles, broadcast_cycles,
                        broadcast_write, mult_cycles, vec_add, vec_mult, vec_square,
                        vec_sub)
from .perfmodel import CycleEnergyLedger, DatasetInfo, ModelConfig
from .rcam import FieldSpec, RcamArray

BFS_SENTINEL = 255


# -- dataset types ---------------------------------------------------------


@dataclass
class SampleSet:
    """n_samples x n_attrs unsigned integers, one sample per array row."""

    values: np.ndarray
    attr_width: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.uint64)
        if self.values.ndim != 2:
            raise DimensionError("sample values must be 2-D (samples x attributes)")
        if self.attr_width < 1 or self.attr_width > 32:
            raise DimensionError("attribute width must be 1..32 bits")
        if self.values.size and int(self.values.max()) >= (1 << self.attr_width):
            raise DimensionError(f"sample values overflow {self.attr_width} bits")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_attrs(self) -> int:
        return self.values.shape[1]


@dataclass
class CsrMatrix:
    """Sparse square matrix as sorted (row, col, value) coordinates."""

    n: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    value_width: int = 32
    scale: int = 1  # fixed-point denominator of the stored values

    def __post_init__(self):
        self.row_idx = np.asarray(self.row_idx, dtype=np.int64)
        self.col_idx = np.asarray(self.col_idx, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.uint64)
        if not (len(self.row_idx) == len(self.col_idx) == len(self.values)):
            raise DimensionError("coordinate arrays must have equal length")
        if self.nnz:
            if int(self.row_idx.min()) < 0 or int(self.row_idx.max()) >= self.n:
                raise DimensionError("row index out of range")
            if int(self.col_idx.min()) < 0 or int(self.col_idx.max()) >= self.n:
                raise DimensionError("column index out of range")
            order = np.lexsort((self.col_idx, self.row_idx))
            if not (np.array_equal(order, np.arange(self.nnz))):
                raise DimensionError("entries must be sorted by (row, col)")
            keys = self.row_idx * self.n + self.col_idx
            if len(np.unique(keys)) != self.nnz:
                raise DimensionError("duplicate (row, col) entries")
            if self.value_width < 64 and int(self.values.max()) >= (1 << self.value_width):
                raise DimensionError(f"values overflow {self.value_width} bits")

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def density(self) -> float:
        return self.nnz / self.n if self.n else 0.0

    @classmethod
    def from_coo(cls, n: int, rows, cols, vals, value_width: int = 32,
                 scale: int = 1) -> "CsrMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.uint64)
        order = np.lexsort((cols, rows))
        return cls(n, rows[order], cols[order], vals[order], value_width, scale)


@dataclass
class GraphEdges:
    """Directed edge list; one edge per array row."""

    n_vertices: int
    edges: np.ndarray  # (E, 2) of (vertex, successor)

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n_edges and (int(self.edges.min()) < 0
                             or int(self.edges.max()) >= self.n_vertices):
            raise DimensionError("edge endpoint out of range")

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        if self.n_edges:
            src, counts = np.unique(self.edges[:, 0], return_counts=True)
            deg[src] = counts
        return deg

    @property
    def avg_out_degree(self) -> float:
        """Mean out-degree over vertices that have at least one out-edge."""
        deg = self.out_degrees
        nz = deg[deg > 0]
        return float(nz.mean()) if nz.size else 0.0

    @property
    def max_out_degree(self) -> int:
        return int(self.out_degrees.max(initial=0))


class BfsRowLayout:
    """The fixed 154-bit edge-row format used by the BFS kernel."""

    vertex = FieldSpec("vertex_id", 0, 47)
    successor = FieldSpec("successor_id", 48, 95)
    visited = FieldSpec("visited", 96, 96)
    visited_from = FieldSpec("visited_from", 97, 97)
    predecessor = FieldSpec("predecessor_id", 98, 145)
    distance = FieldSpec("distance", 146, 153)
    width = 154


@dataclass
class KernelRun:
    """Result bundle: kernel output, its ledger and dataset accounting."""

    result: object
    ledger: CycleEnergyLedger
    info: DatasetInfo
    stats: dict = field(default_factory=dict)


def _resolve_rows(n_items: int, rows: int | None) -> int:
    r = rows or n_items
    if r < n_items:
        raise LayoutError(f"array of {r} rows cannot hold {n_items} items")
    return r


def _make_array(rows: int, width: int, row_width: int | None,
                config: ModelConfig | None, record_trace: bool) -> RcamArray:
    if row_width is not None and row_width < width:
        raise LayoutError(f"layout needs {width} bit columns, geometry allows {row_width}")
    ledger = CycleEnergyLedger(config or ModelConfig(), record_trace=record_trace)
    return RcamArray(rows, row_width or width, ledger=ledger)


def _placed(values: np.ndarray, rows: int, placement: np.ndarray | None,
            fill: int = 0) -> np.ndarray:
    out = np.full(rows, fill, dtype=np.uint64)
    n = len(values)
    if placement is None:
        out[:n] = values
    else:
        out[np.asarray(placement, dtype=np.int64)] = values
    return out


def _item_rows(n: int, rows: int, placement: np.ndarray | None) -> np.ndarray:
    if placement is None:
        return np.arange(n)
    return np.asarray(placement, dtype=np.int64)


# -- Euclidean distance ------------------------------------------------------


def _ed_accumulator_bits(n_attrs: int, attr_width: int) -> int:
    return int(n_attrs * ((1 << attr_width) - 1) ** 2).bit_length()


def _ed_layout(n_attrs: int, w: int):
    lb = LayoutBuilder()
    acc_w = _ed_accumulator_bits(n_attrs, w)
    f = {
        "zero": lb.field("zero", 1),
        "x": [lb.field(f"x{k}", w) for k in range(n_attrs)],
        "center": lb.field("center", n_attrs * w),
        "diff": lb.field("diff", 2 * w),
        "product": lb.field("product", 4 * w),
        "kcarr": lb.field("kcarr", 4 * w),
        "carry": (lb.field("c0", 1), lb.field("c1", 1)),
        "acc": (lb.field("acc0", acc_w), lb.field("acc1", acc_w)),
    }
    return lb, f, acc_w


def euclidean_distance(samples: SampleSet, centers: np.ndarray,
                       config: ModelConfig | None = None, rows: int | None = None,
                       row_width: int | None = None, record_trace: bool = True,
                       placement: np.ndarray | None = None) -> KernelRun:
    """Per-sample, per-center squared Euclidean distance.

    Per center: broadcast the center coordinates, then attribute by
    attribute subtract, square and accumulate across all rows at once.
    """
    centers = np.asarray(centers, dtype=np.uint64).reshape(-1, samples.n_attrs)
    if centers.size and int(centers.max()) >= (1 << samples.attr_width):
        raise DimensionError("center coordinates overflow the attribute width")
    n, n_attrs, w = samples.n_samples, samples.n_attrs, samples.attr_width
    r = _resolve_rows(n, rows)
    lb, f, acc_w = _ed_layout(n_attrs, w)
    array = _make_array(r, lb.width, row_width, config, record_trace)
    for k in range(n_attrs):
        array.load_field(f["x"][k], _placed(samples.values[:, k], r, placement))

    carry2 = FieldSpec("carry2", f["carry"][0].lo, f["carry"][1].hi)
    rows_of = _item_rows(n, r, placement)
    result = np.zeros((n, len(centers)), dtype=np.int64 if acc_w <= 63 else object)
    for ci, center in enumerate(centers):
        packed = 0
        for k in range(n_attrs):
            packed |= int(center[k]) << (k * w)
        broadcast_write(array, f["center"], packed)
        acc_src, acc_dst = f["acc"]
        broadcast_write(array, acc_src, 0)
        for k in range(n_attrs):
            c_k = FieldSpec(f"c{k}", f["center"].lo + k * w, f["center"].lo + (k + 1) * w - 1)
            broadcast_write(array, carry2, 0)
            vec_sub(array, VectorLayout(a=f["x"][k], b=c_k, s=f["diff"],
                                        carry=f["carry"], zero=f["zero"]), 2 * w)
            broadcast_write(array, f["kcarr"], 0)
            broadcast_write(array, f["product"], 0)
            vec_square(array, VectorLayout(a=f["diff"], b=f["diff"], product=f["product"],
                                           mult_carry=f["kcarr"], zero=f["zero"]), 2 * w)
            sq_low = FieldSpec("sq", f["product"].lo, f["product"].lo + 2 * w - 1)
            broadcast_write(array, carry2, 0)
            vec_add(array, VectorLayout(a=acc_src, b=sq_low, s=acc_dst,
                                        carry=f["carry"], zero=f["zero"]), acc_w)
            acc_src, acc_dst = acc_dst, acc_src
        vals = array.dump_field(acc_src)[rows_of]
        result[:, ci] = vals.astype(np.int64) if acc_w <= 63 else vals.astype(object)

    info = DatasetInfo(
        name=f"ed-n{n}-a{n_attrs}-w{w}-c{len(centers)}",
        bytes=float(n) * n_attrs * 4,
        ops=3.0 * n * n_attrs * len(centers),
        meta={"n_samples": n, "n_attrs": n_attrs, "attr_width": w,
              "n_centers": len(centers)},
    )
    return KernelRun(result, array.ledger, info)


def euclidean_distance_model(n_samples: int, n_attrs: int, attr_width: int,
                             n_centers: int, config: ModelConfig | None = None,
                             rows: int | None = None) -> KernelRun:
    """Ledger of :func:`euclidean_distance` charged analytically."""
    config = config or ModelConfig()
    w = attr_width
    acc_w = _ed_accumulator_bits(n_attrs, w)
    r = rows or n_samples
    led = CycleEnergyLedger(config, record_trace=False)
    _model_broadcast(led, n_attrs * w, r, n_centers)
    _model_broadcast(led, acc_w, r, n_centers)
    per_attr = n_centers * n_attrs
    _model_broadcast(led, 2, r, per_attr)
    _model_addsub(led, "sub", 2 * w, r, per_attr, config)
    _model_broadcast(led, 4 * w, r, per_attr)
    _model_broadcast(led, 4 * w, r, per_attr)
    _model_mult(led, "square", 2 * w, r, per_attr, config)
    _model_broadcast(led, 2, r, per_attr)
    _model_addsub(led, "add", acc_w, r, per_attr, config)
    info = DatasetInfo(
        name=f"ed-n{n_samples}-a{n_attrs}-w{w}-c{n_centers}",
        bytes=float(n_samples) * n_attrs * 4,
        ops=3.0 * n_samples * n_attrs * n_centers,
        meta={"n_samples": n_samples, "n_attrs": n_attrs, "attr_width": w,
              "n_centers": n_centers},
    )
    return KernelRun(None, led, info)


# -- dot product -------------------------------------------------------------


def _dp_accumulator_bits(n_attrs: int, attr_width: int) -> int:
    return int(n_attrs * ((1 << attr_width) - 1) ** 2).bit_length()


def dot_product(vectors: SampleSet, hvec: np.ndarray,
                config: ModelConfig | None = None, rows: int | None = None,
                row_width: int | None = None, record_trace: bool = True,
                placement: np.ndarray | None = None) -> KernelRun:
    """Per-row dot product with a broadcast vector.

    Dimension by dimension: broadcast one coefficient, multiply it into the
    matching attribute of every row, accumulate.
    """
    hvec = np.asarray(hvec, dtype=np.uint64)
    if hvec.shape != (vectors.n_attrs,):
        raise DimensionError(f"H has {hvec.shape} entries, vectors have {vectors.n_attrs}")
    w = vectors.attr_width
    if hvec.size and int(hvec.max()) >= (1 << w):
        raise DimensionError("H coefficients overflow the attribute width")
    n, dim = vectors.n_samples, vectors.n_attrs
    r = _resolve_rows(n, rows)
    acc_w = _dp_accumulator_bits(dim, w)
    lb = LayoutBuilder()
    zero = lb.field("zero", 1)
    x = [lb.field(f"x{k}", w) for k in range(dim)]
    h = lb.field("h", w)
    product = lb.field("product", 2 * w)
    kcarr = lb.field("kcarr", 2 * w)
    carry = (lb.field("c0", 1), lb.field("c1", 1))
    acc = (lb.field("acc0", acc_w), lb.field("acc1", acc_w))
    array = _make_array(r, lb.width, row_width, config, record_trace)
    for k in range(dim):
        array.load_field(x[k], _placed(vectors.values[:, k], r, placement))

    carry2 = FieldSpec("carry2", carry[0].lo, carry[1].hi)
    acc_src, acc_dst = acc
    first = True
    for k in range(dim):
        broadcast_write(array, h, int(hvec[k]))
        broadcast_write(array, kcarr, 0)
        broadcast_write(array, product, 0)
        vec_mult(array, VectorLayout(a=x[k], b=h, product=product,
                                     mult_carry=kcarr, zero=zero), w)
        broadcast_write(array, carry2, 0)
        if first:
            broadcast_write(array, acc_src, 0)
            first = False
        vec_add(array, VectorLayout(a=acc_src, b=product, s=acc_dst,
                                    carry=carry, zero=zero), acc_w)
        acc_src, acc_dst = acc_dst, acc_src

    rows_of = _item_rows(n, r, placement)
    vals = array.dump_field(acc_src)[rows_of]
    result = vals.astype(np.int64) if acc_w <= 63 else vals.astype(object)
    info = DatasetInfo(
        name=f"dp-n{n}-d{dim}-w{w}",
        bytes=float(n) * dim * 4,
        ops=2.0 * n * dim,
        meta={"n_vectors": n, "dim": dim, "attr_width": w},
    )
    return KernelRun(result, array.ledger, info)


def dot_product_model(n_vectors: int, dim: int, attr_width: int,
                      config: ModelConfig | None = None,
                      rows: int | None = None) -> KernelRun:
    config = config or ModelConfig()
    w = attr_width
    acc_w = _dp_accumulator_bits(dim, w)
    r = rows or n_vectors
    led = CycleEnergyLedger(config, record_trace=False)
    _model_broadcast(led, w, r, dim)
    _model_broadcast(led, 2 * w, r, dim)
    _model_broadcast(led, 2 * w, r, dim)
    _model_mult(led, "mult", w, r, dim, config)
    _model_broadcast(led, 2, r, dim)
    _model_broadcast(led, acc_w, r, 1)
    _model_addsub(led, "add", acc_w, r, dim, config)
    info = DatasetInfo(
        name=f"dp-n{n_vectors}-d{dim}-w{w}",
        bytes=float(n_vectors) * dim * 4,
        ops=2.0 * n_vectors * dim,
        meta={"n_vectors": n_vectors, "dim": dim, "attr_width": w},
    )
    return KernelRun(None, led, info)


# -- histogram ---------------------------------------------------------------


def histogram(values: np.ndarray, m_bins: int = 256,
              config: ModelConfig | None = None, rows: int | None = None,
              row_width: int | None = None, record_trace: bool = True,
              placement: np.ndarray | None = None) -> KernelRun:
    """Bin counts of 32-bit samples by their most significant bits.

    With the default 256 bins the bin index is the top byte, sample bits
    31..24.  Per bin: one compare tags the matching rows, one reduction
    pass counts them.
    """
    values = np.asarray(values, dtype=np.uint64)
    if m_bins < 2 or m_bins & (m_bins - 1):
        raise DimensionError("m_bins must be a power of two >= 2")
    bin_bits = m_bins.bit_length() - 1
    if values.size and int(values.max()) >= (1 << 32):
        raise DimensionError("histogram samples must be 32-bit")
    n = len(values)
    r = _resolve_rows(n, rows)
    lb = LayoutBuilder()
    sample = lb.field("sample", 32)
    valid = lb.field("valid", 1)
    array = _make_array(r, lb.width, row_width, config, record_trace)
    array.load_field(sample, _placed(values, r, placement))
    ones = np.zeros(r, dtype=np.uint64)
    ones[_item_rows(n, r, placement)] = 1
    array.load_field(valid, ones)

    bin_field = FieldSpec("bin", sample.lo + 32 - bin_bits, sample.lo + 31)
    counts = np.zeros(m_bins, dtype=np.int64)
    for b in range(m_bins):
        array.compare((b << 1) | 1, [bin_field, valid])
        counts[b] = array.reduce_popcount()

    info = DatasetInfo(
        name=f"hist-n{n}-b{m_bins}",
        bytes=4.0 * n,
        ops=2.0 * n,
        meta={"n_samples": n, "m_bins": m_bins},
    )
    return KernelRun(counts, array.ledger, info)


def histogram_model(n_samples: int, m_bins: int = 256,
                    config: ModelConfig | None = None,
                    rows: int | None = None) -> KernelRun:
    config = config or ModelConfig()
    bin_bits = m_bins.bit_length() - 1
    r = rows or n_samples
    led = CycleEnergyLedger(config, record_trace=False)
    led.charge_compare(bin_bits + 1, r, count=m_bins)
    led.charge_reduction(1, r, count=m_bins)
    info = DatasetInfo(
        name=f"hist-n{n_samples}-b{m_bins}",
        bytes=4.0 * n_samples,
        ops=2.0 * n_samples,
        meta={"n_samples": n_samples, "m_bins": m_bins},
    )
    return KernelRun(None, led, info)


# -- sparse matrix-vector multiply --------------------------------------------


def _spmv_index_bits(n: int) -> int:
    return max(1, (n - 1).bit_length()) if n > 1 else 1


def spmv(matrix: CsrMatrix, bvec: np.ndarray,
         config: ModelConfig | None = None, rows: int | None = None,
         row_width: int | None = None, record_trace: bool = True,
         placement: np.ndarray | None = None) -> KernelRun:
    """c = A b in exact fixed point; one nonzero of A per array row.

    Three phases: broadcast (per b element, one compare on the column-index
    field and one write of the element into every matching row), a single
    whole-array multiply of the aligned pairs, and one reduction per
    nonempty matrix row.
    """
    bvec = np.asarray(bvec, dtype=np.uint64)
    if bvec.shape != (matrix.n,):
        raise DimensionError(f"b has {bvec.shape} entries, matrix dimension is {matrix.n}")
    w = matrix.value_width
    if bvec.size and w < 64 and int(bvec.max()) >= (1 << w):
        raise DimensionError(f"b values overflow {w} bits")
    nnz = matrix.nnz
    if nnz == 0:
        raise DimensionError("matrix has no nonzero elements")
    r = _resolve_rows(nnz, rows)
    idx_w = _spmv_index_bits(matrix.n)
    lb = LayoutBuilder()
    zero = lb.field("zero", 1)
    irow = lb.field("row_idx", idx_w)
    icol = lb.field("col_idx", idx_w)
    ea = lb.field("ea", w)
    eb = lb.field("eb", w)
    product = lb.field("product", 2 * w)
    kcarr = lb.field("kcarr", 2 * w)
    array = _make_array(r, lb.width, row_width, config, record_trace)
    array.load_field(irow, _placed(matrix.row_idx.astype(np.uint64), r, placement))
    array.load_field(icol, _placed(matrix.col_idx.astype(np.uint64), r, placement))
    array.load_field(ea, _placed(matrix.values, r, placement))

    snap0 = array.ledger.snapshot()
    for k in range(matrix.n):
        array.compare(k, [icol])
        array.write(int(bvec[k]), [eb])
    broadcast_cycles_used = array.ledger.total_cycles - sum(snap0["cycles"].values())

    vec_mult(array, VectorLayout(a=ea, b=eb, product=product,
                                 mult_carry=kcarr, zero=zero), w)

    nonempty = np.unique(matrix.row_idx)
    c = [0] * matrix.n
    for k in nonempty:
        array.compare(int(k), [irow])
        c[int(k)] = array.reduce_field_sum(product)

    info = DatasetInfo(
        name=f"spmv-n{matrix.n}-nnz{nnz}",
        bytes=12.0 * nnz,
        ops=2.0 * nnz,
        meta={"n": matrix.n, "nnz": nnz, "density": matrix.density},
    )
    stats = {"broadcast_cycles": broadcast_cycles_used, "n_nonempty_rows": len(nonempty)}
    return KernelRun(c, array.ledger, info, stats)


def spmv_model(n: int, nnz: int, n_nonempty: int | None = None,
               value_width: int = 32, config: ModelConfig | None = None,
               rows: int | None = None) -> KernelRun:
    config = config or ModelConfig()
    w = value_width
    idx_w = _spmv_index_bits(n)
    r = rows or nnz
    n_nonempty = min(n, nnz) if n_nonempty is None else n_nonempty
    led = CycleEnergyLedger(config, record_trace=False)
    led.charge_compare(idx_w, r, count=n)
    led.charge_write(w, nnz / n, r, count=n)
    _model_mult(led, "mult", w, r, 1, config)
    led.charge_compare(idx_w, r, count=n_nonempty)
    led.charge_reduction(2 * w, r, count=n_nonempty)
    info = DatasetInfo(
        name=f"spmv-n{n}-nnz{nnz}",
        bytes=12.0 * nnz,
        ops=2.0 * nnz,
        meta={"n": n, "nnz": nnz, "density": nnz / n},
    )
    return KernelRun(None, led, info, {"n_nonempty_rows": n_nonempty})


# -- breadth-first search -----------------------------------------------------


def bfs(graph: GraphEdges, source: int, config: ModelConfig | None = None,
        rows: int | None = None, record_trace: bool = True,
        placement: np.ndarray | None = None) -> KernelRun:
    """Single-source BFS over an edge-per-row graph.

    Frontier rows (distance == depth, not yet expanded) are popped one at a
    time with first_match; each pop reads the edge, then one compare+write
    discovers every still-unvisited row of the successor vertex at once.
    Unreached vertices keep the all-ones sentinel distance; graphs needing
    depths beyond it are rejected.  Vertices with no out-edges have no rows
    of their own, so their discovery is recovered from the in-edge rows
    that examined them (taking the earliest depth).
    """
    L = BfsRowLayout
    if not (0 <= source < graph.n_vertices):
        raise DimensionError(f"source {source} out of range")
    if graph.n_vertices >= (1 << 48) - 1:
        raise DimensionError("vertex ids must fit 48 bits")
    E = graph.n_edges
    if E == 0:
        raise DimensionError("graph has no edges")
    r = _resolve_rows(E, rows)
    ledger = CycleEnergyLedger(config or ModelConfig(), record_trace=record_trace)
    array = RcamArray(r, L.width, ledger=ledger)
    pad_vertex = (1 << 48) - 1  # never a legal vertex id
    array.load_field(L.vertex, _placed(graph.edges[:, 0].astype(np.uint64), r,
                                       placement, fill=pad_vertex))
    array.load_field(L.successor, _placed(graph.edges[:, 1].astype(np.uint64), r,
                                          placement, fill=pad_vertex))
    array.load_field(L.distance, np.full(r, BFS_SENTINEL, dtype=np.uint64))
    pad = np.ones(r, dtype=np.uint64)
    pad[_item_rows(E, r, placement)] = 0
    array.load_field(L.visited, pad.copy())
    array.load_field(L.visited_from, pad.copy())

    # mark the source discovered at depth 0 (protects it from rediscovery)
    array.compare(source, [L.vertex])
    array.write((1 << 8) | 0, [L.visited, L.distance])

    succ_mask = (1 << 48) - 1
    processed = 0
    sweeps = 0
    depth = 0
    while True:
        sweeps += 1
        discovered = False
        while True:
            array.compare(depth << 1, [L.distance, L.visited_from])
            if not array.if_match():
                break
            array.first_match()
            array.write(1, [L.visited_from])
            word = array.read([L.vertex, L.successor, L.visited])
            u = word >> 49
            v = (word >> 1) & succ_mask
            array.compare(v << 1, [L.vertex, L.visited])
            if array.if_match():
                discovered = True
            array.write(((depth + 1) << 49) | (u << 1) | 1,
                        [L.distance, L.predecessor, L.visited])
            processed += 1
        if not discovered:
            break
        depth += 1
        if depth + 1 >= BFS_SENTINEL:
            raise DimensionError(f"graph depth reaches the {BFS_SENTINEL} sentinel; "
                                 "distance field is 8 bits")

    # host-side extraction (direct dump, no cycles charged)
    vertex = array.dump_field(L.vertex)
    succ = array.dump_field(L.successor)
    visited = array.dump_field(L.visited).astype(bool)
    expanded = array.dump_field(L.visited_from).astype(bool)
    pred_f = array.dump_field(L.predecessor)
    dist_f = array.dump_field(L.distance)
    item_rows = _item_rows(E, r, placement)
    vertex, succ = vertex[item_rows], succ[item_rows]
    visited, expanded = visited[item_rows], expanded[item_rows]
    pred_f, dist_f = pred_f[item_rows], dist_f[item_rows]

    dist = np.full(graph.n_vertices, BFS_SENTINEL, dtype=np.int64)
    pred = np.full(graph.n_vertices, -1, dtype=np.int64)
    for i in np.nonzero(visited)[0]:
        vtx = int(vertex[i])
        if vtx == source:
            continue
        d, p = int(dist_f[i]), int(pred_f[i])
        if dist[vtx] == BFS_SENTINEL:
            dist[vtx], pred[vtx] = d, p
        elif (dist[vtx], pred[vtx]) != (d, p):
            raise AssertionError(f"rows of vertex {vtx} disagree on (distance, predecessor)")
    for i in np.nonzero(expanded)[0]:
        vtx = int(succ[i])
        if vtx == source or dist[vtx] != BFS_SENTINEL and dist[vtx] <= int(dist_f[i]) + 1:
            continue
        # vertex with no out-edge rows: recover from the examining in-edge
        dist[vtx] = int(dist_f[i]) + 1
        pred[vtx] = int(vertex[i])
    dist[source] = 0
    pred[source] = source

    info = DatasetInfo(
        name=f"bfs-v{graph.n_vertices}-e{E}",
        bytes=8.0 * E,
        ops=float(E),
        meta={"V": graph.n_vertices, "E": E,
              "avg_out_degree": graph.avg_out_degree,
              "max_out_degree": graph.max_out_degree,
              "source": source},
    )
    stats = {"rows_processed": processed, "sweeps": sweeps}
    return KernelRun((dist, pred), ledger, info, stats)


def bfs_model(n_vertices: int, n_edges: int, rows_processed: int | None = None,
              sweeps: int | None = None, avg_out_degree: float | None = None,
              max_out_degree: int | None = None,
              config: ModelConfig | None = None,
              rows: int | None = None) -> KernelRun:
    """Analytic BFS ledger.  Without measured stats it assumes every edge
    row is examined once and estimates ten frontier sweeps."""
    config = config or ModelConfig()
    r = rows or n_edges
    processed = n_edges if rows_processed is None else rows_processed
    sweeps = 10 if sweeps is None else sweeps
    avg_d = (n_edges / max(1, n_vertices)) if avg_out_degree is None else avg_out_degree
    led = CycleEnergyLedger(config, record_trace=False)
    led.charge_compare(48, r)
    led.charge_write(9, max(1.0, avg_d), r)
    if processed:
        led.charge_compare(9, r, count=processed)
        led.charge_tag_op("if_match", r, count=processed)
        led.charge_tag_op("first_match", r, count=processed)
        led.charge_write(1, 1, r, count=processed)
        led.charge_read(97, r, count=processed)
        led.charge_compare(49, r, count=processed)
        led.charge_tag_op("if_match", r, count=processed)
        led.charge_write(57, max(1.0, avg_d), r, count=processed)
    led.charge_compare(9, r, count=sweeps)
    led.charge_tag_op("if_match", r, count=sweeps)
    info = DatasetInfo(
        name=f"bfs-v{n_vertices}-e{n_edges}",
        bytes=8.0 * n_edges,
        ops=float(n_edges),
        meta={"V": n_vertices, "E": n_edges,
              "avg_out_degree": avg_d,
              "max_out_degree": max_out_degree if max_out_degree is not None else 0},
    )
    return KernelRun(None, led, info, {"rows_processed": processed, "sweeps": sweeps})


# -- shared bulk-charge helpers for the analytic models ------------------------


def _model_broadcast(led: CycleEnergyLedger, bits: int, rows: int, count: int):
    if count <= 0:
        return
    led.charge_compare(0, rows, count=count)
    led.charge_write(bits, rows, rows, count=count)


def _model_addsub(led: CycleEnergyLedger, kind: str, m: int, rows: int, count: int,
                  config: ModelConfig):
    if count <= 0:
        return
    # complete tables: the 8 entries of one bit step partition the rows,
    # so total written bit-rows per step is exactly 2 * rows
    led.charge_compare(3, rows, count=8 * m * count)
    led.charge_write(2, rows / 8, rows, count=8 * m * count)
    led.note_arith_bulk(kind, m, count,
                        cycles=addsub_cycles(m, config.write_cycles) * count,
                        compare_bits=24 * m * count,
                        write_bit_tagged=2.0 * m * rows * count)


def _model_mult(led: CycleEnergyLedger, kind: str, m: int, rows: int, count: int,
                config: ModelConfig):
    if count <= 0:
        return
    # gated entries execute only on rows whose multiplier bit is set;
    # charge the expected half
    led.charge_compare(4, rows, count=8 * m * m * count)
    led.charge_write(3, rows / 16, rows, count=8 * m * m * count)
    led.note_arith_bulk(kind, m, count,
                        cycles=mult_cycles(m, config.write_cycles) * count,
                        compare_bits=32 * m * m * count,
                        write_bit_tagged=1.5 * m * m * rows * count)
