"""Cycle/energy accounting and the bandwidth-roofline performance model.

The ledger is the single place where array instructions are charged.  Cycle
costs: compare/read and every tag operation take one clock; a write takes
``write_cycles`` clocks (default 1); a reduction-tree pass takes
``ceil(log2(rows))`` clocks and a field sum pays one pass per field bit.
Energy: a compare precharges every match line, so it is charged over all
rows; a write is tag-gated and charged over tagged rows only.  Reads, tag
operations and reductions carry no per-bit energy constants and are charged
zero joules.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Iterable, Sequence

from .errors import ReportError

CYCLE_CLASSES = ("compare", "write", "read", "tag_op", "reduction")

#: Operations-per-byte constants for the supported kernels.
KERNEL_AI = {
    "ed": 3 / 4,
    "dp": 2 / 4,
    "hist": 2 / 4,
    "spmv": 1 / 6,
    "bfs": 1 / 4,
}

KERNEL_OP_UNIT = {
    "ed": "FLOP",
    "dp": "FLOP",
    "hist": "OP",
    "spmv": "FLOP",
    "bfs": "edge",
}


@dataclass
class ModelConfig:
    """Tunable hardware constants.

    Defaults: 500 MHz clock, 1 fJ/bit compare, 100 fJ/bit write, single-cycle
    writes, 4,400-cycle floating-point multiply.  The floating-point add
    cycle count has no published value and defaults to 1,000.
    ``fp_energy_masked_bits``/``fp_energy_tagged_fraction`` parameterize the
    energy attributed to one cycle of modeled floating-point microcode.
    """

    clock_hz: float = 500e6
    e_compare_per_bit: float = 1e-15
    e_write_per_bit: float = 100e-15
    write_cycles: int = 1
    fp_mult_cycles: int = 4400
    fp_add_cycles: int = 1000
    baseline_bw_bytes_per_s: tuple[float, ...] = (10e9, 24e9)
    peak_perf: float = 1e13
    fp_energy_masked_bits: int = 3
    fp_energy_tagged_fraction: float = 0.5

    def __post_init__(self):
        if isinstance(self.baseline_bw_bytes_per_s, (int, float)):
            self.baseline_bw_bytes_per_s = (float(self.baseline_bw_bytes_per_s),)
        self.baseline_bw_bytes_per_s = tuple(float(b) for b in self.baseline_bw_bytes_per_s)
        for name in ("clock_hz", "e_compare_per_bit", "e_write_per_bit", "write_cycles",
                     "fp_mult_cycles", "fp_add_cycles", "peak_perf",
                     "fp_energy_masked_bits", "fp_energy_tagged_fraction"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ModelConfig.{name} must be positive")
        for bw in self.baseline_bw_bytes_per_s:
            if bw <= 0:
                raise ValueError("baseline bandwidths must be positive")

    def replace(self, **kw) -> "ModelConfig":
        d = self.to_dict()
        d.update(kw)
        return ModelConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["baseline_bw_bytes_per_s"] = list(self.baseline_bw_bytes_per_s)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def from_file(cls, path) -> "ModelConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))


def reduction_latency(rows: int) -> int:
    """Clock cycles for one pass of the logarithmic tag-reduction tree."""
    if rows <= 1:
        return 0
    return math.ceil(math.log2(rows))


# Trace events are compact lists: [op, bits, tagged_rows, total_rows, count].
# ``bits`` is the masked-bit count (tree passes for reductions), ``tagged_rows``
# matters only for writes and may be a non-integer average when ``count`` > 1.

_CLASS_OF = {
    "compare": "compare",
    "write": "write",
    "read": "read",
    "first_match": "tag_op",
    "if_match": "tag_op",
    "shift": "tag_op",
    "reduction": "reduction",
}


class CycleEnergyLedger:
    """Running totals of cycles and energy by operation class.

    Also keeps the aggregates needed to re-express a run under a different
    row count or with modeled floating-point arithmetic: per-class cycle and
    energy sums, compare/write masked-bit totals, reduction tree-pass counts
    and a tally of the arithmetic microcode operations that were executed.
    """

    def __init__(self, config: ModelConfig | None = None, record_trace: bool = True):
        self.config = config or ModelConfig()
        self.cycles = {c: 0 for c in CYCLE_CLASSES}
        self.energy = {c: 0.0 for c in CYCLE_CLASSES}
        self.counts = {op: 0 for op in _CLASS_OF}
        self.trace: list[list] | None = [] if record_trace else None
        self.base_rows = 0
        # masked-bit totals, for rescaling energy to a different row count
        self.compare_bits = 0
        self.write_bit_tagged = 0.0  # sum of masked_bits * tagged_rows
        self.reduction_passes = 0
        # arithmetic microcode attribution
        self.arith_ops: dict[tuple[str, int], int] = {}
        self.arith_cycles = 0
        self.arith_compare_bits = 0
        self.arith_write_bit_tagged = 0.0
        self._arith_mark = None

    # -- charging -------------------------------------------------------

    def _note_rows(self, rows: int):
        if self.base_rows == 0:
            self.base_rows = rows

    def _record(self, op, bits, tagged, total, count):
        if self.trace is not None:
            self.trace.append([op, bits, tagged, total, count])

    def charge_compare(self, masked_bits: int, total_rows: int, count: int = 1):
        self._note_rows(total_rows)
        self.cycles["compare"] += count
        e = masked_bits * total_rows * self.config.e_compare_per_bit * count
        self.energy["compare"] += e
        self.counts["compare"] += count
        self.compare_bits += masked_bits * count
        self._record("compare", masked_bits, 0, total_rows, count)

    def charge_write(self, masked_bits: int, tagged_rows: float, total_rows: int, count: int = 1):
        self._note_rows(total_rows)
        self.cycles["write"] += self.config.write_cycles * count
        e = masked_bits * tagged_rows * self.config.e_write_per_bit * count
        self.energy["write"] += e
        self.counts["write"] += count
        self.write_bit_tagged += masked_bits * tagged_rows * count
        self._record("write", masked_bits, tagged_rows, total_rows, count)

    def charge_read(self, masked_bits: int, total_rows: int, count: int = 1):
        self._note_rows(total_rows)
        self.cycles["read"] += count
        self.counts["read"] += count
        self._record("read", masked_bits, 0, total_rows, count)

    def charge_tag_op(self, kind: str, total_rows: int, count: int = 1):
        self._note_rows(total_rows)
        self.cycles["tag_op"] += count
        self.counts[kind] += count
        self._record(kind, 0, 0, total_rows, count)

    def charge_reduction(self, passes: int, total_rows: int, count: int = 1):
        self._note_rows(total_rows)
        self.cycles["reduction"] += passes * reduction_latency(total_rows) * count
        self.counts["reduction"] += count
        self.reduction_passes += passes * count
        self._record("reduction", passes, 0, total_rows, count)

    # -- arithmetic attribution ------------------------------------------

    def arith_begin(self):
        if self._arith_mark is not None:
            raise RuntimeError("nested arithmetic sections are not supported")
        self._arith_mark = (self.total_cycles, self.compare_bits, self.write_bit_tagged)

    def arith_end(self, kind: str, m: int, count: int = 1):
        """Close an arithmetic section opened by :meth:`arith_begin`.

        ``kind`` is one of add/sub/mult/square; ``m`` the operand bit width.
        """
        c0, cb0, wb0 = self._arith_mark
        self._arith_mark = None
        self.arith_cycles += self.total_cycles - c0
        self.arith_compare_bits += self.compare_bits - cb0
        self.arith_write_bit_tagged += self.write_bit_tagged - wb0
        key = (kind, m)
        self.arith_ops[key] = self.arith_ops.get(key, 0) + count

    def note_arith_bulk(self, kind: str, m: int, count: int, cycles: int,
                        compare_bits: int = 0, write_bit_tagged: float = 0.0):
        """Record arithmetic ops without re-deriving them from charges.

        Used by the analytic kernel cycle models, which charge in bulk.
        """
        key = (kind, m)
        self.arith_ops[key] = self.arith_ops.get(key, 0) + count
        self.arith_cycles += cycles
        self.arith_compare_bits += compare_bits
        self.arith_write_bit_tagged += write_bit_tagged

    # -- totals ----------------------------------------------------------

    @property
    def total_cycles(self) -> int:
        return sum(self.cycles.values())

    @property
    def total_energy(self) -> float:
        return sum(self.energy.values())

    def snapshot(self) -> dict:
        return {"cycles": dict(self.cycles), "energy": dict(self.energy),
                "counts": dict(self.counts)}

    def delta_since(self, snap: dict) -> dict:
        return {
            "cycles": {c: self.cycles[c] - snap["cycles"][c] for c in CYCLE_CLASSES},
            "counts": {o: self.counts[o] - snap["counts"][o] for o in self.counts},
        }

    # -- trace I/O and replay ---------------------------------------------

    def save_trace(self, path, header: dict | None = None):
        if self.trace is None:
            raise ValueError("this ledger did not record a trace")
        head = {"type": "prins-trace", "rows": self.base_rows,
                "config": self.config.to_dict()}
        if header:
            head.update(header)
        with open(path, "w") as f:
            f.write(json.dumps(head, sort_keys=True) + "\n")
            for ev in self.trace:
                f.write(json.dumps(ev) + "\n")

    @classmethod
    def load_trace(cls, path, config: ModelConfig | None = None,
                   rows_override: int | None = None) -> tuple["CycleEnergyLedger", dict]:
        """Re-account a saved instruction trace.

        Returns the rebuilt ledger and the trace header.  ``rows_override``
        rescales the run to a different array size: compare energy scales
        with total rows, write energy with the tagged fraction, and
        reduction latency with ``ceil(log2(rows))``.
        """
        with open(path) as f:
            header = json.loads(f.readline())
            if header.get("type") != "prins-trace":
                raise ValueError(f"{path} is not a trace file")
            cfg = config or ModelConfig.from_dict(header["config"])
            led = cls(cfg, record_trace=True)
            base = header["rows"]
            for line in f:
                op, bits, tagged, total, count = json.loads(line)
                if rows_override is not None and total > 0:
                    scale = rows_override / total
                    total = rows_override
                    tagged = tagged * scale
                if op == "compare":
                    led.charge_compare(bits, total, count)
                elif op == "write":
                    led.charge_write(bits, tagged, total, count)
                elif op == "read":
                    led.charge_read(bits, total, count)
                elif op == "reduction":
                    led.charge_reduction(bits, total, count)
                else:
                    led.charge_tag_op(op, total, count)
        if rows_override is not None:
            header = dict(header)
            header["rows"] = rows_override
            header["scaled_from_rows"] = base
        return led, header


# -- roofline ------------------------------------------------------------


def throughput(dataset_bytes: float, runtime_s: float) -> float:
    """Computation throughput: dataset bytes processed per second."""
    if runtime_s <= 0:
        raise ValueError("runtime must be positive")
    return dataset_bytes / runtime_s


def attainable_perf(peak_perf: float, ai: float, bw: float) -> float:
    """Roofline bound: min(peak performance, AI x peak storage bandwidth)."""
    if peak_perf <= 0 or ai <= 0 or bw <= 0:
        raise ValueError("peak_perf, ai and bw must be positive")
    return min(peak_perf, ai * bw)


def kernel_ai(kernel: str) -> float:
    """Arithmetic intensity (op/byte) of a named kernel."""
    try:
        return KERNEL_AI[kernel]
    except KeyError:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {sorted(KERNEL_AI)}")


def roofline_points(config: ModelConfig, ai_range: Sequence[float]) -> list[dict]:
    """Sample the roofline at the given arithmetic intensities.

    One entry per (AI, bandwidth) pair plus the flat peak ceiling, so the
    result plots directly as a piecewise-linear roofline.
    """
    ais = list(ai_range)
    if not ais:
        raise ValueError("ai_range must be nonempty")
    points = []
    for ai in ais:
        for bw in config.baseline_bw_bytes_per_s:
            points.append({"ai": ai, "bw_bytes_per_s": bw,
                           "attainable": attainable_perf(config.peak_perf, ai, bw)})
        points.append({"ai": ai, "bw_bytes_per_s": None, "attainable": config.peak_perf})
    return points


# -- reports ---------------------------------------------------------------


@dataclass
class DatasetInfo:
    """What a kernel run processed, for throughput/AI accounting."""

    name: str
    bytes: float
    ops: float
    meta: dict = field(default_factory=dict)


@dataclass
class KernelReport:
    """All derived performance figures of one kernel run."""

    kernel: str
    dataset: str
    dataset_bytes: float
    dataset_meta: dict
    fp_mode: str
    rows: int
    cycles: int
    runtime_s: float
    energy_j: float
    ops: float
    op_unit: str
    perf_ops_per_s: float
    ai: float
    throughput_bytes_per_s: float
    power_w: float
    power_efficiency_per_w: float
    internal_bw_bytes_per_s: float
    baselines: list[dict]

    CSV_HEADER = ("kernel,dataset,cycles,runtime_s,energy_j,perf,ai,"
                  "baseline_bw,attainable,speedup,gflops_per_w")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def csv_rows(self) -> list[str]:
        rows = []
        for b in self.baselines:
            rows.append(",".join([
                self.kernel, self.dataset, repr(self.cycles),
                repr(self.runtime_s), repr(self.energy_j),
                repr(self.perf_ops_per_s), repr(self.ai),
                repr(b["bw_bytes_per_s"]), repr(b["attainable"]),
                repr(b["speedup"]), repr(self.power_efficiency_per_w / 1e9),
            ]))
        return rows


def _fp_cycles_for(kind: str, config: ModelConfig) -> int:
    if kind in ("mult", "square"):
        return config.fp_mult_cycles
    return config.fp_add_cycles


def build_report(ledger: CycleEnergyLedger, kernel: str, dataset: DatasetInfo,
                 config: ModelConfig | None = None, fp_mode: str = "fixed",
                 rows: int | None = None) -> KernelReport:
    """Assemble a :class:`KernelReport` from a completed run.

    ``fp_mode="fp_modeled"`` swaps the fixed-point arithmetic microcode
    cycles (and their energy) for the configured floating-point cycle
    constants; functional results are unaffected.  ``rows`` rescales the
    accounting to a larger array: per-instruction cycle costs are row-count
    independent, reduction latency follows ``ceil(log2(rows))``, compare
    energy scales with rows and write energy with the tagged fraction.
    """
    if fp_mode not in ("fixed", "fp_modeled"):
        raise ValueError(f"unknown fp_mode {fp_mode!r}")
    config = config or ledger.config
    base_rows = ledger.base_rows
    rows = rows or base_rows
    if rows <= 0 or base_rows <= 0:
        raise ReportError("ledger has no charged instructions")
    row_scale = rows / base_rows

    nonarith_cycles = ledger.total_cycles - ledger.arith_cycles
    nonarith_compare_bits = ledger.compare_bits - ledger.arith_compare_bits
    nonarith_write_bt = ledger.write_bit_tagged - ledger.arith_write_bit_tagged
    # reduction latency depends on the row count; re-derive it
    red_cycles = ledger.reduction_passes * reduction_latency(rows)
    nonarith_cycles = nonarith_cycles - ledger.cycles["reduction"] + red_cycles

    if fp_mode == "fixed":
        arith_cycles = ledger.arith_cycles
        arith_energy = (ledger.arith_compare_bits * rows * config.e_compare_per_bit
                        + ledger.arith_write_bit_tagged * row_scale * config.e_write_per_bit)
    else:
        arith_cycles = sum(_fp_cycles_for(kind, config) * n
                           for (kind, _m), n in ledger.arith_ops.items())
        # modeled energy of floating-point microcode: half the cycles are
        # compares over all rows, half are writes over a tagged fraction
        mb = config.fp_energy_masked_bits
        frac = config.fp_energy_tagged_fraction
        arith_energy = sum(
            n * (_fp_cycles_for(kind, config) / 2)
            * (mb * rows * config.e_compare_per_bit
               + mb * rows * frac * config.e_write_per_bit)
            for (kind, _m), n in ledger.arith_ops.items())

    cycles = nonarith_cycles + arith_cycles
    if cycles <= 0:
        raise ReportError("run charged zero cycles")
    energy = (nonarith_compare_bits * rows * config.e_compare_per_bit
              + nonarith_write_bt * row_scale * config.e_write_per_bit
              + arith_energy)
    if energy <= 0:
        raise ReportError("run charged zero energy; power efficiency undefined")

    runtime = cycles / config.clock_hz
    perf = dataset.ops / runtime
    ai = kernel_ai(kernel)
    power = energy / runtime
    baselines = []
    for bw in config.baseline_bw_bytes_per_s:
        att = attainable_perf(config.peak_perf, ai, bw)
        baselines.append({"bw_bytes_per_s": bw, "attainable": att,
                          "speedup": perf / att})
    return KernelReport(
        kernel=kernel,
        dataset=dataset.name,
        dataset_bytes=dataset.bytes,
        dataset_meta=dict(dataset.meta),
        fp_mode=fp_mode,
        rows=rows,
        cycles=cycles,
        runtime_s=runtime,
        energy_j=energy,
        ops=dataset.ops,
        op_unit=KERNEL_OP_UNIT.get(kernel, "OP"),
        perf_ops_per_s=perf,
        ai=ai,
        throughput_bytes_per_s=throughput(dataset.bytes, runtime),
        power_w=power,
        power_efficiency_per_w=perf / power,
        internal_bw_bytes_per_s=rows * config.clock_hz / 8,
        baselines=baselines,
    )
