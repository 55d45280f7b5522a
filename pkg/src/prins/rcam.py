"""Bit-exact model of the associative storage array.

The array is ``rows`` x ``width`` single bits plus peripheral state: a key
register, a mask register and one tag latch per row.  A compare matches the
key against the masked bit columns of every row at once and latches the
result into the tags; a write stores the key's masked bits into every tagged
row; tag logic supplies ``first_match``/``if_match``, a daisy-chain tag
shift and a logarithmic reduction tree (tag popcount and bit-weighted field
sums).

Cell state is stored column-major as packed 64-bit planes, one plane per bit
column, so whole-array operations cost O(masked_bits * rows/64) word ops
while remaining bit-identical to the per-row definition.  Operations execute
atomically and sequentially in instruction order; distinct arrays are
independent.

Key convention: a multi-field key/value is an unsigned integer laid across
the field list with the *first* field holding the most significant bits;
within one field, bit column ``lo`` is the least significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundsError, EmptySelectionError
from .perfmodel import CycleEnergyLedger, ModelConfig

_ONE = np.uint64(1)
_SIX3 = np.uint64(63)


@dataclass(frozen=True)
class FieldSpec:
    """A named contiguous bit-column range [lo, hi], inclusive."""

    name: str
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi):
            raise BoundsError(f"field {self.name!r}: invalid range [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @property
    def columns(self) -> range:
        """Bit columns lo..hi, least significant first."""
        return range(self.lo, self.hi + 1)


def _pack_bool(bits: np.ndarray, n_words: int) -> np.ndarray:
    packed = np.packbits(np.ascontiguousarray(bits, dtype=np.uint8), bitorder="little")
    out = np.zeros(n_words * 8, dtype=np.uint8)
    out[: packed.size] = packed
    return out.view(np.uint64)


def _unpack_words(words: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n]


class TagVector:
    """Immutable snapshot of the per-row tag latches."""

    __slots__ = ("_words", "n")

    def __init__(self, words: np.ndarray, n: int):
        self._words = words
        self.n = n

    @classmethod
    def from_bools(cls, bits: Sequence[int]) -> "TagVector":
        arr = np.asarray(bits, dtype=np.uint8)
        n_words = max(1, -(-arr.size // 64))
        return cls(_pack_bool(arr, n_words), arr.size)

    def to_array(self) -> np.ndarray:
        return _unpack_words(self._words, self.n).astype(bool)

    def popcount(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def any(self) -> bool:
        return bool(self._words.any())

    def __getitem__(self, r: int) -> int:
        return int((self._words[r >> 6] >> np.uint64(r & 63)) & _ONE)

    def __eq__(self, other) -> bool:
        if isinstance(other, TagVector):
            return self.n == other.n and bool(np.array_equal(self._words, other._words))
        return NotImplemented

    def __repr__(self):
        return f"TagVector(n={self.n}, set={self.popcount()})"


class RcamArray:
    """The simulated associative array plus its instruction ledger."""

    def __init__(self, rows: int, width: int, module_size: int = 1 << 20,
                 config: ModelConfig | None = None,
                 ledger: CycleEnergyLedger | None = None):
        if rows < 1 or width < 1:
            raise BoundsError(f"array geometry {rows}x{width} is invalid")
        self.rows = rows
        self.width = width
        self.module_size = module_size  # accounting metadata only
        self.config = config or (ledger.config if ledger else ModelConfig())
        self.ledger = ledger or CycleEnergyLedger(self.config)
        self._n_words = -(-rows // 64)
        self.cells = np.zeros((width, self._n_words), dtype=np.uint64)
        self._tags = np.zeros(self._n_words, dtype=np.uint64)
        self._row_mask = np.zeros(self._n_words, dtype=np.uint64)
        mask_bits = np.ones(rows, dtype=np.uint8)
        self._row_mask[:] = _pack_bool(mask_bits, self._n_words)
        # peripheral registers, kept for inspection
        self.key = np.zeros(width, dtype=np.uint8)
        self.mask = np.zeros(width, dtype=np.uint8)

    # -- field plumbing ----------------------------------------------------

    def _check_field(self, f: FieldSpec):
        if f.hi >= self.width:
            raise BoundsError(f"field {f.name!r} [{f.lo}, {f.hi}] exceeds row width {self.width}")

    def field_pairs(self, key_value: int, fields: Sequence[FieldSpec]) -> list[tuple[int, int]]:
        """Resolve a key against a field list into (column, bit) pairs."""
        total = 0
        for f in fields:
            self._check_field(f)
            total += f.width
        if key_value < 0 or key_value >= (1 << total if total else 1):
            raise ValueError(f"key {key_value} does not fit in {total} masked bits")
        pairs = []
        shift = total
        for f in fields:
            shift -= f.width
            chunk = (key_value >> shift) & ((1 << f.width) - 1)
            for i, col in enumerate(f.columns):
                pairs.append((col, (chunk >> i) & 1))
        return pairs

    def _set_registers(self, pairs: Iterable[tuple[int, int]]):
        self.mask[:] = 0
        for col, bit in pairs:
            self.mask[col] = 1
            self.key[col] = bit

    # -- associative instruction set ---------------------------------------

    def compare(self, key_value: int, fields: Sequence[FieldSpec]) -> TagVector:
        """Match the key against masked columns of every row; latch tags.

        An empty field list masks nothing, so every row matches vacuously.
        Duplicate columns are conjunctive: conflicting required bits match
        no row.
        """
        return self.compare_bits(self.field_pairs(key_value, fields))

    def compare_bits(self, pairs: Sequence[tuple[int, int]]) -> TagVector:
        """Column-level compare; `pairs` are (column, required bit)."""
        self._set_registers(pairs)
        t = self._row_mask.copy()
        for col, bit in pairs:
            plane = self.cells[col]
            t &= plane if bit else ~plane
        t &= self._row_mask
        self._tags = t
        self.ledger.charge_compare(len(pairs), self.rows)
        return TagVector(t.copy(), self.rows)

    def write(self, key_value: int, fields: Sequence[FieldSpec]) -> None:
        """Store the key's masked bits into every tagged row."""
        self.write_bits(self.field_pairs(key_value, fields))

    def write_bits(self, pairs: Sequence[tuple[int, int]]) -> None:
        """Column-level write. Duplicate columns apply in order (last wins)."""
        self._set_registers(pairs)
        tags = self._tags
        tagged = int(np.bitwise_count(tags).sum())
        for col, bit in pairs:
            if bit:
                self.cells[col] |= tags
            else:
                self.cells[col] &= ~tags
        self.ledger.charge_write(len(pairs), tagged, self.rows)

    def read(self, fields: Sequence[FieldSpec]) -> int:
        """Read masked fields from the lowest-index tagged row.

        Multiple tagged rows are legal; the lowest index wins, matching
        first_match priority.
        """
        nz = np.nonzero(self._tags)[0]
        if nz.size == 0:
            raise EmptySelectionError("read with no tagged row")
        wi = int(nz[0])
        word = int(self._tags[wi])
        bit = (word & -word).bit_length() - 1
        pairs = self.field_pairs(0, fields)  # bounds-check + register setup
        self._set_registers(pairs)
        value = 0
        for f in fields:
            cols = np.fromiter(f.columns, dtype=np.int64)
            bits = (self.cells[cols, wi] >> np.uint64(bit)) & _ONE
            chunk = 0
            for i, b in enumerate(bits):
                chunk |= int(b) << i
            value = (value << f.width) | chunk
        self.ledger.charge_read(sum(f.width for f in fields), self.rows)
        return value

    def first_match(self) -> None:
        """Keep only the lowest-index set tag; no-op when no tag is set."""
        nz = np.nonzero(self._tags)[0]
        if nz.size:
            wi = int(nz[0])
            word = int(self._tags[wi])
            keep = np.uint64(word & -word)
            self._tags[:] = 0
            self._tags[wi] = keep
        self.ledger.charge_tag_op("first_match", self.rows)

    def if_match(self) -> bool:
        """True when at least one tag is set."""
        self.ledger.charge_tag_op("if_match", self.rows)
        return bool(self._tags.any())

    def reduce_popcount(self) -> int:
        """Count set tags through the reduction tree (one tree pass)."""
        self.ledger.charge_reduction(1, self.rows)
        return int(np.bitwise_count(self._tags).sum())

    def reduce_field_sum(self, field: FieldSpec) -> int:
        """Sum the unsigned field value over all tagged rows.

        One reduction-tree pass per field bit, each summing one masked
        column gated by the tags; the controller weights the pass results
        by powers of two.
        """
        self._check_field(field)
        total = 0
        for i, col in enumerate(field.columns):
            total += int(np.bitwise_count(self.cells[col] & self._tags).sum()) << i
        self.ledger.charge_reduction(field.width, self.rows)
        return total

    def shift_tags(self, direction: str) -> None:
        """Shift the tag vector one row ``"down"`` (toward higher indices)
        or ``"up"``; the vacated end fills with zero.  The daisy chain
        crosses module boundaries transparently."""
        w = self._tags
        if direction == "down":
            out = (w << _ONE) & ~np.uint64(0)
            out[1:] |= w[:-1] >> _SIX3
        elif direction == "up":
            out = w >> _ONE
            out[:-1] |= (w[1:] & _ONE) << _SIX3
        else:
            raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
        self._tags = out & self._row_mask
        self.ledger.charge_tag_op("shift", self.rows)

    # -- tag inspection ------------------------------------------------------

    def tag_vector(self) -> TagVector:
        return TagVector(self._tags.copy(), self.rows)

    def tags_array(self) -> np.ndarray:
        return _unpack_words(self._tags, self.rows).astype(bool)

    def set_tags(self, bits: Sequence[int]) -> None:
        """Directly load the tag latches (test/initialization plumbing)."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size != self.rows:
            raise BoundsError(f"tag vector length {arr.size} != rows {self.rows}")
        self._tags = _pack_bool(arr, self._n_words) & self._row_mask

    # -- direct load/dump (bypasses the associative path; charges nothing) --

    def load_rows(self, row_index: int, field: FieldSpec, value: int) -> None:
        self._check_field(field)
        if not (0 <= row_index < self.rows):
            raise BoundsError(f"row {row_index} out of range")
        if value < 0 or value >= (1 << field.width):
            raise ValueError(f"value {value} does not fit field {field.name!r}")
        wi, bit = row_index >> 6, np.uint64(row_index & 63)
        for i, col in enumerate(field.columns):
            if (value >> i) & 1:
                self.cells[col, wi] |= _ONE << bit
            else:
                self.cells[col, wi] &= ~(_ONE << bit)

    def load_field(self, field: FieldSpec, values: np.ndarray) -> None:
        """Bulk-load one value per row into a field."""
        self._check_field(field)
        vals = np.asarray(values, dtype=np.uint64)
        if vals.shape != (self.rows,):
            raise BoundsError(f"expected {self.rows} values, got {vals.shape}")
        if field.width < 64 and int(vals.max(initial=0)) >= (1 << field.width):
            raise ValueError(f"values overflow field {field.name!r}")
        for i, col in enumerate(field.columns):
            bits = (vals >> np.uint64(i)) & _ONE
            self.cells[col] = _pack_bool(bits, self._n_words)

    def dump_field(self, field: FieldSpec) -> np.ndarray:
        """Per-row unsigned value of a field.

        Fields up to 64 bits dump as uint64; wider fields fall back to an
        object array of Python ints.
        """
        self._check_field(field)
        if field.width <= 64:
            out = np.zeros(self.rows, dtype=np.uint64)
            for i, col in enumerate(field.columns):
                out |= _unpack_words(self.cells[col], self.rows).astype(np.uint64) << np.uint64(i)
            return out
        total = np.zeros(self.rows, dtype=object)
        for base in range(field.lo, field.hi + 1, 64):
            chunk = FieldSpec(field.name, base, min(base + 63, field.hi))
            part = self.dump_field(chunk).astype(object)
            total += part << (base - field.lo)
        return total

    def dump_rows(self) -> list[int]:
        """Whole rows as integers, bit column 0 least significant."""
        planes = np.vstack([_unpack_words(self.cells[c], self.rows)
                            for c in range(self.width)])
        return [int(sum(1 << c for c in np.nonzero(planes[:, r])[0])) for r in range(self.rows)]

    def snapshot_cells(self) -> np.ndarray:
        return self.cells.copy()
