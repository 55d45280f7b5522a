"""Word-parallel, bit-serial vector arithmetic built from compare/write passes.

Every arithmetic primitive is a sequence of truth-table entries broadcast by
the controller: one compare tags the rows whose input bits match the entry,
one write stores the entry's output bits into the tagged rows.  An m-bit
add or subtract is m single-bit steps of the 8-entry full-adder (or full-
subtractor) table: 8m compares + 8m writes regardless of the row count.
An m-bit multiply is m conditional-add passes (the multiplier bit joins the
table input and only entries with that bit set exist), for exactly m times
the add's charge.

Hazards: the public :func:`exec_truth_table` requires disjoint input and
output columns, which makes entry order irrelevant.  The adder reads its
carry from one column and writes the other, swapping roles every bit.  The
multiplier necessarily accumulates in place; it uses a fixed entry order
plus a carry-in column rewrite chosen so that a row transformed by one
entry can never match a later entry of the same step (see _COND_ADD_SEQ).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import HazardError, LayoutError
from .rcam import FieldSpec, RcamArray


def _bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


@dataclass(frozen=True)
class TruthTable:
    """Ordered (input pattern, output pattern) entries of a Boolean function.

    Patterns are bit tuples aligned with the field lists passed at execution
    time (first tuple element = first field).  Input patterns must be
    distinct; a table with 2^inputs entries is complete and transforms every
    row, a partial table leaves non-matching rows unchanged.
    """

    inputs: int
    outputs: int
    entries: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self):
        seen = set()
        if len(self.entries) > (1 << self.inputs):
            raise ValueError("more entries than distinct input patterns")
        for inp, out in self.entries:
            if len(inp) != self.inputs or len(out) != self.outputs:
                raise ValueError("pattern width does not match table arity")
            if any(b not in (0, 1) for b in inp + out):
                raise ValueError("patterns must be bits")
            if inp in seen:
                raise ValueError(f"duplicate input pattern {inp}")
            seen.add(inp)

    @property
    def complete(self) -> bool:
        return len(self.entries) == (1 << self.inputs)

    @classmethod
    def from_function(cls, n_in: int, n_out: int,
                      fn: Callable[[tuple[int, ...]], tuple[int, ...]]) -> "TruthTable":
        entries = []
        for v in range(1 << n_in):
            inp = tuple((v >> (n_in - 1 - i)) & 1 for i in range(n_in))
            entries.append((inp, tuple(fn(inp))))
        return cls(n_in, n_out, tuple(entries))


def _full_adder(inp):
    c, a, b = inp
    s = a ^ b ^ c
    cout = (a & b) | (a & c) | (b & c)
    return (cout, s)


def _full_subtractor(inp):
    w, a, b = inp
    d = a ^ b ^ w
    wout = ((1 - a) & b) | ((1 - a) & w) | (b & w)
    return (wout, d)


#: (carry_in, a, b) -> (carry_out, sum)
FULL_ADDER = TruthTable.from_function(3, 2, _full_adder)
#: (borrow_in, a, b) -> (borrow_out, difference)
FULL_SUBTRACTOR = TruthTable.from_function(3, 2, _full_subtractor)


def _field_columns(fields: Sequence[FieldSpec]) -> list[int]:
    cols: list[int] = []
    for f in fields:
        cols.extend(f.columns)
    return cols


def exec_truth_table(array: RcamArray, table: TruthTable,
                     in_fields: Sequence[FieldSpec],
                     out_fields: Sequence[FieldSpec]) -> None:
    """Apply `table` to every row: per entry, one compare then one write.

    Entries execute in ascending input-pattern order; with the enforced
    disjoint input/output columns the order is observationally irrelevant.
    Rows matching no entry are unchanged.
    """
    in_cols = _field_columns(in_fields)
    out_cols = _field_columns(out_fields)
    if len(in_cols) != table.inputs or len(out_cols) != table.outputs:
        raise ValueError("field widths do not match table arity")
    if set(in_cols) & set(out_cols):
        raise HazardError("truth-table input and output columns overlap")
    for inp, out in sorted(table.entries, key=lambda e: _bits_to_int(e[0])):
        array.compare_bits(list(zip(in_cols, inp)))
        array.write_bits(list(zip(out_cols, out)))


class LayoutBuilder:
    """Sequential bit-column allocator for building row layouts."""

    def __init__(self):
        self._next = 0
        self.fields: dict[str, FieldSpec] = {}

    def field(self, name: str, bits: int) -> FieldSpec:
        if bits < 1:
            raise LayoutError(f"field {name!r} needs at least one bit")
        if name in self.fields:
            raise LayoutError(f"duplicate field {name!r}")
        f = FieldSpec(name, self._next, self._next + bits - 1)
        self._next += bits
        self.fields[name] = f
        return f

    @property
    def width(self) -> int:
        return self._next


@dataclass
class VectorLayout:
    """Field binding for the vector arithmetic primitives.

    ``a``/``b`` are the m-bit operands, ``s`` the add/sub result, ``carry``
    a pair of one-bit columns with roles swapped every bit step.  Multiplies
    additionally need ``product`` (2m bits, zeroed) and ``mult_carry``
    (2m bits, zeroed; each pass consumes a fresh pair so no mid-run carry
    reset is ever needed).  ``zero`` names a column that is never written
    and reads as 0; operands narrower than a target are zero-extended
    through it.
    """

    a: FieldSpec
    b: FieldSpec
    s: FieldSpec | None = None
    carry: tuple[FieldSpec, FieldSpec] | None = None
    product: FieldSpec | None = None
    mult_carry: FieldSpec | None = None
    zero: FieldSpec | None = None

    def __post_init__(self):
        used: set[int] = set()
        for f in self._present():
            cols = set(f.columns)
            if used & cols and f is not self.b:  # b may alias a (squaring)
                raise LayoutError(f"layout field {f.name!r} overlaps another field")
            used |= cols

    def _present(self):
        out = [self.a, self.b]
        if self.s is not None:
            out.append(self.s)
        if self.carry is not None:
            out.extend(self.carry)
        if self.product is not None:
            out.append(self.product)
        if self.mult_carry is not None:
            out.append(self.mult_carry)
        if self.zero is not None:
            out.append(self.zero)
        return out

    @classmethod
    def packed(cls, m: int, for_mult: bool = False) -> "VectorLayout":
        """Standard dense layout starting at column 0."""
        lb = LayoutBuilder()
        a = lb.field("a", m)
        b = lb.field("b", m)
        kw: dict = {}
        if for_mult:
            kw["product"] = lb.field("product", 2 * m)
            kw["mult_carry"] = lb.field("mult_carry", 2 * m)
        else:
            kw["s"] = lb.field("s", m)
            kw["carry"] = (lb.field("c0", 1), lb.field("c1", 1))
        kw["zero"] = lb.field("zero", 1)
        return cls(a, b, **kw)


def _cols(f: FieldSpec) -> list[int]:
    return list(f.columns)


def _extend(cols: list[int], m: int, zero: FieldSpec | None) -> list[int]:
    if len(cols) == m:
        return cols
    if len(cols) > m:
        raise LayoutError(f"operand of {len(cols)} bits does not fit width {m}")
    if zero is None:
        raise LayoutError("zero-extension requires a zero column in the layout")
    return cols + [zero.lo] * (m - len(cols))


def _ripple(array: RcamArray, table: TruthTable, a_cols, b_cols, s_cols, carry):
    """m bit-steps of a 3-in/2-out table with alternating carry columns."""
    c0, c1 = carry[0].lo, carry[1].lo
    m = len(s_cols)
    for i in range(m):
        cin, cout = (c0, c1) if i % 2 == 0 else (c1, c0)
        for inp, out in table.entries:
            array.compare_bits([(cin, inp[0]), (a_cols[i], inp[1]), (b_cols[i], inp[2])])
            array.write_bits([(cout, out[0]), (s_cols[i], out[1])])
    return carry[1] if m % 2 == 1 else carry[0]


def _check_addsub(layout: VectorLayout, m: int):
    if layout.s is None or layout.carry is None:
        raise LayoutError("add/sub needs s and carry fields")
    if layout.s.width != m:
        raise LayoutError(f"result field is {layout.s.width} bits, expected {m}")
    if layout.carry[0].width != 1 or layout.carry[1].width != 1:
        raise LayoutError("carry fields must be single bits")


def vec_add(array: RcamArray, layout: VectorLayout, m: int | None = None) -> FieldSpec:
    """s = (a + b) mod 2^m in every row; returns the final-carry field.

    Carry columns must be zero on entry (caller-initialized).  Charges
    exactly 8m compares and 8m writes.
    """
    m = m or layout.s.width if layout.s else layout.a.width
    _check_addsub(layout, m)
    a = _extend(_cols(layout.a), m, layout.zero)
    b = _extend(_cols(layout.b), m, layout.zero)
    array.ledger.arith_begin()
    out = _ripple(array, FULL_ADDER, a, b, _cols(layout.s), layout.carry)
    array.ledger.arith_end("add", m)
    return out


def vec_sub(array: RcamArray, layout: VectorLayout, m: int | None = None) -> FieldSpec:
    """s = (a - b) mod 2^m in every row; returns the final-borrow field."""
    m = m or layout.s.width if layout.s else layout.a.width
    _check_addsub(layout, m)
    a = _extend(_cols(layout.a), m, layout.zero)
    b = _extend(_cols(layout.b), m, layout.zero)
    array.ledger.arith_begin()
    out = _ripple(array, FULL_SUBTRACTOR, a, b, _cols(layout.s), layout.carry)
    array.ledger.arith_end("sub", m)
    return out


# Conditional-add step entries: ((carry_in, a, product), carry_out, product',
# carry_in_rewrite).  The product bit is both compared and rewritten, which
# is only sound because of the fixed order below: after an entry writes a
# row, the row's (rewritten carry_in, a, product') state matches no entry
# that executes later, so no row is transformed twice in one step.
_COND_ADD_SEQ = (
    ((0, 0, 0), 0, 0, 0),
    ((0, 0, 1), 0, 1, 0),
    ((1, 0, 0), 0, 1, 0),
    ((1, 0, 1), 1, 0, 0),
    ((1, 1, 0), 1, 0, 1),
    ((1, 1, 1), 1, 1, 1),
    ((0, 1, 0), 0, 1, 1),
    ((0, 1, 1), 1, 0, 1),
)


def vec_mult(array: RcamArray, layout: VectorLayout, m: int | None = None,
             _kind: str = "mult") -> None:
    """product = a * b, the exact unsigned 2m-bit result, in every row.

    One conditional-add pass per multiplier bit j: within the pass, bit
    step i full-adds a_i into product bit j+i for the rows whose b_j is 1
    (8 gated entries; rows with b_j = 0 match nothing and keep their
    partial sum).  The last step of a pass deposits its carry-out directly
    into product bit j+m, which is provably still zero.  Each pass draws a
    fresh pair of carry columns from ``mult_carry``, so carries never need
    an explicit reset.  The product and mult_carry fields must be zero on
    entry.  Charges exactly 8m^2 compares and 8m^2 writes: m times the
    vec_add charge.
    """
    m = m or layout.a.width
    if layout.product is None or layout.mult_carry is None:
        raise LayoutError("mult needs product and mult_carry fields")
    if layout.product.width < 2 * m:
        raise LayoutError(f"product field needs {2 * m} bits, has {layout.product.width}")
    if layout.mult_carry.width < 2 * m:
        raise LayoutError(f"mult_carry field needs {2 * m} bits, has {layout.mult_carry.width}")
    a_cols = _extend(_cols(layout.a), m, layout.zero)
    b_cols = _extend(_cols(layout.b), m, layout.zero)
    p_cols = _cols(layout.product)
    k_cols = _cols(layout.mult_carry)
    array.ledger.arith_begin()
    for j in range(m):
        kc = (k_cols[2 * j], k_cols[2 * j + 1])
        for i in range(m):
            cin = kc[i % 2]
            cout = p_cols[j + m] if i == m - 1 else kc[(i + 1) % 2]
            p = p_cols[j + i]
            for (c, a, pb), co, pp, rewrite in _COND_ADD_SEQ:
                array.compare_bits([(b_cols[j], 1), (cin, c), (a_cols[i], a), (p, pb)])
                array.write_bits([(cout, co), (p, pp), (cin, rewrite)])
    array.ledger.arith_end(_kind, m)


def vec_square(array: RcamArray, layout: VectorLayout, m: int | None = None) -> None:
    """product = a * a with both operands aliased read-only; same cost as
    vec_mult.  (When the multiplier and addend bit coincide, entries whose
    two requirements on that column conflict simply match no row.)"""
    aliased = VectorLayout(a=layout.a, b=layout.a, product=layout.product,
                           mult_carry=layout.mult_carry, zero=layout.zero)
    vec_mult(array, aliased, m or layout.a.width, _kind="square")


def broadcast_write(array: RcamArray, fld: FieldSpec, value: int) -> None:
    """Write a value into a field of ALL rows: a vacuous compare sets every
    tag, then one write."""
    array.compare(0, [])
    array.write(value, [fld])


# -- cycle-cost formulas (mirrors of the charges above, for analytic models)


def addsub_cycles(m: int, write_cycles: int = 1) -> int:
    return 8 * m + 8 * m * write_cycles


def mult_cycles(m: int, write_cycles: int = 1) -> int:
    return m * addsub_cycles(m, write_cycles)


def broadcast_cycles(write_cycles: int = 1) -> int:
    return 1 + write_cycles
