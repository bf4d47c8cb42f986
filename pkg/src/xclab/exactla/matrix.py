"""Exact rational matrices.

Scalars are fractions.Fraction throughout: the stdlib type already keeps
numerator and denominator coprime with a positive denominator, which is
exactly the canonical form we need.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from ..errors import InputError

Rational = Fraction


def rat(value: int | str | Fraction) -> Fraction:
    """Coerce an int, `p/q` string, or Fraction to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational token {value!r}") from exc
    raise InputError(f"not a rational scalar: {value!r}")


def format_rational(q: Fraction) -> str:
    """`p` for integers, `p/q` otherwise.  Inverse of rat() for strings."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class ExactMatrix:
    """Immutable dense matrix over Fraction, row-major."""

    __slots__ = ("_rows", "_nrows", "_ncols")

    def __init__(self, rows: Iterable[Sequence[int | str | Fraction]]):
        data = tuple(tuple(rat(x) for x in row) for row in rows)
        if not data:
            raise InputError("matrix needs at least one row")
        width = len(data[0])
        if width == 0:
            raise InputError("matrix needs at least one column")
        if any(len(row) != width for row in data):
            raise InputError("ragged rows: all matrix rows must have equal length")
        self._rows = data
        self._nrows = len(data)
        self._ncols = width

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        zero = Fraction(0)
        return cls([[zero] * ncols for _ in range(nrows)])

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    def entry(self, i: int, j: int) -> Fraction:
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self._rows))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExactMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"ExactMatrix({self._nrows}x{self._ncols})"

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self._ncols != other._nrows:
            raise InputError(
                f"matmul shape mismatch: {self.shape} @ {other.shape}"
            )
        cols = other.transpose()._rows
        zero = Fraction(0)
        out = []
        for arow in self._rows:
            out.append(
                [
                    sum((a * b for a, b in zip(arow, bcol) if a and b), zero)
                    for bcol in cols
                ]
            )
        return ExactMatrix(out)

    def scaled(self, factor: int | str | Fraction) -> "ExactMatrix":
        f = rat(factor)
        return ExactMatrix([[f * x for x in row] for row in self._rows])

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self._nrows != other._nrows:
            raise InputError("hstack needs equal row counts")
        return ExactMatrix([a + b for a, b in zip(self._rows, other._rows)])

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self._ncols != other._ncols:
            raise InputError("vstack needs equal column counts")
        return ExactMatrix(self._rows + other._rows)

    def max_norm(self) -> Fraction:
        """Entrywise infinity norm: max |entry|."""
        return max(abs(x) for row in self._rows for x in row)

    def frobenius(self, other: "ExactMatrix") -> Fraction:
        """Entrywise inner product sum_ij A_ij * B_ij."""
        if self.shape != other.shape:
            raise InputError(
                f"frobenius shape mismatch: {self.shape} vs {other.shape}"
            )
        total = Fraction(0)
        for arow, brow in zip(self._rows, other._rows):
            for a, b in zip(arow, brow):
                if a and b:
                    total += a * b
        return total

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for row in self._rows for x in row)

    def to_text(self) -> str:
        lines = [f"{self._nrows} {self._ncols}"]
        for row in self._rows:
            lines.append(" ".join(format_rational(x) for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExactMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InputError("empty matrix text")
        head = lines[0].split()
        if len(head) != 2:
            raise InputError(f"bad matrix header {lines[0]!r}, want 'rows cols'")
        try:
            nrows, ncols = int(head[0]), int(head[1])
        except ValueError as exc:
            raise InputError(f"bad matrix header {lines[0]!r}") from exc
        if len(lines) != nrows + 1:
            raise InputError(
                f"matrix text declares {nrows} rows but has {len(lines) - 1}"
            )
        rows = []
        for ln in lines[1:]:
            toks = ln.split()
            if len(toks) != ncols:
                raise InputError(
                    f"matrix row has {len(toks)} entries, header says {ncols}"
                )
            rows.append([rat(t) for t in toks])
        return cls(rows)


def _integer_rows(m: ExactMatrix) -> list[list[int]]:
    """Scale each row by a positive integer to clear denominators.

    Row scaling by positive factors preserves rank, so this is safe for
    elimination work.
    """
    out = []
    for row in m.rows():
        scale = 1
        for x in row:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        out.append([int(x * scale) for x in row])
    return out


def rank(m: ExactMatrix) -> int:
    """Exact rank via fraction-free (Bareiss) elimination over integers."""
    a = _integer_rows(m)
    nrows, ncols = len(a), len(a[0])
    r = 0
    prev = 1
    for col in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if a[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        piv = a[r][col]
        for i in range(r + 1, nrows):
            ai = a[i]
            ar = a[r]
            f = ai[col]
            if f:
                for j in range(col, ncols):
                    ai[j] = (ai[j] * piv - f * ar[j]) // prev
            else:
                for j in range(col, ncols):
                    ai[j] = (ai[j] * piv) // prev
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def write_matrix(path: str, m: ExactMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(m.to_text())


def read_matrix(path: str) -> ExactMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return ExactMatrix.from_text(fh.read())
