"""Exact sparse linear algebra over Q.

Vectors are plain ``dict[int, Fraction]`` with no zero entries stored.
Matrix elimination is fraction-free: rows are scaled to primitive integer
vectors and combined as ``b*r - a*p`` followed by content reduction, so
no rational arithmetic happens inside the elimination loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Tuple

Vector = Dict[int, Fraction]


def _clean(vec: Mapping[int, Fraction]) -> Vector:
    return {k: Fraction(v) for k, v in vec.items() if v != 0}


def _primitive(row: Mapping[int, Fraction]) -> Dict[int, int]:
    """Scale a rational row to a primitive integer row with the same span."""
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {k: int(Fraction(v) * den) for k, v in row.items() if v != 0}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    if g > 1:
        out = {k: v // g for k, v in out.items()}
    return out


def _combine(r: Dict[int, int], p: Dict[int, int], col: int) -> Dict[int, int]:
    # r <- b*r - a*p, which clears column `col`; then strip content
    a, b = r[col], p[col]
    out = {k: b * v for k, v in r.items()}
    for k, v in p.items():
        w = out.get(k, 0) - a * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    g = 0
    for v in out.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        out = {k: v // g for k, v in out.items()}
    return out


def _rref(rows: Iterable[Mapping[int, Fraction]]) -> List[Tuple[int, Dict[int, int]]]:
    """Reduced row echelon form as a list of (pivot column, integer row)."""
    echelon: List[Tuple[int, Dict[int, int]]] = []
    for row in rows:
        r = _primitive(row)
        for col, p in echelon:
            if col in r:
                r = _combine(r, p, col)
        if r:
            echelon.append((min(r), r))
    for i in range(len(echelon) - 1, -1, -1):
        col, p = echelon[i]
        for j in range(i):
            cj, rj = echelon[j]
            if col in rj:
                echelon[j] = (cj, _combine(rj, p, col))
    for i, (col, r) in enumerate(echelon):
        if r[col] < 0:
            echelon[i] = (col, {k: -v for k, v in r.items()})
    return echelon


@dataclass(frozen=True)
class QMatrix:
    """Sparse matrix with exact rational entries, stored by rows."""

    nrows: int
    ncols: int
    rows: Dict[int, Vector] = field(default_factory=dict)

    def __post_init__(self):
        for i, row in self.rows.items():
            if not 0 <= i < self.nrows:
                raise IndexError(f"row index {i} out of range")
            for j in row:
                if not 0 <= j < self.ncols:
                    raise IndexError(f"column index {j} out of range")

    @classmethod
    def from_dense(cls, data: List[List]) -> "QMatrix":
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        rows = {}
        for i, line in enumerate(data):
            row = _clean(dict(enumerate(line)))
            if row:
                rows[i] = row
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: List[Mapping[int, Fraction]]) -> "QMatrix":
        rows: Dict[int, Vector] = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows.setdefault(i, {})[j] = Fraction(v)
        return cls(nrows, len(columns), rows)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls(nrows, ncols, {})

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows.get(i, {}).get(j, Fraction(0))

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def column(self, j: int) -> Vector:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [dict() for _ in range(self.ncols)]
        for i, row in self.rows.items():
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def transpose(self) -> "QMatrix":
        return QMatrix(self.ncols, self.nrows, {j: c for j, c in enumerate(self.columns()) if c})

    def apply(self, vec: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for i, row in self.rows.items():
            s = sum((v * vec[j] for j, v in row.items() if j in vec), Fraction(0))
            if s:
                out[i] = s
        return out

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        rows = {}
        for i, row in self.rows.items():
            acc: Vector = {}
            for k, a in row.items():
                for j, b in other.rows.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = _clean(acc)
            if acc:
                rows[i] = acc
        return QMatrix(self.nrows, other.ncols, rows)

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, len(self.rows)))


def rank(m: QMatrix) -> int:
    return len(_rref(m.rows.values()))


def kernel_basis(m: QMatrix) -> List[Vector]:
    """Basis of the null space; one vector per free column, in column order."""
    echelon = _rref(m.rows.values())
    pivots = {col for col, _ in echelon}
    basis = []
    for f in range(m.ncols):
        if f in pivots:
            continue
        v: Vector = {f: Fraction(1)}
        for col, row in echelon:
            if f in row:
                v[col] = -Fraction(row[f], row[col])
        basis.append(v)
    return basis


class NoSolution:
    """Marker returned by :func:`solve` when the system is inconsistent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoSolution"

    def __bool__(self):
        return False


NO_SOLUTION = NoSolution()


def solve(m: QMatrix, b: Mapping[int, Fraction]):
    """Some x with ``m x = b`` (free variables set to 0), else ``NO_SOLUTION``."""
    for i in b:
        if not 0 <= i < m.nrows:
            raise IndexError(f"right-hand side index {i} out of range")
    aug = m.ncols
    rows = []
    for i in set(m.rows) | {i for i, v in b.items() if v}:
        row = dict(m.rows.get(i, {}))
        if b.get(i):
            row[aug] = Fraction(b[i])
        rows.append(row)
    x: Vector = {}
    for col, row in _rref(rows):
        if col == aug:
            return NO_SOLUTION
        if aug in row:
            x[col] = Fraction(row[aug], row[col])
    return x


class Span:
    """Incrementally built subspace of Q^n in semi-echelon form.

    With ``track=True`` every stored row remembers how it was combined from
    the tagged input vectors, which lets :meth:`coordinates` express a member
    in terms of those inputs.
    """

    def __init__(self, vectors: Iterable[Mapping[int, Fraction]] = (), track: bool = False):
        self.track = track
        self._rows: List[Tuple[int, Vector, Dict[Hashable, Fraction]]] = []
        self._pivots: Dict[int, int] = {}
        for i, v in enumerate(vectors):
            self.add(v, tag=i)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> List[int]:
        return [p for p, _, _ in self._rows]

    def _reduce(self, vec: Mapping[int, Fraction]):
        rem = _clean(vec)
        combo: Dict[Hashable, Fraction] = {}
        for pivot, row, rc in self._rows:
            c = rem.get(pivot)
            if not c:
                continue
            for k, v in row.items():
                w = rem.get(k, 0) - c * v
                if w:
                    rem[k] = w
                else:
                    rem.pop(k, None)
            if self.track:
                for t, v in rc.items():
                    w = combo.get(t, 0) + c * v
                    if w:
                        combo[t] = w
                    else:
                        combo.pop(t, None)
        return rem, combo

    def reduce(self, vec: Mapping[int, Fraction]) -> Vector:
        """Remainder of ``vec``; it vanishes on every pivot column."""
        return self._reduce(vec)[0]

    def add(self, vec: Mapping[int, Fraction], tag: Hashable = None) -> bool:
        """Insert a vector; returns False when it was already in the span."""
        rem, combo = self._reduce(vec)
        if not rem:
            return False
        pivot = min(rem)
        lead = rem[pivot]
        row = {k: v / lead for k, v in rem.items()}
        rc: Dict[Hashable, Fraction] = {}
        if self.track:
            rc = {t: -v / lead for t, v in combo.items()}
            rc[tag] = rc.get(tag, 0) + 1 / lead
            rc = {t: v for t, v in rc.items() if v}
        self._pivots[pivot] = len(self._rows)
        self._rows.append((pivot, row, rc))
        return True

    def __contains__(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: Mapping[int, Fraction]) -> Optional[Dict[Hashable, Fraction]]:
        if not self.track:
            raise ValueError("span was built without coordinate tracking")
        rem, combo = self._reduce(vec)
        if rem:
            return None
        return combo

    def basis(self) -> List[Vector]:
        return [dict(row) for _, row, _ in self._rows]


def membership(vec: Mapping[int, Fraction], basis: List[Mapping[int, Fraction]]):
    """Decide ``vec in span(basis)``; coordinates returned when it is.

    The coordinates are w.r.t. the given list; dependent list entries get 0.
    """
    span = Span(track=True)
    for i, b in enumerate(basis):
        span.add(b, tag=i)
    coords = span.coordinates(vec)
    if coords is None:
        return False, None
    return True, [coords.get(i, Fraction(0)) for i in range(len(basis))]


def vec_add(a: Mapping[int, Fraction], b: Mapping[int, Fraction], scale: Fraction = Fraction(1)) -> Vector:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + scale * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def vec_scale(a: Mapping[int, Fraction], c) -> Vector:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}
