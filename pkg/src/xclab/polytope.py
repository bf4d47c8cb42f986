"""Polytopes with paired H- and V-descriptions, and their slack matrices.

A Polytope carries an inequality system A x <= b, an optional equality
system E x = f, and an explicit vertex list.  Both descriptions are exact;
construction checks that every vertex satisfies the whole system.  The
slack matrix S[i][j] = b_i - A_i . x_j is the bridge to every nonnegative
rank question downstream.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InputError
from .exactla import ExactMatrix, conic_combination, format_rational, lp_solve, rat


@dataclass(frozen=True)
class Polytope:
    ineq_coefs: ExactMatrix
    ineq_rhs: tuple[Fraction, ...]
    eq_coefs: ExactMatrix | None
    eq_rhs: tuple[Fraction, ...]
    vertices: tuple[tuple[Fraction, ...], ...]
    row_labels: tuple[str, ...]
    eq_labels: tuple[str, ...]
    vertex_labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        """Ambient dimension."""
        return self.ineq_coefs.ncols

    @property
    def n_ineqs(self) -> int:
        return self.ineq_coefs.nrows

    @classmethod
    def build(
        cls,
        ineq_coefs,
        ineq_rhs,
        vertices,
        *,
        eq_coefs=None,
        eq_rhs=(),
        row_labels: Sequence[str] | None = None,
        eq_labels: Sequence[str] | None = None,
        vertex_labels: Sequence[str] | None = None,
    ) -> "Polytope":
        """Validating constructor.  Rejects systems any vertex violates and
        zero-dimensional vertex sets (fewer than two distinct points)."""
        a = ineq_coefs if isinstance(ineq_coefs, ExactMatrix) else ExactMatrix(ineq_coefs)
        b = tuple(rat(x) for x in ineq_rhs)
        if len(b) != a.nrows:
            raise InputError(f"{a.nrows} inequality rows but {len(b)} right-hand sides")
        if eq_coefs is None:
            e, f = None, ()
        else:
            e = eq_coefs if isinstance(eq_coefs, ExactMatrix) else ExactMatrix(eq_coefs)
            f = tuple(rat(x) for x in eq_rhs)
            if len(f) != e.nrows:
                raise InputError(f"{e.nrows} equality rows but {len(f)} right-hand sides")
            if e.ncols != a.ncols:
                raise InputError("equality and inequality systems disagree on dimension")
        verts = tuple(tuple(rat(x) for x in v) for v in vertices)
        if any(len(v) != a.ncols for v in verts):
            raise InputError("vertex dimension does not match the constraint system")
        if len(set(verts)) < 2:
            raise InputError("polytope must have dimension >= 1: need two distinct vertices")

        rl = tuple(row_labels) if row_labels is not None else tuple(
            f"row:{i}" for i in range(a.nrows)
        )
        el = tuple(eq_labels) if eq_labels is not None else tuple(
            f"eq:{i}" for i in range(e.nrows if e is not None else 0)
        )
        vl = tuple(vertex_labels) if vertex_labels is not None else tuple(
            f"vertex:{j}" for j in range(len(verts))
        )
        if len(rl) != a.nrows or len(vl) != len(verts):
            raise InputError("label count does not match row or vertex count")
        if e is not None and len(el) != e.nrows:
            raise InputError("equality label count mismatch")

        poly = cls(a, b, e, f, verts, rl, el, vl)
        bad = poly._first_violating_vertex()
        if bad is not None:
            j, why = bad
            raise InputError(f"vertex {j} ({vl[j]}) violates the system: {why}")
        return poly

    def _first_violating_vertex(self) -> tuple[int, str] | None:
        arows = [_sparse(row) for row in self.ineq_coefs.rows()]
        erows = [_sparse(row) for row in self.eq_coefs.rows()] if self.eq_coefs else []
        for j, v in enumerate(self.vertices):
            supp = [(k, x) for k, x in enumerate(v) if x]
            for i, row in enumerate(arows):
                val = sum(row[k] * x for k, x in supp if k in row)
                if val > self.ineq_rhs[i]:
                    return j, f"inequality {i} ({self.row_labels[i]})"
            for i, row in enumerate(erows):
                val = sum(row[k] * x for k, x in supp if k in row)
                if val != self.eq_rhs[i]:
                    return j, f"equality {i} ({self.eq_labels[i]})"
        return None

    def contains(self, point: Sequence) -> bool:
        p = [rat(x) for x in point]
        if len(p) != self.dim:
            raise InputError("point dimension mismatch")
        for row, b in zip(self.ineq_coefs.rows(), self.ineq_rhs):
            if sum(a * x for a, x in zip(row, p) if a) > b:
                return False
        if self.eq_coefs is not None:
            for row, f in zip(self.eq_coefs.rows(), self.eq_rhs):
                if sum(a * x for a, x in zip(row, p) if a) != f:
                    return False
        return True


def _sparse(row: Sequence[Fraction]) -> dict[int, Fraction]:
    return {k: a for k, a in enumerate(row) if a}


@dataclass(frozen=True)
class SlackMatrix:
    matrix: ExactMatrix
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self):
        if self.matrix.nrows != len(self.row_labels):
            raise InputError("slack matrix row label count mismatch")
        if self.matrix.ncols != len(self.col_labels):
            raise InputError("slack matrix column label count mismatch")
        if not self.matrix.is_nonnegative():
            raise InputError("slack matrix has a negative entry")

    @property
    def nrows(self) -> int:
        return self.matrix.nrows

    @property
    def ncols(self) -> int:
        return self.matrix.ncols

    def to_text(self) -> str:
        body = self.matrix.to_text()
        return body + " ".join(self.row_labels) + "\n" + " ".join(self.col_labels) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SlackMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) < 3:
            raise InputError("slack matrix text needs matrix plus two label lines")
        matrix = ExactMatrix.from_text("\n".join(lines[:-2]))
        return cls(matrix, tuple(lines[-2].split()), tuple(lines[-1].split()))


@dataclass(frozen=True)
class Rectangle:
    """An index rectangle: a set of rows times a set of columns."""

    rows: frozenset[int]
    cols: frozenset[int]

    @classmethod
    def of(cls, rows: Iterable[int], cols: Iterable[int]) -> "Rectangle":
        return cls(frozenset(rows), frozenset(cols))

    @property
    def n_cells(self) -> int:
        return len(self.rows) * len(self.cols)

    def cells(self):
        for i in sorted(self.rows):
            for j in sorted(self.cols):
                yield i, j


def slack_matrix(
    poly: Polytope, row_filter: Callable[[str], bool] | None = None
) -> SlackMatrix:
    """Slack of each (inequality row, vertex) pair, optionally restricted to
    rows whose label passes the filter."""
    idx = [
        i
        for i, lab in enumerate(poly.row_labels)
        if row_filter is None or row_filter(lab)
    ]
    if not idx:
        raise InputError("row filter keeps no rows")
    supports = [[(k, x) for k, x in enumerate(v) if x] for v in poly.vertices]
    rows = []
    for i in idx:
        row = _sparse(poly.ineq_coefs.row(i))
        b = poly.ineq_rhs[i]
        out = []
        for supp in supports:
            out.append(b - sum(row[k] * x for k, x in supp if k in row))
        rows.append(out)
    return SlackMatrix(
        ExactMatrix(rows),
        tuple(poly.row_labels[i] for i in idx),
        poly.vertex_labels,
    )


def verify_vertices(poly: Polytope) -> tuple[bool, int | None]:
    """Check that no listed vertex is a convex combination of the others.

    Feasibility LP per vertex: nonnegative weights on the other vertices
    summing to one that reproduce the point.  Returns (True, None) or
    (False, first offending index).
    """
    verts = poly.vertices
    for j in range(len(verts)):
        others = [verts[i] + (Fraction(1),) for i in range(len(verts)) if i != j]
        target = verts[j] + (Fraction(1),)
        if conic_combination(ExactMatrix(others), target) is not None:
            return False, j
    return True, None


def face(poly: Polytope, tight_rows: Sequence[int]) -> Polytope:
    """Turn the given inequality rows into equalities and keep the vertices
    where they are tight.  Errors if the result is empty or a single point."""
    tight = sorted(set(tight_rows))
    for i in tight:
        if not 0 <= i < poly.n_ineqs:
            raise InputError(f"tight row index {i} out of range")
    if not tight:
        raise InputError("no rows to tighten")
    tightset = set(tight)
    keep_rows = [i for i in range(poly.n_ineqs) if i not in tightset]
    if not keep_rows:
        raise InputError("tightening every inequality leaves no inequality system")

    moved = ExactMatrix([poly.ineq_coefs.row(i) for i in tight])
    moved_rhs = [poly.ineq_rhs[i] for i in tight]
    new_eq = (
        moved
        if poly.eq_coefs is None
        else poly.eq_coefs.vstack(moved)
    )
    new_eq_rhs = tuple(poly.eq_rhs) + tuple(moved_rhs)
    new_eq_labels = tuple(poly.eq_labels) + tuple(poly.row_labels[i] for i in tight)

    vert_idx = []
    for j, v in enumerate(poly.vertices):
        ok = True
        for i in tight:
            row = poly.ineq_coefs.row(i)
            if sum(a * x for a, x in zip(row, v) if a) != poly.ineq_rhs[i]:
                ok = False
                break
        if ok:
            vert_idx.append(j)
    if not vert_idx:
        raise InputError("face is empty: no vertex is tight on all chosen rows")
    kept = [poly.vertices[j] for j in vert_idx]
    if len(set(kept)) < 2:
        raise InputError("face is zero-dimensional")

    return Polytope.build(
        ExactMatrix([poly.ineq_coefs.row(i) for i in keep_rows]),
        [poly.ineq_rhs[i] for i in keep_rows],
        kept,
        eq_coefs=new_eq,
        eq_rhs=new_eq_rhs,
        row_labels=[poly.row_labels[i] for i in keep_rows],
        eq_labels=new_eq_labels,
        vertex_labels=[poly.vertex_labels[j] for j in vert_idx],
    )


@dataclass(frozen=True)
class XYSystem:
    """Constraint system over a split variable vector (x, y):
    B x + C y <= d on the inequality side, optional equalities."""

    x_dim: int
    y_dim: int
    ineq_x: ExactMatrix | None
    ineq_y: ExactMatrix | None
    ineq_rhs: tuple[Fraction, ...]
    eq_x: ExactMatrix | None = None
    eq_y: ExactMatrix | None = None
    eq_rhs: tuple[Fraction, ...] = ()

    @property
    def n_ineqs(self) -> int:
        return len(self.ineq_rhs)

    @property
    def n_eqs(self) -> int:
        return len(self.eq_rhs)

    def ineq_row(self, i: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction]:
        bx = self.ineq_x.row(i) if self.ineq_x else (Fraction(0),) * self.x_dim
        by = self.ineq_y.row(i) if self.ineq_y else (Fraction(0),) * self.y_dim
        return bx, by, self.ineq_rhs[i]

    def eq_row(self, i: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction]:
        ex = self.eq_x.row(i) if self.eq_x else (Fraction(0),) * self.x_dim
        ey = self.eq_y.row(i) if self.eq_y else (Fraction(0),) * self.y_dim
        return ex, ey, self.eq_rhs[i]

    def lift_system_for(self, x: Sequence[Fraction]) -> tuple[tuple, tuple | None]:
        """Constraints over y once x is pinned: (ineqs, eqs) for lp_solve."""
        ineq_rows, ineq_rhs = [], []
        for i in range(self.n_ineqs):
            bx, by, d = self.ineq_row(i)
            ineq_rows.append(list(by))
            ineq_rhs.append(d - sum(a * v for a, v in zip(bx, x) if a))
        eq_rows, eq_rhs = [], []
        for i in range(self.n_eqs):
            ex, ey, f = self.eq_row(i)
            eq_rows.append(list(ey))
            eq_rhs.append(f - sum(a * v for a, v in zip(ex, x) if a))
        ineqs = (ineq_rows, ineq_rhs) if ineq_rows else None
        eqs = (eq_rows, eq_rhs) if eq_rows else None
        return ineqs, eqs

    def joint_ineqs(self) -> tuple | None:
        if self.n_ineqs == 0:
            return None
        rows = []
        for i in range(self.n_ineqs):
            bx, by, _ = self.ineq_row(i)
            rows.append(list(bx) + list(by))
        return rows, list(self.ineq_rhs)

    def joint_eqs(self) -> tuple | None:
        if self.n_eqs == 0:
            return None
        rows = []
        for i in range(self.n_eqs):
            ex, ey, _ = self.eq_row(i)
            rows.append(list(ex) + list(ey))
        return rows, list(self.eq_rhs)


@dataclass(frozen=True)
class ProjectionReport:
    passed: bool
    reason: str | None = None
    detail: dict = field(default_factory=dict)


def lp_equal_under_projection(
    poly: Polytope, system: XYSystem, trials: int, seed: int
) -> ProjectionReport:
    """Check that the x-projection of the system agrees with the polytope.

    Deterministic part: every vertex of the polytope lifts into the system
    (feasibility LP over y).  Randomized part: for seeded integer objectives
    on x, the exact maxima over both descriptions coincide.
    """
    if system.x_dim != poly.dim:
        raise InputError("system x-dimension does not match the polytope")
    for j, v in enumerate(poly.vertices):
        ineqs, eqs = system.lift_system_for(v)
        res = lp_solve(ineqs, eqs, [0] * system.y_dim, sense="max")
        if res.status != "optimal":
            return ProjectionReport(
                False,
                "vertex-lift",
                {"vertex": j, "label": poly.vertex_labels[j], "status": res.status},
            )

    rng = random.Random(seed)
    p_ineqs = ([list(r) for r in poly.ineq_coefs.rows()], list(poly.ineq_rhs))
    p_eqs = (
        ([list(r) for r in poly.eq_coefs.rows()], list(poly.eq_rhs))
        if poly.eq_coefs is not None
        else None
    )
    q_ineqs = system.joint_ineqs()
    q_eqs = system.joint_eqs()
    zeros_y = [0] * system.y_dim
    for t in range(trials):
        c = [rng.randint(-1000, 1000) for _ in range(poly.dim)]
        over_p = lp_solve(p_ineqs, p_eqs, c, sense="max")
        over_q = lp_solve(q_ineqs, q_eqs, c + zeros_y, sense="max")
        if over_p.status != "optimal" or over_q.status != "optimal":
            return ProjectionReport(
                False,
                "objective-status",
                {"trial": t, "objective": c, "p": over_p.status, "q": over_q.status},
            )
        if over_p.value != over_q.value:
            return ProjectionReport(
                False,
                "objective-value",
                {
                    "trial": t,
                    "objective": c,
                    "p": format_rational(over_p.value),
                    "q": format_rational(over_q.value),
                },
            )
    return ProjectionReport(True)


# ---------------------------------------------------------------------------
# Serialization

def _matrix_json(m: ExactMatrix | None) -> list[list[str]] | None:
    if m is None:
        return None
    return [[format_rational(x) for x in row] for row in m.rows()]


def polytope_to_json(poly: Polytope) -> dict:
    return {
        "dim": poly.dim,
        "ineqs": {
            "rows": _matrix_json(poly.ineq_coefs),
            "rhs": [format_rational(x) for x in poly.ineq_rhs],
        },
        "eqs": None
        if poly.eq_coefs is None
        else {
            "rows": _matrix_json(poly.eq_coefs),
            "rhs": [format_rational(x) for x in poly.eq_rhs],
        },
        "vertices": [[format_rational(x) for x in v] for v in poly.vertices],
        "row_labels": list(poly.row_labels),
        "eq_labels": list(poly.eq_labels),
        "vertex_labels": list(poly.vertex_labels),
    }


def _system_from_json(obj: dict | None, base_dir: str | None, what: str):
    if obj is None:
        return None, ()
    if "file" in obj:
        path = obj["file"]
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path, "r", encoding="utf-8") as fh:
            aug = ExactMatrix.from_text(fh.read())
        rows = [row[:-1] for row in aug.rows()]
        rhs = [row[-1] for row in aug.rows()]
        return ExactMatrix(rows), tuple(rhs)
    try:
        rows = obj["rows"]
        rhs = obj["rhs"]
    except KeyError as exc:
        raise InputError(f"{what}: need 'rows'+'rhs' or 'file'") from exc
    return ExactMatrix(rows), tuple(rat(x) for x in rhs)


def polytope_from_json(obj: dict, base_dir: str | None = None) -> Polytope:
    try:
        ineq_m, ineq_rhs = _system_from_json(obj["ineqs"], base_dir, "ineqs")
        eq_m, eq_rhs = _system_from_json(obj.get("eqs"), base_dir, "eqs")
        vertices = obj["vertices"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed polytope JSON: {exc}") from exc
    if isinstance(vertices, dict):
        # File reference: a bare matrix whose rows are the vertices.
        path = vertices.get("file")
        if path is None:
            raise InputError("vertices: need inline rows or a 'file' reference")
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path, "r", encoding="utf-8") as fh:
            vertices = [list(row) for row in ExactMatrix.from_text(fh.read()).rows()]
    poly = Polytope.build(
        ineq_m,
        ineq_rhs,
        vertices,
        eq_coefs=eq_m,
        eq_rhs=eq_rhs,
        row_labels=obj.get("row_labels"),
        eq_labels=obj.get("eq_labels"),
        vertex_labels=obj.get("vertex_labels"),
    )
    if "dim" in obj and obj["dim"] != poly.dim:
        raise InputError(f"declared dim {obj['dim']} but system has {poly.dim}")
    return poly


def write_polytope(path: str, poly: Polytope) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(polytope_to_json(poly), fh, indent=1)
        fh.write("\n")


def read_polytope(path: str) -> Polytope:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "result" in obj and "polytope" in obj.get("result", {}):
        obj = obj["result"]["polytope"]  # accept CLI envelopes for chaining
    return polytope_from_json(obj, base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# Small standard polytopes, used heavily by tests and bound sweeps.

def simplex_polytope(d: int) -> Polytope:
    """Standard d-simplex: x >= 0, sum x <= 1."""
    if d < 1:
        raise InputError("simplex dimension must be >= 1")
    rows = []
    labels = []
    for i in range(d):
        e = [0] * d
        e[i] = -1
        rows.append(e)
        labels.append(f"nonneg:{i}")
    rows.append([1] * d)
    labels.append("sum")
    rhs = [0] * d + [1]
    verts = [tuple(Fraction(0) for _ in range(d))]
    vlabels = ["origin"]
    for i in range(d):
        v = [Fraction(0)] * d
        v[i] = Fraction(1)
        verts.append(tuple(v))
        vlabels.append(f"unit:{i}")
    return Polytope.build(rows, rhs, verts, row_labels=labels, vertex_labels=vlabels)


def hypercube_polytope(d: int) -> Polytope:
    """Unit cube [0, 1]^d."""
    if d < 1:
        raise InputError("cube dimension must be >= 1")
    rows, rhs, labels = [], [], []
    for i in range(d):
        e = [0] * d
        e[i] = -1
        rows.append(list(e))
        rhs.append(0)
        labels.append(f"lower:{i}")
        e2 = [0] * d
        e2[i] = 1
        rows.append(e2)
        rhs.append(1)
        labels.append(f"upper:{i}")
    verts, vlabels = [], []
    for mask in range(1 << d):
        v = tuple(Fraction((mask >> i) & 1) for i in range(d))
        verts.append(v)
        vlabels.append("corner:" + "".join(str((mask >> i) & 1) for i in range(d)))
    return Polytope.build(rows, rhs, verts, row_labels=labels, vertex_labels=vlabels)


def cross_polytope(d: int) -> Polytope:
    """Convex hull of the signed unit vectors: sum |x_i| <= 1."""
    if d < 1:
        raise InputError("cross polytope dimension must be >= 1")
    rows, labels = [], []
    for mask in range(1 << d):
        signs = [1 if (mask >> i) & 1 else -1 for i in range(d)]
        rows.append(signs)
        labels.append("facet:" + "".join("+" if s > 0 else "-" for s in signs))
    rhs = [1] * len(rows)
    verts, vlabels = [], []
    for i in range(d):
        for s in (1, -1):
            v = [Fraction(0)] * d
            v[i] = Fraction(s)
            verts.append(tuple(v))
            vlabels.append(f"{'plus' if s > 0 else 'minus'}:{i}")
    return Polytope.build(rows, rhs, verts, row_labels=labels, vertex_labels=vlabels)
