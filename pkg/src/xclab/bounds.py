"""Lower and upper bounds on the nonnegative rank of a slack matrix.

Lower bounds: linear-algebra rank, greedy fooling sets, exact minimum
rectangle covers of the support (branch and bound over maximal support
rectangles), and the hyperplane separation bound <W,S> / (max|S| * alpha)
where alpha maximizes <W,R> over binary rank-1 matrices R.  Upper bounds:
trivial slack-variable factorizations and an alternating-LP heuristic whose
candidates count only after an exact rational repair verifies.

Weight matrices admit a FORBIDDEN marker modeling minus-infinity cells: a
rectangle touching one is worthless, and FORBIDDEN against a nonzero slack
is a hard input error.  FORBIDDEN times zero contributes zero.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetExceededError, InputError
from .exactla import ExactMatrix, conic_combination, format_rational, lp_solve, rank, rat
from .polytope import Rectangle, SlackMatrix
from .yannakakis import Factorization, verify_factorization


class _Forbidden:
    """Singleton marker for minus-infinity weight cells."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "FORBIDDEN"


FORBIDDEN = _Forbidden()


def _as_matrix(s: SlackMatrix | ExactMatrix) -> ExactMatrix:
    return s.matrix if isinstance(s, SlackMatrix) else s


@dataclass(frozen=True)
class WeightMatrix:
    """Grid of exact rationals and FORBIDDEN markers."""

    entries: tuple[tuple[Fraction | _Forbidden, ...], ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "WeightMatrix":
        out = []
        width = None
        for row in rows:
            cooked = tuple(x if x is FORBIDDEN else rat(x) for x in row)
            if width is None:
                width = len(cooked)
            elif len(cooked) != width:
                raise InputError("weight rows have unequal lengths")
            out.append(cooked)
        if not out or width == 0:
            raise InputError("weight matrix needs at least one row and column")
        return cls(tuple(out))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def frobenius_with(self, s: SlackMatrix | ExactMatrix) -> Fraction:
        """<W, S> with FORBIDDEN * 0 = 0 and FORBIDDEN * nonzero an error."""
        m = _as_matrix(s)
        if m.nrows != self.nrows or m.ncols != self.ncols:
            raise InputError("weight and slack dimensions differ")
        total = Fraction(0)
        for i, wrow in enumerate(self.entries):
            srow = m.row(i)
            for w, x in zip(wrow, srow):
                if w is FORBIDDEN:
                    if x != 0:
                        raise InputError(
                            f"FORBIDDEN weight meets nonzero slack at row {i}"
                        )
                elif w and x:
                    total += w * x
        return total

    def rectangle_sum(self, rows: Iterable[int], cols: Iterable[int]):
        """Sum of weights over a rectangle; FORBIDDEN if any cell is."""
        cols = tuple(cols)
        total = Fraction(0)
        for i in rows:
            wrow = self.entries[i]
            for j in cols:
                w = wrow[j]
                if w is FORBIDDEN:
                    return FORBIDDEN
                total += w
        return total


# ---------------------------------------------------------------------------
# Maximum rectangle value (the alpha of the separation bound)

@dataclass(frozen=True)
class RectangleValue:
    value: Fraction
    rectangle: Rectangle
    certified: bool


def _weight_int_grid(w: WeightMatrix) -> tuple[list[list[int | None]], int]:
    """Scale finite entries to integers; None marks FORBIDDEN."""
    scale = 1
    for row in w.entries:
        for x in row:
            if x is not FORBIDDEN:
                scale = scale * x.denominator // math.gcd(scale, x.denominator)
    grid = [
        [None if x is FORBIDDEN else int(x * scale) for x in row] for row in w.entries
    ]
    return grid, scale


def _best_cols_for_rows(grid, nrows, ncols, rows: frozenset[int]):
    cols = []
    value = 0
    for j in range(ncols):
        partial = 0
        blocked = False
        for i in rows:
            x = grid[i][j]
            if x is None:
                blocked = True
                break
            partial += x
        if not blocked and partial > 0:
            cols.append(j)
            value += partial
    return frozenset(cols), value


def max_rectangle_value(
    w: WeightMatrix,
    mode: str = "exact",
    restarts: int = 20,
    seed: int = 0,
    cap: int = 22,
) -> RectangleValue:
    """Maximize the weight sum over row-set x column-set rectangles.

    Exact mode walks all subsets of the smaller side in Gray-code order,
    keeping per-column partial sums and FORBIDDEN counters; the optimal
    other side picks exactly the unblocked columns with positive partial
    sum.  The empty rectangle is admitted, so the value is never negative.
    Heuristic mode alternates the two one-sided optimizations from seeded
    random starts and is flagged non-certified.
    """
    if mode == "heuristic":
        return _max_rectangle_heuristic(w, restarts, seed)
    if mode != "exact":
        raise InputError(f"unknown mode {mode!r}: use 'exact' or 'heuristic'")

    transposed = w.nrows > w.ncols
    if transposed:
        w = WeightMatrix(tuple(zip(*w.entries)))
    nrows, ncols = w.nrows, w.ncols
    if nrows > cap:
        raise InputError(
            f"exact mode needs min(rows, cols) <= {cap}, got {nrows}; "
            "use heuristic mode"
        )
    grid, scale = _weight_int_grid(w)
    support = [
        [(j, grid[i][j]) for j in range(ncols) if grid[i][j] not in (None, 0)]
        for i in range(nrows)
    ]
    forb_cols = [
        [j for j in range(ncols) if grid[i][j] is None] for i in range(nrows)
    ]

    partial = [0] * ncols
    forb = [0] * ncols
    contrib = [0] * ncols
    value = 0
    best_value = 0
    best_mask = 0
    mask = 0
    for step in range(1, 1 << nrows):
        gray = step ^ (step >> 1)
        bit = (gray ^ mask).bit_length() - 1
        adding = not (mask >> bit) & 1
        mask = gray
        touched = set(forb_cols[bit])
        for j, x in support[bit]:
            partial[j] += x if adding else -x
            touched.add(j)
        for j in forb_cols[bit]:
            forb[j] += 1 if adding else -1
        for j in touched:
            new = partial[j] if forb[j] == 0 and partial[j] > 0 else 0
            value += new - contrib[j]
            contrib[j] = new
        if value > best_value:
            best_value = value
            best_mask = mask

    rows = frozenset(i for i in range(nrows) if (best_mask >> i) & 1)
    cols, check = _best_cols_for_rows(grid, nrows, ncols, rows)
    assert check == best_value
    rect = Rectangle(cols, rows) if transposed else Rectangle(rows, cols)
    return RectangleValue(Fraction(best_value, scale), rect, True)


def _max_rectangle_heuristic(w: WeightMatrix, restarts: int, seed: int) -> RectangleValue:
    grid, scale = _weight_int_grid(w)
    nrows, ncols = w.nrows, w.ncols
    tgrid = [list(col) for col in zip(*grid)]
    rng = random.Random(seed)
    best_value = 0
    best = (frozenset(), frozenset())
    for _ in range(max(1, restarts)):
        rows = frozenset(i for i in range(nrows) if rng.random() < 0.5)
        value = -1
        while True:
            cols, v1 = _best_cols_for_rows(grid, nrows, ncols, rows)
            new_rows, v2 = _best_cols_for_rows(tgrid, ncols, nrows, cols)
            if v2 <= value:
                break
            rows, value = new_rows, v2
        if value > best_value:
            best_value = value
            best = (rows, _best_cols_for_rows(grid, nrows, ncols, rows)[0])
    return RectangleValue(
        Fraction(best_value, scale), Rectangle(best[0], best[1]), False
    )


def hyperplane_bound(
    w: WeightMatrix, s: SlackMatrix | ExactMatrix, alpha: Fraction
) -> Fraction:
    """<W,S> / (max|S| * alpha), a lower bound on the nonnegative rank when
    alpha comes from exact max_rectangle_value.  Requires FORBIDDEN cells of
    W to sit on zero slack."""
    m = _as_matrix(s)
    inner = w.frobenius_with(m)
    alpha = rat(alpha)
    if alpha < 0:
        raise InputError("alpha cannot be negative: the empty rectangle has value 0")
    norm = m.max_norm()
    if alpha == 0 or norm == 0:
        if inner > 0:
            raise InputError(
                "positive inner product with zero alpha or zero slack: "
                "the bound is unbounded; inputs are inconsistent"
            )
        return Fraction(0)
    return inner / (norm * alpha)


# ---------------------------------------------------------------------------
# Fooling sets

def fooling_set_greedy(
    s: SlackMatrix | ExactMatrix, seed: int = 0
) -> tuple[tuple[int, int], ...]:
    """Greedy fooling set: support cells no two of which fit in one support
    rectangle.  Its size lower-bounds the rectangle cover number."""
    m = _as_matrix(s)
    cells = [
        (i, j)
        for i in range(m.nrows)
        for j in range(m.ncols)
        if m.entry(i, j) != 0
    ]
    rng = random.Random(seed)
    rng.shuffle(cells)
    chosen: list[tuple[int, int]] = []
    for (i, j) in cells:
        if all(
            m.entry(i, jj) == 0 or m.entry(ii, j) == 0 for ii, jj in chosen
        ):
            chosen.append((i, j))
    return tuple(sorted(chosen))


def _check_fooling(m: ExactMatrix, cells: Sequence[tuple[int, int]]) -> bool:
    for i, j in cells:
        if m.entry(i, j) == 0:
            return False
    for a in range(len(cells)):
        i, j = cells[a]
        for b in range(a + 1, len(cells)):
            ii, jj = cells[b]
            if m.entry(i, jj) != 0 and m.entry(ii, j) != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# Exact rectangle covering of the support

@dataclass(frozen=True)
class CoverResult:
    status: str  # "optimal" or "exceeded"
    size: int | None
    rectangles: tuple[Rectangle, ...]
    explored: int


def _closure(col_set: frozenset[int], supports: list[frozenset[int]], ncols: int):
    rows = frozenset(
        i for i, supp in enumerate(supports) if col_set <= supp
    )
    if not rows:
        return rows, frozenset(range(ncols))
    cols = frozenset.intersection(*(supports[i] for i in rows))
    return rows, cols


def _maximal_rectangles(
    supports: list[frozenset[int]], ncols: int, limit: int
) -> tuple[list[Rectangle], int]:
    """All maximal support rectangles (closed row-set/column-set pairs) in
    lectic order.  Each closure computation costs one budget unit."""
    rects = []
    steps = 0

    def closed(cols: frozenset[int]):
        nonlocal steps
        steps += 1
        if steps > limit:
            raise BudgetExceededError(
                f"maximal-rectangle enumeration passed {limit} closures"
            )
        return _closure(cols, supports, ncols)

    rows, cols = closed(frozenset())
    if rows and cols:
        rects.append(Rectangle(rows, cols))
    universe = frozenset(range(ncols))
    while cols != universe:
        for c in range(ncols - 1, -1, -1):
            if c in cols:
                continue
            prefix = frozenset(j for j in cols if j < c)
            rows2, cols2 = closed(prefix | {c})
            # lectic successor: the closure may not add anything below c
            if all(j >= c for j in cols2 - prefix):
                rows, cols = rows2, cols2
                if rows and cols:
                    rects.append(Rectangle(rows, cols))
                break
        else:
            break
    return rects, steps


def rectangle_cover_exact(
    s: SlackMatrix | ExactMatrix, limit: int = 200_000, cap: int = 20
) -> CoverResult:
    """Exact minimum number of support rectangles covering the support of S,
    by branch and bound over maximal support rectangles.  Returns status
    "exceeded" when the combined search passes `limit` steps."""
    m = _as_matrix(s)
    if m.nrows > cap or m.ncols > cap:
        raise InputError(
            f"exact cover needs dimensions <= {cap}, got {m.nrows}x{m.ncols}"
        )
    supports = [
        frozenset(j for j in range(m.ncols) if m.entry(i, j) != 0)
        for i in range(m.nrows)
    ]
    cells = frozenset(
        (i, j) for i, supp in enumerate(supports) for j in supp
    )
    if not cells:
        return CoverResult("optimal", 0, (), 0)
    try:
        rects, steps = _maximal_rectangles(supports, m.ncols, limit)
    except BudgetExceededError:
        return CoverResult("exceeded", None, (), limit)

    cover_sets = [frozenset((i, j) for i in r.rows for j in r.cols) for r in rects]
    by_cell: dict[tuple[int, int], list[int]] = {c: [] for c in cells}
    for k, cs in enumerate(cover_sets):
        for c in cs:
            by_cell[c].append(k)

    # greedy start gives an upper bound and a fallback witness
    greedy: list[int] = []
    left = set(cells)
    while left:
        k = max(range(len(rects)), key=lambda k: (len(cover_sets[k] & left), -k))
        greedy.append(k)
        left -= cover_sets[k]
    best: list[int] = list(greedy)

    explored = steps
    budget_hit = False

    def search(uncovered: frozenset, chosen: list[int]):
        nonlocal best, explored, budget_hit
        if budget_hit:
            return
        explored += 1
        if explored > limit:
            budget_hit = True
            return
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(chosen) + 1 >= len(best):
            return
        cell = min(uncovered, key=lambda c: (len(by_cell[c]), c))
        for k in by_cell[cell]:
            chosen.append(k)
            search(uncovered - cover_sets[k], chosen)
            chosen.pop()

    search(cells, [])
    if budget_hit:
        return CoverResult("exceeded", None, (), explored)
    return CoverResult(
        "optimal", len(best), tuple(rects[k] for k in best), explored
    )


def _check_cover(m: ExactMatrix, rectangles: Sequence[Rectangle]) -> bool:
    covered = set()
    for r in rectangles:
        for i, j in r.cells():
            if m.entry(i, j) == 0:
                return False
            covered.add((i, j))
    support = {
        (i, j)
        for i in range(m.nrows)
        for j in range(m.ncols)
        if m.entry(i, j) != 0
    }
    return covered == support


# ---------------------------------------------------------------------------
# The canonical cover of the perfect-matching slack support

@dataclass(frozen=True)
class MatchingCover:
    """One rectangle per unordered pair of disjoint edges: rows are the
    proper odd cuts crossed by both edges, columns the perfect matchings
    containing both."""

    n: int
    slack: SlackMatrix
    rectangles: tuple[Rectangle, ...]
    pairs: tuple[tuple[tuple[int, int], tuple[int, int]], ...]


def canonical_matching_cover(n: int) -> MatchingCover:
    from .matchgen import (
        EdgeIndexing,
        canonical_odd_sets,
        enumerate_perfect_matchings,
        odd_set_slack,
        perfect_matching_polytope,
    )

    if n < 6 or n % 2:
        raise InputError(f"need an even n >= 6, got {n}")
    poly = perfect_matching_polytope(n)
    slack = odd_set_slack(poly)
    edges = EdgeIndexing(n)
    proper = [u for u in canonical_odd_sets(n) if 3 <= len(u) <= n - 3]
    assert len(proper) == slack.nrows
    cut_masks = []
    for u in proper:
        inside = set(u)
        cut_masks.append(
            sum(
                1 << k
                for k, (a, b) in enumerate(edges.pairs)
                if (a in inside) != (b in inside)
            )
        )
    pm_masks = [
        sum(1 << edges.index(a, b) for a, b in m)
        for m in enumerate_perfect_matchings(n)
    ]

    rectangles = []
    pairs = []
    for k1 in range(edges.n_edges):
        a1, b1 = edges.pairs[k1]
        for k2 in range(k1 + 1, edges.n_edges):
            a2, b2 = edges.pairs[k2]
            if len({a1, b1, a2, b2}) < 4:
                continue
            want = (1 << k1) | (1 << k2)
            rows = frozenset(
                i for i, cm in enumerate(cut_masks) if cm & want == want
            )
            cols = frozenset(
                j for j, pm in enumerate(pm_masks) if pm & want == want
            )
            rectangles.append(Rectangle(rows, cols))
            pairs.append(((a1, b1), (a2, b2)))
    return MatchingCover(n, slack, tuple(rectangles), tuple(pairs))


# ---------------------------------------------------------------------------
# Heuristic nonnegative factorization

def _padded_trivial(m: ExactMatrix, r: int) -> Factorization | None:
    if r >= m.nrows:
        left = ExactMatrix.identity(m.nrows)
        right = m
        if r > m.nrows:
            left = left.hstack(ExactMatrix.zeros(m.nrows, r - m.nrows))
            right = right.vstack(ExactMatrix.zeros(r - m.nrows, m.ncols))
        return Factorization(left, right)
    if r >= m.ncols:
        left = m
        right = ExactMatrix.identity(m.ncols)
        if r > m.ncols:
            left = left.hstack(ExactMatrix.zeros(m.nrows, r - m.ncols))
            right = right.vstack(ExactMatrix.zeros(r - m.ncols, m.ncols))
        return Factorization(left, right)
    return None


def _extreme_row_indices(m: ExactMatrix) -> list[int]:
    """Rows that are not conic combinations of the other rows."""
    out = []
    rows = [m.row(i) for i in range(m.nrows)]
    for i in range(m.nrows):
        others = ExactMatrix([rows[k] for k in range(m.nrows) if k != i])
        if conic_combination(others, rows[i]) is None:
            out.append(i)
    return out


def _distinct_rows(m: ExactMatrix, r: int) -> list[int]:
    seen = set()
    out = []
    for i in range(m.nrows):
        row = m.row(i)
        if any(row) and row not in seen:
            seen.add(row)
            out.append(i)
        if len(out) == r:
            break
    return out


def _solve_side(m: ExactMatrix, basis: ExactMatrix) -> tuple[ExactMatrix, bool]:
    """Per row of m: nonnegative u minimizing the max |u . basis - row|
    residual.  Returns the coefficient matrix and whether all residuals are
    zero."""
    r = basis.nrows
    ncols = basis.ncols
    rows_out = []
    clean = True
    cols = [basis.column(j) for j in range(ncols)]
    for i in range(m.nrows):
        target = m.row(i)
        exact = conic_combination(basis, target)
        if exact is not None:
            rows_out.append(exact)
            continue
        clean = False
        # variables: u_0..u_{r-1}, t; minimize t with |u . col_j - s_j| <= t
        ineq_rows = []
        ineq_rhs = []
        for j in range(ncols):
            col = cols[j]
            ineq_rows.append([col[k] for k in range(r)] + [-1])
            ineq_rhs.append(target[j])
            ineq_rows.append([-col[k] for k in range(r)] + [-1])
            ineq_rhs.append(-target[j])
        for k in range(r):
            row = [0] * (r + 1)
            row[k] = -1
            ineq_rows.append(row)
            ineq_rhs.append(0)
        obj = [0] * r + [1]
        res = lp_solve((ineq_rows, ineq_rhs), None, obj, sense="min")
        assert res.is_optimal
        rows_out.append(res.point[:r])
    return ExactMatrix(rows_out), clean


def _exact_repair(m: ExactMatrix, right: ExactMatrix) -> Factorization | None:
    left_rows = []
    for i in range(m.nrows):
        u = conic_combination(right, m.row(i))
        if u is None:
            return None
        left_rows.append(u)
    return Factorization(ExactMatrix(left_rows), right)


def nmf_heuristic(
    s: SlackMatrix | ExactMatrix,
    r: int,
    restarts: int = 3,
    seed: int = 0,
    sweeps: int = 4,
) -> Factorization | None:
    """Search for a verified rank-r nonnegative factorization.

    Starts (in order): rows that generate the row cone, the first distinct
    rows, then `restarts` seeded random row mixes.  Each start runs a few
    alternating min-max-residual LP sweeps; a candidate counts only if exact
    conic repair of one side against the other reproduces S exactly.
    """
    m = _as_matrix(s)
    if r < 1:
        raise InputError("inner dimension must be >= 1")
    if r < rank(m):
        return None
    trivial = _padded_trivial(m, r)
    if trivial is not None:
        return trivial

    rng = random.Random(seed)
    starts: list[ExactMatrix] = []
    extreme = _extreme_row_indices(m)
    if 0 < len(extreme) <= r:
        pad = [i for i in _distinct_rows(m, m.nrows) if i not in extreme]
        pick = sorted((extreme + pad)[:r])
        if len(pick) == r:
            starts.append(ExactMatrix([m.row(i) for i in pick]))
    row_pick = _distinct_rows(m, r)
    if len(row_pick) == r:
        starts.append(ExactMatrix([m.row(i) for i in row_pick]))
    for _ in range(max(0, restarts)):
        mix = []
        for _ in range(r):
            weights = [rng.randint(0, 3) for _ in range(m.nrows)]
            mix.append(
                [
                    sum(w * m.entry(i, j) for i, w in enumerate(weights) if w)
                    for j in range(m.ncols)
                ]
            )
        starts.append(ExactMatrix(mix))

    for right in starts:
        for _ in range(sweeps):
            fac = _exact_repair(m, right)
            if fac is not None and verify_factorization(m, fac):
                return fac
            left, _ = _solve_side(m, right)
            right_t, _ = _solve_side(m.transpose(), left.transpose())
            right = right_t.transpose()
        fac = _exact_repair(m, right)
        if fac is not None and verify_factorization(m, fac):
            return fac
    return None


# ---------------------------------------------------------------------------
# Combined report

@dataclass(frozen=True)
class Certificate:
    method: str
    value: int
    witness: object = None


@dataclass(frozen=True)
class BoundConfig:
    cover_limit: int = 200_000
    cover_cap: int = 20
    alpha_cap: int = 22
    nmf_restarts: int = 2
    nmf_cell_cap: int = 256
    nmf_max_tries: int = 3
    seed: int = 0
    hyperplane: tuple[tuple[WeightMatrix, Fraction], ...] = ()


@dataclass(frozen=True)
class BoundReport:
    lower: int
    upper: int
    certificates: tuple[Certificate, ...]
    upper_witness: Factorization | None


def nonnegative_rank_bounds(
    s: SlackMatrix | ExactMatrix, config: BoundConfig = BoundConfig()
) -> BoundReport:
    """Certified interval for the nonnegative rank.

    lower = max over re-verified certificates (rank, fooling set, exact
    cover, user hyperplane bounds); upper = min(rows, cols, best verified
    heuristic factorization)."""
    m = _as_matrix(s)
    if not m.is_nonnegative():
        raise InputError("nonnegative rank is defined for nonnegative matrices")
    support = any(
        m.entry(i, j) != 0 for i in range(m.nrows) for j in range(m.ncols)
    )
    if not support:
        return BoundReport(0, 0, (Certificate("rank", 0),), None)

    certs: list[Certificate] = [Certificate("rank", rank(m))]

    fooling = fooling_set_greedy(m, config.seed)
    if not _check_fooling(m, fooling):
        raise AssertionError("greedy fooling set failed re-verification")
    certs.append(Certificate("fooling", len(fooling), fooling))

    if m.nrows <= config.cover_cap and m.ncols <= config.cover_cap:
        cover = rectangle_cover_exact(m, config.cover_limit, config.cover_cap)
        if cover.status == "optimal":
            if not _check_cover(m, cover.rectangles):
                raise AssertionError("exact cover failed re-verification")
            certs.append(Certificate("cover", cover.size, cover.rectangles))

    for w, alpha in config.hyperplane:
        value = hyperplane_bound(w, m, alpha)
        certs.append(Certificate("hyperplane", max(0, math.ceil(value)), (w, alpha)))

    lower = max(c.value for c in certs)

    if m.nrows <= m.ncols:
        upper = m.nrows
        witness = Factorization(ExactMatrix.identity(m.nrows), m)
    else:
        upper = m.ncols
        witness = Factorization(m, ExactMatrix.identity(m.ncols))
    if m.nrows * m.ncols <= config.nmf_cell_cap:
        tried = 0
        for r in range(max(lower, 1), upper):
            if tried >= config.nmf_max_tries:
                break
            tried += 1
            fac = nmf_heuristic(m, r, config.nmf_restarts, config.seed)
            if fac is not None:
                if not verify_factorization(m, fac):
                    raise AssertionError("heuristic factorization failed re-verification")
                upper = r
                witness = fac
                break

    assert lower <= upper
    return BoundReport(lower, upper, tuple(certs), witness)


def report_to_json(report: BoundReport, upper_witness_file: str | None = None) -> dict:
    out = {
        "lower": report.lower,
        "upper": report.upper,
        "certificates": [
            {"method": c.method, "value": c.value} for c in report.certificates
        ],
        "upper_witness_file": upper_witness_file,
    }
    return out


def factorization_to_json(fac: Factorization) -> dict:
    return {
        "left": [[format_rational(x) for x in row] for row in fac.left.rows()],
        "right": [[format_rational(x) for x in row] for row in fac.right.rows()],
    }


def factorization_from_json(obj: dict) -> Factorization:
    try:
        return Factorization(ExactMatrix(obj["left"]), ExactMatrix(obj["right"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed factorization JSON: {exc}") from exc
