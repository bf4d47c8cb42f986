import json
from fractions import Fraction

import pytest

from xclab.errors import InputError
from xclab.exactla import ExactMatrix, rat, write_matrix
from xclab.polytope import (
    Polytope,
    SlackMatrix,
    XYSystem,
    cross_polytope,
    face,
    hypercube_polytope,
    lp_equal_under_projection,
    polytope_from_json,
    polytope_to_json,
    read_polytope,
    simplex_polytope,
    slack_matrix,
    verify_vertices,
    write_polytope,
)


def test_simplex_shape():
    p = simplex_polytope(2)
    assert p.dim == 2
    assert p.n_ineqs == 3
    assert len(p.vertices) == 3
    assert p.row_labels == ("nonneg:0", "nonneg:1", "sum")
    assert p.contains((Fraction(1, 3), Fraction(1, 3)))
    assert not p.contains((1, 1))


def test_hypercube_and_cross_shapes():
    c = hypercube_polytope(3)
    assert c.n_ineqs == 6 and len(c.vertices) == 8
    x = cross_polytope(3)
    assert x.n_ineqs == 8 and len(x.vertices) == 6
    assert x.contains((0, 0, 0))
    assert not x.contains((1, 1, 0))


def test_build_rejects_violating_vertex():
    with pytest.raises(InputError, match="violates"):
        Polytope.build([[1, 0], [0, 1]], [1, 1], [(0, 0), (2, 0)])


def test_build_rejects_single_point():
    with pytest.raises(InputError, match="two distinct"):
        Polytope.build([[1]], [1], [(1,), (1,)])


def test_build_rejects_label_mismatch():
    with pytest.raises(InputError, match="label"):
        Polytope.build([[1]], [1], [(0,), (1,)], row_labels=["a", "b"])


def test_slack_matrix_simplex_is_permutation():
    s = slack_matrix(simplex_polytope(2))
    # nonneg rows give the coordinates, the sum row gives 1 - x1 - x2
    assert s.matrix == ExactMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert s.row_labels == ("nonneg:0", "nonneg:1", "sum")
    assert s.col_labels == ("origin", "unit:0", "unit:1")


def test_slack_matrix_row_filter():
    s = slack_matrix(simplex_polytope(2), lambda lab: lab == "sum")
    assert s.nrows == 1
    assert s.matrix.row(0) == (1, 0, 0)
    with pytest.raises(InputError, match="no rows"):
        slack_matrix(simplex_polytope(2), lambda lab: False)


def test_slack_matrix_text_round_trip():
    s = slack_matrix(hypercube_polytope(2))
    back = SlackMatrix.from_text(s.to_text())
    assert back.matrix == s.matrix
    assert back.row_labels == s.row_labels
    assert back.col_labels == s.col_labels


def test_slack_matrix_rejects_negative():
    with pytest.raises(InputError, match="negative"):
        SlackMatrix(ExactMatrix([[1, -1]]), ("r",), ("a", "b"))


def test_verify_vertices_clean_and_dirty():
    p = simplex_polytope(2)
    assert verify_vertices(p) == (True, None)
    dirty = Polytope.build(
        [list(r) for r in p.ineq_coefs.rows()],
        list(p.ineq_rhs),
        list(p.vertices) + [(Fraction(1, 2), Fraction(1, 2))],
    )
    assert verify_vertices(dirty) == (False, 3)


def test_face_of_square_edge():
    sq = hypercube_polytope(2)
    edge = face(sq, [0])  # pin x0 = 0
    assert len(edge.vertices) == 2
    assert edge.eq_labels == ("lower:0",)
    assert edge.n_ineqs == 3
    assert set(edge.vertex_labels) == {"corner:00", "corner:01"}


def test_face_errors():
    sq = hypercube_polytope(2)
    with pytest.raises(InputError, match="empty"):
        face(sq, [0, 1])  # x0 = 0 and x0 = 1 together
    with pytest.raises(InputError, match="zero-dimensional"):
        face(sq, [0, 2])  # pins the single corner (0, 0)
    with pytest.raises(InputError, match="out of range"):
        face(sq, [99])
    with pytest.raises(InputError, match="no rows"):
        face(sq, [])


def _simplex_lift() -> XYSystem:
    # x1, x2 >= 0, y >= 0, x1 + x2 + y = 1: projects to the 2-simplex
    return XYSystem(
        x_dim=2,
        y_dim=1,
        ineq_x=ExactMatrix([[-1, 0], [0, -1], [0, 0]]),
        ineq_y=ExactMatrix([[0], [0], [-1]]),
        ineq_rhs=(rat(0), rat(0), rat(0)),
        eq_x=ExactMatrix([[1, 1]]),
        eq_y=ExactMatrix([[1]]),
        eq_rhs=(rat(1),),
    )


def test_projection_check_passes():
    report = lp_equal_under_projection(simplex_polytope(2), _simplex_lift(), 5, 7)
    assert report.passed, report


def test_projection_check_catches_missing_lift():
    # forcing y >= 1/4 shrinks the projection to x1 + x2 <= 3/4
    sys = XYSystem(
        x_dim=2,
        y_dim=1,
        ineq_x=ExactMatrix([[-1, 0], [0, -1], [0, 0]]),
        ineq_y=ExactMatrix([[0], [0], [-1]]),
        ineq_rhs=(rat(0), rat(0), rat("-1/4")),
        eq_x=ExactMatrix([[1, 1]]),
        eq_y=ExactMatrix([[1]]),
        eq_rhs=(rat(1),),
    )
    report = lp_equal_under_projection(simplex_polytope(2), sys, 3, 7)
    assert not report.passed
    assert report.reason == "vertex-lift"


def test_projection_check_catches_larger_projection():
    # the system projects to the unit square, strictly above the simplex
    sys = XYSystem(
        x_dim=2,
        y_dim=1,
        ineq_x=ExactMatrix([[-1, 0], [0, -1], [1, 0], [0, 1], [0, 0], [0, 0]]),
        ineq_y=ExactMatrix([[0], [0], [0], [0], [1], [-1]]),
        ineq_rhs=(rat(0), rat(0), rat(1), rat(1), rat(1), rat(0)),
    )
    report = lp_equal_under_projection(simplex_polytope(2), sys, 8, 1)
    assert not report.passed
    assert report.reason in ("objective-value", "objective-status")


def test_projection_dim_mismatch():
    with pytest.raises(InputError, match="x-dimension"):
        lp_equal_under_projection(simplex_polytope(3), _simplex_lift(), 1, 0)


def test_json_round_trip():
    p = simplex_polytope(3)
    q = polytope_from_json(polytope_to_json(p))
    assert q == p


def test_json_file_round_trip(tmp_path):
    p = cross_polytope(2)
    path = tmp_path / "cross.json"
    write_polytope(str(path), p)
    assert read_polytope(str(path)) == p


def test_json_file_references(tmp_path):
    p = hypercube_polytope(2)
    aug = p.ineq_coefs.hstack(ExactMatrix([[b] for b in p.ineq_rhs]))
    write_matrix(str(tmp_path / "rows.txt"), aug)
    write_matrix(str(tmp_path / "verts.txt"), ExactMatrix([list(v) for v in p.vertices]))
    obj = {
        "ineqs": {"file": "rows.txt"},
        "vertices": {"file": "verts.txt"},
        "row_labels": list(p.row_labels),
        "vertex_labels": list(p.vertex_labels),
    }
    doc = tmp_path / "cube.json"
    doc.write_text(json.dumps(obj), encoding="utf-8")
    assert read_polytope(str(doc)) == p


def test_json_declared_dim_checked():
    obj = polytope_to_json(simplex_polytope(2))
    obj["dim"] = 5
    with pytest.raises(InputError, match="declared dim"):
        polytope_from_json(obj)


def test_json_malformed():
    with pytest.raises(InputError, match="malformed|need"):
        polytope_from_json({"vertices": [[0], [1]]})
