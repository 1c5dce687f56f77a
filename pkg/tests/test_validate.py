import numpy as np

from swedg.mesh import build_cartesian_mesh
from swedg.validate import CriterionResult, front_elements


def _strip(h_columns):
    mesh = build_cartesian_mesh(0, len(h_columns), 0, 1, len(h_columns), 1, 1)
    h = np.repeat(np.asarray(h_columns, float), 4).reshape(mesh.x.shape)
    return np.stack([h, 0 * h, 0 * h]), mesh


def test_front_on_a_face_marks_both_sides_and_neighbours():
    W, mesh = _strip([1, 1, 1, 0, 0, 0])
    np.testing.assert_array_equal(front_elements(W, mesh, 1e-4), [0, 1, 1, 1, 1, 0])


def test_partially_wet_element_is_front():
    W, mesh = _strip([1, 1, 1, 0, 0])
    W[0, 2, 1, :] = 0.0
    # element 2 is partially wet and element 1 borders a not-fully-wet element
    np.testing.assert_array_equal(front_elements(W, mesh, 1e-4), [1, 1, 1, 1, 0])


def test_film_moves_the_front_with_the_depth():
    W, mesh = _strip([1, 1, 5e-4, 5e-4, 0])
    np.testing.assert_array_equal(front_elements(W, mesh, 1e-4), [0, 0, 1, 1, 1])
    np.testing.assert_array_equal(front_elements(W, mesh, 1e-3), [1, 1, 1, 1, 0])


def test_result_line_format():
    line = CriterionResult(3, "entropy_flux", True, "ok", seconds=1.25).line()
    assert line == "[PASS] criterion  3 entropy_flux: ok (1.2 s)"
