import math

import numpy as np
import pytest

import cvfe_stokes as cs


def test_structured_mesh_counts():
    mesh = cs.generate_structured(2, 2)
    assert mesh.num_vertices == 9
    assert mesh.num_elements == 8
    assert mesh.vertices.shape == (9, 2)
    assert mesh.triangles.shape == (8, 3)
    assert mesh.domain_area() == pytest.approx(1.0, abs=1e-14)


def test_mesh_stats():
    stats = cs.mesh_stats(cs.generate_structured(2, 2), cs.Scheme.Overlapping)
    assert stats["h_p"] == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert stats["h_v"] == pytest.approx(1.0 / math.sqrt(17.0), abs=1e-15)


def test_distort_is_deterministic():
    mesh = cs.generate_structured(10, 10)
    a = cs.distort(mesh, 0.2, 42)
    b = cs.distort(mesh, 0.2, 42)
    assert np.array_equal(a.vertices, b.vertices)
    assert not np.array_equal(a.vertices, mesh.vertices)


def test_basis_partition_of_unity():
    values, grads = cs.basis(0.25, 0.25)
    assert values.sum() == pytest.approx(1.0, abs=1e-14)
    assert values[3] == pytest.approx(0.84375, abs=1e-15)
    assert np.abs(grads.sum(axis=0)).max() < 1e-13


def test_scheme_names():
    assert cs.scheme_from_string("hybrid") == cs.Scheme.Hybrid
    with pytest.raises(ValueError):
        cs.scheme_from_string("upwind")


def test_manufactured_values():
    assert cs.donea_huerta().velocity(0.25, 0.25)[0] == pytest.approx(0.006591796875, abs=1e-15)
    assert cs.bercovier_engelman().velocity(0.5, 0.25)[0] == pytest.approx(-1.5, abs=1e-13)


@pytest.mark.parametrize("scheme", [cs.Scheme.NonOverlapping, cs.Scheme.Overlapping, cs.Scheme.Hybrid, cs.Scheme.Fem])
def test_shear_flow_patch(scheme):
    case = cs.shear_flow()
    result = cs.solve_case(cs.distort(cs.generate_structured(6, 6), 0.2, 3), case, scheme)
    assert result.converged
    norms = cs.error_norms(result, case)
    assert max(norms.values()) < 1e-10


def test_overlapping_conservation():
    case = cs.donea_huerta()
    result = cs.solve_case(cs.distort(cs.generate_structured(8, 8), 0.2, 5), case, cs.Scheme.Overlapping)
    audit = cs.conservation_audit(result, case)
    assert np.abs(audit["mass_residuals"]).max() <= 1e-12 * audit["max_face_flux"]
    assert np.abs(audit["momentum_residuals"]).max() <= 1e-12 * audit["max_face_force"]


def test_convergence_study_rates():
    levels = cs.run_convergence(cs.donea_huerta(), cs.Scheme.Hybrid, levels=3, base_cells=6)
    assert len(levels) == 3
    assert levels[0]["rate_l2_v"] is None
    assert 1.7 < levels[-1]["rate_l2_v"] < 2.3
    assert levels[-1]["l2_v"] < levels[0]["l2_v"]


def test_write_vtu(tmp_path):
    case = cs.shear_flow()
    result = cs.solve_case(cs.generate_structured(2, 2), case, cs.Scheme.Fem)
    path = tmp_path / "out" / "shear.vtu"
    cs.write_vtu(result, path)
    text = path.read_text()
    assert 'NumberOfPoints="9"' in text
    assert 'Name="bubble_velocity"' in text
