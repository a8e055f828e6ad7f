import math

import numpy as np
import pytest

import unipert as up


def test_frame_brackets():
    e12 = up.AlgebraElement.basis(up.frame.E12)
    e23 = up.AlgebraElement.basis(up.frame.E23)
    assert up.bracket(e12, e23) == up.AlgebraElement.basis(up.frame.Z)
    assert str(up.bracket(e23, e12)) == "-E13"
    assert up.frame.names[0] == "E31"


def test_adjoint_of_z():
    z = up.AlgebraElement.basis(up.frame.Z)
    m = up.adjoint_matrix(z, 1.0)
    assert m.shape == (8, 8)
    assert m[up.frame.H1, up.frame.E31] == 2.0
    assert m[up.frame.Z, up.frame.E31] == -1.0
    assert up.kakutani_invariant(z).value == 2.0


def test_group_roundtrip():
    x = up.unipotent(1.0, 0.5, 0.2)
    g = up.exp_map(x, 2.0)
    assert np.allclose((g * g.inverse()).matrix, np.eye(3), atol=1e-14)
    assert abs(np.linalg.det(g.matrix) - 1.0) < 1e-14


def test_transfer_perturbation_end_to_end():
    u = up.unipotent(1.0, 0.0)
    p = up.from_transfer("0.05*sin(m12 + m13)", u)
    assert p.c == -1.0
    g = up.sample_points(count=3, seed=5)[1]
    assert abs(up.invariance_residual(p, g)) < 1e-9
    spec = up.FlowSpec.perturbed(p)
    fc = up.integrate_pushforward(spec, p.triple.w, up.uniform_grid(4.0, 4), g)
    a_z = fc.coeffs[-1][up.frame.Z]
    assert a_z == pytest.approx(up.closed_form_W(p, 4.0, g), rel=1e-6)
    assert up.conjugacy_residual(p.w, p, 3.0, g) < 1e-6
    assert up.tangent_residual(p, 2.0, g) < 1e-5


def test_scalar_fields():
    f = up.ScalarField.parse("sin(m12) + m13^2")
    g = up.GroupElement(np.array([[1.0, 0.3, 0.2], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
    assert f(g) == pytest.approx(math.sin(0.3) + 0.04)
    w = up.AlgebraElement.basis(up.frame.E23)
    assert f.derivative(w, g) == pytest.approx(2 * 0.2 * 0.3)
    with pytest.raises(up.ParseError):
        up.ScalarField.parse("m11*")


def test_errors_are_typed():
    with pytest.raises(up.DomainError):
        up.kakutani_invariant(up.AlgebraElement.basis(up.frame.H1))
    with pytest.raises(up.Error):
        up.IntegratorConfig(step=-1.0)
