import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydswm.atomic import build_dissipators, build_hamiltonian
from rydswm.errors import DegenerateSteadyStateError
from rydswm.liouville import (
    build_liouvillian,
    linear_response,
    residual,
    steady_state,
    trace_functional,
    unvec,
    vec,
    vec_index,
)

from test_atomic import make


def test_vec_roundtrip_and_index():
    a = np.arange(36).reshape(6, 6) + 0j
    v = vec(a)
    assert np.array_equal(unvec(v), a)
    assert v[vec_index(6, 1, 6)] == a[5, 0]
    assert v[vec_index(2, 3, 6)] == a[1, 2]


def test_zero_generator():
    assert np.all(build_liouvillian(np.zeros((6, 6))) == 0)


def test_textbook_decay_action():
    g = 3.0
    op = np.zeros((6, 6))
    op[0, 1] = 1
    lv = build_liouvillian(np.zeros((6, 6)), [(op, g)])
    rho = np.zeros((6, 6))
    rho[1, 1] = 1
    d = unvec(lv @ vec(rho))
    assert d[0, 0] == pytest.approx(g)
    assert d[1, 1] == pytest.approx(-g)
    assert np.count_nonzero(np.abs(d) > 1e-15) == 2


def test_coherence_decays_at_half_rate():
    op = np.zeros((6, 6))
    op[0, 1] = 1
    lv = build_liouvillian(np.zeros((6, 6)), [(op, 2.0)])
    rho = np.zeros((6, 6), complex)
    rho[1, 0] = 1
    assert unvec(lv @ vec(rho))[1, 0] == pytest.approx(-1.0)


def test_trace_preserved_random(swm):
    lv = build_liouvillian(build_hamiltonian(swm), build_dissipators(swm))
    tr = trace_functional(6)
    rng = np.random.default_rng(1)
    scale = np.linalg.norm(lv, 2)
    for _ in range(100):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = a + a.conj().T
        assert abs(tr @ (lv @ vec(rho))) / (scale * np.linalg.norm(rho)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=5, max_size=5))
def test_trace_preserved_any_drive(rabis):
    s = make(rabi=dict(zip(("P", "C", "LO", "RF", "A"), rabis)))
    lv = build_liouvillian(build_hamiltonian(s), build_dissipators(s))
    col = trace_functional(6) @ lv
    assert np.max(np.abs(col)) <= 1e-12 * np.linalg.norm(lv, 2)


def test_ground_state_when_undriven():
    s = make()
    rho = steady_state(build_liouvillian(build_hamiltonian(s), build_dissipators(s)))
    expect = np.zeros((6, 6))
    expect[0, 0] = 1
    assert np.allclose(rho, expect, atol=1e-14)


def test_paper_steady_state_quality(swm):
    lv = build_liouvillian(build_hamiltonian(swm, rf=0.0), build_dissipators(swm))
    rho = steady_state(lv)
    assert residual(lv, rho) < 1e-10
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-9
    assert np.allclose(rho, rho.conj().T, atol=1e-12)


def test_degenerate_subspaces_detected():
    # two isolated two-level systems; populations of |1> and |3> and the
    # undamped 1-3 coherences all survive
    op1 = np.zeros((4, 4))
    op1[0, 1] = 1
    op2 = np.zeros((4, 4))
    op2[2, 3] = 1
    lv = build_liouvillian(np.zeros((4, 4)), [(op1, 1.0), (op2, 1.0)])
    with pytest.raises(DegenerateSteadyStateError) as exc:
        steady_state(lv)
    assert exc.value.dimension == 4


def test_linear_response_matches_finite_difference(swm):
    # at w = 0 the response is the derivative of the static steady state
    h = 1e-3 * swm.rabi("RF")
    ch = build_dissipators(swm)

    def rho61(rf):
        return steady_state(build_liouvillian(build_hamiltonian(swm, rf=rf), ch))[5, 0]

    from rydswm.atomic import rf_perturbation
    from rydswm.liouville import commutator_superop
    l0 = build_liouvillian(build_hamiltonian(swm, rf=0.0), ch)
    l1 = commutator_superop(rf_perturbation(swm))
    lr = linear_response(l0, l1, steady_state(l0), 0.0, (6, 1))
    fd = (rho61(h) - rho61(-h)) / (2 * h)
    assert lr == pytest.approx(fd, rel=1e-5)
