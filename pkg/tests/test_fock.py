"""Truncated Fock-space operators against analytic expectations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvqec.fock import (DensityMatrix, DisplacementEngine, PureState,
                        TruncationWarning,
                        TruncationError, annihilation, coherent_state,
                        conditional_displacement, displacement_operator,
                        fidelity, fock_state, overlap_f, squeeze_operator)

N_TRUNC = 30
DIM = N_TRUNC + 1


def test_annihilation_matrix_elements():
    a = annihilation(5)
    assert a[2, 3] == pytest.approx(math.sqrt(3))
    assert np.count_nonzero(a) == 5


def test_coherent_state_is_displaced_vacuum():
    beta = 0.7 - 0.4j
    direct = coherent_state(beta, N_TRUNC).amplitudes
    displaced = displacement_operator(beta, N_TRUNC) @ fock_state(0, N_TRUNC).amplitudes
    assert np.allclose(direct, displaced, atol=1e-12)


def test_coherent_state_mean_boson_number():
    beta = 1.1
    psi = coherent_state(beta, N_TRUNC).amplitudes
    n_op = np.diag(np.arange(DIM))
    assert np.real(psi.conj() @ n_op @ psi) == pytest.approx(abs(beta) ** 2, rel=1e-10)


def test_displacement_unitary_and_inverse():
    d = displacement_operator(0.6 + 0.2j, N_TRUNC).matrix
    assert np.allclose(d @ d.conj().T, np.eye(DIM), atol=1e-12)
    dinv = displacement_operator(-0.6 - 0.2j, N_TRUNC).matrix
    # D(-beta) D(beta) = 1 exactly (the generators are exact negatives)
    assert np.allclose(dinv @ d, np.eye(DIM), atol=1e-12)


def test_displacement_truncation_guard():
    with pytest.raises(TruncationError):
        displacement_operator(4.0, 10)


def test_squeeze_heisenberg_scaling():
    # variance of q in a squeezed vacuum is e^{-4 zeta} / 2 with the
    # q -> q e^{-2 zeta} convention
    zeta = -0.06
    n_trunc = 40
    s = squeeze_operator(zeta, n_trunc).matrix
    vac = np.zeros(n_trunc + 1, dtype=complex)
    vac[0] = 1.0
    psi = s @ vac
    a = annihilation(n_trunc)
    q = (a + a.conj().T) / math.sqrt(2)
    var_q = np.real(psi.conj() @ q @ q @ psi)
    assert var_q == pytest.approx(0.5 * math.exp(-4 * zeta), rel=1e-8)


def test_conditional_displacement_blocks():
    alpha = 0.5
    cd = conditional_displacement(2, alpha, 8).matrix
    d_minus = displacement_operator(-alpha, 8).matrix
    d_plus = displacement_operator(alpha, 8).matrix
    assert np.allclose(cd[:9, :9], d_minus)
    assert np.allclose(cd[9:, 9:], d_plus)
    assert np.allclose(cd[:9, 9:], 0)


def test_overlap_f_values():
    assert overlap_f("coherent", 0.3 + 0.1j) == pytest.approx(math.exp(-0.1), rel=1e-12)
    b2 = 0.05
    assert overlap_f("fock1", math.sqrt(b2)) == pytest.approx(
        math.exp(-b2) * (1 - b2) ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        overlap_f("gkp", 0.1)


def test_overlap_f_matches_fock_calculation():
    beta = 0.21 - 0.13j
    d = displacement_operator(beta, N_TRUNC).matrix
    for kind, n in (("coherent", 0), ("fock1", 1)):
        psi = fock_state(n, N_TRUNC).amplitudes
        val = abs(psi.conj() @ d @ psi) ** 2
        assert val == pytest.approx(overlap_f(kind, beta), abs=1e-12)


def test_pure_state_normalizes_and_rejects_zero():
    with pytest.warns(TruncationWarning):
        # population sits at the top of a 2-level basis, which the
        # leakage check is expected to flag
        s = PureState(np.array([3.0, 4.0]))
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PureState(np.zeros(4))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 0.5], [0.2, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.7, 0.7]))  # trace 1.4
    ok = DensityMatrix(np.diag([0.25, 0.75]).astype(complex))
    assert ok.dim == 2


def test_fidelity_of_mixture():
    psi = fock_state(0, 3)
    rho = DensityMatrix(np.diag([0.9, 0.1, 0, 0]).astype(complex))
    assert fidelity(psi, rho) == pytest.approx(0.9)


class TestDisplacementEngine:
    def test_matches_expm_construction(self):
        engine = DisplacementEngine(DIM)
        for beta in (0.4, 0.3j, 0.25 - 0.35j):
            ref = displacement_operator(beta, N_TRUNC).matrix
            got = engine.matrix(beta)
            # agreement away from the cutoff; the factorized form differs
            # from the exponential only in the top rows
            assert np.max(np.abs((got - ref)[:DIM // 2, :DIM // 2])) < 1e-10

    def test_composition_reproduces_geometric_phase(self):
        engine = DisplacementEngine(DIM)
        alpha, beta = 0.5, 0.3j
        vac = np.zeros(DIM, dtype=complex)
        vac[0] = 1.0
        # D(alpha) D(beta) D(-alpha) = e^{alpha beta* - alpha* beta} D(beta)
        seq = engine.apply(alpha, engine.apply(beta, engine.apply(-alpha, vac)))
        phase = np.exp(alpha * np.conj(beta) - np.conj(alpha) * beta)
        direct = phase * engine.apply(beta, vac)
        assert np.allclose(seq, direct, atol=1e-11)

    def test_apply_matches_matrix(self):
        engine = DisplacementEngine(12)
        rng = np.random.default_rng(1)
        vec = rng.normal(size=12) + 1j * rng.normal(size=12)
        beta = 0.2 - 0.1j
        assert np.allclose(engine.apply(beta, vec), engine.matrix(beta) @ vec)


@settings(max_examples=25, deadline=None)
@given(bq=st.floats(-0.8, 0.8), bp=st.floats(-0.8, 0.8))
def test_engine_preserves_norm(bq, bp):
    engine = DisplacementEngine(24)
    vec = coherent_state(0.3, 23).amplitudes
    out = engine.apply(complex(bq, bp), vec)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-10)
