import numpy as np
import pytest

from convroof import catalog
from convroof.ensemble import DensityMatrix
from convroof.errors import InvalidInputError, InvalidStateError


def test_werner_basic():
    rho = catalog.werner(2, 0.0)
    assert np.allclose(rho.matrix, np.eye(4) / 4)
    for d, alpha in ((2, 0.7), (3, -0.5), (4, 1.0)):
        rho = catalog.werner(d, alpha)
        assert abs(np.trace(rho.matrix).real - 1.0) <= 1e-12
        f = catalog.swap_operator(d)
        assert np.linalg.norm(rho.matrix @ f - f @ rho.matrix) <= 1e-12


def test_werner_singlet_at_alpha_one():
    rho = catalog.werner(2, 1.0)
    singlet = np.zeros(4, dtype=complex)
    singlet[1], singlet[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert np.linalg.norm(rho.matrix - np.outer(singlet, singlet.conj())) <= 1e-12


def test_werner_invalid_alpha():
    with pytest.raises(InvalidStateError):
        catalog.werner(2, 1.5)


def test_noisy_coherent_eigenvalues():
    for d, p in ((2, 0.3), (4, 0.8), (8, 0.0), (3, 1.0)):
        rho = catalog.noisy_coherent(d, p)
        w = np.sort(np.linalg.eigvalsh(rho.matrix))
        expected = np.sort([p + (1 - p) / d] + [(1 - p) / d] * (d - 1))
        assert np.allclose(w, expected, atol=1e-12)
    with pytest.raises(InvalidInputError):
        catalog.noisy_coherent(2, 1.2)


def test_noisy_coherent_limits():
    assert np.allclose(catalog.noisy_coherent(3, 0.0).matrix, np.eye(3) / 3)
    psi = catalog.maximally_coherent_state(3)
    assert np.allclose(
        catalog.noisy_coherent(3, 1.0).matrix, np.outer(psi, psi.conj())
    )


def test_coherence_analytic_values():
    assert catalog.coherence_analytic(5, 0.0) <= 1e-15
    assert abs(catalog.coherence_analytic(2, 1.0) - 0.5) <= 1e-12
    assert abs(catalog.coherence_analytic(2, 0.5) - 0.066987) <= 1e-6
    # empirically monotone in p on a grid
    for d in (2, 4, 16):
        vals = [catalog.coherence_analytic(d, p) for p in np.linspace(0, 1, 21)]
        assert np.all(np.diff(vals) >= -1e-12)


def test_bloch_qubit():
    assert np.allclose(catalog.bloch_qubit(0, 0, 0).matrix, np.eye(2) / 2)
    assert np.allclose(catalog.bloch_qubit(0, 0, 1).matrix, np.diag([1.0, 0.0]))
    b = 1 / np.sqrt(3)
    rho = catalog.bloch_qubit(b, b, b)
    assert abs(np.trace(rho.matrix @ rho.matrix).real - 1.0) <= 1e-12
    with pytest.raises(InvalidStateError):
        catalog.bloch_qubit(1.0, 1.0, 0.0)


def test_haar_random_state():
    pure = catalog.haar_random_state((4,), rank=1, seed=0)
    assert abs(np.trace(pure.matrix @ pure.matrix).real - 1.0) <= 1e-12
    full = catalog.haar_random_state((2, 2), rank=4, seed=1)
    assert np.linalg.eigvalsh(full.matrix)[0] > 0.0
    assert full.factors == (2, 2)
    again = catalog.haar_random_state((2, 2), rank=4, seed=1)
    assert np.array_equal(full.matrix, again.matrix)
    with pytest.raises(InvalidInputError):
        catalog.haar_random_state((2, 2), rank=5, seed=0)


def test_pauli_group():
    one = catalog.pauli_group(1)
    assert one.labels == ("I", "X", "Y", "Z")
    two = catalog.pauli_group(2)
    assert len(two) == 16
    mats = two.matrices()
    for i, p in enumerate(mats):
        assert np.allclose(p @ p.conj().T, np.eye(4))  # unitary
        assert np.allclose(p, p.conj().T)  # Hermitian
        for j, q in enumerate(mats):
            inner = np.trace(p.conj().T @ q).real
            assert abs(inner - (4.0 if i == j else 0.0)) <= 1e-12


def test_wootters_trivial_cases():
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    assert catalog.wootters_eof_oracle(DensityMatrix(np.outer(psi, psi.conj()))) == 0.0
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    val = catalog.wootters_eof_oracle(DensityMatrix(np.outer(bell, bell.conj())))
    assert abs(val - np.log(2.0)) <= 1e-12
    with pytest.raises(InvalidInputError):
        catalog.wootters_eof_oracle(DensityMatrix(np.eye(2) / 2))


def test_qfi_sld_trivial_cases():
    rng = np.random.default_rng(2)
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi /= np.linalg.norm(psi)
    rho = DensityMatrix(np.outer(psi, psi.conj()))
    h = catalog.random_hermitian(3, 3)
    var = np.vdot(psi, h @ h @ psi).real - np.vdot(psi, h @ psi).real ** 2
    assert abs(catalog.qfi_sld_oracle(rho, h) - 4.0 * var) <= 1e-10
    assert abs(catalog.qfi_sld_oracle(DensityMatrix(np.eye(2) / 2), np.diag([1.0, -1.0]))) <= 1e-12


def test_ppt_check():
    prod = DensityMatrix(np.eye(4) / 4, factors=(2, 2))
    assert catalog.ppt_check(prod)
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    assert not catalog.ppt_check(DensityMatrix(np.outer(bell, bell.conj()), factors=(2, 2)))
    # Werner family flips exactly at alpha = 1/d
    for d in (2, 3):
        assert catalog.ppt_check(catalog.werner(d, 1.0 / d - 1e-6))
        assert not catalog.ppt_check(catalog.werner(d, 1.0 / d + 1e-6))


def test_ppt_boundary_bisection():
    for d in (2, 3):
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-10:
            mid = (lo + hi) / 2
            if catalog.ppt_check(catalog.werner(d, mid)):
                lo = mid
            else:
                hi = mid
        assert abs(lo - 1.0 / d) <= 1e-9


def test_depolarizing_channel():
    ident = catalog.depolarizing_channel(3, 0.0)
    rng = np.random.default_rng(4)
    rho = catalog.haar_random_state((3,), rank=2, seed=5).matrix
    assert np.linalg.norm(ident.apply(rho) - rho) <= 1e-12
    full = catalog.depolarizing_channel(3, 1.0)
    assert np.linalg.norm(full.apply(rho) - np.eye(3) / 3) <= 1e-12
    for lam in (0.0, 0.3, 1.0):
        ch = catalog.depolarizing_channel(4, lam)
        acc = sum(k.conj().T @ k for k in ch.kraus)
        assert np.linalg.norm(acc - np.eye(4)) <= 1e-10
    with pytest.raises(InvalidInputError):
        catalog.depolarizing_channel(2, 1.5)


def test_channel_validation():
    with pytest.raises(InvalidInputError):
        catalog.Channel(kraus=(np.eye(2) * 0.5,), dim_in=2, dim_out=2)


def test_octahedron_member():
    assert catalog.octahedron_member(0.3, 0.3, 0.3)
    assert not catalog.octahedron_member(0.6, 0.6, 0.0)
    assert catalog.octahedron_member(1.0, 0.0, 0.0, tol=1e-12)
