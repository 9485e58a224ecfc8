import numpy as np
import pytest

from convroof.errors import InvalidInputError, RankDeficiencyError
from convroof.manifold import (
    EulerTrivialization,
    KINDS,
    euler_trivialize,
    exp_trivialize,
    gellmann_basis,
    get_trivialization,
    param_count,
    polar_trivialize,
    pullback_gradient,
    stiefel_residual,
)

SHAPES = [(2, 1), (4, 2), (6, 3), (8, 4), (5, 5)]


def random_stiefel(n, r, rng):
    a = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    q, _ = np.linalg.qr(a)
    return q[:, :r]


def test_param_counts():
    for n, r in SHAPES:
        assert param_count("polar", n, r) == 2 * n * r
        assert param_count("exp", n, r) == n * n - 1
        # Euler-Hurwitz count equals the manifold dimension
        assert param_count("euler", n, r) == 2 * n * r - r * r


def test_euler_parameter_identity():
    # 2(m_r + n - r) + r == 2nr - r² with m_r = nr - n - r²/2 + r/2
    for n in range(2, 9):
        for r in range(1, n + 1):
            m_r = n * r - n - r * r / 2 + r / 2
            assert m_r == int(m_r)
            assert 2 * (int(m_r) + n - r) + r == 2 * n * r - r * r


@pytest.mark.parametrize("kind", KINDS)
def test_constraint_fuzz(kind):
    rng = np.random.default_rng(hash(kind) % 2**32)
    for n, r in SHAPES:
        triv = get_trivialization(kind, n, r)
        for _ in range(20):
            x, _ = triv.forward(triv.initial_params(rng))
            assert x.shape == (n, r)
            assert stiefel_residual(x) <= 1e-10


def test_polar_projection_fixed_point():
    rng = np.random.default_rng(0)
    triv = get_trivialization("polar", 6, 3)
    x0 = random_stiefel(6, 3, rng)
    x = polar_trivialize(triv.params_from_matrix(x0), 6, 3)
    assert np.linalg.norm(x - x0) <= 1e-12
    # positive-scale invariance
    x = polar_trivialize(triv.params_from_matrix(3.0 * x0), 6, 3)
    assert np.linalg.norm(x - x0) <= 1e-12


def test_polar_rank_deficiency():
    triv = get_trivialization("polar", 4, 2)
    a = np.zeros((4, 2), dtype=complex)
    a[:, 0] = [1.0, 0.0, 0.0, 0.0]
    a[:, 1] = a[:, 0]  # rank 1
    with pytest.raises(RankDeficiencyError):
        triv.forward(triv.params_from_matrix(a))


def test_exp_zero_and_square():
    x = exp_trivialize(np.zeros(15), 4, 2)
    assert np.allclose(x, np.eye(4)[:, :2])
    # n = r gives a full unitary matrix
    rng = np.random.default_rng(1)
    x = exp_trivialize(rng.uniform(-np.pi, np.pi, 15), 4, 4)
    assert np.linalg.norm(x.conj().T @ x - np.eye(4)) <= 1e-10
    assert np.linalg.norm(x @ x.conj().T - np.eye(4)) <= 1e-10


def test_euler_scalar_case():
    # n = r = 1: only a single phase survives
    x = euler_trivialize(np.array([0.7]), 1, 1)
    assert x.shape == (1, 1)
    assert np.allclose(x[0, 0], np.exp(0.7j))


def test_euler_zero_angles():
    triv = get_trivialization("euler", 5, 2)
    x, _ = triv.forward(np.zeros(triv.param_count))
    assert np.allclose(x, np.eye(5)[:, :2])


def test_euler_reconstructs_random_stiefel():
    """Surjectivity witness: eliminate a random X to angles, rebuild, compare."""
    rng = np.random.default_rng(2)
    for n, r in [(3, 1), (4, 2), (6, 3), (5, 5)]:
        triv = EulerTrivialization(n, r)
        x0 = random_stiefel(n, r, rng)
        params = triv.params_from_stiefel(x0)
        x, _ = triv.forward(params)
        assert np.linalg.norm(x - x0) <= 1e-12


def test_gellmann_pauli_case():
    basis = gellmann_basis(2)
    assert len(basis) == 3
    paulis = [
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]]),
    ]
    for b in basis:
        assert any(np.allclose(b, p) for p in paulis)


def test_gellmann_traceless_orthogonal():
    for n in (2, 3, 5):
        basis = gellmann_basis(n)
        assert len(basis) == n * n - 1
        for i, a in enumerate(basis):
            assert abs(np.trace(a)) <= 1e-14
            assert np.linalg.norm(a - a.conj().T) <= 1e-14
            for j, b in enumerate(basis):
                inner = np.trace(a.conj().T @ b).real
                assert abs(inner - (2.0 if i == j else 0.0)) <= 1e-12
    with pytest.raises(InvalidInputError):
        gellmann_basis(1)


def _linear_objective(c):
    def value(x):
        return float(np.real(np.trace(c.conj().T @ x)))

    return value, c / 2.0  # dL = 2 Re Tr[(c/2)† dX]


@pytest.mark.parametrize("kind", KINDS)
def test_pullback_matches_finite_differences(kind):
    rng = np.random.default_rng(3)
    n, r = 5, 3
    triv = get_trivialization(kind, n, r)
    c = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    value, grad_x = _linear_objective(c)
    step = 1e-6
    for _ in range(4):
        params = triv.initial_params(rng)
        analytic = pullback_gradient(kind, params, grad_x)
        fd = np.empty_like(analytic)
        for j in range(params.size):
            up, dn = params.copy(), params.copy()
            up[j] += step
            dn[j] -= step
            fd[j] = (value(triv.forward(up)[0]) - value(triv.forward(dn)[0])) / (
                2 * step
            )
        assert np.linalg.norm(analytic - fd) <= 1e-5 * max(1.0, np.linalg.norm(fd))


def test_pullback_polar_at_stiefel_point():
    rng = np.random.default_rng(4)
    n, r = 6, 3
    triv = get_trivialization("polar", n, r)
    x0 = random_stiefel(n, r, rng)
    params = triv.params_from_matrix(x0)
    c = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    value, grad_x = _linear_objective(c)
    analytic = pullback_gradient("polar", params, grad_x)
    step = 1e-6
    fd = np.empty_like(analytic)
    for j in range(params.size):
        up, dn = params.copy(), params.copy()
        up[j] += step
        dn[j] -= step
        fd[j] = (value(triv.forward(up)[0]) - value(triv.forward(dn)[0])) / (2 * step)
    assert np.linalg.norm(analytic - fd) <= 1e-6 * max(1.0, np.linalg.norm(fd))


@pytest.mark.parametrize("kind", KINDS)
def test_pullback_zero_cotangent(kind):
    rng = np.random.default_rng(5)
    triv = get_trivialization(kind, 4, 2)
    grad = pullback_gradient(kind, triv.initial_params(rng), np.zeros((4, 2)))
    assert np.allclose(grad, 0.0)


def test_parameter_length_validation():
    with pytest.raises(InvalidInputError):
        polar_trivialize(np.zeros(5), 4, 2)
    with pytest.raises(InvalidInputError):
        exp_trivialize(np.zeros(5), 4, 2)
    with pytest.raises(InvalidInputError):
        euler_trivialize(np.zeros(5), 4, 2)
    with pytest.raises(InvalidInputError):
        get_trivialization("nope", 4, 2)
