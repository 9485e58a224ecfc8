"""Trivializations of the complex Stiefel manifold St(n, r).

Each map sends a real parameter vector onto an n×r matrix X with X†X = I,
and carries a hand-written adjoint so gradients with respect to X pull back
to gradients with respect to the raw real parameters.  The optimizer only
ever sees real vectors; all complex structure lives here.

Gradient convention (Wirtinger): a cotangent G for a complex matrix X is
the derivative of the real objective with respect to conj(X) entrywise, so
dL = 2 Re Tr[G† dX], and the gradient with respect to the real/imaginary
parts of an entry is 2 Re G / 2 Im G.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError
from .linalg import hermitian_eig

KINDS = ("polar", "exp", "euler")

__all__ = [
    "KINDS",
    "PolarTrivialization",
    "ExpTrivialization",
    "EulerTrivialization",
    "get_trivialization",
    "polar_trivialize",
    "exp_trivialize",
    "euler_trivialize",
    "pullback_gradient",
    "gellmann_basis",
    "param_count",
    "stiefel_residual",
]


def stiefel_residual(x: np.ndarray) -> float:
    """Frobenius norm of X†X - I."""
    r = x.shape[1]
    return float(np.linalg.norm(x.conj().T @ x - np.eye(r)))


def gellmann_basis(n: int) -> list[np.ndarray]:
    """The n²-1 generalized Gell-Mann matrices (traceless, Tr[MiMj] = 2δij)."""
    if n < 2:
        raise InvalidInputError(f"Gell-Mann basis needs n >= 2, got {n}")
    basis = []
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
            anti = np.zeros((n, n), dtype=np.complex128)
            anti[j, k] = -1j
            anti[k, j] = 1j
            basis.append(anti)
    for m in range(1, n):
        diag = np.zeros(n, dtype=np.complex128)
        diag[:m] = 1.0
        diag[m] = -m
        basis.append(np.diag(diag) * np.sqrt(2.0 / (m * (m + 1))))
    return basis


class PolarTrivialization:
    """X = A (A†A)^{-1/2} with A an arbitrary full-column-rank complex matrix."""

    kind = "polar"

    def __init__(self, n: int, r: int):
        if not 1 <= r <= n:
            raise InvalidInputError(f"need 1 <= r <= n, got n={n}, r={r}")
        self.n = n
        self.r = r

    @property
    def param_count(self) -> int:
        return 2 * self.n * self.r

    def initial_params(self, rng: np.random.Generator) -> np.ndarray:
        # i.i.d. standard complex Gaussian entries of A
        return rng.standard_normal(self.param_count) / np.sqrt(2.0)

    def assemble(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise InvalidInputError(
                f"polar parameter vector must have length {self.param_count}, "
                f"got {params.shape}"
            )
        nr = self.n * self.r
        return (params[:nr] + 1j * params[nr:]).reshape(self.n, self.r)

    def params_from_matrix(self, a: np.ndarray) -> np.ndarray:
        """Real parameter vector whose assembled matrix is ``a``."""
        a = np.asarray(a, dtype=np.complex128)
        return np.concatenate([a.real.ravel(), a.imag.ravel()])

    def forward(self, params: np.ndarray):
        a = self.assemble(params)
        h = a.conj().T @ a
        w, v = hermitian_eig(h)
        # smallest singular value of A is sqrt(w[0])
        if w[0] <= 1e-20:
            raise RankDeficiencyError(
                "polar trivialization hit a rank-deficient matrix "
                f"(sigma_min^2 = {w[0]:.3e}); reinitialize and retry"
            )
        s = np.sqrt(w)
        t = (v / s) @ v.conj().T  # (A†A)^{-1/2}
        x = a @ t
        ctx = (a, w, v, t)
        return x, ctx

    def pullback(self, ctx, grad_x: np.ndarray) -> np.ndarray:
        a, w, v, t = ctx
        s = np.sqrt(w)
        # chain: X = A·T, T = S^{-1}, S·dS + dS·S = dH, H = A†A
        g_t = a.conj().T @ grad_x
        g_t = (g_t + g_t.conj().T) / 2  # dT is Hermitian; project
        g_s = -t @ g_t @ t
        ghat = v.conj().T @ g_s @ v
        w_h = v @ (ghat / (s[:, None] + s[None, :])) @ v.conj().T
        g_a = grad_x @ t + 2.0 * a @ w_h
        return np.concatenate([2.0 * g_a.real.ravel(), 2.0 * g_a.imag.ravel()])


class ExpTrivialization:
    """First r columns of exp(i Σ θj Mj) over the Gell-Mann basis.

    The global-phase generator is dropped: n²-1 parameters.
    """

    kind = "exp"

    def __init__(self, n: int, r: int):
        if not 1 <= r <= n:
            raise InvalidInputError(f"need 1 <= r <= n, got n={n}, r={r}")
        if n < 2:
            raise InvalidInputError("exp trivialization needs n >= 2")
        self.n = n
        self.r = r
        self._basis = np.stack(gellmann_basis(n))

    @property
    def param_count(self) -> int:
        return self.n * self.n - 1

    def initial_params(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-np.pi, np.pi, size=self.param_count)

    def forward(self, params: np.ndarray):
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise InvalidInputError(
                f"exp parameter vector must have length {self.param_count}, "
                f"got {params.shape}"
            )
        k = np.tensordot(params, self._basis, axes=(0, 0))
        w, v = hermitian_eig(k)
        u = (v * np.exp(1j * w)) @ v.conj().T
        x = u[:, : self.r].copy()
        ctx = (w, v)
        return x, ctx

    def pullback(self, ctx, grad_x: np.ndarray) -> np.ndarray:
        w, v = ctx
        g_u = np.zeros((self.n, self.n), dtype=np.complex128)
        g_u[:, : self.r] = grad_x
        # Daleckii-Krein: dU = V [(V† dK V) ⊙ F] V† with the divided
        # difference of exp(ix), written in the everywhere-stable form
        # F_kl = i e^{i(λk+λl)/2} sinc((λk-λl)/2).
        delta = w[:, None] - w[None, :]
        f = 1j * np.exp(0.5j * (w[:, None] + w[None, :])) * np.sinc(delta / (2 * np.pi))
        ghat = v.conj().T @ g_u @ v
        g_k = v @ (ghat * f.conj()) @ v.conj().T
        return 2.0 * np.real(np.einsum("ij,aij->a", g_k.conj(), self._basis))


class EulerTrivialization:
    """Product of conjugated Givens factors applied to a diagonal phase matrix.

    Uses 2nr - r² parameters: one (θ, φ) pair per Givens factor plus r
    column phases.  Factor bookkeeping follows the column-elimination order:
    column c (1-based) owns block indices s = n-1 down to c, and the map
    applies the factor daggers in reverse elimination order.
    """

    kind = "euler"

    def __init__(self, n: int, r: int):
        if not 1 <= r <= n:
            raise InvalidInputError(f"need 1 <= r <= n, got n={n}, r={r}")
        self.n = n
        self.r = r
        self._schedule = [
            (c, s) for c in range(1, r + 1) for s in range(n - 1, c - 1, -1)
        ]
        self.n_givens = len(self._schedule)

    @property
    def param_count(self) -> int:
        return 2 * self.n_givens + self.r

    def initial_params(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-np.pi, np.pi, size=self.param_count)

    def _split(self, params: np.ndarray):
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise InvalidInputError(
                f"euler parameter vector must have length {self.param_count}, "
                f"got {params.shape}"
            )
        m = self.n_givens
        return params[:m], params[m : 2 * m], params[2 * m :]

    @staticmethod
    def _apply_g(y, s, theta, phi):
        # left-multiply by G^{(s)}(θ, φ); rows s-1, s in 0-based indexing
        a = s - 1
        c, sn = np.cos(theta), np.sin(theta)
        ep, em = np.exp(1j * phi), np.exp(-1j * phi)
        ya = ep * c * y[a] + em * sn * y[a + 1]
        yb = -ep * sn * y[a] + em * c * y[a + 1]
        y[a], y[a + 1] = ya, yb

    @staticmethod
    def _apply_gdag(y, s, theta, phi):
        # left-multiply by G^{(s)}(θ, φ)†
        a = s - 1
        c, sn = np.cos(theta), np.sin(theta)
        ep, em = np.exp(1j * phi), np.exp(-1j * phi)
        ya = em * c * y[a] - em * sn * y[a + 1]
        yb = ep * sn * y[a] + ep * c * y[a + 1]
        y[a], y[a + 1] = ya, yb

    def forward(self, params: np.ndarray):
        theta, phi, varphi = self._split(params)
        y = np.zeros((self.n, self.r), dtype=np.complex128)
        y[np.arange(self.r), np.arange(self.r)] = np.exp(1j * varphi)
        # X = G_1† G_2† ... G_m† D: innermost (last elimination) factor first
        for i in reversed(range(self.n_givens)):
            self._apply_gdag(y, self._schedule[i][1], theta[i], phi[i])
        return y, params

    def pullback(self, ctx, grad_x: np.ndarray) -> np.ndarray:
        theta, phi, varphi = self._split(ctx)
        x, _ = self.forward(ctx)
        c_mat = np.array(grad_x, dtype=np.complex128)
        r_mat = x.copy()
        g_theta = np.empty(self.n_givens)
        g_phi = np.empty(self.n_givens)
        for i in range(self.n_givens):
            s = self._schedule[i][1]
            a = s - 1
            th, ph = theta[i], phi[i]
            # peel P_i = G_i† off the running product: R_{i+1} = G_i R_i
            self._apply_g(r_mat, s, th, ph)
            gp = c_mat[a : a + 2] @ r_mat[a : a + 2].conj().T
            cth, sth = np.cos(th), np.sin(th)
            ep, em = np.exp(1j * ph), np.exp(-1j * ph)
            dp_dth = np.array(
                [[-em * sth, -em * cth], [ep * cth, -ep * sth]]
            )
            dp_dph = np.array(
                [[-1j * em * cth, 1j * em * sth], [1j * ep * sth, 1j * ep * cth]]
            )
            g_theta[i] = 2.0 * np.real(np.sum(gp.conj() * dp_dth))
            g_phi[i] = 2.0 * np.real(np.sum(gp.conj() * dp_dph))
            # cotangent for the tail: C_{i+1} = G_i C_i
            self._apply_g(c_mat, s, th, ph)
        diag = np.array([c_mat[k, k] for k in range(self.r)])
        g_varphi = 2.0 * np.real(diag.conj() * 1j * np.exp(1j * varphi))
        return np.concatenate([g_theta, g_phi, g_varphi])

    def params_from_stiefel(self, x: np.ndarray, tol: float = 1e-14) -> np.ndarray:
        """Recover one parameter pre-image of a Stiefel matrix by elimination."""
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.n, self.r):
            raise InvalidInputError(f"expected shape {(self.n, self.r)}, got {x.shape}")
        y = x.copy()
        theta = np.empty(self.n_givens)
        phi = np.empty(self.n_givens)
        for i, (c, s) in enumerate(self._schedule):
            lo, hi = y[s - 1, c - 1], y[s, c - 1]
            if abs(lo) < tol:
                theta[i], phi[i] = (0.0, 0.0) if abs(hi) < tol else (np.pi / 2, 0.0)
            else:
                ratio = hi / lo
                theta[i] = np.arctan(abs(ratio))
                phi[i] = 0.5 * np.angle(ratio)
            self._apply_g(y, s, theta[i], phi[i])
        varphi = np.angle(np.array([y[k, k] for k in range(self.r)]))
        return np.concatenate([theta, phi, varphi])


_CLASSES = {
    "polar": PolarTrivialization,
    "exp": ExpTrivialization,
    "euler": EulerTrivialization,
}


def get_trivialization(kind: str, n: int, r: int):
    if kind not in _CLASSES:
        raise InvalidInputError(f"unknown trivialization kind {kind!r}")
    return _CLASSES[kind](n, r)


def param_count(kind: str, n: int, r: int) -> int:
    return get_trivialization(kind, n, r).param_count


def polar_trivialize(params, n: int, r: int) -> np.ndarray:
    """X = A (A†A)^{-1/2} from 2nr real parameters (Re A, Im A)."""
    x, _ = PolarTrivialization(n, r).forward(params)
    return x


def exp_trivialize(params, n: int, r: int) -> np.ndarray:
    """First r columns of exp(i Σ θj Mj) from n²-1 real parameters."""
    x, _ = ExpTrivialization(n, r).forward(params)
    return x


def euler_trivialize(params, n: int, r: int) -> np.ndarray:
    """Givens-factor product applied to diagonal phases, 2nr - r² parameters."""
    x, _ = EulerTrivialization(n, r).forward(params)
    return x


def pullback_gradient(kind: str, params, grad_x: np.ndarray) -> np.ndarray:
    """Gradient with respect to the raw real parameters for any kind.

    ``grad_x`` is the objective gradient with respect to conj(X) entries;
    the (n, r) shape is taken from it.
    """
    grad_x = np.asarray(grad_x, dtype=np.complex128)
    triv = get_trivialization(kind, *grad_x.shape)
    _, ctx = triv.forward(params)
    return triv.pullback(ctx, grad_x)
