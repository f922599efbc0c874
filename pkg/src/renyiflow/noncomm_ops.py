"""Noncommutative operator toolbox.

Spectral-kernel realizations of the operators that drive the gradient-flow
and detailed-balance machinery: two-sided weighting by powers of a state,
the modular conjugation, twisted logarithmic-mean multiplication and its
inverse, the Renyi-order multiplication operator, the detailed-balance
weight kernel, and the weighted-norm entropy/Dirichlet functionals.

Every integral-form operator used here diagonalizes in the eigenbasis of
its base matrix, so it is evaluated through a closed-form entrywise
kernel: an operator `A -> U (m . (U* A U)) U*` where `.` is the entrywise
product.  Quadrature is used only as an independent oracle in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore as mc
from .errors import DomainError, SingularityError

# relative spacing below which two eigenvalues count as one degenerate level
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class KernelOperator:
    """Entrywise-kernel superoperator in a fixed eigenbasis.

    Represents A -> U (kernel . (U* A U)) U*.  Self-adjoint in the
    Hilbert-Schmidt inner product iff the kernel is Hermitian; strictly
    positive iff all kernel entries are positive.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    kernel: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def is_positive(self) -> bool:
        return bool(np.all(np.real(self.kernel) > 0.0) and np.allclose(self.kernel.imag, 0.0))

    def apply(self, A: np.ndarray) -> np.ndarray:
        U = self.basis
        return U @ (self.kernel * (U.conj().T @ np.asarray(A, dtype=complex) @ U)) @ U.conj().T

    def inverse(self) -> "KernelOperator":
        if np.any(np.abs(self.kernel) == 0.0):
            raise SingularityError("kernel operator has a zero entry; not invertible")
        return KernelOperator(self.eigenvalues, self.basis, 1.0 / self.kernel)

    def compose_kernel(self, other: "KernelOperator") -> "KernelOperator":
        """Entrywise product composition; valid only for a shared eigenbasis."""
        return KernelOperator(self.eigenvalues, self.basis, self.kernel * other.kernel)

    def superop(self) -> np.ndarray:
        U = self.basis
        W = np.kron(U.conj(), U)
        return W @ np.diag(mc.vec(self.kernel)) @ W.conj().T


def _positive_spectrum(X, name: str = "X") -> mc.SpectralDecomposition:
    dec = mc.eig_hermitian(X)
    if dec.values[0] <= 0.0:
        raise SingularityError(f"{name}: not strictly positive (min eigenvalue {dec.values[0]:.3e})")
    return dec


def sandwich_pow(sigma, gamma: float, A) -> np.ndarray:
    """Two-sided weighting sigma^(gamma/2) A sigma^(gamma/2)."""
    if gamma == 0.0:
        return np.asarray(A, dtype=complex).copy()
    P = mc.matrix_power(sigma, gamma / 2.0)
    return P @ np.asarray(A, dtype=complex) @ P


def modular_apply(sigma, A) -> np.ndarray:
    """Modular conjugation sigma A sigma^(-1)."""
    dec = _positive_spectrum(sigma, "sigma")
    S = dec.reconstruct()
    Sinv = dec.reconstruct(1.0 / dec.values)
    return S @ np.asarray(A, dtype=complex) @ Sinv


def _log_mean_kernel(lam: np.ndarray, omega: float) -> np.ndarray:
    """Kernel of the twisted logarithmic mean.

    Entry (k, l) is the logarithmic mean of a = e^(omega/2) lam_k and
    c = e^(-omega/2) lam_l, written as sqrt(a c) * sinh(u/2)/(u/2) with
    u = log(a/c); the geometric-mean form stays fully accurate through
    the degenerate limit u -> 0.
    """
    loglam = np.log(lam)
    u = omega + loglam[:, None] - loglam[None, :]
    geo = np.sqrt(lam[:, None] * lam[None, :])
    half = 0.5 * u
    ratio = np.ones_like(u)
    mask = half != 0.0
    ratio[mask] = np.sinh(half[mask]) / half[mask]
    return geo * ratio


def log_mean_multiplier(X, omega: float = 0.0) -> KernelOperator:
    """Twisted multiplication by X: the integral of e^(omega(s-1/2)) X^s A X^(1-s).

    Strictly positive for strictly positive X; the adjoint flips the sign
    of omega.
    """
    dec = _positive_spectrum(X)
    return KernelOperator(dec.values, dec.vectors, _log_mean_kernel(dec.values, omega))


def log_mean_multiplier_inv(X, omega: float = 0.0) -> KernelOperator:
    """Inverse of `log_mean_multiplier`: entrywise reciprocal kernel."""
    return log_mean_multiplier(X, omega).inverse()


def chain_rule_residual(V, X, omega: float) -> float:
    """Frobenius defect of the chain-rule identity for the twisted multiplier.

    Exactly zero in exact arithmetic; the returned value is floating-point
    noise and is contracted to stay below 1e-9 * ||V|| * ||X||.
    """
    V = np.asarray(V, dtype=complex)
    dec = _positive_spectrum(X)
    logX = dec.reconstruct(np.log(dec.values))
    n = V.shape[0]
    shift = 0.5 * omega * np.eye(n)
    inner = V @ (logX - shift) - (logX + shift) @ V
    lhs = log_mean_multiplier(X, omega).apply(inner)
    Xm = dec.reconstruct()
    rhs = np.exp(-omega / 2.0) * V @ Xm - np.exp(omega / 2.0) * Xm @ V
    return float(np.linalg.norm(lhs - rhs))


# --- gradient / divergence against a generator's jump operators -------------


def nc_gradient(G, A) -> list[np.ndarray]:
    """Noncommutative gradient: per-jump commutators [V_j, A]."""
    A = np.asarray(A, dtype=complex)
    return [term.V @ A - A @ term.V for term in G.terms]


def nc_divergence(G, fields) -> np.ndarray:
    """Noncommutative divergence: sum of [A_j, V_j*]; adjoint of -gradient."""
    if len(fields) != len(G.terms):
        raise DomainError(f"vector field has {len(fields)} components, generator has {len(G.terms)}")
    out = np.zeros((G.n, G.n), dtype=complex)
    for A, term in zip(fields, G.terms):
        Vd = term.V.conj().T
        out += np.asarray(A) @ Vd - Vd @ np.asarray(A)
    return out


# --- Renyi-order multiplication operator ------------------------------------


def rho_sigma(rho, sigma, alpha: float) -> np.ndarray:
    """The sandwiched state sigma^((1-a)/2a) rho sigma^((1-a)/2a)."""
    if alpha <= 0.0:
        raise DomainError(f"order alpha={alpha} must be positive")
    return mc.hermitize(sandwich_pow(sigma, (1.0 - alpha) / alpha, rho))


@dataclass(frozen=True)
class RenyiMultiplier:
    """Order-alpha multiplication operator attached to a state rho.

    apply() realizes the strictly positive map whose inverse carries the
    gradient of the order-alpha divergence onto jump-operator commutators;
    inverse_apply() is the exact inverse.  Composition structure:
    a scalar Z/alpha, outer two-sided sigma powers, and a single entrywise
    kernel in the eigenbasis of the sandwiched state.
    """

    alpha: float
    omega: float
    Z: float
    outer: np.ndarray       # sigma^((alpha-1)/(2 alpha))
    outer_inv: np.ndarray
    kernel_op: KernelOperator

    def apply(self, A) -> np.ndarray:
        P = self.outer
        B = self.kernel_op.apply(P @ np.asarray(A, dtype=complex) @ P)
        return (self.Z / self.alpha) * (P @ B @ P)

    def inverse_apply(self, A) -> np.ndarray:
        Q = self.outer_inv
        B = self.kernel_op.inverse().apply(Q @ np.asarray(A, dtype=complex) @ Q)
        return (self.alpha / self.Z) * (Q @ B @ Q)


def renyi_multiplier(rho, sigma, omega: float, alpha: float) -> RenyiMultiplier:
    """Build the order-alpha multiplication operator for strictly positive rho.

    At alpha = 1 it reduces to the twisted multiplier of rho itself; at
    alpha = 2 it is (Z/2) times two-sided multiplication by sigma^(1/2).
    """
    if alpha <= 0.0:
        raise DomainError(f"order alpha={alpha} must be positive")
    rs = rho_sigma(rho, sigma, alpha)
    dec = _positive_spectrum(rs, "sandwiched state")
    lam = dec.values
    Z = float(np.sum(lam**alpha))
    m_num = _log_mean_kernel(lam, omega / alpha)
    m_den = _log_mean_kernel(lam ** (alpha - 1.0), (alpha - 1.0) * omega / alpha)
    kernel = m_num / m_den
    gamma = (alpha - 1.0) / alpha
    outer = mc.matrix_power(sigma, gamma / 2.0)
    outer_inv = mc.matrix_power(sigma, -gamma / 2.0)
    return RenyiMultiplier(
        alpha=alpha,
        omega=omega,
        Z=Z,
        outer=outer,
        outer_inv=outer_inv,
        kernel_op=KernelOperator(lam, dec.vectors, kernel),
    )


# --- comparison-theorem similarity pair --------------------------------------


def similarity_pair(X, omega: float, s: float) -> KernelOperator:
    """The symmetrized conjugation pair e^(ws) X^s . X^(-s) + e^(w(1-s)) X^(1-s) . X^(s-1).

    Defined for s in [0, 1/2]; its kernel is b^s + b^(1-s) with
    b = e^omega lam_k / lam_l, entrywise non-increasing in s.
    """
    if not 0.0 <= s <= 0.5:
        raise DomainError(f"similarity exponent s={s} outside [0, 1/2]")
    dec = _positive_spectrum(X)
    loglam = np.log(dec.values)
    logb = omega + loglam[:, None] - loglam[None, :]
    kernel = np.exp(s * logb) + np.exp((1.0 - s) * logb)
    return KernelOperator(dec.values, dec.vectors, kernel)


def similarity_pair_bounds(X, omega: float) -> tuple[float, float]:
    """Spectrum envelope [2 sqrt(e^w lmin/lmax), 1 + e^w lmax/lmin], valid for all s."""
    dec = _positive_spectrum(X)
    lo = 2.0 * np.sqrt(np.exp(omega) * dec.values[0] / dec.values[-1])
    hi = 1.0 + np.exp(omega) * dec.values[-1] / dec.values[0]
    return float(lo), float(hi)


# --- detailed-balance weight operator ----------------------------------------


def _weight_kernel(lam: np.ndarray, alpha: float) -> np.ndarray:
    """Closed-form weight coefficients in the eigenbasis of sigma.

    All orders unify as geo * (a-1) sinh(x) / sinh((a-1) x) with
    x = (log l_k - log l_j)/(2a); explicit closed forms are kept for the
    degenerate diagonal, alpha = 1 (logarithmic mean), alpha = 2
    (geometric mean), alpha = 0 (max) and alpha = infinity.
    """
    loglam = np.log(lam)
    g = loglam[:, None] - loglam[None, :]
    geo = np.sqrt(lam[:, None] * lam[None, :])
    degenerate = np.abs(g) <= DEGENERACY_RTOL
    mean = 0.5 * (lam[:, None] + lam[None, :])

    if alpha == 0.0:
        f = np.maximum(lam[:, None], lam[None, :])
        return np.where(degenerate, mean, f)
    if np.isinf(alpha):
        half = 0.5 * g
        f = np.empty_like(g)
        mask = ~degenerate
        f[mask] = geo[mask] * half[mask] / np.sinh(half[mask])
        return np.where(degenerate, mean, f)
    if alpha == 1.0:
        half = 0.5 * g
        f = np.empty_like(g)
        mask = ~degenerate
        f[mask] = geo[mask] * np.sinh(half[mask]) / half[mask]
        return np.where(degenerate, mean, f)
    if alpha == 2.0:
        return np.where(degenerate, mean, geo)

    # (a-1) sinh(x)/sinh((a-1)x) evaluated through log|sinh| so that tiny
    # orders (x ~ g/2a huge) cannot overflow; the sign product collapses to
    # |a-1| since sinh is odd
    x = g / (2.0 * alpha)
    y = (alpha - 1.0) * x
    f = np.empty_like(g)
    mask = ~degenerate

    def log_sinh_abs(t):
        t = np.abs(t)
        return t + np.log1p(-np.exp(-2.0 * t)) - np.log(2.0)

    f[mask] = geo[mask] * np.abs(alpha - 1.0) * np.exp(
        log_sinh_abs(x[mask]) - log_sinh_abs(y[mask])
    )
    return np.where(degenerate, mean, f)


def weight_operator(sigma, alpha: float) -> KernelOperator:
    """Weight operator whose inner product tests order-alpha detailed balance.

    alpha = 1 gives the BKM (logarithmic-mean) weighting, alpha = 2 the KMS
    weighting; alpha in [0, infinity] is accepted.
    """
    if alpha < 0.0:
        raise DomainError(f"weight order alpha={alpha} must be >= 0")
    dec = _positive_spectrum(sigma, "sigma")
    return KernelOperator(dec.values, dec.vectors, _weight_kernel(dec.values, alpha))


# --- weighted L_alpha functionals --------------------------------------------


def lp_norm(sigma, alpha: float, A) -> float:
    """Weighted alpha-norm (tr |sigma^(1/2a) A sigma^(1/2a)|^alpha)^(1/alpha)."""
    B = sandwich_pow(sigma, 1.0 / alpha, A)
    dec = mc.eig_hermitian(mc.hermitize(B))
    return float(np.sum(np.abs(dec.values) ** alpha) ** (1.0 / alpha))


def power_op(sigma, beta: float, alpha: float, A) -> np.ndarray:
    """Power operator: unweight by 1/beta after raising the 1/alpha-weighted
    modulus to the alpha/beta power."""
    B = mc.hermitize(sandwich_pow(sigma, 1.0 / alpha, A))
    absB = mc.matrix_function(B, np.abs)
    P = mc.matrix_power(absB, alpha / beta, lenient=True)
    return sandwich_pow(sigma, -1.0 / beta, P)


def ent_fun(sigma, alpha: float, X) -> float:
    """Order-alpha entropy functional of a strictly positive X (>= 0)."""
    B = mc.hermitize(sandwich_pow(sigma, 1.0 / alpha, X))
    dec = _positive_spectrum(B, "weighted argument")
    w = dec.values**alpha
    Balpha = dec.reconstruct(w)
    log_sigma = mc.matrix_log(sigma)
    t1 = float(np.sum(w * np.log(w)))
    t2 = float(np.real(np.trace(Balpha @ log_sigma)))
    nrm = float(np.sum(w))
    return t1 - t2 - nrm * np.log(nrm)


def dirichlet_form(G, alpha: float, X) -> float:
    """Order-alpha Dirichlet form of the generator on strictly positive X.

    The generic branch pairs the conjugate-power operator with -L(X) in the
    1/2-weighted inner product; alpha = 1 takes the logarithmic limit.
    """
    sigma = G.sigma
    minus_LX = -G.apply_L(X)
    if alpha == 1.0:
        arg = mc.matrix_log(mc.hermitize(sandwich_pow(sigma, 1.0, X))) - mc.matrix_log(sigma)
        return 0.25 * float(np.real(mc.weighted_inner(arg, minus_LX, sigma, 0.5)))
    at = alpha / (alpha - 1.0)
    P = power_op(sigma, at, alpha, X)
    return (alpha * at / 4.0) * float(np.real(mc.weighted_inner(P, minus_LX, sigma, 0.5)))


# --- traceless Hermitian basis ------------------------------------------------


def traceless_hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian matrices.

    Generalized Gell-Mann construction: symmetric and antisymmetric pair
    matrices, then diagonal ladder matrices; n^2 - 1 elements.
    """
    basis: list[np.ndarray] = []
    for k in range(n):
        for l in range(k + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[k, l] = S[l, k] = 1.0 / np.sqrt(2.0)
            basis.append(S)
            A = np.zeros((n, n), dtype=complex)
            A[k, l] = -1j / np.sqrt(2.0)
            A[l, k] = 1j / np.sqrt(2.0)
            basis.append(A)
    for k in range(1, n):
        D = np.zeros((n, n), dtype=complex)
        D[np.diag_indices(n)] = 0.0
        for j in range(k):
            D[j, j] = 1.0
        D[k, k] = -float(k)
        D /= np.sqrt(k * (k + 1.0))
        basis.append(D)
    return basis
