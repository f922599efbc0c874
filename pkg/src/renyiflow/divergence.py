"""Entropy-like functionals between quantum states.

Sandwiched Renyi divergence of any positive order, quantum relative
entropy, Petz-Renyi divergence, chi-square divergence, the functional
derivative of the sandwiched divergence, and the relative Fisher
information of a state under a detailed-balance generator.

All quantities are reported in nats.  The reference state sigma must be
strictly positive, which makes every divergence finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore as mc
from . import noncomm_ops as nco
from .errors import DomainError, SingularityError, ValidationError

# inside this window of alpha = 1 the relative-entropy branch is used;
# the 1/(alpha-1) prefactor loses precision closer in
ALPHA_ONE_WINDOW = 1e-6

# floor inside logarithms for rank-deficient (but PSD-valid) states
LOG_FLOOR = 1e-14


@dataclass(frozen=True)
class DivergenceValue:
    """Order, value (nats) and trace normalization of a divergence."""

    alpha: float
    value: float
    Z: float


def _psd_eigenvalues(A, name: str) -> np.ndarray:
    w = mc.eig_hermitian(A).values
    if w[0] < -mc.TOL_PSD:
        raise ValidationError(f"{name}: negative eigenvalue {w[0]:.3e}")
    return np.maximum(w, 0.0)


def _xlogx(w: np.ndarray) -> float:
    mask = w > LOG_FLOOR
    return float(np.sum(w[mask] * np.log(w[mask])))


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy tr(rho (log rho - log sigma))."""
    rho = mc.require_density(rho, name="rho")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    dec = mc.eig_hermitian(rho)
    w = np.maximum(dec.values, 0.0)
    cross = float(np.real(np.trace(dec.reconstruct(w) @ mc.matrix_log(sigma))))
    return _xlogx(w) - cross


def sandwiched_renyi(rho, sigma, alpha: float) -> DivergenceValue:
    """Sandwiched Renyi divergence of order alpha > 0.

    For orders away from 1 this is log tr[(sigma^((1-a)/2a) rho
    sigma^((1-a)/2a))^a] / (a-1); within ALPHA_ONE_WINDOW of 1 the
    relative-entropy branch is taken.
    """
    if alpha <= 0.0:
        raise DomainError(f"order alpha={alpha} must be positive")
    if abs(alpha - 1.0) <= ALPHA_ONE_WINDOW:
        return DivergenceValue(alpha=alpha, value=relative_entropy(rho, sigma), Z=1.0)
    rho = mc.require_density(rho, name="rho")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    rs = nco.rho_sigma(rho, sigma, alpha)
    w = _psd_eigenvalues(rs, "sandwiched state")
    Z = float(np.sum(w**alpha))
    if Z <= 0.0:
        raise SingularityError("sandwiched trace vanished; rho is orthogonal to sigma")
    return DivergenceValue(alpha=alpha, value=float(np.log(Z) / (alpha - 1.0)), Z=Z)


def petz_renyi(rho, sigma, alpha: float) -> float:
    """Petz-Renyi divergence log tr(rho^a sigma^(1-a)) / (a-1).

    Coincides with the sandwiched divergence for commuting states.
    """
    if alpha <= 0.0 or alpha == 1.0:
        raise DomainError(f"Petz order alpha={alpha} must lie in (0,1) or (1,inf)")
    rho = mc.require_density(rho, strict=alpha > 1.0, name="rho")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    ra = mc.matrix_power(rho, alpha, lenient=True)
    sb = mc.matrix_power(sigma, 1.0 - alpha)
    val = float(np.real(np.trace(ra @ sb)))
    return float(np.log(val) / (alpha - 1.0))


def chi2_divergence(rho, sigma) -> float:
    """Quantum chi-square divergence of the half-weighted inverse weighting.

    Satisfies exp(D_2) = 1 + chi2 exactly.
    """
    rho = mc.require_density(rho, name="rho")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    delta = rho - sigma
    si = mc.matrix_power(sigma, -0.5)
    return float(np.real(np.trace(delta @ si @ delta @ si)))


def functional_derivative(rho, sigma, alpha: float) -> np.ndarray:
    """Functional derivative of the order-alpha divergence in the state.

    alpha/(alpha-1) times the re-weighted (alpha-1) power of the sandwiched
    state over its trace normalization; the order-1 branch is
    log rho - log sigma.
    """
    if alpha <= 0.0:
        raise DomainError(f"order alpha={alpha} must be positive")
    rho = mc.require_density(rho, strict=True, name="rho")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    if abs(alpha - 1.0) <= ALPHA_ONE_WINDOW:
        return mc.matrix_log(rho) - mc.matrix_log(sigma)
    rs = nco.rho_sigma(rho, sigma, alpha)
    dec = mc.eig_hermitian(rs)
    if dec.values[0] <= 0.0:
        raise SingularityError(f"sandwiched state has eigenvalue {dec.values[0]:.3e}")
    Z = float(np.sum(dec.values**alpha))
    power = dec.reconstruct(dec.values ** (alpha - 1.0))
    out = (alpha / (alpha - 1.0)) * nco.sandwich_pow(sigma, (1.0 - alpha) / alpha, power) / Z
    return mc.hermitize(out)


def fisher_information(rho, sigma, alpha: float, G) -> float:
    """Relative alpha-Fisher information of rho under the generator.

    Minus the pairing of the functional derivative with the state-space
    drift; non-negative for detailed-balance generators, and equal to the
    entropy-production rate along the flow.
    """
    if G.sigma is None or np.linalg.norm(np.asarray(sigma, dtype=complex) - G.sigma) > 1e-10:
        raise ValidationError("sigma does not match the generator's stationary state")
    fd = functional_derivative(rho, sigma, alpha)
    drift = G.apply_Ldag(rho)
    return float(-np.real(mc.hs_inner(fd, drift)))
