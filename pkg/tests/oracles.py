"""Independent numerical oracles used by the tests.

These deliberately avoid the spectral-kernel code paths of the package:
integral operators are evaluated by composite Simpson quadrature on full
matrices, classical formulas by direct summation, and kernel structure by
brute force over basis elements.
"""

import numpy as np

import renyiflow.matcore as mc


def simpson_weights(npts: int, length: float = 1.0) -> np.ndarray:
    if npts % 2 == 0:
        raise ValueError("Simpson needs an odd number of points")
    w = np.ones(npts)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (length / (npts - 1) / 3.0)


def mop_quadrature(X, omega, A, npts=2001):
    """Simpson evaluation of the twisted-multiplier integral on matrices."""
    dec = mc.eig_hermitian(X)
    U, lam = dec.vectors, dec.values
    s = np.linspace(0.0, 1.0, npts)
    w = simpson_weights(npts)
    out = np.zeros_like(np.asarray(A, dtype=complex))
    for si, wi in zip(s, w):
        Xs = (U * lam**si) @ U.conj().T
        X1s = (U * lam ** (1.0 - si)) @ U.conj().T
        out += wi * np.exp(omega * (si - 0.5)) * (Xs @ A @ X1s)
    return out


def mop_inverse_quadrature(X, omega, A, npts=2001, pad=25.0):
    """Simpson evaluation of the half-line resolvent-product integral.

    Integrates (t + a X)^-1 A (t + c X)^-1 dt over t in (0, inf) after the
    substitution t = e^u, which makes the integrand uniformly smooth; the
    integration window pads the spectral range of X by `pad` e-foldings.
    """
    n = X.shape[0]
    eye = np.eye(n)
    lam = np.linalg.eigvalsh(X)
    a, c = np.exp(omega / 2.0), np.exp(-omega / 2.0)
    u_lo = np.log(min(a, c) * lam[0]) - pad
    u_hi = np.log(max(a, c) * lam[-1]) + pad
    u = np.linspace(u_lo, u_hi, npts)
    w = simpson_weights(npts, length=u_hi - u_lo)
    out = np.zeros_like(np.asarray(A, dtype=complex))
    for ui, wi in zip(u, w):
        t = np.exp(ui)
        M1 = np.linalg.inv(t * eye + a * X)
        M2 = np.linalg.inv(t * eye + c * X)
        out += (wi * t) * (M1 @ A @ M2)
    return out


def classical_renyi(p, q, alpha):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if alpha == 1.0:
        mask = p > 0
        return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    return float(np.log(np.sum(p**alpha * q ** (1.0 - alpha))) / (alpha - 1.0))


def classical_chi2(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.sum((p - q) ** 2 / q))


def brute_force_commutant_dim(ops, n, tol=1e-9):
    """Dimension of {A : [A, V] = 0 for all V} via the stacked kernel."""
    rows = []
    for V in ops:
        # [V, A] = 0 as a linear condition on vec(A)
        rows.append(np.kron(np.eye(n), V) - np.kron(V.T, np.eye(n)))
    M = np.vstack(rows)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s <= tol * max(s[0], 1e-300)))


def trapezoid_integral(fn, a, b, npts):
    xs = np.linspace(a, b, npts)
    ys = np.array([fn(x) for x in xs])
    return float(np.trapezoid(ys, xs))
