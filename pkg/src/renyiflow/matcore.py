"""Dense complex Hermitian linear algebra substrate.

Spectral calculus, matrix functions, sigma-weighted inner products and
superoperator algebra for Hilbert-space dimensions n <= 16.

Conventions fixed once for the whole package:

* Vectorization is column-stacking (Fortran order).  Under it the map
  ``A -> X A Y`` has the matrix ``kron(Y.T, X)``, and the matrix-unit
  basis element ``E_kl`` occupies vec index ``k + n*l``.
* ``eig_hermitian`` returns ascending eigenvalues with phase-fixed
  eigenvectors (first significant component real positive) and a
  deterministic tie order, so repeated runs serialize identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError, StructuralError

TOL_HERM = 1e-12
TOL_TRACE = 1e-10
TOL_PSD = 1e-10
POS_FLOOR = 1e-12


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def hermitize(A: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A*)/2."""
    return 0.5 * (A + A.conj().T)


def vec(A: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(A).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if n is None:
        n = round(v.size**0.5)
    return v.reshape((n, n), order="F")


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise StructuralError(f"{name}: expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise StructuralError(f"{name}: non-finite entries")
    return A


def require_hermitian(A, tol: float = TOL_HERM, name: str = "matrix") -> np.ndarray:
    A = as_matrix(A, name)
    dev = np.max(np.abs(A - A.conj().T))
    if dev > tol:
        raise StructuralError(f"{name}: not Hermitian (max deviation {dev:.3e} > {tol:.1e})")
    return hermitize(A)


def require_density(
    A,
    tol_trace: float = TOL_TRACE,
    tol_psd: float = TOL_PSD,
    strict: bool = False,
    name: str = "state",
) -> np.ndarray:
    """Validate a density matrix; `strict` additionally demands full rank."""
    A = require_hermitian(A, name=name)
    tr = np.trace(A).real
    if abs(tr - 1.0) > tol_trace:
        raise StructuralError(f"{name}: trace {tr!r} deviates from 1 beyond {tol_trace:.1e}")
    wmin = float(np.linalg.eigvalsh(A)[0])
    if wmin < -tol_psd:
        raise StructuralError(f"{name}: negative eigenvalue {wmin:.3e} below -{tol_psd:.1e}")
    if strict and wmin < POS_FLOOR:
        raise SingularityError(
            f"{name}: smallest eigenvalue {wmin:.3e} below positivity floor {POS_FLOOR:.1e}"
        )
    return A


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix: ascending values, unitary columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    def reconstruct(self, fvals: np.ndarray | None = None) -> np.ndarray:
        w = self.values if fvals is None else np.asarray(fvals)
        return (self.vectors * w) @ self.vectors.conj().T


def _fix_phase(column: np.ndarray) -> np.ndarray:
    mags = np.abs(column)
    idx = int(np.argmax(mags > 1e-12 * max(mags.max(), 1e-300)))
    pivot = column[idx]
    if abs(pivot) == 0.0:
        return column
    return column * (pivot.conjugate() / abs(pivot))


def eig_hermitian(A, tol: float = TOL_HERM) -> SpectralDecomposition:
    """Eigendecomposition with deterministic ordering.

    Ascending eigenvalues; each eigenvector has its first significant
    component phase-fixed to be real positive; exact ties are ordered by
    lexicographic comparison of the phase-fixed eigenvector entries.
    """
    A = require_hermitian(A, tol=tol)
    w, U = np.linalg.eigh(A)
    U = np.column_stack([_fix_phase(U[:, k]) for k in range(U.shape[1])])
    # deterministic order inside (numerically) degenerate groups
    scale = max(1.0, float(np.max(np.abs(w))))
    order = np.arange(w.size)
    k = 0
    while k < w.size:
        j = k + 1
        while j < w.size and w[j] - w[k] <= 1e-12 * scale:
            j += 1
        if j - k > 1:
            keys = []
            for c in order[k:j]:
                col = U[:, c]
                keys.append(tuple(np.round(np.column_stack([col.real, col.imag]).ravel(), 10)))
            order[k:j] = order[k:j][np.lexsort(np.array(keys).T[::-1])]
        k = j
    return SpectralDecomposition(values=w[order].copy(), vectors=U[:, order].copy())


def matrix_function(
    A,
    f: Callable[[np.ndarray], np.ndarray],
    min_eigenvalue: float | None = None,
    lenient: bool = False,
) -> np.ndarray:
    """Spectral calculus U f(w) U* for Hermitian A.

    `min_eigenvalue` sets the domain boundary for f (e.g. POS_FLOOR for
    log and negative powers).  Eigenvalues below it raise; in lenient
    mode values in [-TOL_PSD, min_eigenvalue) are clamped up instead.
    """
    dec = eig_hermitian(A)
    w = dec.values.copy()
    if min_eigenvalue is not None:
        bad = w < min_eigenvalue
        if np.any(bad):
            if lenient and w[bad].min() >= -TOL_PSD:
                w[bad] = min_eigenvalue
            else:
                raise SingularityError(
                    f"matrix function domain violation: eigenvalue {w[bad].min():.6e} "
                    f"below floor {min_eigenvalue:.1e}"
                )
    fw = np.asarray(f(w), dtype=complex)
    if not np.all(np.isfinite(fw)):
        raise SingularityError("matrix function produced non-finite values on the spectrum")
    out = dec.reconstruct(fw)
    return hermitize(out) if np.allclose(fw.imag, 0.0) else out


def matrix_power(A, p: float, lenient: bool = False) -> np.ndarray:
    if p < 0:
        floor = POS_FLOOR  # negative powers need strict positivity
    elif float(p).is_integer():
        floor = None
    else:
        floor = 0.0  # fractional powers need a PSD spectrum
    return matrix_function(A, lambda w: np.power(w, p), min_eigenvalue=floor, lenient=lenient)


def matrix_log(A, lenient: bool = False) -> np.ndarray:
    return matrix_function(A, np.log, min_eigenvalue=POS_FLOOR, lenient=lenient)


def matrix_sqrt(A) -> np.ndarray:
    return matrix_function(A, np.sqrt, min_eigenvalue=0.0, lenient=True)


def weighted_inner(A, B, sigma, s: float) -> complex:
    """sigma-weighted inner product tr(sigma^s A* sigma^(1-s) B), s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"weighting exponent s={s} outside [0, 1]")
    sigma = require_density(sigma, strict=True, name="sigma")
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    dec = eig_hermitian(sigma)
    ss = dec.reconstruct(np.power(dec.values, s))
    s1 = dec.reconstruct(np.power(dec.values, 1.0 - s))
    return complex(np.trace(ss @ A.conj().T @ s1 @ B))


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product tr(A* B)."""
    return complex(np.trace(np.asarray(A).conj().T @ np.asarray(B)))


def trace_norm(A) -> float:
    """Schatten-1 norm (sum of singular values)."""
    return float(np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False).sum())


def superoperator_of_map(phi: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """n^2 x n^2 matrix of a linear map on n x n matrices (column stacking)."""
    S = np.zeros((n * n, n * n), dtype=complex)
    E = np.zeros((n, n), dtype=complex)
    for l in range(n):
        for k in range(n):
            E[k, l] = 1.0
            S[:, k + n * l] = vec(phi(E))
            E[k, l] = 0.0
    return S


def apply_superop(S: np.ndarray, A: np.ndarray) -> np.ndarray:
    n = round(np.sqrt(S.shape[0]))
    return unvec(S @ vec(A), n)


def sandwich_superop(X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of A -> X A Y (Y defaults to X)."""
    Y = X if Y is None else Y
    return np.kron(np.asarray(Y).T, np.asarray(X))


def left_mult_superop(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    return np.kron(np.eye(n), X)


def right_mult_superop(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    return np.kron(np.asarray(X).T, np.eye(n))


def superop_trace_norm(S: np.ndarray) -> float:
    return trace_norm(S)


def superop_frobenius(S: np.ndarray) -> float:
    return float(np.linalg.norm(S))


# --- random samplers (test and CLI plumbing) --------------------------------


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return hermitize(random_complex(rng, n)) * scale


def random_traceless_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    H = random_hermitian(rng, n)
    return H - (np.trace(H).real / n) * np.eye(n)


def random_density(rng: np.random.Generator, n: int, floor: float = 0.0) -> np.ndarray:
    """Ginibre-induced density matrix, optionally mixed with I/n for conditioning."""
    G = random_complex(rng, n)
    rho = G @ G.conj().T
    rho /= np.trace(rho).real
    if floor > 0.0:
        rho = (1.0 - floor) * rho + floor * np.eye(n) / n
    return hermitize(rho)


def random_positive(rng: np.random.Generator, n: int, floor: float = 1e-3) -> np.ndarray:
    """Strictly positive Hermitian matrix with unit Frobenius norm."""
    G = random_complex(rng, n)
    X = G @ G.conj().T + floor * np.eye(n)
    return hermitize(X / np.linalg.norm(X))


# --- CSV matrix blocks -------------------------------------------------------


def matrix_to_csv_block(name: str, A: np.ndarray, digits: int = 17) -> str:
    """Serialize: header `matrix,<name>,<n>`, then n rows of interleaved re,im."""
    A = as_matrix(A, name)
    n = A.shape[0]
    lines = [f"matrix,{name},{n}"]
    for row in A:
        cells = []
        for z in row:
            cells.append(f"{z.real:.{digits}g}")
            cells.append(f"{z.imag:.{digits}g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def matrix_from_csv_block(text: str) -> tuple[str, np.ndarray]:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split(",")
    if len(head) != 3 or head[0] != "matrix":
        raise StructuralError(f"bad matrix block header: {lines[0]!r}")
    name, n = head[1], int(head[2])
    if len(lines) != n + 1:
        raise StructuralError(f"matrix block {name!r}: expected {n} rows, got {len(lines) - 1}")
    A = np.zeros((n, n), dtype=complex)
    for i, ln in enumerate(lines[1:]):
        vals = [float(x) for x in ln.split(",")]
        if len(vals) != 2 * n:
            raise StructuralError(f"matrix block {name!r}: row {i} has {len(vals)} cells, want {2 * n}")
        A[i] = np.asarray(vals[0::2]) + 1j * np.asarray(vals[1::2])
    return name, A


def rows_to_matrix(rows) -> np.ndarray:
    """Inline JSON rows of 2n interleaved reals -> complex matrix."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 * arr.shape[0]:
        raise StructuralError(f"inline matrix rows have shape {arr.shape}; want (n, 2n)")
    return arr[:, 0::2] + 1j * arr[:, 1::2]


def matrix_to_rows(A: np.ndarray) -> list[list[float]]:
    A = np.asarray(A, dtype=complex)
    out = []
    for row in A:
        cells: list[float] = []
        for z in row:
            cells.extend((float(z.real), float(z.imag)))
        out.append(cells)
    return out
