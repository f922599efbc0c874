"""Lindblad generators with detailed-balance structure.

Builds and validates jump-operator generators whose stationary state
enters through modular (Bohr-frequency) eigenvector conditions, decides
primitivity, and computes the spectral gap of the symmetrized generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import matcore as mc
from . import noncomm_ops as nco
from .errors import ValidationError

TOL_TRACELESS = 1e-10
TOL_MODULAR = 1e-8
TOL_GRAM = 1e-10
TOL_STATIONARY = 1e-10
TOL_SELFADJOINT = 1e-10
TOL_COMMUTE = 1e-8
ZERO_MODE_RTOL = 1e-9


@dataclass(frozen=True)
class JumpTerm:
    """One jump operator with its Bohr frequency and normalization weight.

    The operator V is used as-is in the dynamics; `weight` records its
    squared Hilbert-Schmidt norm.
    """

    V: np.ndarray
    omega: float
    weight: float

    @staticmethod
    def of(V, omega: float, weight: float | None = None) -> "JumpTerm":
        V = mc.as_matrix(V, "jump operator")
        nrm2 = float(np.real(mc.hs_inner(V, V)))
        if weight is None:
            weight = nrm2
        elif abs(weight - nrm2) > 1e-8 * max(1.0, weight):
            # explicit weight wins: V is treated as a direction
            V = V * np.sqrt(weight / nrm2)
        V = V.copy()
        V.setflags(write=False)
        return JumpTerm(V=V, omega=float(omega), weight=float(weight))


def _validate_terms(sigma: np.ndarray, terms: list[JumpTerm]) -> None:
    if not terms:
        raise ValidationError("generator needs at least one jump term")
    norms = [np.linalg.norm(t.V) for t in terms]
    for j, t in enumerate(terms):
        tr = abs(np.trace(t.V))
        if tr > TOL_TRACELESS * max(1.0, norms[j]):
            raise ValidationError(f"condition (i) violated at term {j}: |tr V| = {tr:.3e}")
        res = np.linalg.norm(nco.modular_apply(sigma, t.V) - np.exp(-t.omega) * t.V)
        if res > TOL_MODULAR * norms[j]:
            raise ValidationError(
                f"condition (iii) violated at term {j}: modular eigenvector residual "
                f"{res / norms[j]:.3e} for omega={t.omega}"
            )
    for j, tj in enumerate(terms):
        for k, tk in enumerate(terms):
            g = mc.hs_inner(tj.V, tk.V)
            if j == k:
                if abs(g - tj.weight) > TOL_GRAM * max(1.0, tj.weight):
                    raise ValidationError(
                        f"condition (i) violated at term {j}: <V,V>={g!r} != weight {tj.weight}"
                    )
            elif abs(g) > TOL_GRAM * norms[j] * norms[k]:
                raise ValidationError(
                    f"condition (i) violated at pair ({j},{k}): overlap {abs(g):.3e}"
                )
    for j, tj in enumerate(terms):
        partner = None
        for k, tk in enumerate(terms):
            if np.linalg.norm(tj.V.conj().T - tk.V) <= 1e-8 * norms[j]:
                partner = k
                break
        if partner is None:
            raise ValidationError(f"condition (ii) violated: no adjoint partner for term {j}")
        tk = terms[partner]
        if abs(tj.weight - tk.weight) > 1e-8 * max(1.0, tj.weight):
            raise ValidationError(
                f"condition (iv) violated at pair ({j},{partner}): weights "
                f"{tj.weight} vs {tk.weight}"
            )
        if abs(tj.omega + tk.omega) > 1e-8:
            raise ValidationError(
                f"condition (iv) violated at pair ({j},{partner}): omegas "
                f"{tj.omega} vs {tk.omega}"
            )


def gns_selfadjoint_residual(L_super: np.ndarray, sigma: np.ndarray) -> float:
    """Asymmetry of the generator in the fully sigma-weighted inner product.

    Zero iff <L(A), B>_1 = <A, L(B)>_1 for all A, B; returned relative to
    the weighted generator's own size.
    """
    K = mc.right_mult_superop(sigma) @ L_super
    scale = np.linalg.norm(K)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(K - K.conj().T) / scale)


class Generator:
    """A Lindblad generator pair (Heisenberg and Schrodinger pictures).

    Immutable after construction; superoperator matrices use the package's
    column-stacking convention.  `terms` is present only for generators
    built from validated jump operators.
    """

    def __init__(
        self,
        n: int,
        sigma: np.ndarray | None,
        L_super: np.ndarray,
        Ldag_super: np.ndarray,
        terms: list[JumpTerm] | None = None,
        label: str = "",
    ):
        self.n = n
        self.sigma = None if sigma is None else mc.require_density(sigma, strict=True, name="sigma")
        self.L_super = np.asarray(L_super, dtype=complex)
        self.Ldag_super = np.asarray(Ldag_super, dtype=complex)
        self.terms = list(terms) if terms else None
        self.label = label
        for arr in (self.L_super, self.Ldag_super):
            arr.setflags(write=False)

    def apply_L(self, A) -> np.ndarray:
        return mc.apply_superop(self.L_super, A)

    def apply_Ldag(self, A) -> np.ndarray:
        return mc.apply_superop(self.Ldag_super, A)

    @property
    def omegas(self) -> list[float]:
        if self.terms is None:
            raise ValidationError(f"generator {self.label!r} has no jump-term decomposition")
        return [t.omega for t in self.terms]

    @cached_property
    def primitivity(self) -> "PrimitivityReport":
        return check_primitive(self)

    @cached_property
    def gap(self) -> "SpectralGap":
        return spectral_gap(self)

    def __repr__(self) -> str:
        kind = "jump" if self.terms is not None else "map"
        return f"Generator(n={self.n}, kind={kind}, label={self.label!r})"


def _superops_from_terms(n: int, terms: list[JumpTerm]) -> tuple[np.ndarray, np.ndarray]:
    def L_map(A):
        out = np.zeros_like(A)
        for t in terms:
            V, Vd, w = t.V, t.V.conj().T, np.exp(-t.omega / 2.0)
            out += w * (Vd @ (A @ V - V @ A) + (Vd @ A - A @ Vd) @ V)
        return out

    def Ldag_map(A):
        out = np.zeros_like(A)
        for t in terms:
            V, Vd, w = t.V, t.V.conj().T, np.exp(-t.omega / 2.0)
            VA = V @ A
            out += w * ((VA @ Vd - Vd @ VA) + (V @ (A @ Vd) - (A @ Vd) @ V))
        return out

    return mc.superoperator_of_map(L_map, n), mc.superoperator_of_map(Ldag_map, n)


def build_gns(sigma, terms: list[JumpTerm], label: str = "gns") -> Generator:
    """Validated detailed-balance generator from jump terms.

    Checks the structure conditions (traceless orthogonal jumps, adjoint
    pairing, modular eigenvectors, paired weights/frequencies), then the
    derived identities: unitality, trace preservation, stationarity of
    sigma, self-adjointness in the fully weighted inner product, and
    commutation with the modular conjugation.
    """
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    n = sigma.shape[0]
    _validate_terms(sigma, terms)
    L_super, Ldag_super = _superops_from_terms(n, terms)
    scale = max(np.linalg.norm(L_super), 1e-30)

    unital = np.linalg.norm(L_super @ mc.vec(np.eye(n)))
    if unital > TOL_STATIONARY * scale * n:
        raise ValidationError(f"generator not unital: ||L(I)|| = {unital:.3e}")
    tracepres = np.linalg.norm(Ldag_super.conj().T @ mc.vec(np.eye(n)))
    if tracepres > TOL_STATIONARY * scale * n:
        raise ValidationError(f"generator not trace-preserving: residual {tracepres:.3e}")
    stat = np.linalg.norm(Ldag_super @ mc.vec(sigma))
    if stat > TOL_STATIONARY * scale:
        raise ValidationError(f"sigma not stationary: ||Ldag(sigma)|| = {stat:.3e}")
    sa = gns_selfadjoint_residual(L_super, sigma)
    if sa > TOL_SELFADJOINT:
        raise ValidationError(f"not self-adjoint in the weighted inner product: {sa:.3e}")
    mod = mc.superoperator_of_map(lambda A: nco.modular_apply(sigma, A), n)
    comm = np.linalg.norm(L_super @ mod - mod @ L_super) / scale
    if comm > TOL_COMMUTE:
        raise ValidationError(f"[L, modular] residual {comm:.3e} exceeds {TOL_COMMUTE:.1e}")

    return Generator(n, sigma, L_super, Ldag_super, terms=terms, label=label)


def from_schrodinger_map(Ldag_map, n: int, sigma=None, label: str = "raw") -> Generator:
    """Wrap a state-space map with no assumed jump structure.

    Only trace preservation is enforced; stationarity is checked when a
    candidate stationary state is supplied.
    """
    Ldag_super = mc.superoperator_of_map(Ldag_map, n)
    L_super = Ldag_super.conj().T
    scale = max(np.linalg.norm(Ldag_super), 1e-30)
    tracepres = np.linalg.norm(Ldag_super.conj().T @ mc.vec(np.eye(n)))
    if tracepres > 1e-10 * scale * n:
        raise ValidationError(f"map not trace-preserving: residual {tracepres:.3e}")
    if sigma is not None:
        stat = np.linalg.norm(Ldag_super @ mc.vec(np.asarray(sigma, dtype=complex)))
        if stat > 1e-10 * scale:
            raise ValidationError(f"candidate stationary state fails: residual {stat:.3e}")
    return Generator(n, sigma, L_super, Ldag_super, terms=None, label=label)


def eigen_jump_terms(sigma, weights=None) -> list[JumpTerm]:
    """Canonical jump-term basis attached to a stationary state.

    Off-diagonal eigenprojector pairs |psi_k><psi_l| carry the Bohr
    frequency log(lam_l / lam_k); eigenvalues equal within relative 1e-10
    are grouped and get frequency zero, as do the n-1 traceless diagonal
    ladder operators.  `weights` optionally rescales each term.
    """
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    dec = mc.eig_hermitian(sigma)
    lam, U = dec.values, dec.vectors
    n = lam.size
    group = np.zeros(n, dtype=int)
    for k in range(1, n):
        same = (lam[k] - lam[k - 1]) <= 1e-10 * max(lam[k], lam[k - 1])
        group[k] = group[k - 1] if same else group[k - 1] + 1

    terms: list[JumpTerm] = []
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            V = np.outer(U[:, k], U[:, l].conj())
            omega = 0.0 if group[k] == group[l] else float(np.log(lam[l] / lam[k]))
            terms.append(JumpTerm.of(V, omega))
    for k in range(1, n):
        D = np.zeros(n, dtype=complex)
        D[:k] = 1.0
        D[k] = -float(k)
        D /= np.sqrt(k * (k + 1.0))
        terms.append(JumpTerm.of(U @ np.diag(D) @ U.conj().T, 0.0))

    if weights is not None:
        if len(weights) != len(terms):
            raise ValidationError(f"got {len(weights)} weights for {len(terms)} terms")
        terms = [JumpTerm.of(t.V * np.sqrt(w), t.omega) for t, w in zip(terms, weights)]
    return terms


@dataclass(frozen=True)
class PrimitivityReport:
    primitive: bool
    kernel_dim: int
    kernel: list[np.ndarray] = field(repr=False)


def check_primitive(G: Generator) -> PrimitivityReport:
    """Nullspace analysis of the observable-side generator.

    Primitive iff the kernel is one-dimensional and spanned by the
    identity; singular values below 1e-9 of the largest count as zero.
    """
    u, s, vh = np.linalg.svd(G.L_super)
    scale = max(s[0], 1e-300)
    null = s <= ZERO_MODE_RTOL * scale
    kernel = [mc.unvec(vh[k].conj(), G.n) for k in range(s.size) if null[k]]
    dim = len(kernel)
    primitive = False
    if dim == 1:
        v = mc.vec(kernel[0])
        overlap = abs(np.vdot(mc.vec(np.eye(G.n)) / np.sqrt(G.n), v / np.linalg.norm(v)))
        primitive = overlap >= 1.0 - 1e-8
    return PrimitivityReport(primitive=primitive, kernel_dim=dim, kernel=kernel)


@dataclass(frozen=True)
class SpectralGap:
    value: float
    spectrum: np.ndarray


def spectral_gap(G: Generator) -> SpectralGap:
    """Spectrum of -L as a self-adjoint operator in the half-weighted inner
    product, and its smallest nonzero eigenvalue.

    The generator is conjugated by the quarter-power weighting (which maps
    the weighted inner product to the Hilbert-Schmidt one), symmetrized,
    and diagonalized.  Eigenvalues below -1e-6 (relative) signal a
    detailed-balance violation.
    """
    if G.sigma is None:
        raise ValidationError("spectral gap needs a stationary state")
    if not G.primitivity.primitive:
        raise ValidationError(f"generator {G.label!r} is not primitive")
    q = mc.matrix_power(G.sigma, 0.25)
    qi = mc.matrix_power(G.sigma, -0.25)
    S = mc.sandwich_superop(q) @ (-G.L_super) @ mc.sandwich_superop(qi)
    H = 0.5 * (S + S.conj().T)
    w = np.linalg.eigvalsh(H)
    scale = max(w[-1], 1e-300)
    if w[0] < -1e-6 * scale:
        raise ValidationError(
            f"symmetrized generator has negative eigenvalue {w[0]:.3e}; "
            "detailed balance violated"
        )
    positive = w[w > ZERO_MODE_RTOL * scale]
    n_zero = w.size - positive.size
    if n_zero != 1:
        raise ValidationError(f"expected a single zero mode, found {n_zero}")
    return SpectralGap(value=float(positive[0]), spectrum=w)


# --- stock generators ---------------------------------------------------------


def depolarizing_generator(gamma: float, sigma, label: str = "depolarizing") -> Generator:
    """Uniform relaxation toward sigma at rate gamma (detailed balanced)."""
    if gamma <= 0.0:
        raise ValidationError(f"depolarizing rate must be positive, got {gamma}")
    sigma = mc.require_density(sigma, strict=True, name="sigma")
    n = sigma.shape[0]
    eye = np.eye(n)

    def L_map(A):
        return gamma * (np.trace(sigma @ A) * eye - A)

    def Ldag_map(A):
        return gamma * (np.trace(A) * sigma - A)

    G = Generator(
        n,
        sigma,
        mc.superoperator_of_map(L_map, n),
        mc.superoperator_of_map(Ldag_map, n),
        terms=None,
        label=label,
    )
    return G


def qubit_xz_generator(label: str = "qubit-xz") -> Generator:
    """Two-level generator with X and Z jumps at the maximally mixed state."""
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    terms = [JumpTerm.of(sx, 0.0), JumpTerm.of(sz, 0.0)]
    return build_gns(np.eye(2) / 2.0, terms, label=label)


def random_gns_generator(
    rng: np.random.Generator,
    n: int,
    min_sigma_eig: float = 0.05,
    weight_range: tuple[float, float] = (0.5, 1.5),
    label: str = "random-gns",
) -> Generator:
    """Random primitive detailed-balance generator on the full jump basis.

    The stationary state has eigenvalues bounded away from zero for
    conditioning; adjoint-paired terms share one random weight so the
    pairing conditions hold exactly.
    """
    lam = rng.uniform(min_sigma_eig, 1.0, size=n)
    lam /= lam.sum()
    Q = np.linalg.qr(mc.random_complex(rng, n))[0]
    sigma = mc.hermitize(Q @ np.diag(lam) @ Q.conj().T)
    terms = eigen_jump_terms(sigma)
    lo, hi = weight_range
    weights = np.empty(len(terms))
    idx = 0
    pair_w = {}
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            key = (min(k, l), max(k, l))
            if key not in pair_w:
                pair_w[key] = rng.uniform(lo, hi)
            weights[idx] = pair_w[key]
            idx += 1
    weights[idx:] = rng.uniform(lo, hi, size=len(terms) - idx)
    return build_gns(sigma, eigen_jump_terms(sigma, weights=weights), label=label)
