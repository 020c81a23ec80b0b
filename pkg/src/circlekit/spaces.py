"""Finite-dimensional models of the shift, Toeplitz forms, kernel lattice
operations and operator-range spaces.

Two coordinate systems are used and kept apart by a basis tag: Taylor
coefficients ``0..N`` (:class:`CoeffBasis`) and kernel vectors at a list of
disk points (:class:`GridBasis`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotContraction,
    NotContractivelyContained,
    OutsideDisk,
    SingularMetric,
    ValidationError,
)
from .kernel import KernelGram, coeff_kernel, gram, psd_check
from .measure import CircleMeasure, moments

RIDGE = 1e-10
COND_CAP = 1e12
RANK_TOL = 1e-10
SV_CUT = 1e-14


@dataclass(frozen=True)
class CoeffBasis:
    N: int

    @property
    def size(self) -> int:
        return self.N + 1


@dataclass(frozen=True, eq=False)
class GridBasis:
    points: tuple

    @property
    def size(self) -> int:
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, GridBasis) and np.array_equal(np.asarray(self.points), np.asarray(other.points))

    def __hash__(self):
        return hash(tuple(np.asarray(self.points).tolist()))


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    matrix: np.ndarray
    basis: CoeffBasis | GridBasis

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=complex)
        n = self.basis.size
        if A.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {A.shape} does not match basis size {n}")
        object.__setattr__(self, "matrix", A)

    @classmethod
    def from_gram(cls, G: KernelGram) -> "TruncatedOperator":
        if G.kind == "coeff":
            return cls(G.entries, CoeffBasis(G.dim - 1))
        return cls(G.entries, GridBasis(tuple(np.asarray(G.points).tolist())))


def shift_operator(N: int) -> TruncatedOperator:
    """Multiplication by ``z`` on coefficients ``0..N`` (top coefficient dropped)."""
    return TruncatedOperator(np.eye(N + 1, k=-1), CoeffBasis(N))


def backward_shift_coeffs(h) -> np.ndarray:
    """Coefficients of ``(h(z) - h(0))/z``."""
    h = np.atleast_1d(np.asarray(h, dtype=complex))
    return h[1:].copy()


def shift_action_check(mu: CircleMeasure, z, N: int) -> float:
    """Residual of ``V k_z conj(z) = k_z - k_0`` in the norm of ``mu``.

    The kernel ``k_z`` is the Cauchy transform of ``1/(1 - conj(z) zeta)``,
    truncated to ``sum_{j<=N} conj(z)^j zeta^j``; the shift acts as
    multiplication by ``zeta`` on these representatives, and norms are
    computed with the moment matrix.  The exact residual of the truncation
    is ``|z|^(N+1) sqrt(mu^(0))``.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise OutsideDisk("|z| must be < 1")
    c = np.conj(z) ** np.arange(N + 1)
    lhs = np.zeros(N + 2, dtype=complex)
    lhs[1:] = np.conj(z) * c
    rhs = np.zeros(N + 2, dtype=complex)
    rhs[: N + 1] = c
    rhs[0] -= 1.0
    d = lhs - rhs
    T = moments(mu, N + 1).toeplitz()
    # ||sum d_j zeta^j||^2 = sum_{i,j} d_i conj(d_j) mu^(j - i)
    val = float(np.real(d @ T @ d.conj()))
    return float(np.sqrt(max(val, 0.0)))


def toeplitz_residual(T: TruncatedOperator, V: TruncatedOperator) -> float:
    """``||(V* T V - T)_lead||_F / ||T_lead||_F`` on the leading ``N x N`` block.

    The last row and column are dropped because the truncated shift loses
    the top coefficient.
    """
    if T.basis != V.basis or T.matrix.shape != V.matrix.shape:
        raise DimensionMismatch("operators act on different bases")
    n = T.matrix.shape[0] - 1
    if n < 1:
        return 0.0
    R = (V.matrix.conj().T @ T.matrix @ V.matrix - T.matrix)[:n, :n]
    norm = np.linalg.norm(T.matrix[:n, :n])
    if norm == 0:
        return float(np.linalg.norm(R))
    return float(np.linalg.norm(R) / norm)


@dataclass(frozen=True, eq=False)
class SpacePair:
    G_mu: KernelGram
    G_lam: KernelGram

    def __post_init__(self):
        if self.G_mu.dim != self.G_lam.dim or not np.allclose(self.G_mu.points, self.G_lam.points):
            raise DimensionMismatch("Gram matrices must share their point list")

    @property
    def G_sum(self) -> KernelGram:
        return self.G_mu + self.G_lam

    @classmethod
    def from_measures(cls, mu: CircleMeasure, lam: CircleMeasure, points) -> "SpacePair":
        return cls(gram(mu, points), gram(lam, points))


@dataclass(frozen=True, eq=False)
class LatticeSplit:
    """Projections onto the sum and intersection parts of ``H(k) (+) H(K)``.

    A vector ``sum a_i k_{z_i} + sum b_i K_{z_i}`` of the direct sum has
    coordinates ``R (a, b)`` with ``R* R = diag(G_mu, G_lam)``, so the block
    metric becomes Euclidean and ``P_vee``, ``P_wedge`` are ordinary
    orthogonal projections in those coordinates.
    """

    P_vee: np.ndarray
    P_wedge: np.ndarray
    G_wedge: KernelGram
    metric: np.ndarray
    factor: np.ndarray

    def rank(self, tol: float = RANK_TOL) -> int:
        """Numerical rank of ``G_wedge`` relative to ``||G_mu + G_lam||``."""
        ev = np.linalg.eigvalsh(self.G_wedge.entries)
        n = self.G_wedge.dim
        ref = np.linalg.norm(self.metric[:n, :n] + self.metric[n:, n:], 2)
        return int(np.sum(ev > tol * max(ref, 1e-300)))


def _root_factor(G: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (G + G.conj().T))
    return np.sqrt(np.clip(vals, 0.0, None))[:, None] * vecs.conj().T


def lattice_split(sp: SpacePair) -> LatticeSplit:
    """Split the direct sum into ``Ran U_vee`` and its complement.

    ``P_vee`` projects onto the span of ``k_{z_i} (+) K_{z_i}``, the image of
    the sum space, and ``P_wedge = I - P_vee`` onto its complement, which
    carries the intersection ``H(k) cap H(K)``.  The intersection Gram matrix
    collects ``<P_wedge (k_{z_j} (+) 0), k_{z_i} (+) 0>`` and equals the
    parallel sum ``G_mu (G_mu + G_lam)^{-1} G_lam``.  The span is computed by
    an SVD cut at working precision, so ``P_wedge`` annihilates every
    ``k_{z_i} (+) K_{z_i}`` to rounding; the ridge ``1e-10 * trace/dim`` only
    enters the conditioning guard.

    Raises
    ------
    SingularMetric
        If ``G_mu + G_lam + ridge`` has condition number above ``1e12``.
    """
    Gm, Gl = sp.G_mu.entries, sp.G_lam.entries
    n = Gm.shape[0]
    S = Gm + Gl
    ridge = RIDGE * abs(np.trace(S).real) / max(n, 1)
    cond = np.linalg.cond(S + ridge * np.eye(n))
    if not np.isfinite(cond) or cond > COND_CAP:
        raise SingularMetric(f"condition number {cond:.3e} exceeds {COND_CAP:.0e}")
    Z = np.zeros_like(Gm)
    M = np.block([[Gm, Z], [Z, Gl]])
    R = np.block([[_root_factor(Gm), Z], [Z, _root_factor(Gl)]])
    Y = R @ np.vstack([np.eye(n), np.eye(n)])
    U, sv, _ = np.linalg.svd(Y, full_matrices=False)
    Uk = U[:, sv > SV_CUT * max(sv[0], 1e-300)]
    P_vee = Uk @ Uk.conj().T
    P_wedge = np.eye(2 * n) - P_vee
    RE = R[:, :n]
    Gw = RE.conj().T @ P_wedge @ RE
    Gw = 0.5 * (Gw + Gw.conj().T)
    return LatticeSplit(P_vee, P_wedge, KernelGram(sp.G_mu.points, Gw, sp.G_mu.kind), M, R)


def complementary_kernel(G_big: KernelGram, G_small: KernelGram, tol: float = 1e-10) -> KernelGram:
    """Kernel ``K - k`` of the complementary space of a contractive inclusion.

    Raises
    ------
    NotContractivelyContained
        If ``K - k`` fails the PSD test at the scale of ``K``.
    """
    D = G_big - G_small
    scale = abs(np.trace(G_big.entries).real) / max(G_big.dim, 1)
    res = psd_check(D.entries, tol, scale)
    if not res.psd:
        raise NotContractivelyContained(f"K - k has eigenvalue {res.min_eig:.3e}")
    return D


@dataclass(frozen=True, eq=False)
class PythagorasResult:
    y: np.ndarray
    z: np.ndarray
    defect: float
    range_norm2: float
    complement_norm2: float
    overlap_dim: int


def _rank(A, tol=RANK_TOL) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * max(s[0], 1e-300))) if s[0] > 0 else 0


def pythagoras_check(A, x) -> PythagorasResult:
    """Split ``x = AA*x + (I - AA*)x`` and measure both pieces in their range norms.

    ``||y||^2_{R(A)} = y* (AA*)^+ y`` and ``||z||^2_{R^c(A)} = z* (I - AA*)^+ z``;
    the defect ``| ||x||^2 - (||y||^2 + ||z||^2) |`` vanishes for contractions.
    ``overlap_dim`` is ``dim(R(A) cap R^c(A))`` from ranks.

    Raises
    ------
    NotContraction
        If ``||A|| > 1 + 1e-12``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if A.shape[0] != x.size:
        raise DimensionMismatch("A and x have incompatible shapes")
    norm = np.linalg.norm(A, 2) if A.size else 0.0
    if norm > 1.0 + 1e-12:
        raise NotContraction(f"||A|| = {norm:.12g}")
    P = A @ A.conj().T
    Q = np.eye(A.shape[0]) - P
    y = P @ x
    z = Q @ x
    rn = float(np.real(y.conj() @ np.linalg.pinv(P, rcond=1e-12, hermitian=True) @ y)) if norm > 0 else 0.0
    cn = float(np.real(z.conj() @ np.linalg.pinv(Q, rcond=1e-12, hermitian=True) @ z))
    defect = abs(float(np.real(x.conj() @ x)) - (rn + cn))
    overlap = _rank(P) + _rank(Q) - _rank(np.hstack([P, Q]))
    return PythagorasResult(y, z, defect, rn, cn, int(overlap))
