"""Lebesgue decomposition of pairs of positive forms in finite dimensions.

A pair ``(A, B)`` of PSD matrices stands for two positive forms on a
truncated polynomial space.  The absolutely continuous part of ``A`` with
respect to ``B`` is the Ando limit ``lim_t A : (tB)`` of parallel sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IllPosed, NotConverged, SingularReference, ValidationError
from .kernel import hermitian_part, psd_check
from .measure import CircleMeasure, moments
from .trigpoly import TrigPoly, cesaro_nonneg_approx

PINV_CUT = 1e-12
KMAX = 60
STOP_TOL = 1e-10
RANGE_TOL = 1e-8
COND_CAP = 1e12
NONNEG_GRID = 1024
NONNEG_FLOOR = -1e-6


def _matrix_json(M) -> list:
    return [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in np.asarray(M)]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(v["re"], v.get("im", 0.0)) for v in row] for row in rows], dtype=complex)


@dataclass(frozen=True, eq=False)
class FormPair:
    """Two PSD matrices on a common basis: the form ``A`` and the reference ``B``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = hermitian_part(np.atleast_2d(np.asarray(self.A, dtype=complex)))
        B = hermitian_part(np.atleast_2d(np.asarray(self.B, dtype=complex)))
        if A.shape != B.shape:
            raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
        for name, M in (("A", A), ("B", B)):
            if not psd_check(M).psd:
                raise ValidationError(f"{name} is not positive semidefinite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class FormDecomposition:
    A_ac: np.ndarray
    A_s: np.ndarray
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "A_ac": _matrix_json(self.A_ac),
            "A_s": _matrix_json(self.A_s),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FormDecomposition":
        try:
            return cls(_matrix_from_json(obj["A_ac"]), _matrix_from_json(obj["A_s"]),
                       int(obj["iterations"]), bool(obj["converged"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed FormDecomposition JSON: {exc}") from exc


def parallel_sum(A, B) -> np.ndarray:
    """``A : B = A (A + B)^+ B`` with a relative pseudo-inverse cutoff of ``1e-12``."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    S = A + B
    P = A @ np.linalg.pinv(S, rcond=PINV_CUT, hermitian=True) @ B
    return 0.5 * (P + P.conj().T)


def _range_projector(B: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(B)
    keep = vals > PINV_CUT * max(vals[-1], 0.0) if vals.size else vals > 0
    V = vecs[:, keep]
    return V @ V.conj().T


def range_inclusion_residual(X, B, scale: float | None = None) -> float:
    """``||(I - P_B) X||_F / scale`` with ``P_B`` the projector onto ``range(B)``.

    ``scale`` defaults to ``||X||_F``; when ``X`` is a part of a larger
    matrix, pass that matrix's norm so rounding-level parts are not blown up.
    """
    X = np.asarray(X, dtype=complex)
    nx = np.linalg.norm(X) if scale is None else float(scale)
    if nx == 0:
        return 0.0
    P = _range_projector(np.asarray(B, dtype=complex))
    return float(np.linalg.norm(X - P @ X) / nx)


def _scaled_parallel(Ae: np.ndarray, beta: np.ndarray, t: float) -> np.ndarray:
    """``A : (tB)`` in the eigenbasis of ``B = diag(beta)``.

    Uses ``A : C = A - A (A + C)^+ A`` with the diagonal rescaling
    ``s = (1 + t beta)^{-1/2}``, which keeps ``A + tB`` well conditioned as
    ``t`` grows.
    """
    s = 1.0 / np.sqrt(1.0 + t * beta)
    M = s[:, None] * Ae * s[None, :] + np.diag(t * beta * s * s)
    Minv = np.linalg.pinv(M, rcond=PINV_CUT, hermitian=True)
    AS = Ae * s[None, :]
    P = Ae - AS @ Minv @ AS.conj().T
    return 0.5 * (P + P.conj().T)


def simon_decompose(fp: FormPair, kmax: int = KMAX, tol: float = STOP_TOL) -> FormDecomposition:
    """Split ``A = A_ac + A_s`` relative to ``B``.

    ``A_ac`` is the limit of ``A : (2^k B)``, which increases to the largest
    PSD ``C <= A`` with ``range(C)`` inside ``range(B)``.  Iteration stops
    when successive iterates differ by at most ``tol * ||A||_F`` and the
    last two are combined by one Richardson step, since the error decays
    like ``1/t``.

    Raises
    ------
    NotConverged
        If ``kmax`` doublings do not reach the stopping rule; ``result`` holds
        the last iterate.
    """
    A, B = fp.A, fp.B
    n = fp.dim
    normA = np.linalg.norm(A)
    beta, U = np.linalg.eigh(B)
    top = max(beta[-1], 0.0) if n else 0.0
    if n == 0 or normA == 0:
        return FormDecomposition(A.copy(), np.zeros_like(A), 0, True)
    if beta[0] > PINV_CUT * top and top > 0:
        return FormDecomposition(A.copy(), np.zeros_like(A), 0, True)
    beta = np.where(beta > PINV_CUT * top, beta, 0.0)
    Ae = U.conj().T @ A @ U
    prev = _scaled_parallel(Ae, beta, 1.0)
    converged = False
    k = 0
    for k in range(1, kmax + 1):
        cur = _scaled_parallel(Ae, beta, 2.0**k)
        if np.linalg.norm(cur - prev) <= tol * normA:
            converged = True
            cur = 2.0 * cur - prev
            break
        prev = cur
    Aac = U @ cur @ U.conj().T
    Aac = 0.5 * (Aac + Aac.conj().T)
    out = FormDecomposition(Aac, A - Aac, k, converged)
    if not converged:
        raise NotConverged(f"no convergence after {kmax} doublings", result=out)
    return out


def resolvent_identity_residual(fp: FormPair) -> float:
    """``||(I + T)^{-1} - B^{1/2} (A + B)^{-1} B^{1/2}||_F / dim`` with ``T = B^{-1/2} A B^{-1/2}``.

    Raises
    ------
    SingularReference
        If ``min eig(B) <= 1e-12 * trace(B)/dim``.
    """
    A, B = fp.A, fp.B
    n = fp.dim
    beta, U = np.linalg.eigh(B)
    if n == 0:
        return 0.0
    if beta[0] <= 1e-12 * np.trace(B).real / n:
        raise SingularReference(f"reference has eigenvalue {beta[0]:.3e}")
    half = (U * np.sqrt(beta)) @ U.conj().T
    ihalf = (U / np.sqrt(beta)) @ U.conj().T
    T = ihalf @ A @ ihalf
    lhs = np.linalg.inv(np.eye(n) + T)
    rhs = half @ np.linalg.solve(A + B, half)
    return float(np.linalg.norm(lhs - rhs) / n)


@dataclass(frozen=True, eq=False)
class RNResult:
    """Output of :func:`rn_extract`.

    ``residual`` is ``||mu^ - f^ * lam^||_2`` over ``|n| <= N`` for the
    returned ``f``; ``rel_residual`` divides it by ``||mu^||_2``.
    """

    f: TrigPoly
    residual: float
    rel_residual: float
    condition: float
    projected: bool


def _design(lam_full: np.ndarray, N: int, d: int, L: int) -> np.ndarray:
    """Real-parameter design for ``sum_k f_k lam^(n - k)``, ``|n| <= N``.

    Parameters are ``Re f_0`` and ``Re f_k, Im f_k`` for ``k = 1..d``;
    ``lam_full[L + m]`` holds ``lam^(m)``.
    """
    n = np.arange(-N, N + 1)
    cols = [lam_full[L + n]]
    for k in range(1, d + 1):
        a = lam_full[L + n - k]
        b = lam_full[L + n + k]
        cols.append(a + b)
        cols.append(1j * (a - b))
    return np.stack(cols, axis=1)


def _conv_residual(f: TrigPoly, mu_full, lam_full, N: int, L: int) -> float:
    n = np.arange(-N, N + 1)
    r = mu_full[L + n].copy()
    for k in range(-f.degree, f.degree + 1):
        r = r - f.coeff(k) * lam_full[L + n - k]
    return float(np.linalg.norm(r))


def rn_extract(mu: CircleMeasure, lam: CircleMeasure, N: int, d: int) -> RNResult:
    """Recover a trigonometric ``f`` of degree ``d`` with ``mu = f lam`` from moments.

    Solves the least-squares problem ``min ||mu^(n) - sum_k f^_k lam^(n-k)||``
    over ``|n| <= N`` with ``f^_{-k} = conj(f^_k)``.  When the fit dips below
    ``-1e-6`` on a 1024-point grid it is replaced by the Fejér mean of its
    clipped samples.

    Raises
    ------
    IllPosed
        If the normal matrix has condition number above ``1e12``.
    """
    if d < 0 or N < 0:
        raise ValidationError("N and d must be nonnegative")
    if 2 * d > N:
        raise ValidationError("d must satisfy d <= N/2")
    L = N + d
    lam_full = moments(lam, L).full()
    mu_full = moments(mu, N).full()
    mu_full = np.concatenate([np.zeros(d), mu_full, np.zeros(d)])
    D = _design(lam_full, N, d, L)
    rhs = mu_full[L - N: L + N + 1]
    Dr = np.vstack([D.real, D.imag])
    yr = np.concatenate([rhs.real, rhs.imag])
    sv = np.linalg.svd(Dr, compute_uv=False)
    cond = float((sv[0] / sv[-1]) ** 2) if sv[-1] > 0 else np.inf
    if not np.isfinite(cond) or cond > COND_CAP:
        raise IllPosed(f"normal matrix condition {cond:.3e} exceeds {COND_CAP:.0e}")
    x, *_ = np.linalg.lstsq(Dr, yr, rcond=None)
    c = np.empty(d + 1, dtype=complex)
    c[0] = x[0]
    c[1:] = x[1::2] + 1j * x[2::2]
    f = TrigPoly(c, real=True)
    projected = False
    theta = 2.0 * np.pi * np.arange(NONNEG_GRID) / NONNEG_GRID
    vals = np.real(f(theta))
    if vals.min() < NONNEG_FLOOR:
        f = cesaro_nonneg_approx(np.clip(vals, 0.0, None), d)
        projected = True
    res = _conv_residual(f, mu_full, lam_full, N, L)
    scale = np.linalg.norm(rhs)
    rel = res / scale if scale > 0 else res
    return RNResult(f, res, float(rel), cond, projected)
