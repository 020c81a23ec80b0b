"""Lebesgue decomposition of a positive kernel against a reference kernel on a finite set.

For kernels ``k`` and ``K`` on ``{x_1, ..., x_n}`` the vectors ``K_{x_i}``
span a subspace of ``H(K)`` with Gram matrix ``K``, and ``k`` defines the form
``q_k(K_x, K_y) = k(x, y)`` on it.  Splitting that form against the Gram
metric gives ``k = k_ac + k_s`` with ``H(k_ac)`` contractively inside ``H(K)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .forms import FormPair, range_inclusion_residual, simon_decompose
from .kernel import hermitian_part, psd_check

RANK_TOL = 1e-10
ORTH_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """Hermitian PSD matrix ``entries[i, j] = k(x_i, x_j)``."""

    entries: np.ndarray

    def __post_init__(self):
        E = hermitian_part(np.atleast_2d(np.asarray(self.entries, dtype=complex)))
        if not psd_check(E).psd:
            raise ValidationError("kernel matrix is not positive semidefinite")
        object.__setattr__(self, "entries", E)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteKernel":
        try:
            n = int(obj["n"])
            rows = obj["entries"]
            E = np.array(
                [[complex(v["re"], v.get("im", 0.0)) if isinstance(v, dict) else complex(v) for v in row] for row in rows],
                dtype=complex,
            ).reshape(n, n)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed FiniteKernel JSON: {exc}") from exc
        return cls(E)


def kernel_lebesgue(k: FiniteKernel, K: FiniteKernel) -> tuple[FiniteKernel, FiniteKernel]:
    """Split ``k`` into a part absolutely continuous with respect to ``K`` and a singular rest.

    Null directions of ``K`` represent the zero vector of ``H(K)``; they are
    exactly the directions where the reference form vanishes, so the form
    splitting sends every contribution of ``k`` living there into ``k_s``.

    Raises
    ------
    NotConverged
        Propagated from the form decomposition.
    """
    if k.n != K.n:
        raise DimensionMismatch(f"set sizes {k.n} and {K.n} differ")
    dec = simon_decompose(FormPair(k.entries, K.entries))
    ref = abs(np.trace(k.entries).real) / max(k.n, 1)
    return _checked(dec.A_ac, ref), _checked(k.entries - dec.A_ac, ref)


def _checked(M: np.ndarray, scale: float) -> FiniteKernel:
    # a part of k is judged at the scale of k, not at its own (possibly ~0) trace
    M = 0.5 * (M + M.conj().T)
    if not psd_check(M, scale=scale).psd:
        raise ValidationError("decomposition produced an indefinite part")
    out = object.__new__(FiniteKernel)
    object.__setattr__(out, "entries", M)
    return out


def numerical_rank(M, ref: float | None = None, tol: float = RANK_TOL) -> int:
    """Number of eigenvalues above ``tol * ref`` (``ref`` defaults to ``||M||_2``)."""
    vals = np.linalg.eigvalsh(np.asarray(M, dtype=complex))
    if ref is None:
        ref = max(abs(vals).max(initial=0.0), 0.0)
    if ref == 0:
        return 0
    return int(np.sum(vals > tol * ref))


@dataclass(frozen=True)
class SplitReport:
    rank_k: int
    rank_ac: int
    rank_s: int
    rank_additive: bool
    orthogonality: float
    sum_residual: float
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _pinv_sqrt(M: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(M)
    keep = vals > tol * max(vals.max(initial=0.0), 1e-300)
    inv = np.where(keep, 1.0 / np.where(keep, vals, 1.0), 0.0)
    return (vecs * inv) @ vecs.conj().T, (vecs * np.sqrt(inv)) @ vecs.conj().T


def orthogonal_split_check(k, k_ac, k_s) -> SplitReport:
    """Check that ``H(k) = H(k_ac) (+) H(k_s)`` orthogonally.

    Ranks use the cutoff ``1e-10 * ||k||``; orthogonality is measured by
    ``||(k^+)^{1/2} k_ac k^+ k_s (k^+)^{1/2}||_F``.
    """
    k, k_ac, k_s = (x.entries if isinstance(x, FiniteKernel) else np.asarray(x, dtype=complex) for x in (k, k_ac, k_s))
    ref = np.linalg.norm(k, 2)
    sum_res = float(np.linalg.norm(k - k_ac - k_s) / max(ref, 1e-300)) if ref > 0 else float(np.linalg.norm(k_ac + k_s))
    if sum_res > 1e-10:
        raise ValidationError(f"k differs from k_ac + k_s by {sum_res:.3e}")
    rk, ra, rs = (numerical_rank(M, ref) for M in (k, k_ac, k_s))
    kp, kph = _pinv_sqrt(k, RANK_TOL)
    orth = float(np.linalg.norm(kph @ k_ac @ kp @ k_s @ kph))
    additive = rk == ra + rs
    return SplitReport(rk, ra, rs, additive, orth, sum_res, additive and orth <= ORTH_TOL)


def ac_range_residual(k_ac: FiniteKernel, K: FiniteKernel, scale: float | None = None) -> float:
    """Projector residual of ``range(k_ac)`` against ``range(K)``, relative to ``scale``."""
    return range_inclusion_residual(k_ac.entries, K.entries, scale)
