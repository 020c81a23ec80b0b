"""Reproducing kernels of spaces of Cauchy transforms.

The kernel of the space attached to ``mu`` is

    k(z, w) = int 1 / ((1 - z conj(zeta)) (1 - conj(w) zeta)) dmu(zeta)
            = (H(z) + conj(H(w))) / (2 (1 - z conj(w))).

Both formulas are implemented independently: the first by quadrature (or
closed forms for atoms), the second from the Herglotz transform.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, OutsideDisk, ValidationError
from .measure import CircleMeasure, moments
from .transform import herglotz

DEFAULT_SEED = 0xC12C
SEED_ENV = "CIRCLEKIT_SEED"
TOL_PSD = 1e-10
GRID_RADIUS = 0.95
GRID_SIZE = 64

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def default_seed() -> int:
    """Seed for default grids; ``CIRCLEKIT_SEED`` overrides the built-in constant."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def default_points(n: int = GRID_SIZE, radius: float = GRID_RADIUS, seed: int | None = None) -> np.ndarray:
    """Fixed-seed points spread uniformly over the disk of the given radius."""
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    return r * np.exp(1j * t)


class KernelMethod(enum.Enum):
    Integral = "integral"
    Herglotz = "herglotz"


@dataclass(frozen=True, eq=False)
class KernelGram:
    """Kernel values ``entries[i, j] = k(p_i, p_j)`` on a finite point set.

    ``kind`` is ``"disk"`` for disk points and ``"coeff"`` for Taylor
    coefficient indices.
    """

    points: np.ndarray
    entries: np.ndarray
    kind: str = "disk"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] != len(self.points):
            raise ValidationError("Gram matrix shape does not match the point list")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "points", np.asarray(self.points))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: "KernelGram") -> "KernelGram":
        _same_points(self, other)
        return KernelGram(self.points, self.entries + other.entries, self.kind)

    def __sub__(self, other: "KernelGram") -> "KernelGram":
        _same_points(self, other)
        return KernelGram(self.points, self.entries - other.entries, self.kind)

    def scaled(self, a: float) -> "KernelGram":
        return KernelGram(self.points, a * self.entries, self.kind)

    def to_json(self) -> dict:
        pts = np.asarray(self.points, dtype=complex)
        return {
            "points": [{"re": float(p.real), "im": float(p.imag)} for p in pts],
            "entries": [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict, kind: str = "disk") -> "KernelGram":
        try:
            pts = np.array([complex(p["re"], p.get("im", 0.0)) for p in obj["points"]])
            ent = np.array([[complex(v["re"], v.get("im", 0.0)) for v in row] for row in obj["entries"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed KernelGram JSON: {exc}") from exc
        return cls(pts, ent.reshape(len(pts), len(pts)), kind)


def _same_points(a: KernelGram, b: KernelGram) -> None:
    if a.dim != b.dim or a.kind != b.kind or not np.allclose(a.points, b.points, rtol=0, atol=1e-15):
        raise ValidationError("Gram matrices live on different point sets")


# kernel evaluation -------------------------------------------------------------


def _check(z) -> complex:
    z = complex(z)
    if not np.isfinite(z) or abs(z) >= 1.0:
        raise OutsideDisk("points must satisfy |z| < 1")
    return z


def _integrand(theta, z, w):
    u = np.exp(1j * theta)
    return 1.0 / ((1.0 - z * np.conj(u)) * (1.0 - np.conj(w) * u))


def _integral_full(poly, z, w) -> complex:
    rho = max(abs(z), abs(w), 1e-3)
    M = max(2 * poly.degree + 2, poly.degree + int(np.ceil(np.log(1e-18) / np.log(rho))) + 8)
    M = 1 << int(np.ceil(np.log2(M)))
    theta = 2.0 * np.pi * np.arange(M) / M
    return complex(np.mean(np.real(poly(theta)) * _integrand(theta, z, w)))


def _integral_arcs(poly, arcs, z, w) -> complex:
    rho = max(abs(z), abs(w))
    width = min(0.25, max(1.0 - rho, 1e-6))
    total = 0.0 + 0.0j
    for a, b in arcs:
        panels = int(np.ceil((b - a) / width))
        edges = np.linspace(a, b, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        theta = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        total += np.sum(wts * np.real(poly(theta)) * _integrand(theta, z, w))
    return total / (2.0 * np.pi)


def _kernel_integral(mu: CircleMeasure, z: complex, w: complex) -> complex:
    val = 0.0 + 0.0j
    if mu.atom_angles.size:
        val += np.sum(mu.atom_weights * _integrand(mu.atom_angles, z, w))
    for p in mu.density.pieces:
        if p.arcs is None:
            val += _integral_full(p.poly, z, w)
        elif p.arcs:
            val += _integral_arcs(p.poly, p.arcs, z, w)
    return complex(val)


def kernel_eval(mu: CircleMeasure, z, w, method=KernelMethod.Herglotz) -> complex:
    """Evaluate ``k^mu(z, w)``.

    Parameters
    ----------
    method : KernelMethod or str
        ``Integral`` integrates ``1/((1 - z conj(zeta))(1 - conj(w) zeta))``
        against ``mu``; ``Herglotz`` uses ``(H(z) + conj H(w)) / (2(1 - z conj w))``.
    """
    z, w = _check(z), _check(w)
    method = KernelMethod(method.value if isinstance(method, KernelMethod) else str(method).lower())
    if method is KernelMethod.Integral:
        return _kernel_integral(mu, z, w)
    Hz, Hw = herglotz(mu, np.array([z, w]))
    return complex(0.5 * (Hz + np.conj(Hw)) / (1.0 - z * np.conj(w)))


def gram(mu: CircleMeasure, points) -> KernelGram:
    """Gram matrix ``[k^mu(z_i, z_j)]`` via the Herglotz formula."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if np.any(np.abs(pts) >= 1.0):
        raise OutsideDisk("points must satisfy |z| < 1")
    H = np.asarray(herglotz(mu, pts))
    G = 0.5 * (H[:, None] + np.conj(H)[None, :]) / (1.0 - pts[:, None] * np.conj(pts)[None, :])
    G = 0.5 * (G + G.conj().T)
    return KernelGram(pts, G)


def coeff_kernel(mu: CircleMeasure, N: int) -> KernelGram:
    """Toeplitz moment matrix with entry ``(i, j) = mu^(j - i)``, ``0 <= i, j <= N``."""
    if N < 0:
        raise ValidationError("N must be nonnegative")
    return KernelGram(np.arange(N + 1), moments(mu, N).toeplitz(), "coeff")


# positivity -------------------------------------------------------------------------


class PSDVerdict(enum.Enum):
    PSD = "PSD"
    Indefinite = "Indefinite"


@dataclass(frozen=True, eq=False)
class PSDResult:
    verdict: PSDVerdict
    min_eig: float
    threshold: float
    witness: np.ndarray

    @property
    def psd(self) -> bool:
        return self.verdict is PSDVerdict.PSD


def hermitian_part(G, atol: float = 1e-12) -> np.ndarray:
    """Return ``(G + G*)/2`` after checking ``G`` is Hermitian to ``atol`` relative."""
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise NotHermitian("matrix must be square")
    scale = max(float(np.max(np.abs(G), initial=0.0)), 1e-300)
    if np.max(np.abs(G - G.conj().T), initial=0.0) > atol * scale:
        raise NotHermitian("matrix is not Hermitian")
    return 0.5 * (G + G.conj().T)


def psd_check(G, tol: float = TOL_PSD, scale: float | None = None) -> PSDResult:
    """Positive semidefiniteness test by the smallest eigenvalue.

    The matrix passes when ``min_eig >= -tol * scale``; ``scale`` defaults to
    ``trace(G)/dim``.  Callers testing a difference ``A - B`` should pass the
    scale of the operands, since the trace of a near-zero difference carries
    no information about rounding.
    """
    if isinstance(G, KernelGram):
        G = G.entries
    H = hermitian_part(G)
    n = H.shape[0]
    if n == 0:
        return PSDResult(PSDVerdict.PSD, 0.0, 0.0, np.zeros(0))
    if scale is None:
        scale = abs(float(np.real(np.trace(H)))) / n
    vals, vecs = np.linalg.eigh(H)
    thr = -tol * scale
    verdict = PSDVerdict.PSD if vals[0] >= thr else PSDVerdict.Indefinite
    return PSDResult(verdict, float(vals[0]), float(thr), vecs[:, 0])


class Domination(enum.Enum):
    Dominated = "Dominated"
    Violated = "Violated"


@dataclass(frozen=True, eq=False)
class DominationResult:
    """Outcome of the grid test ``t^2 k^lam - k^mu >= 0``.

    On ``Violated`` the witness ``c`` satisfies ``c* (t^2 G_lam - G_mu) c < 0``,
    i.e. ``||sum c_i k^mu_{z_i}||^2 > t^2 ||sum c_i k^lam_{z_i}||^2``.
    """

    verdict: Domination
    min_eig: float
    witness: np.ndarray
    points: np.ndarray

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "min_eig": self.min_eig,
            "witness": [{"re": float(c.real), "im": float(c.imag)} for c in self.witness],
            "points": [{"re": float(p.real), "im": float(p.imag)} for p in self.points],
        }


def dominates_rk(mu: CircleMeasure, lam: CircleMeasure, t: float, points=None, tol: float = TOL_PSD) -> DominationResult:
    """Test ``k^mu <= t^2 k^lam`` on a finite disk grid.

    For Cauchy-transform kernels this holds on every grid exactly when
    ``mu <= t^2 lam``; a single grid gives a sound test for violations.
    """
    if t <= 0:
        raise ValidationError("t must be positive")
    pts = default_points() if points is None else np.asarray(points, dtype=complex)
    Gm = gram(mu, pts).entries
    Gl = gram(lam, pts).entries
    D = t * t * Gl - Gm
    n = D.shape[0]
    scale = (t * t * abs(np.trace(Gl).real) + abs(np.trace(Gm).real)) / n
    res = psd_check(D, tol, scale)
    verdict = Domination.Dominated if res.psd else Domination.Violated
    witness = np.zeros(0, dtype=complex) if res.psd else res.witness
    return DominationResult(verdict, res.min_eig, witness, pts)
