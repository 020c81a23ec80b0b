"""Positive measures on the unit circle: a density with respect to normalized
Lebesgue measure ``m`` plus finitely many atoms.

The density is a finite sum of *pieces*.  Each piece is a real trigonometric
polynomial restricted to a finite union of arcs (or the whole circle).  A
sampled density on a uniform grid is stored as its trigonometric
interpolant, so moments and transforms stay exact for every representable
measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import arcs as _arcs
from .errors import NotAbsolutelyContinuous, ValidationError
from .trigpoly import TrigPoly

TWO_PI = 2.0 * np.pi
ATOM_SEPARATION = 1e-9
EPS_SUPP = 1e-9
DEFAULT_GRID = 4096


def interpolant(samples) -> TrigPoly:
    """Real trigonometric interpolant of samples at ``2*pi*k/M``.

    The Nyquist coefficient is split evenly between ``+-M/2``.
    """
    s = np.asarray(samples, dtype=float)
    M = s.size
    c = np.fft.fft(s) / M
    half = M // 2
    pos = c[: half + 1].copy()
    if M % 2 == 0 and half > 0:
        pos[half] *= 0.5
    return TrigPoly(pos, real=True)


@dataclass(frozen=True, eq=False)
class Piece:
    """A real trigonometric polynomial supported on an arc set."""

    poly: TrigPoly
    arcs: tuple | None = None
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.poly.real:
            raise ValidationError("density pieces must be real trigonometric polynomials")
        object.__setattr__(self, "arcs", _arcs.normalize(self.arcs))

    @classmethod
    def from_samples(cls, samples, arcs=None) -> "Piece":
        s = np.array(samples, dtype=float)
        s.setflags(write=False)
        return cls(interpolant(s), arcs, s)

    @property
    def full(self) -> bool:
        return self.arcs is None

    def scaled(self, a: float) -> "Piece":
        s = None if self.samples is None else self.samples * a
        return Piece(self.poly * float(a), self.arcs, s)

    def restricted(self, arcs) -> "Piece":
        return Piece(self.poly, _arcs.intersect(self.arcs, _arcs.normalize(arcs)), self.samples)

    def __call__(self, theta):
        return np.real(self.poly(theta)) * _arcs.indicator(self.arcs, theta)

    def mass(self) -> float:
        return float(np.real(self.moments(0)[0]))

    def moments(self, N: int) -> np.ndarray:
        n = np.arange(N + 1)
        if self.arcs is None:
            return self.poly.coeff(n)
        if not self.arcs:
            return np.zeros(N + 1, dtype=complex)
        j = self.poly.indices
        c = self.poly.coeffs
        return _arcs.fourier(self.arcs, j[None, :] - n[:, None]) @ c

    def is_zero(self) -> bool:
        return (self.arcs is not None and not self.arcs) or self.poly.l1 == 0.0

    def sup_estimate(self) -> float:
        """Maximum of the piece over a fine grid."""
        if self.samples is not None:
            vals = self.samples
            if self.arcs is not None:
                M = vals.size
                vals = vals * (_arcs.indicator(self.arcs, TWO_PI * np.arange(M) / M) > 0)
            return float(vals.max(initial=0.0))
        theta = TWO_PI * np.arange(DEFAULT_GRID) / DEFAULT_GRID
        return float(np.max(self(theta), initial=0.0))

    def to_json(self) -> dict:
        if self.samples is not None:
            poly = {"samples": self.samples.tolist(), "grid": int(self.samples.size)}
        else:
            poly = self.poly.to_json()
        return {"poly": poly, "arcs": _arcs.to_list(self.arcs)}


def _same_poly(p: Piece, q: Piece) -> bool:
    if (p.samples is None) != (q.samples is None):
        return False
    if p.samples is not None:
        return p.samples.shape == q.samples.shape and np.array_equal(p.samples, q.samples)
    a, b = p.poly.coeffs, q.poly.coeffs
    return a.shape == b.shape and np.array_equal(a, b)


@dataclass(frozen=True, eq=False)
class Density:
    pieces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", _simplify(tuple(self.pieces)))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for p in self.pieces:
            out = out + p(theta)
        return out

    def moments(self, N: int) -> np.ndarray:
        out = np.zeros(N + 1, dtype=complex)
        for p in self.pieces:
            out += p.moments(N)
        return out

    def scaled(self, a: float) -> "Density":
        if a == 0:
            return Density()
        return Density(tuple(p.scaled(a) for p in self.pieces))

    def restricted(self, arcs) -> "Density":
        return Density(tuple(p.restricted(arcs) for p in self.pieces))

    def __add__(self, other: "Density") -> "Density":
        return Density(self.pieces + other.pieces)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.pieces)

    @property
    def l1(self) -> float:
        return sum(p.poly.l1 for p in self.pieces)

    def to_json(self):
        if not self.pieces:
            return None
        if len(self.pieces) == 1 and self.pieces[0].full:
            return self.pieces[0].to_json()["poly"]
        return {"pieces": [p.to_json() for p in self.pieces]}


def _simplify(pieces: tuple) -> tuple:
    """Drop empty pieces; merge pieces with identical polynomials or arcs."""
    pieces = [p for p in pieces if not p.is_zero()]
    out: list[Piece] = []
    for p in pieces:
        for k, q in enumerate(out):
            if _same_poly(p, q) and _arcs.intersect(p.arcs, q.arcs) == ():
                out[k] = Piece(q.poly, _arcs.union(q.arcs, p.arcs), q.samples)
                break
            if p.samples is None and q.samples is None and p.arcs == q.arcs:
                out[k] = Piece(q.poly + p.poly, q.arcs)
                break
        else:
            out.append(p)
    return tuple(out)


def _circ_dist(a, b):
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


@dataclass(frozen=True, eq=False)
class CircleMeasure:
    """Finite positive measure ``density * m + sum_k w_k delta_{theta_k}``.

    Parameters
    ----------
    density : Density, TrigPoly or None
        Absolutely continuous part with respect to normalized Lebesgue
        measure.
    atoms : iterable of (angle, weight)
        Point masses; angles are reduced to ``[0, 2*pi)``, coincident atoms
        are merged and zero weights dropped.
    """

    density: Density = field(default_factory=Density)
    atom_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atom_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __init__(self, density=None, atoms=()):
        if density is None:
            density = Density()
        elif isinstance(density, TrigPoly):
            density = Density((Piece(density),))
        elif isinstance(density, Piece):
            density = Density((density,))
        angles, weights = _merge_atoms(atoms)
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "atom_angles", angles)
        object.__setattr__(self, "atom_weights", weights)

    # constructors
    @classmethod
    def zero(cls) -> "CircleMeasure":
        return cls()

    @classmethod
    def lebesgue(cls, mass: float = 1.0) -> "CircleMeasure":
        return cls(TrigPoly.constant(mass))

    @classmethod
    def arc(cls, a: float, b: float, value: float = 1.0) -> "CircleMeasure":
        """Constant density ``value`` on the arc from ``a`` to ``b``."""
        return cls(Piece(TrigPoly.constant(value), ((a, b),)))

    @classmethod
    def upper_half(cls) -> "CircleMeasure":
        """Lebesgue measure restricted to the upper half circle, ``m_+``."""
        return cls.arc(0.0, np.pi)

    @classmethod
    def lower_half(cls) -> "CircleMeasure":
        """Lebesgue measure restricted to the lower half circle, ``m_-``."""
        return cls.arc(np.pi, TWO_PI)

    @classmethod
    def point_mass(cls, angle: float = 0.0, weight: float = 1.0) -> "CircleMeasure":
        return cls(atoms=[(angle, weight)])

    @classmethod
    def from_trig(cls, poly: TrigPoly, atoms=()) -> "CircleMeasure":
        return cls(poly, atoms)

    @classmethod
    def from_samples(cls, samples, atoms=()) -> "CircleMeasure":
        return cls(Piece.from_samples(samples), atoms)

    # basic quantities
    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.atom_angles.tolist(), self.atom_weights.tolist()))

    @property
    def mass(self) -> float:
        return float(np.real(self.density.moments(0)[0]) + self.atom_weights.sum())

    @property
    def atom_mass(self) -> float:
        return float(self.atom_weights.sum())

    @property
    def density_mass(self) -> float:
        return float(np.real(self.density.moments(0)[0]))

    def density_at(self, theta):
        return self.density(theta)

    def moments(self, N: int) -> "MomentSequence":
        return moments(self, N)

    def scaled(self, a: float) -> "CircleMeasure":
        return combine(a, self, 0.0, CircleMeasure())

    def __add__(self, other: "CircleMeasure") -> "CircleMeasure":
        return combine(1.0, self, 1.0, other)

    def __rmul__(self, a: float) -> "CircleMeasure":
        return self.scaled(a)

    def restricted(self, arcs, atom_mask=None) -> "CircleMeasure":
        """Density restricted to ``arcs``; atoms kept where ``atom_mask`` holds."""
        if atom_mask is None:
            atom_mask = np.ones(self.atom_angles.size, dtype=bool)
        atoms = list(zip(self.atom_angles[atom_mask], self.atom_weights[atom_mask]))
        return CircleMeasure(self.density.restricted(arcs), atoms)

    def check(self, tol: float = 1e-10) -> None:
        """Validate nonnegativity of the density on a 4096-point grid."""
        theta = TWO_PI * np.arange(DEFAULT_GRID) / DEFAULT_GRID
        scale = max(self.density.l1, 1.0)
        for p in self.density.pieces:
            vals = p.samples if p.samples is not None else p(theta)
            if np.min(vals) < -tol * scale:
                raise ValidationError("density takes negative values")
        if np.any(self.atom_weights < 0):
            raise ValidationError("negative atom weight")

    def __repr__(self) -> str:
        return (
            f"CircleMeasure(pieces={len(self.density.pieces)}, atoms={self.atom_angles.size}, "
            f"mass={self.mass:.6g})"
        )

    # serialization
    def to_json(self) -> dict:
        return {
            "density": self.density.to_json(),
            "atoms": [{"angle": float(a), "weight": float(w)} for a, w in self.atoms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CircleMeasure":
        if not isinstance(obj, dict):
            raise ValidationError("measure JSON must be an object")
        try:
            dens = _density_from_json(obj.get("density"))
            atoms = [(float(a["angle"]), float(a["weight"])) for a in obj.get("atoms", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed measure JSON: {exc}") from exc
        mu = cls(dens, atoms)
        mu.check()
        return mu


def _poly_from_json(obj) -> Piece:
    if "samples" in obj:
        s = np.asarray(obj["samples"], dtype=float)
        if "grid" in obj and int(obj["grid"]) != s.size:
            raise ValidationError("grid size does not match number of samples")
        return Piece.from_samples(s)
    p = TrigPoly.from_json(obj)
    if not p.real:
        p = TrigPoly.from_full(p.coeffs, real=True)
    return Piece(p)


def _density_from_json(obj) -> Density:
    if obj is None:
        return Density()
    if "pieces" in obj:
        pieces = []
        for entry in obj["pieces"]:
            base = _poly_from_json(entry["poly"])
            arcs = entry.get("arcs")
            arcs = None if arcs is None else [tuple(map(float, a)) for a in arcs]
            pieces.append(Piece(base.poly, arcs, base.samples))
        return Density(tuple(pieces))
    return Density((_poly_from_json(obj),))


def _merge_atoms(atoms):
    atoms = list(atoms)
    if not atoms:
        return np.zeros(0), np.zeros(0)
    ang = np.mod(np.array([float(a) for a, _ in atoms]), TWO_PI)
    wt = np.array([float(w) for _, w in atoms])
    if np.any(wt < 0):
        raise ValidationError("atom weights must be nonnegative")
    order = np.argsort(ang)
    ang, wt = ang[order], wt[order]
    out_a: list[float] = []
    out_w: list[float] = []
    for a, w in zip(ang, wt):
        if out_a and _circ_dist(a, out_a[-1]) <= ATOM_SEPARATION:
            out_w[-1] += w
        elif out_a and _circ_dist(a, out_a[0]) <= ATOM_SEPARATION:
            out_w[0] += w
        else:
            out_a.append(a)
            out_w.append(w)
    keep = np.array(out_w) > 0
    return np.array(out_a)[keep], np.array(out_w)[keep]


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Moments ``mu^(n) = int conj(zeta)^n dmu`` for ``0 <= n <= N``."""

    vals: np.ndarray

    @property
    def N(self) -> int:
        return self.vals.size - 1

    def __getitem__(self, n):
        n = np.asarray(n)
        v = np.where(n >= 0, self.vals[np.abs(n)], np.conj(self.vals[np.abs(n)]))
        return v if v.ndim else complex(v)

    def full(self) -> np.ndarray:
        """Moments for ``n = -N .. N``."""
        return np.concatenate([self.vals[:0:-1].conj(), self.vals])

    def toeplitz(self) -> np.ndarray:
        """The matrix ``[mu^(j - i)]_{i,j=0..N}``."""
        idx = np.arange(self.N + 1)
        return self[idx[None, :] - idx[:, None]]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vals, dtype=dtype)


def moments(mu: CircleMeasure, N: int) -> MomentSequence:
    """Fourier moments up to order ``N`` (exact for every representable measure)."""
    if N < 0:
        raise ValidationError("N must be nonnegative")
    n = np.arange(N + 1)
    vals = mu.density.moments(N)
    if mu.atom_angles.size:
        vals = vals + np.exp(-1j * np.outer(n, mu.atom_angles)) @ mu.atom_weights
    vals[0] = vals[0].real
    return MomentSequence(vals)


def combine(a: float, mu: CircleMeasure, b: float, nu: CircleMeasure) -> CircleMeasure:
    """The measure ``a*mu + b*nu`` for ``a, b >= 0``."""
    if a < 0 or b < 0:
        raise ValidationError("combination coefficients must be nonnegative")
    dens = mu.density.scaled(a) + nu.density.scaled(b)
    atoms = [(t, a * w) for t, w in mu.atoms] + [(t, b * w) for t, w in nu.atoms]
    return CircleMeasure(dens, atoms)


# classical oracle -----------------------------------------------------------


def density_support(mu: CircleMeasure, eps: float = EPS_SUPP):
    """Arc set where the density is positive, up to a null set.

    A trigonometric polynomial that is not identically zero vanishes only at
    finitely many points, so each polynomial piece contributes its whole arc
    set unless its maximum is below ``eps`` times the largest piece maximum.
    Sampled pieces are thresholded cell by cell.
    """
    pieces = mu.density.pieces
    if not pieces:
        return ()
    sups = [p.sup_estimate() for p in pieces]
    top = max(sups)
    if top <= 0:
        return ()
    support = ()
    for p, s in zip(pieces, sups):
        if s <= eps * top:
            continue
        if p.samples is not None:
            cells = _arcs.from_mask(p.samples > eps * top, shift=0.0)
            support = _arcs.union(support, _arcs.intersect(cells, p.arcs))
        else:
            support = _arcs.union(support, p.arcs)
        if support is None:
            break
    return support


def atoms_near(angles, targets, tol: float) -> np.ndarray:
    """Boolean mask of ``angles`` lying within ``tol`` of some target angle."""
    angles = np.asarray(angles, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if angles.size == 0 or targets.size == 0:
        return np.zeros(angles.size, dtype=bool)
    return (_circ_dist(angles[:, None], targets[None, :]) <= tol).any(axis=1)


def classical_decompose_oracle(mu: CircleMeasure, lam: CircleMeasure):
    """Textbook Lebesgue decomposition of ``mu`` with respect to ``lam``.

    Returns
    -------
    (mu_ac, mu_s) : tuple of CircleMeasure
        ``mu_ac`` is the density of ``mu`` restricted to the support of the
        ``lam`` density together with the atoms of ``mu`` sitting on atoms of
        ``lam``; ``mu_s`` is the rest, so ``mu_ac + mu_s = mu`` piece by piece.
    """
    support = density_support(lam)
    on = atoms_near(mu.atom_angles, lam.atom_angles, ATOM_SEPARATION)
    mu_ac = mu.restricted(support, on)
    mu_s = mu.restricted(_arcs.complement(support), ~on)
    return mu_ac, mu_s


@dataclass(frozen=True, eq=False)
class RNDerivative:
    """Radon-Nikodym derivative of a measure with respect to a reference.

    ``poly`` is set when the derivative is an exact trigonometric polynomial
    on the whole circle; otherwise ``samples`` holds values on a uniform grid.
    ``atom_ratios`` lists ``(angle, mu{angle} / lam{angle})``.
    """

    poly: TrigPoly | None
    samples: np.ndarray | None
    atom_ratios: tuple = ()
    _mu: CircleMeasure | None = field(default=None, repr=False)
    _lam: CircleMeasure | None = field(default=None, repr=False)

    def __call__(self, theta):
        if self.poly is not None:
            return np.real(self.poly(theta))
        num = self._mu.density(theta)
        den = self._lam.density(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def rn_derivative_oracle(mu: CircleMeasure, lam: CircleMeasure, grid: int = DEFAULT_GRID) -> RNDerivative:
    """Density ``d mu / d lam`` computed from the representations.

    Raises
    ------
    NotAbsolutelyContinuous
        If ``mu`` has a part singular to ``lam``.
    """
    _, mu_s = classical_decompose_oracle(mu, lam)
    if mu_s.mass > 1e-12 * max(mu.mass, 1e-300):
        raise NotAbsolutelyContinuous(f"singular part of mass {mu_s.mass:.3e}")
    ratios = []
    for a, w in mu.atoms:
        k = int(np.argmin(_circ_dist(lam.atom_angles, a)))
        ratios.append((a, w / lam.atom_weights[k]))
    lp = lam.density.pieces
    mp = mu.density.pieces
    if len(lp) == 1 and lp[0].full and lp[0].poly.degree == 0:
        c = float(lp[0].poly.coeffs[0].real)
        if not mp:
            poly = TrigPoly.constant(0.0)
        elif len(mp) == 1 and mp[0].full:
            poly = mp[0].poly * (1.0 / c)
        else:
            poly = None
        if poly is not None:
            return RNDerivative(poly, None, tuple(ratios), mu, lam)
    theta = TWO_PI * np.arange(grid) / grid
    out = RNDerivative(None, None, tuple(ratios), mu, lam)
    return RNDerivative(None, out(theta), tuple(ratios), mu, lam)


# random test measures -------------------------------------------------------


def random_trig_density(rng: np.random.Generator, degree: int = 4, floor: float = 0.0) -> TrigPoly:
    """Random nonnegative trigonometric polynomial ``|g|^2 + floor`` with unit mass."""
    g = (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) / np.sqrt(2)
    g *= 0.7 ** np.arange(degree + 1)
    full = np.convolve(g, g[::-1].conj())
    p = TrigPoly.from_full(full, real=True) + floor
    return p * (1.0 / float(p.coeffs[p.degree].real))


def random_measure(
    rng: np.random.Generator,
    degree: int = 4,
    n_atoms: int | None = None,
    n_arcs: int | None = None,
    density: bool = True,
) -> CircleMeasure:
    """Random member of the density-plus-atoms class used in tests and demos."""
    pieces = []
    if density:
        pieces.append(Piece(random_trig_density(rng, degree) * rng.uniform(0.2, 1.5)))
    if n_arcs is None:
        n_arcs = int(rng.integers(0, 3))
    for _ in range(n_arcs):
        a = rng.uniform(0, TWO_PI)
        ln = rng.uniform(0.2, 2.5)
        poly = random_trig_density(rng, int(rng.integers(0, 3))) * rng.uniform(0.2, 1.5)
        pieces.append(Piece(poly, ((a, a + ln),)))
    if n_atoms is None:
        n_atoms = int(rng.integers(0, 4))
    atoms = [(rng.uniform(0, TWO_PI), rng.uniform(0.05, 1.0)) for _ in range(n_atoms)]
    return CircleMeasure(Density(tuple(pieces)), atoms)
