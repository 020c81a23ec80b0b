"""Herglotz and Cauchy transforms, the Clark correspondence and boundary
values.

For ``mu`` on the circle the Herglotz transform is

    H(z) = int (1 + z conj(zeta)) / (1 - z conj(zeta)) dmu(zeta)
         = mu^(0) + 2 sum_{n >= 1} mu^(n) z^n,

and ``b = (H - 1)/(H + 1)`` is the contractive function whose Clark measure
is ``mu``.  Every component of a :class:`~circlekit.measure.CircleMeasure`
has a closed form for ``H``, so transforms are exact up to rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from . import arcs as _arcs
from .errors import IllConditioned, NonContractive, NotNonnegative, OutsideDisk, ValidationError
from .measure import CircleMeasure, Density, Piece, moments
from .trigpoly import AnalyticPoly, fejer_riesz_factor

TWO_PI = 2.0 * np.pi
LOG_FLOOR = -40.0
EXTREME_FLOOR = 1e-8
ATOM_FLOOR = 1e-4
CLARK_GRID = 4096
#: default radial schedule r_k = 1 - 2^-k
DEFAULT_RADII = 1.0 - 2.0 ** -np.arange(4, 31)
CONTRACTIVE_TOL = 1e-8


def _check_disk(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0):
        raise OutsideDisk("points must satisfy |z| < 1")
    return z


# Herglotz transform of the building blocks ----------------------------------


def _series_threshold(z: np.ndarray) -> int:
    rmax = float(np.max(np.abs(z), initial=0.0))
    if rmax == 0.0:
        return 1
    return int(np.ceil(np.log(1e-18) / np.log(rmax))) + 1


def _arc_cauchy_moments(arcs, j: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``Q_j(z) = int_A u^j / (1 - z conj(u)) dm(u)`` for consecutive ``j``.

    Shape ``(z.size, j.size)``.  Points with ``|z| <= 0.9`` use the power
    series; the others use the three-term recursion
    ``Q_j = M_j + z Q_{j-1}`` seeded with the logarithm for ``Q_0``.
    """
    out = np.zeros((z.size, j.size), dtype=complex)
    small = np.abs(z) <= 0.9
    if np.any(small):
        zs = z[small]
        K = _series_threshold(zs)
        n = np.arange(K)
        table = _arcs.fourier(arcs, j[None, :] - n[:, None])  # (K, J)
        out[small] = np.power.outer(zs, n) @ table
    big = ~small
    if np.any(big):
        zb = z[big]
        q0 = np.zeros(zb.size, dtype=complex)
        for a, b in arcs:
            ea, eb = np.exp(1j * a), np.exp(1j * b)
            da, db = ea - zb, eb - zb
            darg = np.mod(np.angle(db / da), TWO_PI)
            q0 += (np.log(np.abs(db)) - np.log(np.abs(da)) + 1j * darg) / (2j * np.pi)
        jmin, jmax = min(int(j.min()), 0), max(int(j.max()), 0)
        mom = _arcs.fourier(arcs, np.arange(jmin, jmax + 1))
        col = {0: q0}
        for k in range(1, jmax + 1):
            col[k] = mom[k - jmin] + zb * col[k - 1]
        for k in range(-1, jmin - 1, -1):
            col[k] = (col[k + 1] - mom[k + 1 - jmin]) / zb
        for idx, jj in enumerate(j):
            out[big, idx] = col[int(jj)]
    return out


def _herglotz_piece(piece: Piece, z: np.ndarray) -> np.ndarray:
    poly = piece.poly
    if piece.arcs is None:
        c = poly.coeff(np.arange(poly.degree + 1))
        # Horner for c_0 + 2 sum_{n>=1} c_n z^n
        acc = np.zeros(z.shape, dtype=complex)
        for cn in c[:0:-1]:
            acc = (acc + cn) * z
        return c[0] + 2.0 * acc
    if not piece.arcs:
        return np.zeros(z.shape, dtype=complex)
    j = poly.indices
    Q = _arc_cauchy_moments(piece.arcs, j, z.ravel())
    M = _arcs.fourier(piece.arcs, j)
    vals = (2.0 * Q - M[None, :]) @ poly.coeffs
    return vals.reshape(z.shape)


def _herglotz_atoms(angles, weights, z: np.ndarray) -> np.ndarray:
    if angles.size == 0:
        return np.zeros(z.shape, dtype=complex)
    u = np.exp(1j * angles)
    zz = z[..., None]
    return ((u + zz) / (u - zz)) @ weights


def herglotz(mu: CircleMeasure, z):
    """Herglotz transform ``H_mu(z)``; vectorized in ``z``.

    Raises
    ------
    OutsideDisk
        If any ``|z| >= 1``.
    """
    zz = _check_disk(z)
    out = _herglotz_atoms(mu.atom_angles, mu.atom_weights, zz)
    for p in mu.density.pieces:
        out = out + _herglotz_piece(p, zz)
    return out if out.ndim else complex(out)


def cauchy(mu: CircleMeasure, h: AnalyticPoly, z):
    """Cauchy transform ``int h(zeta) / (1 - z conj(zeta)) dmu(zeta)``.

    Uses ``int zeta^k / (1 - z conj(zeta)) dmu = sum_{n<k} z^n mu^(n-k)
    + z^k (H(z) + mu^(0)) / 2``.
    """
    zz = _check_disk(z)
    hk = np.asarray(h.coeffs, dtype=complex)
    K = hk.size - 1
    mom = moments(mu, max(K, 0))
    H = np.asarray(herglotz(mu, zz))
    tail = 0.5 * (H + mom[0].real)
    out = np.zeros(zz.shape, dtype=complex)
    for k, c in enumerate(hk):
        if c == 0:
            continue
        head = sum(zz**n * mom[n - k] for n in range(k))
        out = out + c * (head + zz**k * tail)
    return out if out.ndim else complex(out)


# contractive functions --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ContractiveFunction:
    """Analytic map of the disk into the closed unit disk.

    ``evaluate`` computes ``b(z)``; ``herglotz_fn``, when present, computes
    ``(1 + b)/(1 - b)`` directly, which is more accurate near boundary
    points where ``b`` is close to 1.
    """

    evaluate: Callable
    herglotz_fn: Callable | None = None
    label: str = "b"
    mass_hint: float | None = None

    def __call__(self, z):
        return self.evaluate(_check_disk(z))

    def herglotz(self, z):
        z = _check_disk(z)
        if self.herglotz_fn is not None:
            return self.herglotz_fn(z)
        b = self.evaluate(z)
        return (1.0 + b) / (1.0 - b)

    @classmethod
    def polynomial(cls, coeffs) -> "ContractiveFunction":
        """``b(z) = sum_k a_k z^k``; contractivity is checked when sampled."""
        p = AnalyticPoly(coeffs)
        return cls(lambda z: p(z), None, f"poly{list(np.round(p.coeffs, 6))}")

    @classmethod
    def constant(cls, c: complex) -> "ContractiveFunction":
        c = complex(c)
        return cls(lambda z: np.full(np.shape(z), c) if np.ndim(z) else c, None, f"const({c})")


def b_from_measure(mu: CircleMeasure) -> ContractiveFunction:
    """Cayley transform ``b = (H_mu - 1)/(H_mu + 1)``."""

    def ev(z):
        H = herglotz(mu, z)
        return (H - 1.0) / (H + 1.0)

    return ContractiveFunction(ev, lambda z: herglotz(mu, z), "b_mu", mu.mass)


def mobius_gauge(b: ContractiveFunction, t: float) -> ContractiveFunction:
    """Gauge change of ``b`` that adds ``i t`` to its Herglotz function.

    With ``a = t/(2i + t)`` the result is ``-(conj(a)/a) (b - a)/(1 - conj(a) b)``,
    so ``H_{b2} = H_b + i t`` and both functions share the same Clark measure.
    """
    t = float(t)
    if t == 0.0:
        return b
    a = t / (2j + t)
    u = -np.conj(a) / a

    def ev(z):
        w = b.evaluate(z)
        return u * (w - a) / (1.0 - np.conj(a) * w)

    hf = None
    if b.herglotz_fn is not None:
        base = b.herglotz_fn

        def hf(z):
            return base(z) + 1j * t

    return ContractiveFunction(ev, hf, f"gauge({b.label}, {t})", b.mass_hint)


# boundary values ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundaryEstimate:
    """Radial-limit estimates on a uniform grid.

    Attributes
    ----------
    theta : ndarray
        Grid angles.
    density : ndarray
        Fatou density at ``theta`` with detected atoms' Poisson tails removed.
    atom_angles, atom_weights : ndarray
        Detected point masses.
    radius : float
        Radius used for the density.
    """

    theta: np.ndarray
    density: np.ndarray
    atom_angles: np.ndarray
    atom_weights: np.ndarray
    radius: float
    mass: float


def _poisson(r, delta):
    return (1.0 - r * r) / ((1.0 - r) ** 2 + 4.0 * r * np.sin(0.5 * delta) ** 2)


def _refine_atom(reH: Callable, theta0: float, radii: np.ndarray, width0: float):
    """Track a peak of ``Re H`` towards the boundary; return angle and weights."""
    theta = theta0
    width = width0
    weights = []
    for r in radii:
        # optimize the offset from the current angle: the bounded search adds a
        # sqrt(eps)*|x| term to its tolerance, which would swamp 1 - r
        def neg(s, r=r, base=theta):
            return -float(np.real(reH(r * np.exp(1j * (base + s)))))

        res = optimize.minimize_scalar(
            neg, bounds=(-width, width), method="bounded",
            options={"xatol": max((1.0 - r) * 1e-3, 1e-15)},
        )
        theta = theta + float(res.x)
        weights.append((1.0 - r) / (1.0 + r) * -res.fun)
        width = 8.0 * (1.0 - r)
    return theta, np.array(weights)


def fatou_scan(
    H: Callable,
    grid: int,
    mass: float,
    radii=DEFAULT_RADII,
    shift: float = 0.0,
    atom_floor: float = ATOM_FLOOR,
    density_radius: float | None = None,
) -> BoundaryEstimate:
    """Estimate the boundary measure of a Herglotz function on a grid.

    Atoms are located at peaks of ``Re H`` at the radius whose Poisson width
    matches the grid spacing, each peak is tracked along ``radii`` and
    accepted when ``(1-r)/(1+r) Re H`` settles above ``atom_floor * mass``.
    The density is ``Re H`` at the final radius minus the Poisson tails of
    the accepted atoms.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(np.diff(radii) <= 0) or radii[-1] >= 1:
        raise ValidationError("radii must increase strictly inside (0, 1)")
    theta = TWO_PI * (np.arange(grid) + shift) / grid
    zeta = np.exp(1j * theta)
    h = TWO_PI / grid
    r0 = max(1.0 - h, radii[0])
    re0 = np.real(H(r0 * zeta))
    w0 = (1.0 - r0) / (1.0 + r0) * re0
    floor = atom_floor * max(mass, 0.0)
    left, right = np.roll(re0, 1), np.roll(re0, -1)
    cand = np.nonzero((re0 > left) & (re0 >= right) & (w0 > 0.5 * floor))[0]
    tail = radii[radii > r0]
    found_a, found_w = [], []
    for k in cand:
        ang, ws = _refine_atom(H, theta[k], tail if tail.size else radii[-1:], 1.5 * h)
        if ws.size >= 2:
            stable = ws[-1] >= 0.9 * ws[-2] and ws[-1] > floor
        else:
            stable = ws[-1] > floor
        if stable:
            found_a.append(np.mod(ang, TWO_PI))
            found_w.append(ws[-1])
    angles = np.array(found_a)
    weights = np.array(found_w)
    if angles.size > 1:
        # peaks tracked from neighbouring cells can converge to one atom
        order = np.argsort(angles)
        angles, weights = angles[order], weights[order]
        keep = np.ones(angles.size, dtype=bool)
        for i in range(1, angles.size):
            if abs(np.angle(np.exp(1j * (angles[i] - angles[i - 1])))) < 1e-8:
                keep[i] = False
        angles, weights = angles[keep], weights[keep]
    rd = radii[-1] if density_radius is None else density_radius
    dens = np.real(H(rd * zeta))
    for a, w in zip(angles, weights):
        dens = dens - w * _poisson(rd, theta - a)
    if angles.size:
        # a sample sitting on an atom keeps (weight error) * P_r(0), which is
        # unbounded as r -> 1; those cells are filled from clean neighbours
        dist = np.abs(np.angle(np.exp(1j * (theta[:, None] - angles[None, :])))).min(axis=1)
        bad = dist < h
        if bad.any() and not bad.all():
            idx = np.arange(grid)
            good = idx[~bad]
            dens = dens.copy()
            dens[bad] = np.interp(idx[bad], np.concatenate([good - grid, good, good + grid]),
                                  np.tile(dens[good], 3))
    return BoundaryEstimate(theta, dens, angles, weights, float(rd), float(mass))


def _sample_contractive(b: ContractiveFunction, grid: int, radii) -> float:
    theta = TWO_PI * np.arange(grid) / grid
    zeta = np.exp(1j * theta)
    worst = 0.0
    for r in np.asarray(radii)[:: max(1, len(radii) // 6)]:
        worst = max(worst, float(np.max(np.abs(b.evaluate(r * zeta)))))
    return worst


def clark_measure(b: ContractiveFunction, grid: int = CLARK_GRID, radii=DEFAULT_RADII) -> CircleMeasure:
    """Clark measure of ``b`` from radial limits of ``(1+b)/(1-b)``.

    Raises
    ------
    NonContractive
        If ``|b| > 1 + 1e-8`` at a sampled point.
    """
    radii = np.asarray(radii, dtype=float)
    worst = _sample_contractive(b, min(grid, 512), radii)
    if worst > 1.0 + CONTRACTIVE_TOL:
        raise NonContractive(f"|b| reaches {worst:.6g}")
    mass = float(np.real(b.herglotz(np.array(0j))))
    est = fatou_scan(b.herglotz, grid, mass, radii)
    samples = np.clip(est.density, 0.0, None)
    return CircleMeasure(Piece.from_samples(samples), list(zip(est.atom_angles, est.atom_weights)))


def radial_trace(b: ContractiveFunction, grid: int = 64, radii=DEFAULT_RADII[:9]) -> list[dict]:
    """Rows ``theta, r, re_H, fatou_quotient`` of the radial approach to the circle."""
    theta = TWO_PI * np.arange(grid) / grid
    rows = []
    for r in np.asarray(radii, dtype=float):
        z = r * np.exp(1j * theta)
        H = b.herglotz(z)
        bz = b.evaluate(z)
        fq = (1.0 - np.abs(bz) ** 2) / np.abs(1.0 - bz) ** 2
        for t, h, f in zip(theta, np.real(H), fq):
            rows.append({"theta": float(t), "r": float(r), "re_H": float(h), "fatou_quotient": float(f)})
    return rows


# Szego distance and extremeness ---------------------------------------------------


def _log_integral_pieces(density: Density) -> float:
    """``int log(density) dm`` for a density whose support is the whole circle."""
    pieces = density.pieces
    if len(pieces) == 1 and pieces[0].full:
        p = pieces[0]
        if p.samples is not None:
            s = p.samples
            if np.any(s <= 0):
                return -np.inf
            return float(np.mean(np.log(s)))
        try:
            g = fejer_riesz_factor(p.poly)
            g0 = abs(g.coeffs[0])
            return 2.0 * np.log(g0) if g0 > 0 else -np.inf
        except (NotNonnegative, IllConditioned):
            pass
    cuts = {0.0, TWO_PI}
    for p in pieces:
        if p.arcs is not None:
            for a, b in p.arcs:
                cuts.update((a, b))
    cuts = sorted(cuts)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 0:
            continue

        def f(t):
            v = float(density(np.array([t]))[0])
            return np.log(v) if v > 0 else LOG_FLOOR * 1e3

        val, _ = integrate.quad(f, a, b, limit=400, epsabs=1e-12, epsrel=1e-12)
        total += val
    return total / TWO_PI


def szego_distance(mu: CircleMeasure) -> float:
    """``exp int log(d mu / d m) dm``; zero when the integral diverges.

    Atoms do not contribute.  A density vanishing on an arc of positive
    length has divergent log-integral.
    """
    dens = mu.density
    if not dens.pieces:
        return 0.0
    cover = ()
    for p in dens.pieces:
        cover = _arcs.union(cover, p.arcs)
    if cover is not None:
        return 0.0
    val = _log_integral_pieces(dens)
    if not np.isfinite(val) or val < LOG_FLOOR:
        return 0.0
    return float(np.exp(val))


class Extremeness(enum.Enum):
    Extreme = "Extreme"
    NonExtreme = "NonExtreme"


def is_extreme(mu: CircleMeasure, floor: float = EXTREME_FLOOR) -> Extremeness:
    """Extreme iff the Szego distance is at most ``floor * mu^(0)``."""
    if szego_distance(mu) <= floor * mu.mass:
        return Extremeness.Extreme
    return Extremeness.NonExtreme
