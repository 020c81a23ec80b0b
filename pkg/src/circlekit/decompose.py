"""Lebesgue decomposition of one circle measure against another through
boundary values of Herglotz transforms, with diagnostics from the kernel
and form machinery, and the half-circle counterexample.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import arcs as _arcs
from .errors import IllPosed, NotConverged, SingularMetric, ValidationError
from .forms import rn_extract
from .kernel import default_points
from .measure import CircleMeasure, atoms_near, moments
from .spaces import SpacePair, lattice_split
from .transform import DEFAULT_RADII, Extremeness, _poisson, fatou_scan, herglotz, is_extreme

TWO_PI = 2.0 * np.pi
EPS_SUPP = 1e-6
MASS_FLOOR = 1e-9
LATTICE_POINTS = 16
RN_DEGREE = 8


class Invariance(enum.Enum):
    Reducing = "Reducing"
    NotReducing = "NotReducing"
    Unknown = "Unknown"


class Strategy(enum.Enum):
    DirectNonExtreme = "DirectNonExtreme"
    AddLebesgue = "AddLebesgue"


def invariance_classifier(mu: CircleMeasure, lam: CircleMeasure) -> Invariance:
    """Decide whether the intersection space reduces the shift, when decidable.

    Non-extreme ``lam`` always gives ``Reducing``.  For extreme ``mu`` and
    ``lam`` the answer follows the extremeness of ``mu + lam``.
    """
    el = is_extreme(lam)
    if el is Extremeness.NonExtreme:
        return Invariance.Reducing
    if is_extreme(mu) is Extremeness.Extreme:
        if is_extreme(mu + lam) is Extremeness.Extreme:
            return Invariance.Reducing
        return Invariance.NotReducing
    return Invariance.Unknown


# support detection -------------------------------------------------------------


def boundary_radius(N: int) -> float:
    """Radius ``1 - N^{-4}`` at which boundary densities are read off."""
    return 1.0 - float(N) ** -4


@dataclass(frozen=True, eq=False)
class SupportEstimate:
    arcs: object
    atom_angles: np.ndarray
    atom_weights: np.ndarray
    threshold: float
    radius: float


def _lam_herglotz(lam: CircleMeasure):
    return lambda z: herglotz(lam, z)


def estimate_support(lam: CircleMeasure, N: int) -> SupportEstimate:
    """Arcs where the boundary density of ``lam`` exceeds ``eps_supp``, and its atoms.

    Densities are sampled at cell centres of an ``N``-point grid and the
    edges of the flagged cells are refined by bisection on the same
    boundary function.
    """
    mass = lam.mass
    rd = boundary_radius(N)
    if mass <= 0:
        return SupportEstimate((), np.zeros(0), np.zeros(0), 0.0, rd)
    H = _lam_herglotz(lam)
    est = fatou_scan(H, N, mass, DEFAULT_RADII, shift=0.5, density_radius=rd)
    dens = est.density
    thr = max(EPS_SUPP * float(dens.max(initial=0.0)), MASS_FLOOR * mass)

    def g(theta):
        v = float(np.real(H(np.array([rd * np.exp(1j * theta)])))[0])
        for a, w in zip(est.atom_angles, est.atom_weights):
            v -= w * float(_poisson(rd, theta - a))
        return v - thr

    mask = dens > thr
    if mask.all():
        arcs = None
    elif not mask.any():
        arcs = ()
    else:
        h = TWO_PI / N
        theta = est.theta
        parts = []
        # rotate so that the walk starts at a flagged cell preceded by an unflagged one
        start = int(np.nonzero(mask & ~np.roll(mask, 1))[0][0])
        k = 0
        while k < N:
            i = (start + k) % N
            if not mask[i]:
                k += 1
                continue
            j = k
            while j + 1 < N and mask[(start + j + 1) % N]:
                j += 1
            lo_c = theta[i]
            hi_c = theta[(start + j) % N] + (TWO_PI if (start + j) % N < i else 0.0)
            lo = _edge(g, lo_c - h, lo_c)
            hi = _edge(g, hi_c, hi_c + h)
            parts.append((lo, hi))
            k = j + 1
        arcs = _arcs.normalize(parts)
    return SupportEstimate(arcs, est.atom_angles, est.atom_weights, thr, rd)


def _edge(g, a: float, b: float) -> float:
    """Crossing of ``g`` between an unflagged and a flagged angle (either order)."""
    ga, gb = g(a), g(b)
    if ga * gb > 0:
        return a if ga > 0 else b
    return float(optimize.brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))


# decomposition --------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    N: int
    ac_mass: float
    rn_residual: float
    intersection_rank: int

    def to_row(self) -> list:
        return [self.N, self.ac_mass, self.rn_residual, self.intersection_rank]


TRACE_COLUMNS = ("N", "ac_mass", "rn_residual", "intersection_rank")


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    """Result of :func:`lebesgue_decompose`.

    ``correction_mass`` is the mass removed from the ``lam + m`` part when
    the add-Lebesgue route is taken; it is zero on the direct route.
    """

    mu_ac: CircleMeasure
    mu_s: CircleMeasure
    strategy: Strategy
    invariance: Invariance
    traces: tuple = ()
    N: int = 0
    lambda_support: object = None
    lambda_atoms: tuple = ()
    correction_mass: float = 0.0
    warnings: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "mu_ac": self.mu_ac.to_json(),
            "mu_s": self.mu_s.to_json(),
            "strategy": self.strategy.value,
            "invariance": self.invariance.value,
            "traces": [dict(zip(TRACE_COLUMNS, t.to_row())) for t in self.traces],
            "lambda_support": _arcs.to_list(self.lambda_support),
            "lambda_atoms": [{"angle": float(a), "weight": float(w)} for a, w in self.lambda_atoms],
            "correction_mass": self.correction_mass,
            "warnings": list(self.warnings),
        }


def _check_N(N: int, minimum: int = 64) -> None:
    if N < minimum or N & (N - 1):
        raise ValidationError(f"N must be a power of two >= {minimum}, got {N}")


def _split(mu: CircleMeasure, support, atom_angles, N: int):
    on = atoms_near(mu.atom_angles, atom_angles, TWO_PI / N)
    return mu.restricted(support, on), mu.restricted(_arcs.complement(support), ~on)


def _direct(mu, lam, N):
    est = estimate_support(lam, N)
    ac, s = _split(mu, est.arcs, est.atom_angles, N)
    return ac, s, est, 0.0


def _add_lebesgue(mu, lam, N):
    # mu_{ac; lam} = mu_{ac; lam + m} - mu_{ac; m} restricted to {f_lam = 0}:
    # adding m makes the reference non-extreme, and the correction removes
    # the density of mu that only m saw
    est_plus = estimate_support(lam + CircleMeasure.lebesgue(), N)
    est = estimate_support(lam, N)
    ac_m, _ = _split(mu, estimate_support(CircleMeasure.lebesgue(), N).arcs, np.zeros(0), N)
    gap = _arcs.complement(est.arcs)
    correction = ac_m.restricted(gap, np.zeros(ac_m.atom_angles.size, dtype=bool))
    # ac_plus - correction, written as one restriction of mu
    keep = _arcs.intersect(est_plus.arcs, est.arcs)
    on = atoms_near(mu.atom_angles, est_plus.atom_angles, TWO_PI / N)
    ac = mu.restricted(keep, on)
    s = mu.restricted(_arcs.complement(keep), ~on)
    return ac, s, est, correction.mass


def _intersection_rank(mu, lam) -> int:
    try:
        return lattice_split(SpacePair.from_measures(mu, lam, default_points(LATTICE_POINTS))).rank()
    except SingularMetric:
        return -1


def _rn_residual(mu_ac, lam, N) -> float:
    d = min(RN_DEGREE, N // 4)
    return rn_extract(mu_ac, lam, N, d).rel_residual


def lebesgue_decompose(mu: CircleMeasure, lam: CircleMeasure, N: int, traces: bool = True) -> DecompositionReport:
    """Split ``mu = mu_ac + mu_s`` with ``mu_ac << lam`` and ``mu_s`` singular.

    The boundary density and atoms of ``lam`` are read from its Herglotz
    transform on an ``N``-point grid; ``mu`` is then restricted to the
    detected support and to atoms within one grid cell of detected atoms of
    ``lam``, so ``mu_ac + mu_s = mu`` exactly.  For extreme ``lam`` the
    split is computed against the non-extreme ``lam + m`` and corrected.

    Traces at ``N/4, N/2, N`` record the ac mass, the relative residual of
    moment deconvolution of ``mu_ac`` and the rank of the intersection Gram
    matrix on a 16-point grid.  Failures inside traces become warnings.
    """
    _check_N(N)
    invariance = invariance_classifier(mu, lam)
    if is_extreme(lam) is Extremeness.NonExtreme:
        strategy = Strategy.DirectNonExtreme
        ac, s, est, corr = _direct(mu, lam, N)
    else:
        strategy = Strategy.AddLebesgue
        ac, s, est, corr = _add_lebesgue(mu, lam, N)
    notes = []
    recs = []
    if traces:
        rank = _intersection_rank(mu, lam)
        if rank < 0:
            notes.append("intersection Gram matrix is singular")
        for n in (N // 4, N // 2, N):
            ac_n = ac if n == N else _direct(mu, lam, n)[0]
            try:
                res = _rn_residual(ac_n, lam, n)
            except (IllPosed, NotConverged) as exc:
                msg = f"N={n}: {type(exc).__name__}: {exc}"
                warnings.warn(msg, RuntimeWarning, stacklevel=2)
                notes.append(msg)
                res = float("nan")
            recs.append(TraceRecord(n, ac_n.mass, res, rank))
    return DecompositionReport(
        ac, s, strategy, invariance, tuple(recs), N, est.arcs,
        tuple(zip(est.atom_angles.tolist(), est.atom_weights.tolist())), corr, tuple(notes),
    )


def ac_mass_trace(mu: CircleMeasure, lam: CircleMeasure, N_list) -> list[TraceRecord]:
    """Run the decomposition at each ``N`` and tabulate ac mass and deconvolution residual."""
    Ns = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValidationError("N_list must increase")
    for n in Ns:
        _check_N(n)
    rank = _intersection_rank(mu, lam)
    out = []
    for n in Ns:
        rep = lebesgue_decompose(mu, lam, n, traces=False)
        try:
            res = _rn_residual(rep.mu_ac, lam, n)
        except (IllPosed, NotConverged) as exc:
            warnings.warn(f"N={n}: {exc}", RuntimeWarning, stacklevel=2)
            res = float("nan")
        out.append(TraceRecord(n, rep.mu_ac.mass, res, rank))
    return out


# half-circle example --------------------------------------------------------------

HC_RADIUS = 0.9
HC_SAMPLES = 1024


def halfcircle_closed_form(z):
    """``(1/(2 pi i)) log((z+1)/(z-1))`` with the argument taken in ``[0, 2 pi)``."""
    z = np.asarray(z, dtype=complex)
    w = (z + 1.0) / (z - 1.0)
    return (np.log(np.abs(w)) + 1j * np.mod(np.angle(w), TWO_PI)) / (2j * np.pi)


@dataclass(frozen=True, eq=False)
class HalfCircleReport:
    """Two routes to the Taylor coefficients of ``k_0^+``, the kernel at 0 of ``m_+``.

    ``antisymmetry_residual`` compares the backward shifts of ``k_0^+`` and
    ``k_0^- = 1 - k_0^+``; ``lower_discrepancy`` checks that ``1 - k_0^+``
    matches the moments of ``m_-``.
    """

    order: int
    moment_coeffs: np.ndarray
    closed_coeffs: np.ndarray
    discrepancy: float
    k0_at_zero: float
    antisymmetry_residual: float
    lower_discrepancy: float

    def rows(self) -> list[list]:
        out = []
        for j, (a, b) in enumerate(zip(self.moment_coeffs, self.closed_coeffs)):
            out.append([j, a.real, a.imag, b.real, b.imag, abs(a - b)])
        return out

    ROW_COLUMNS = ("j", "moment_re", "moment_im", "closed_re", "closed_im", "abs_diff")

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "discrepancy": self.discrepancy,
            "k0_at_zero": self.k0_at_zero,
            "antisymmetry_residual": self.antisymmetry_residual,
            "lower_discrepancy": self.lower_discrepancy,
            "coefficients": [dict(zip(self.ROW_COLUMNS, r)) for r in self.rows()],
        }


def halfcircle_example(order: int) -> HalfCircleReport:
    """Compare moment and closed-form expansions of ``k_0^+`` up to ``order``."""
    if order < 8:
        raise ValidationError("order must be at least 8")
    mp = CircleMeasure.upper_half()
    a = np.asarray(moments(mp, order))
    theta = TWO_PI * np.arange(HC_SAMPLES) / HC_SAMPLES
    vals = halfcircle_closed_form(HC_RADIUS * np.exp(1j * theta))
    b = np.fft.fft(vals)[: order + 1] / HC_SAMPLES / HC_RADIUS ** np.arange(order + 1)
    k0 = complex(halfcircle_closed_form(0.0))
    minus = -a.copy()
    minus[0] += 1.0
    anti = float(np.max(np.abs(a[1:] + minus[1:]), initial=0.0))
    lower = np.asarray(moments(CircleMeasure.lower_half(), order))
    return HalfCircleReport(
        order, a, b, float(np.max(np.abs(a - b))), float(k0.real), anti,
        float(np.max(np.abs(lower - minus))),
    )
