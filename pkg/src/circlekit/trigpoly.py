"""Trigonometric and analytic polynomials on the unit circle.

A :class:`TrigPoly` is a Laurent polynomial ``sum_j c_j e^{i j theta}`` for
``-n <= j <= n``.  Real-valued polynomials (Hermitian coefficients) are
flagged ``real`` and keep only ``c_0 .. c_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, NotNonnegative, ValidationError

TOL_PSD = 1e-10
ON_CIRCLE = 1e-7


def _as_complex_vector(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex))
    if arr.ndim != 1:
        raise ValidationError("coefficients must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Laurent polynomial on the circle.

    Parameters
    ----------
    coeffs : array_like
        Either the full vector ``c_{-n}, ..., c_n`` (odd length) or, when
        ``real`` is true, the nonnegative half ``c_0, ..., c_n``.
    real : bool
        Flag for Hermitian symmetry ``c_{-j} = conj(c_j)``.
    """

    _data: np.ndarray
    real: bool = False

    def __init__(self, coeffs, real: bool = False):
        c = _as_complex_vector(coeffs)
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if real:
            c = c.copy()
            c[0] = c[0].real
        elif c.size % 2 == 0:
            raise ValidationError("full Laurent vector must have odd length")
        c.setflags(write=False)
        object.__setattr__(self, "_data", c)
        object.__setattr__(self, "real", bool(real))

    # construction helpers
    @classmethod
    def from_full(cls, coeffs, real: bool | None = None, atol: float = 1e-12) -> "TrigPoly":
        """Build from ``c_{-n..n}``; detect or enforce Hermitian symmetry."""
        c = _as_complex_vector(coeffs)
        if c.size % 2 == 0:
            raise ValidationError("full Laurent vector must have odd length")
        n = c.size // 2
        herm = np.allclose(c[::-1].conj(), c, atol=atol * max(1.0, np.abs(c).sum()), rtol=0)
        if real is None:
            real = herm
        if real:
            if not herm:
                raise ValidationError("coefficients are not Hermitian")
            half = 0.5 * (c[n:] + c[n::-1].conj())
            return cls(half, real=True)
        return cls(c)

    @classmethod
    def from_dict(cls, mapping: dict, real: bool = False) -> "TrigPoly":
        """Build from ``{j: c_j}``; a real polynomial may list only ``j >= 0``."""
        n = max([abs(int(j)) for j in mapping] + [0])
        if real:
            half = np.zeros(n + 1, dtype=complex)
            for j, v in mapping.items():
                j = int(j)
                if j >= 0:
                    half[j] = v
                elif -j not in mapping:
                    half[-j] = np.conj(v)
            return cls(half, real=True)
        full = np.zeros(2 * n + 1, dtype=complex)
        for j, v in mapping.items():
            full[int(j) + n] += v
        return cls(full)

    @classmethod
    def constant(cls, value: float) -> "TrigPoly":
        return cls([value], real=True)

    # access
    @property
    def degree(self) -> int:
        return self._data.size - 1 if self.real else self._data.size // 2

    @property
    def coeffs(self) -> np.ndarray:
        """Full vector ``c_{-n}, ..., c_n``."""
        if self.real:
            return np.concatenate([self._data[:0:-1].conj(), self._data])
        return self._data.copy()

    @property
    def indices(self) -> np.ndarray:
        n = self.degree
        return np.arange(-n, n + 1)

    def coeff(self, j) -> np.ndarray | complex:
        """Coefficient ``c_j`` (zero outside the support); vectorized in ``j``."""
        j = np.asarray(j)
        n = self.degree
        full = self.coeffs
        inside = np.abs(j) <= n
        out = np.zeros(j.shape, dtype=complex)
        out[inside] = full[(j[inside] + n).astype(int)]
        return out if out.ndim else complex(out)

    @property
    def l1(self) -> float:
        """Sum of coefficient moduli."""
        return float(np.abs(self.coeffs).sum())

    def __call__(self, theta):
        return eval_trig(self, theta)

    def trim(self, tol: float = 0.0) -> "TrigPoly":
        c = self.coeffs
        n = self.degree
        big = np.nonzero(np.abs(c) > tol)[0]
        k = 0 if big.size == 0 else int(np.max(np.abs(big - n)))
        cut = c[n - k : n + k + 1]
        return TrigPoly.from_full(cut, real=True) if self.real else TrigPoly(cut)

    # arithmetic
    def _binary(self, other, op):
        if np.isscalar(other):
            other = TrigPoly([other], real=np.isrealobj(other) or np.imag(other) == 0)
        n = max(self.degree, other.degree)
        a = np.pad(self.coeffs, n - self.degree)
        b = np.pad(other.coeffs, n - other.degree)
        out = op(a, b)
        if self.real and other.real:
            return TrigPoly.from_full(out, real=True)
        return TrigPoly(out)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return TrigPoly(-self._data, real=self.real)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            out = np.convolve(self.coeffs, other.coeffs)
            if self.real and other.real:
                return TrigPoly.from_full(out, real=True)
            return TrigPoly(out)
        other = complex(other)
        if self.real and other.imag == 0:
            return TrigPoly(self._data * other.real, real=True)
        return TrigPoly(self.coeffs * other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"TrigPoly(degree={self.degree}, real={self.real})"

    # serialization
    def to_json(self) -> dict:
        c = self._data
        start = 0 if self.real else -self.degree
        return {
            "coeffs": [
                {"j": start + k, "re": float(v.real), "im": float(v.imag)} for k, v in enumerate(c)
            ],
            "real": self.real,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrigPoly":
        try:
            entries = obj["coeffs"]
            real = bool(obj.get("real", False))
            mapping = {}
            for e in entries:
                mapping[int(e["j"])] = mapping.get(int(e["j"]), 0) + complex(
                    float(e["re"]), float(e.get("im", 0.0))
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed TrigPoly JSON: {exc}") from exc
        return cls.from_dict(mapping, real=real)


@dataclass(frozen=True, eq=False)
class AnalyticPoly:
    """Analytic polynomial ``g(z) = sum_k g_k z^k``."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        c = _as_complex_vector(coeffs).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        # np.polyval wants highest degree first
        return np.polyval(self.coeffs[::-1], np.asarray(z, dtype=complex))

    def abs2(self) -> TrigPoly:
        """The real trigonometric polynomial ``|g(e^{i theta})|^2``."""
        g = self.coeffs
        full = np.convolve(g, g[::-1].conj())
        return TrigPoly.from_full(full, real=True)

    def to_json(self) -> dict:
        return {"coeffs": [{"re": float(v.real), "im": float(v.imag)} for v in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "AnalyticPoly":
        try:
            return cls([complex(float(e["re"]), float(e.get("im", 0.0))) for e in obj["coeffs"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed AnalyticPoly JSON: {exc}") from exc

    def __repr__(self) -> str:
        return f"AnalyticPoly(degree={self.degree})"


def eval_trig(p: TrigPoly, theta):
    """Evaluate ``sum_j c_j e^{i j theta}`` at one or many angles."""
    theta = np.asarray(theta, dtype=float)
    n = p.degree
    if p.real:
        c = p._data
        # Horner in e^{i theta} on the analytic half, then mirror
        u = np.exp(1j * theta)
        acc = np.zeros(theta.shape, dtype=complex)
        for ck in c[:0:-1]:
            acc = (acc + ck) * u
        val = c[0].real + 2.0 * acc.real
        return val.astype(complex) if val.ndim else complex(val)
    u = np.exp(1j * theta)
    acc = np.zeros(theta.shape, dtype=complex)
    for ck in p.coeffs[::-1]:
        acc = acc * u + ck
    val = acc * np.exp(-1j * n * theta)
    return val if val.ndim else complex(val)


def _grid(m: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(m) / m


def _cluster_roots(roots: np.ndarray, radius: float = 1e-3) -> list[np.ndarray]:
    """Group numerically coincident roots; a multiple root comes out as a ring
    of perturbed copies whose centroid is accurate."""
    left = list(range(roots.size))
    clusters = []
    while left:
        members = [left.pop(0)]
        grew = True
        while grew:
            grew = False
            for k in list(left):
                if min(abs(roots[k] - roots[m]) for m in members) <= radius * (1 + abs(roots[k])):
                    members.append(k)
                    left.remove(k)
                    grew = True
        clusters.append(roots[members])
    return clusters


def _outer_roots(roots: np.ndarray, n: int) -> np.ndarray:
    """Pick one root from each pair ``r, 1/conj(r)``, preferring ``|r| >= 1``.

    A cluster straddling the circle is either a multiple root on the circle
    (a ring of size ~eps^(1/mult) around it) or a genuine close pair.  Rings
    are replaced by their projected centroid; pairs keep their outer members.
    """
    chosen = []
    for members in _cluster_roots(roots):
        mult = members.size
        centre = members.mean()
        dev = np.abs(np.abs(members) - 1.0)
        ring = mult % 2 == 0 and abs(abs(centre) - 1.0) <= ON_CIRCLE * mult and (mult >= 4 or dev.max() <= 1e-6)
        if ring:
            chosen += [centre / abs(centre)] * (mult // 2)
        else:
            chosen += list(members[np.abs(members) > 1.0])
    chosen = np.asarray(chosen, dtype=complex)
    if chosen.size != n:
        # fall back to the n largest moduli, which hold one member of every pair
        chosen = roots[np.argsort(np.abs(roots), kind="stable")[n:]]
    return chosen


def _polish(g: np.ndarray, target: np.ndarray, steps: int = 30) -> np.ndarray:
    """Gauss-Newton on ``conv(g, reversed conj g) = target``."""
    n = g.size - 1

    def resid(x):
        return np.convolve(x, x[::-1].conj()) - target

    best = g
    best_r = np.linalg.norm(resid(g))
    for _ in range(steps):
        r = resid(best)
        # derivative with respect to real and imaginary parts of each g_k
        cols = []
        for k in range(n + 1):
            e = np.zeros(n + 1, dtype=complex)
            e[k] = 1.0
            cols.append(np.convolve(e, best[::-1].conj()) + np.convolve(best, e[::-1].conj()))
            cols.append(np.convolve(1j * e, best[::-1].conj()) + np.convolve(best, (1j * e)[::-1].conj()))
        J = np.array(cols).T
        Jr = np.vstack([J.real, J.imag])
        rr = np.concatenate([r.real, r.imag])
        step, *_ = np.linalg.lstsq(Jr, -rr, rcond=1e-13)
        cand = best + step[0::2] + 1j * step[1::2]
        cand_r = np.linalg.norm(resid(cand))
        if cand_r >= best_r:
            break
        best, best_r = cand, cand_r
    return best


def fejer_riesz_factor(p: TrigPoly) -> AnalyticPoly:
    """Outer spectral factor of a nonnegative trigonometric polynomial.

    Returns ``g`` with ``|g(e^{i theta})|^2 = p(theta)``, all roots of ``g``
    in ``|z| >= 1`` and ``g_0 >= 0``.

    Raises
    ------
    NotNonnegative
        If ``p`` is not real or dips below ``-1e-10 * sum|c_j|`` on the
        verification grid.
    IllConditioned
        If the factor reproduces ``p`` only to worse than ``1e-8`` relative.
    """
    if not p.real:
        raise NotNonnegative("polynomial is not flagged real")
    p = p.trim(0.0)
    n = p.degree
    scale = p.l1
    grid = _grid(8 * (n + 1))
    vals = np.real(eval_trig(p, grid))
    if scale == 0.0:
        return AnalyticPoly([0.0])
    if vals.min() < -TOL_PSD * scale:
        raise NotNonnegative(f"minimum {vals.min():.3e} on the verification grid")
    if n == 0:
        return AnalyticPoly([np.sqrt(max(p._data[0].real, 0.0))])

    # z^n p(z) has coefficients c_{-n..n}; np.roots wants the top degree first
    full = p.coeffs
    roots = np.roots(full[::-1])
    if roots.size != 2 * n:
        raise IllConditioned("leading coefficient vanished during root finding")
    chosen = _outer_roots(roots, n)
    g = np.poly(chosen)[::-1]  # monic, lowest degree first
    g_vals = np.polyval(g[::-1], np.exp(1j * grid))
    base = np.abs(g_vals) ** 2
    gain = float(np.dot(base, vals) / np.dot(base, base))
    if gain <= 0:
        raise IllConditioned("nonpositive scale in spectral factor")
    g = g * np.sqrt(gain)
    g = _polish(g, full)
    phase = g[0] / abs(g[0]) if abs(g[0]) > 0 else 1.0
    g = g / phase
    g[0] = abs(g[0])
    out = AnalyticPoly(g)

    check = np.abs(out(np.exp(1j * grid))) ** 2 - vals
    if np.max(np.abs(check)) > 1e-8 * scale:
        raise IllConditioned(f"factor residual {np.max(np.abs(check)):.3e} exceeds tolerance")
    return out


def fejer_weights(N: int) -> np.ndarray:
    """Weights ``1 - |j|/(N+1)`` for ``j = -N .. N``."""
    j = np.arange(-N, N + 1)
    return 1.0 - np.abs(j) / (N + 1.0)


def cesaro_nonneg_approx(samples, N: int) -> TrigPoly:
    """Fejér mean of degree ``N`` of uniformly sampled data.

    The coefficients are the Fejér-tapered moments of the discrete measure
    ``(1/M) sum_k s_k delta_{theta_k}``, so the result is a convolution of
    nonnegative data with the Fejér kernel and is nonnegative whenever the
    samples are.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValidationError("samples must be a nonempty 1-D array")
    if N < 0:
        raise ValidationError("N must be nonnegative")
    if np.any(s < 0):
        raise NotNonnegative("samples must be nonnegative")
    M = s.size
    theta = _grid(M)
    j = np.arange(0, N + 1)
    moments = np.exp(-1j * np.outer(j, theta)) @ s / M
    w = fejer_weights(N)[N:]
    return TrigPoly(moments * w, real=True)
