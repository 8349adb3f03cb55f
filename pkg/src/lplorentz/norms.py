"""Lebesgue, Lorentz, Besov and Triebel-Lizorkin (semi)norms.

All scalar norms run through one abstraction, :class:`MeasuredValues`: the
pushforward description of ``|f|`` as a list of ``(value, mass)`` pairs.  A
sampled field contributes each cell with mass ``spacing**dim``; a sequence
contributes each entry with mass 1.  Lorentz norms are evaluated exactly on
the step-function decreasing rearrangement via per-piece closed-form
integrals -- no quadrature is involved anywhere in this module.

The distribution function uses the ``>= t`` (right-closed) convention.  The
``> t`` convention would change it only on the null set of jump thresholds
and leaves every integral norm unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import BlockDecomposition, SampledField

__all__ = [
    "MeasuredValues",
    "RearrangementProfile",
    "LorentzParams",
    "BesovParams",
    "distribution_function",
    "rearrangement",
    "lorentz_norm",
    "lorentz_normalization",
    "normalized_lorentz_norm",
    "lorentz_embedding_constant",
    "lebesgue_norm",
    "besov_seminorm",
    "triebel_seminorm",
    "conjugate_exponent",
]

_INF = math.inf


def _check_exponent(name: str, value: float, *, low: float = 1.0, allow_inf: bool = True) -> float:
    value = float(value)
    if value == _INF:
        if allow_inf:
            return value
        raise ValueError(f"{name} must be finite, got inf")
    if not (math.isfinite(value) and value >= low):
        raise ValueError(f"{name} must lie in [{low:g}, inf], got {value!r}")
    return value


def conjugate_exponent(r: float) -> float:
    """Dual exponent ``r / (r - 1)`` with the limit conventions 1 <-> inf."""
    r = _check_exponent("exponent", r)
    if r == 1.0:
        return _INF
    if r == _INF:
        return 1.0
    return r / (r - 1.0)


@dataclass(frozen=True)
class LorentzParams:
    """Primary exponent ``p`` in (1, inf) and secondary exponent ``r`` in [1, inf]."""

    p: float
    r: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (math.isfinite(p) and p > 1.0):
            raise ValueError(f"p must lie in (1, inf), got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "r", _check_exponent("r", self.r))


@dataclass(frozen=True)
class BesovParams:
    """Regularity ``s``, inner integrability ``p``, and scale-sum exponent ``q``."""

    s: float
    p: float
    q: float

    def __post_init__(self) -> None:
        s = float(self.s)
        if not math.isfinite(s):
            raise ValueError(f"s must be finite, got {self.s!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "p", _check_exponent("p", self.p))
        object.__setattr__(self, "q", _check_exponent("q", self.q))


@dataclass(frozen=True, eq=False)
class MeasuredValues:
    """Nonnegative values carrying positive masses: the pushforward of ``|f|``."""

    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel()
        masses = np.asarray(self.masses, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "masses", masses)
        if values.size != masses.size:
            raise ValueError("values and masses must have equal length")
        if not (np.all(np.isfinite(values)) and np.all(values >= 0)):
            raise ValueError("values must be finite and nonnegative")
        if not (np.all(np.isfinite(masses)) and np.all(masses > 0)):
            raise ValueError("masses must be finite and strictly positive")

    @classmethod
    def from_pairs(cls, pairs) -> "MeasuredValues":
        if len(pairs) == 0:
            return cls(np.empty(0), np.empty(0))
        values, masses = zip(*pairs)
        return cls(np.asarray(values, dtype=float), np.asarray(masses, dtype=float))

    @classmethod
    def from_sequence(cls, seq) -> "MeasuredValues":
        """Counting-measure view of a sequence: each entry has mass 1."""
        values = np.abs(np.asarray(seq, dtype=float).ravel())
        return cls(values, np.ones_like(values))

    @classmethod
    def from_field(cls, f: SampledField) -> "MeasuredValues":
        """Grid-measure view of a field: each sample has mass ``spacing**dim``."""
        values = np.abs(f.samples)
        return cls(values, np.full_like(values, f.grid.cell_volume))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def scaled(self, factor: float) -> "MeasuredValues":
        if factor < 0:
            raise ValueError("scaling factor must be nonnegative")
        return MeasuredValues(self.values * factor, self.masses)

    def restricted(self, index) -> "MeasuredValues":
        return MeasuredValues(self.values[index], self.masses[index])

    def aligned_with(self, other: "MeasuredValues") -> bool:
        """Whether ``self`` and ``other`` live entrywise on the same measure space."""
        return self.masses.size == other.masses.size and bool(
            np.array_equal(self.masses, other.masses)
        )


@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """Nonincreasing step profile ``f*``: value ``values[i]`` on cumulative-mass
    interval ``[cum_masses[i-1], cum_masses[i])`` and 0 beyond the last breakpoint."""

    values: np.ndarray
    cum_masses: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel()
        cum = np.asarray(self.cum_masses, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cum_masses", cum)
        if values.size != cum.size:
            raise ValueError("values and cum_masses must have equal length")
        if values.size:
            if not (np.all(np.diff(values) < 0) if values.size > 1 else True) or not np.all(values > 0):
                raise ValueError("profile values must be strictly decreasing and positive")
            if not np.all(np.diff(cum) > 0) or cum[0] <= 0:
                raise ValueError("cumulative masses must be strictly increasing and positive")

    @property
    def total_mass(self) -> float:
        return float(self.cum_masses[-1]) if self.cum_masses.size else 0.0

    def evaluate(self, s) -> np.ndarray | float:
        """Value of the step profile at cumulative mass ``s >= 0``."""
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        idx = np.searchsorted(self.cum_masses, arr, side="right")
        padded = np.concatenate((self.values, [0.0]))
        out = padded[idx]
        return float(out[0]) if scalar else out

    def distribution(self, t: float) -> float:
        """Mass where the profile is at least ``t > 0``."""
        if not t > 0:
            raise ValueError("threshold must be positive")
        count = int(np.searchsorted(-self.values, -t, side="right"))
        return float(self.cum_masses[count - 1]) if count > 0 else 0.0


def distribution_function(v, t: float) -> float:
    """Total mass where the value is at least ``t > 0`` (right-closed convention)."""
    if not t > 0:
        raise ValueError("threshold must be positive")
    if isinstance(v, RearrangementProfile):
        return v.distribution(t)
    return float(v.masses[v.values >= t].sum())


def rearrangement(v: MeasuredValues) -> RearrangementProfile:
    """Decreasing rearrangement of measured values as a step profile.

    Zero values carry no profile content; equal values are merged, so the
    profile is the generalized inverse of the distribution function.
    """
    if isinstance(v, RearrangementProfile):
        return v
    pos = v.values > 0
    values = v.values[pos]
    masses = v.masses[pos]
    if values.size == 0:
        return RearrangementProfile(np.empty(0), np.empty(0))
    order = np.argsort(values)[::-1]
    values = values[order]
    masses = masses[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(values)) + 1))
    group_values = values[starts]
    group_masses = np.add.reduceat(masses, starts)
    return RearrangementProfile(group_values, np.cumsum(group_masses))


def _as_lorentz_params(params) -> LorentzParams:
    if isinstance(params, LorentzParams):
        return params
    return LorentzParams(*params)


def lorentz_norm(v, params) -> float:
    """Lorentz norm ``( integral (s**(1/p) f*(s))**r ds/s )**(1/r)``.

    Evaluated exactly on the step rearrangement: each piece contributes
    ``value**r * (p/r) * (S_i**(r/p) - S_{i-1}**(r/p))``.  For ``r = inf``
    the norm is ``sup_s s**(1/p) f*(s) = max_i value_i * S_i**(1/p)``, the
    weak-type norm.
    """
    params = _as_lorentz_params(params)
    prof = rearrangement(v)
    values, cum = prof.values, prof.cum_masses
    if values.size == 0:
        return 0.0
    p, r = params.p, params.r
    if r == _INF:
        return float(np.max(values * cum ** (1.0 / p)))
    prev = np.concatenate(([0.0], cum[:-1]))
    total = float(np.sum(values**r * (p / r) * (cum ** (r / p) - prev ** (r / p))))
    if not math.isfinite(total):
        raise ArithmeticError("Lorentz integral diverged on this profile")
    return total ** (1.0 / r)


def lorentz_normalization(p: float, r: float) -> float:
    """Norm of the unit-mass indicator: ``(p/r)**(1/r)``, 1 when ``r = inf``."""
    params = LorentzParams(p, r)
    if params.r == _INF:
        return 1.0
    return (params.p / params.r) ** (1.0 / params.r)


def normalized_lorentz_norm(v, params) -> float:
    """Lorentz norm divided by the unit-indicator norm.

    The normalized family is monotone: it does not increase when ``r``
    grows, which makes it the right quantity for embedding comparisons
    (the raw norms are not ordered in ``r``).
    """
    params = _as_lorentz_params(params)
    return lorentz_norm(v, params) / lorentz_normalization(params.p, params.r)


def lorentz_embedding_constant(p: float, r0: float, r1: float) -> float:
    """Constant ``C`` with ``lorentz(p, r1) <= C * lorentz(p, r0)`` for ``r0 <= r1``.

    ``C(p, r0, r1) = (r0/p)**(1/r0 - 1/r1)``; the ``r1 = inf`` case
    ``(r0/p)**(1/r0)`` is attained by indicator profiles.
    """
    params = LorentzParams(p, r0)
    r1 = _check_exponent("r1", r1)
    if r1 < params.r:
        raise ValueError(f"need r0 <= r1, got r0={r0!r}, r1={r1!r}")
    inv0 = 0.0 if params.r == _INF else 1.0 / params.r
    inv1 = 0.0 if r1 == _INF else 1.0 / r1
    return (params.r / params.p) ** (inv0 - inv1)


def lebesgue_norm(v: MeasuredValues, p: float) -> float:
    """Mass-weighted ``p``-norm of the values; ``p = inf`` gives the largest value."""
    p = _check_exponent("p", p)
    if v.values.size == 0:
        return 0.0
    if p == _INF:
        return float(np.max(v.values))
    total = float(np.sum(v.values**p * v.masses))
    if not math.isfinite(total):
        raise ArithmeticError("Lebesgue integral diverged on these values")
    return total ** (1.0 / p)


def _grid_lp(arr: np.ndarray, p: float, cell_volume: float) -> float:
    a = np.abs(arr)
    if p == _INF:
        return float(a.max(initial=0.0))
    return float((np.sum(a**p) * cell_volume) ** (1.0 / p))


def _as_besov_params(params) -> BesovParams:
    if isinstance(params, BesovParams):
        return params
    return BesovParams(*params)


def besov_seminorm(d: BlockDecomposition, params) -> float:
    """``( sum_j (2**(j*s) * ||block_j||_{L^p})**q )**(1/q)`` over available blocks.

    ``q = inf`` takes the supremum over scales.  The lowpass field does not
    contribute, so constant fields have seminorm zero.
    """
    params = _as_besov_params(params)
    cell = d.grid.cell_volume
    weighted = [
        2.0 ** (j * params.s) * _grid_lp(blk.samples, params.p, cell)
        for j, blk in sorted(d.blocks.items())
    ]
    if not weighted:
        return 0.0
    if params.q == _INF:
        return float(max(weighted))
    return float(np.sum(np.asarray(weighted) ** params.q) ** (1.0 / params.q))


def triebel_seminorm(d: BlockDecomposition, params) -> float:
    """``|| ( sum_j (2**(j*s) |block_j|)**q )**(1/q) ||_{L^p}`` on the grid.

    The ``q``-aggregation acts pointwise across scales before the outer
    ``L^p`` norm; ``q = inf`` takes the pointwise supremum over scales.
    Coincides with :func:`besov_seminorm` when ``p == q``.
    """
    params = _as_besov_params(params)
    if not d.blocks:
        return 0.0
    js = sorted(d.blocks)
    stack = np.stack([np.abs(d.blocks[j].samples) for j in js])
    weights = 2.0 ** (np.asarray(js, dtype=float) * params.s)
    weighted = stack * weights[:, None]
    if params.q == _INF:
        envelope = weighted.max(axis=0)
    else:
        envelope = np.sum(weighted**params.q, axis=0) ** (1.0 / params.q)
    return _grid_lp(envelope, params.p, d.grid.cell_volume)
