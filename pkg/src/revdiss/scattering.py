"""Scattering parameters: closed forms, general input-output, derived metrics.

Port layout of the two-mode device: ports 1/2 sit on the waveguide through
cavity a, ports 3/4 on the waveguide through cavity b. S21 is the
through-transmission past cavity a, S41 the cross transmission a -> b, S14
the reverse b -> a, and S23 the mirror image of S14 (b -> a through the
other port pair).

Sign conventions. `s_general` evaluates

    S(w) = I - 1j * Gamma (w*I - M)^{-1} Gamma
         = I + 1j * Gamma (M - w*I)^{-1} Gamma

which is the unique sign for which the bare critically coupled cavity gives
S_through(delta=0) = 0 (passive, |S| <= 1). Its diagonal reproduces
`s21_closed` exactly and its ring entries reproduce the off-diagonals of
`ring_s_closed` exactly. The detailed-balance closed forms `s41_closed` /
`s14_closed` follow the published cross-port convention, which drops the
input-output minus sign on the cross ports: they equal the corresponding
`s_general` entries times -1. Magnitudes agree identically.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    CoefficientMatrix,
    EffectiveParams,
    FullParams,
    RingParams,
    ValidationError,
    build_full_matrix,
    lift_to_full,
    reduce_full_to_effective,
    wrap_phase,
)

__all__ = [
    "NumericalError",
    "PoleError",
    "UndefinedChiralityError",
    "ProbeGrid",
    "SMatrix",
    "TransmissionCurve",
    "ChiralitySample",
    "ThreeCavityAux",
    "s21_closed",
    "s41_closed",
    "s14_closed",
    "s23_closed",
    "s_general",
    "s_general_grid",
    "ring_s_closed",
    "chirality",
    "nonreciprocity_curve",
    "fwhm",
    "curve_area",
]


class NumericalError(RuntimeError):
    """Raised when a numerical evaluation fails (singular solve, bad curve)."""


class PoleError(NumericalError):
    """Raised when a closed-form denominator vanishes at the probe point."""


@dataclass(frozen=True)
class ProbeGrid:
    """Strictly increasing grid of probe detunings delta = omega - omega_p."""

    delta_values: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.delta_values, dtype=float)
        if d.size == 0:
            raise ValidationError("probe grid must be non-empty")
        if d.size > 1 and np.any(np.diff(d) <= 0):
            raise ValidationError("probe grid must be strictly increasing")
        d.flags.writeable = False
        object.__setattr__(self, "delta_values", d)

    @classmethod
    def linspace(cls, lo: float, hi: float, points: int) -> "ProbeGrid":
        if points < 1 or hi <= lo:
            raise ValidationError("need hi > lo and points >= 1")
        return cls(np.linspace(lo, hi, points))

    def __len__(self) -> int:
        return self.delta_values.size


@dataclass(frozen=True)
class SMatrix:
    """Scattering matrix over the ported modes at a single probe point."""

    s: np.ndarray
    port_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=complex)
        if not np.all(np.isfinite(s.view(float))):
            raise ValidationError("scattering matrix entries must be finite")
        if s.shape != (len(self.port_labels), len(self.port_labels)):
            raise ValidationError("one label per port required")
        s.flags.writeable = False
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class TransmissionCurve:
    """S-parameter (or derived difference) values over a probe grid."""

    grid: ProbeGrid
    values: np.ndarray
    pair: str

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.shape != (len(self.grid),):
            raise ValidationError("curve length must match the probe grid")
        v = np.array(v)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class ChiralitySample:
    delta: float
    alpha: float


@dataclass(frozen=True)
class ThreeCavityAux:
    """Intermediates of the ring closed form: X, J1, J2 and the determinant Lambda.

    Lambda relates to the ring coefficient matrix by
    Lambda = 1j * det(M - omega_p * I) (the factor collects one i per row).
    """

    x: complex
    j1: complex
    j2: complex
    lambda_det: complex


def _langevin_pair(G: float, J: float, theta: float) -> tuple[complex, complex]:
    """Coupling coefficients (J*e^{-i theta} - 1j*G, J*e^{i theta} - 1j*G)."""
    th = wrap_phase(theta)
    return (
        J * cmath.exp(-1j * th) - 1j * G,
        J * cmath.exp(1j * th) - 1j * G,
    )


def _denominator(p: EffectiveParams, delta: float) -> complex:
    j1, j2 = _langevin_pair(p.G, p.J, p.theta)
    return (1j * delta + p.kappa) ** 2 - j1 * j2


def s21_closed(p: EffectiveParams, delta: float) -> complex:
    """Through-transmission past cavity a:
    1 - kappa*(1j*delta + kappa) / [(1j*delta + kappa)**2 - J1*J2]."""
    return 1.0 - p.kappa * (1j * delta + p.kappa) / _denominator(p, delta)


def s41_closed(p: EffectiveParams, delta: float) -> complex:
    """Cross transmission a -> b: kappa*(J*e^{i theta} - 1j*G) / denominator.

    Published cross-port sign; equals -1 times the (b, a) entry of `s_general`.
    """
    _, j2 = _langevin_pair(p.G, p.J, p.theta)
    return p.kappa * j2 / _denominator(p, delta)


def s14_closed(p: EffectiveParams, delta: float) -> complex:
    """Reverse cross transmission b -> a: kappa*(J*e^{-i theta} - 1j*G) / denominator."""
    j1, _ = _langevin_pair(p.G, p.J, p.theta)
    return p.kappa * j1 / _denominator(p, delta)


def s23_closed(p: EffectiveParams, delta: float) -> complex:
    """Mirror-path transmission 3 -> 2.

    Port 3 is the mirror image of port 1, so the path numerator carries the
    opposite coupling phase (theta -> -theta relative to `s41_closed`), which
    coincides with the `s14_closed` numerator; the denominator is even in theta.
    """
    return s14_closed(p, delta)


def s_general(m: CoefficientMatrix, omega_probe: float) -> SMatrix:
    """Input-output scattering matrix S = I + 1j*Gamma (M - w I)^{-1} Gamma.

    Gamma is the rectangular mode-to-port map diag-like matrix built from the
    port rates; evaluation is by dense solve, no explicit inverse.
    """
    n = m.dim
    ports = m.ports
    gam = np.zeros((n, len(ports)))
    for k, (idx, rate) in enumerate(ports):
        gam[idx, k] = math.sqrt(rate)
    a = m.m - omega_probe * np.eye(n)
    try:
        x = np.linalg.solve(a, gam)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"singular coefficient matrix at probe point {omega_probe}"
        ) from exc
    s = np.eye(len(ports)) + 1j * (gam.T @ x)
    labels = tuple(m.labels[idx] for idx, _ in ports)
    return SMatrix(s, labels)


def s_general_grid(m: CoefficientMatrix, probe_values: np.ndarray) -> np.ndarray:
    """Stacked S matrices for many probe points (batched solve).

    Returns an array of shape (n_probe, n_ports, n_ports); bitwise identical
    to calling `s_general` per point.
    """
    n = m.dim
    ports = m.ports
    gam = np.zeros((n, len(ports)))
    for k, (idx, rate) in enumerate(ports):
        gam[idx, k] = math.sqrt(rate)
    probe = np.asarray(probe_values, dtype=float)
    a = m.m[None, :, :] - probe[:, None, None] * np.eye(n)[None, :, :]
    try:
        x = np.linalg.solve(a, np.broadcast_to(gam, (probe.size, n, len(ports))))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular coefficient matrix in probe batch") from exc
    return np.eye(len(ports))[None] + 1j * np.einsum("ip,kij->kpj", gam, x)


def ring_s_closed(
    p: RingParams, delta: float
) -> tuple[SMatrix, ThreeCavityAux]:
    """As-published closed-form ring scattering matrix, reproduced verbatim.

    Entries are kappa/Lambda times (X^2 - J1*J2 + 1) on the diagonal and
    (J1^2 - J2*X), (J2^2 - J1*X) on the two cyclic off-diagonals, with
    X = -(kappa + 1j*delta). The "+1" in the diagonal is dimensionally odd and
    disagrees with `s_general` (which is exact); the off-diagonal entries agree
    with `s_general` identically. The cyclic equalities |S21| = |S32| = |S13|
    and |S12| = |S23| = |S31| hold exactly because each triple shares one
    formula.
    """
    x = -(p.kappa + 1j * delta)
    j1, j2 = _langevin_pair(p.G, p.J, p.theta)
    lam = x**3 + j1**3 + j2**3 - 3 * x * j1 * j2
    aux = ThreeCavityAux(x=x, j1=j1, j2=j2, lambda_det=lam)
    scale = abs(x) ** 3 + abs(j1) ** 3 + abs(j2) ** 3 + 3 * abs(x * j1 * j2)
    if not np.isfinite(lam) or abs(lam) <= 1e-14 * scale:
        raise PoleError(f"ring closed form has a pole at delta={delta}")
    diag = x**2 - j1 * j2 + 1.0
    fwd = j1**2 - j2 * x   # S21-type entries (b <- a around the cycle)
    bwd = j2**2 - j1 * x   # S12-type entries
    s = (p.kappa / lam) * np.array(
        [[diag, bwd, fwd], [fwd, diag, bwd], [bwd, fwd, diag]]
    )
    return SMatrix(s, ("a", "b", "c")), aux


class UndefinedChiralityError(NumericalError):
    """Both mirror-path magnitudes vanish; the chirality is undefined."""


def chirality(p: EffectiveParams, delta: float) -> ChiralitySample:
    """Chirality alpha = (|S41| - |S23|) / (|S41| + |S23|) at one probe point.

    At an exceptional point one of the two mirror paths is extinguished and
    alpha reaches exactly -1 (odd n) or +1 (even n).
    """
    a41 = abs(s41_closed(p, delta))
    a23 = abs(s23_closed(p, delta))
    denom = a41 + a23
    if denom == 0.0:
        raise UndefinedChiralityError(
            f"chirality undefined at delta={delta}: both paths vanish"
        )
    return ChiralitySample(delta=delta, alpha=(a41 - a23) / denom)


def _full_port_rate(p: FullParams) -> float:
    """Port rate for the three-mode model: the effective model's total kappa.

    Chosen so the large-gamma limit of `s_general` on the full matrix lands on
    the effective closed forms under one consistent convention.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eff = reduce_full_to_effective(p)
    return eff.kappa


def nonreciprocity_curve(
    p: EffectiveParams | FullParams,
    grid: ProbeGrid,
    *,
    gamma: float | None = None,
) -> TransmissionCurve:
    """Pointwise nonreciprocity D(delta) = |S14(delta)| - |S41(delta)|.

    For `EffectiveParams` the closed forms are used directly unless ``gamma``
    is given, in which case the parameters are lifted to the three-mode model
    first. For `FullParams` the S parameters come from `s_general` on the full
    matrix with the port convention of `_full_port_rate`.
    """
    if isinstance(p, EffectiveParams) and gamma is not None:
        p = lift_to_full(p, gamma)
    if isinstance(p, EffectiveParams):
        theta_eff = p.theta
        omega = p.omega
        values = np.array(
            [
                abs(s14_closed(p, d)) - abs(s41_closed(p, d))
                for d in grid.delta_values
            ]
        )
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            eff = reduce_full_to_effective(p)
        theta_eff = eff.theta
        omega = p.delta_a
        m = build_full_matrix(p, _full_port_rate(p))
        s = s_general_grid(m, omega - grid.delta_values)
        values = np.abs(s[:, 0, 1]) - np.abs(s[:, 1, 0])
    if abs(math.cos(theta_eff)) > 1e-9 or math.sin(theta_eff) < 0:
        warnings.warn(
            "nonreciprocity_curve is intended for theta = pi/2 (mod 2*pi); "
            f"got effective phase {theta_eff}",
            stacklevel=2,
        )
    return TransmissionCurve(grid, values, "|S14|-|S41|")


def fwhm(curve: TransmissionCurve) -> float:
    """Linear-interpolated full width at half the peak of |curve|.

    Raises `NumericalError` when the peak is not positive or when either
    half-level crossing lies outside the grid.
    """
    y = curve.magnitude()
    x = curve.grid.delta_values
    peak_idx = int(np.argmax(y))
    peak = y[peak_idx]
    if peak <= 0.0:
        raise NumericalError("curve peak must be positive for a width")
    half = 0.5 * peak
    i = peak_idx
    while i > 0 and y[i] >= half:
        i -= 1
    if y[i] >= half:
        raise NumericalError("half level not crossed on the left of the peak")
    left = x[i] + (half - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i])
    i = peak_idx
    while i < y.size - 1 and y[i] >= half:
        i += 1
    if y[i] >= half:
        raise NumericalError("half level not crossed on the right of the peak")
    right = x[i - 1] + (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1])
    return right - left


def curve_area(curve: TransmissionCurve) -> float:
    """Integrated (signed) area under the curve over its probe grid."""
    return float(np.trapezoid(np.real(curve.values), curve.grid.delta_values))
