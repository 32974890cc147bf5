"""Parameter sets and coefficient-matrix builders for the coupled-cavity models.

Unit conventions used throughout the package:

* every rate is expressed in units of the intrinsic cavity loss, so
  ``kappa_i = 1`` is the natural working point;
* frequencies are offsets in a frame rotating at the drive, so ``omega = 0``
  is the default resonance reference;
* a loss rate ``kappa`` enters a dynamical matrix as ``-1j * kappa`` on the
  diagonal (half width at half maximum); the full linewidth is ``2 * kappa``.

The dynamical (coefficient) matrix ``M`` is defined by the drift equation
``d(mu)/dt = -1j * M @ mu + Gamma @ mu_in`` for the mode vector ``mu``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "ValidationError",
    "EffectiveParams",
    "FullParams",
    "RingParams",
    "CoefficientMatrix",
    "wrap_phase",
    "coupling_coefficients",
    "build_effective_matrix",
    "build_full_matrix",
    "build_ring_matrix",
    "lift_to_full",
    "reduce_full_to_effective",
]


class ValidationError(ValueError):
    """Raised when a parameter set or request violates its invariants."""


def wrap_phase(theta: float) -> float:
    """Reduce a phase to (-2*pi, 2*pi) exactly via fmod.

    fmod is exact in IEEE arithmetic, so expressions that are periodic in the
    reduced phase become exactly 2*pi-periodic in the raw argument whenever
    ``theta + 2*pi`` is itself computed without rounding.
    """
    return math.fmod(theta, TWO_PI)


def coupling_coefficients(G: float, J: float, theta: float) -> tuple[complex, complex]:
    """Forward/backward coupling entries (1j*J*e^{-i theta} + G, 1j*J*e^{i theta} + G)."""
    th = wrap_phase(theta)
    c_fwd = 1j * J * cmath.exp(-1j * th) + G
    c_bwd = 1j * J * cmath.exp(1j * th) + G
    return c_fwd, c_bwd


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class EffectiveParams:
    """Two coupled cavity modes with coherent (G) and dissipative (J) coupling.

    ``kappa_e = None`` selects the critical-coupling default
    ``kappa_e = kappa_i + J``, which makes the total loss
    ``kappa = kappa_i + kappa_e + J`` equal to ``2 * (J + kappa_i)`` exactly.
    """

    G: float
    J: float
    theta: float
    kappa_i: float = 1.0
    kappa_e: float | None = None
    omega: float = 0.0

    def __post_init__(self) -> None:
        _require(self.kappa_i > 0, f"kappa_i must be > 0, got {self.kappa_i}")
        _require(self.G >= 0, f"G must be >= 0, got {self.G}")
        _require(self.J >= 0, f"J must be >= 0, got {self.J}")
        if self.kappa_e is None:
            object.__setattr__(self, "kappa_e", self.kappa_i + self.J)
        _require(self.kappa_e >= 0, f"kappa_e must be >= 0, got {self.kappa_e}")

    @property
    def kappa(self) -> float:
        """Total per-mode loss kappa_i + kappa_e + J."""
        return self.kappa_i + self.kappa_e + self.J

    @property
    def is_critical(self) -> bool:
        return self.kappa_e == self.kappa_i + self.J


@dataclass(frozen=True)
class FullParams:
    """Two cavities coupled through a common lossy mechanical mode.

    ``G_a`` and ``G_b`` are the (complex) linearized optomechanical coupling
    rates; pump amplitudes and drive frequency are assumed already folded into
    the detunings.
    """

    G: float
    G_a: complex
    G_b: complex
    gamma: float
    kappa_1: float
    kappa_2: float
    delta_a: float = 0.0
    delta_b: float = 0.0
    omega_m: float = 0.0

    def __post_init__(self) -> None:
        _require(self.gamma > 0, f"gamma must be > 0, got {self.gamma}")
        _require(self.kappa_1 > 0, f"kappa_1 must be > 0, got {self.kappa_1}")
        _require(self.kappa_2 > 0, f"kappa_2 must be > 0, got {self.kappa_2}")
        _require(self.G >= 0, f"G must be >= 0, got {self.G}")

    @property
    def reversed_dissipation(self) -> bool:
        """Advisory regime flag: the mechanical mode decays much faster than
        everything else (threshold factor 10)."""
        return self.gamma > 10.0 * max(
            abs(self.G_a), abs(self.G_b), self.kappa_1, self.kappa_2
        )


@dataclass(frozen=True)
class RingParams:
    """Three identical modes on a ring, every pair coupled with the same G and J."""

    G: float
    J: float
    theta: float
    kappa: float
    omega: float = 0.0

    def __post_init__(self) -> None:
        _require(self.kappa > 0, f"kappa must be > 0, got {self.kappa}")
        _require(self.G >= 0, f"G must be >= 0, got {self.G}")
        _require(self.J >= 0, f"J must be >= 0, got {self.J}")


@dataclass(frozen=True)
class CoefficientMatrix:
    """Complex dynamical matrix plus the port map used for input-output.

    ``ports`` lists (mode index, coupling rate) pairs; only listed modes are
    driven/read out. The matrix is frozen read-only after construction.
    """

    m: np.ndarray
    ports: tuple[tuple[int, float], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=complex)
        n = m.shape[0]
        _require(m.ndim == 2 and m.shape == (n, n), "matrix must be square")
        _require(n in (2, 3), f"matrix dimension must be 2 or 3, got {n}")
        for idx, rate in self.ports:
            _require(0 <= idx < n, f"port mode index {idx} out of range")
            _require(rate >= 0, f"port rate must be >= 0, got {rate}")
        _require(
            bool(np.all(np.diag(m).imag <= 0.0)),
            "diagonal entries must have non-positive imaginary part",
        )
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"mode{i}" for i in range(n)))
        _require(len(self.labels) == n, "one label per mode required")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.m.shape[0]


def build_effective_matrix(
    p: EffectiveParams, port_rate: float | None = None
) -> CoefficientMatrix:
    """2x2 matrix of the effective two-mode system.

    Diagonal ``omega - 1j*kappa``; off-diagonals ``1j*J*e^{-i theta} + G`` (a<-b)
    and ``1j*J*e^{i theta} + G`` (b<-a), so the Langevin drift ``-1j*M`` carries
    the coupling coefficients ``J*e^{-/+i theta} - 1j*G``.

    Both modes carry the same port rate. The default is the total loss
    ``kappa``, which reproduces the closed-form transmission of a critically
    coupled cavity exactly; pass ``p.kappa_e`` for the external-coupling-only
    convention.
    """
    rate = p.kappa if port_rate is None else float(port_rate)
    c_ab, c_ba = coupling_coefficients(p.G, p.J, p.theta)
    d = p.omega - 1j * p.kappa
    m = np.array([[d, c_ab], [c_ba, d]])
    return CoefficientMatrix(m, ((0, rate), (1, rate)), ("a", "b"))


def build_full_matrix(p: FullParams, port_rate: float) -> CoefficientMatrix:
    """3x3 matrix of the linearized three-mode system over (a, b, m).

    Only the two cavity modes carry ports, both with the supplied rate; the
    mechanical row couples through ``G_a``, ``G_b`` and their conjugates.
    """
    m = np.array(
        [
            [p.delta_a - 1j * p.kappa_1, p.G, p.G_a],
            [p.G, p.delta_b - 1j * p.kappa_2, p.G_b],
            [np.conj(p.G_a), np.conj(p.G_b), p.omega_m - 1j * p.gamma],
        ]
    )
    return CoefficientMatrix(m, ((0, float(port_rate)), (1, float(port_rate))), ("a", "b", "m"))


def build_ring_matrix(p: RingParams) -> CoefficientMatrix:
    """Circulant 3x3 matrix of the three-mode ring.

    The cycle a->b->c->a carries ``c1 = 1j*J*e^{-i theta} + G`` and the reverse
    cycle ``c2 = 1j*J*e^{i theta} + G``; entry M[i][j] depends only on
    (j - i) mod 3. All three modes carry port rate kappa.
    """
    c1, c2 = coupling_coefficients(p.G, p.J, p.theta)
    d = p.omega - 1j * p.kappa
    m = np.array([[d, c1, c2], [c2, d, c1], [c1, c2, d]])
    rate = p.kappa
    return CoefficientMatrix(m, ((0, rate), (1, rate), (2, rate)), ("a", "b", "c"))


def lift_to_full(p: EffectiveParams, gamma: float) -> FullParams:
    """Embed an effective parameter set into the three-mode model at a chosen gamma.

    Sets ``|G_a| = |G_b| = sqrt(J*gamma)`` with ``arg G_a = 0`` and
    ``arg G_b = theta + pi``; all detunings equal ``omega`` and both cavity
    losses equal ``kappa_i + kappa_e`` (the dissipative-coupling share J of the
    total loss reappears when the mechanical mode is eliminated).

    The pi offset on ``arg G_b`` is what makes the eliminated dynamics land on
    the effective coupling phase ``theta`` itself: eliminating the mechanical
    mode turns the coupling into ``-G_a * conj(G_b) / gamma``, and the leading
    minus sign must be absorbed into the phase.
    """
    _require(gamma > 0, f"gamma must be > 0, got {gamma}")
    g = math.sqrt(p.J * gamma)
    return FullParams(
        G=p.G,
        G_a=complex(g),
        G_b=g * cmath.exp(1j * wrap_phase(p.theta + math.pi)),
        gamma=gamma,
        kappa_1=p.kappa_i + p.kappa_e,
        kappa_2=p.kappa_i + p.kappa_e,
        delta_a=p.omega,
        delta_b=p.omega,
        omega_m=p.omega,
    )


def reduce_full_to_effective(p: FullParams) -> EffectiveParams:
    """Adiabatically eliminate the mechanical mode.

    Returns the effective parameter set with ``J = |G_a|**2 / gamma`` and
    ``theta = arg(conj(G_a) * G_b) + pi`` (mod 2*pi); see `lift_to_full` for
    why the pi offset is needed. ``theta`` is meaningless when ``J = 0``.

    Outside the reversed-dissipation regime the reduction is still computed
    but a warning is emitted; the elimination is then a poor approximation.
    """
    if not p.reversed_dissipation:
        warnings.warn(
            "reduce_full_to_effective called outside the reversed-dissipation "
            f"regime (gamma={p.gamma}); the effective model may be inaccurate",
            stacklevel=2,
        )
    if abs(p.G_a) != abs(p.G_b):
        warnings.warn(
            "reduction assumes |G_a| = |G_b|; using |G_a| for J", stacklevel=2
        )
    if not (p.delta_a == p.delta_b == p.omega_m):
        warnings.warn(
            "reduction assumes degenerate detunings; using delta_a", stacklevel=2
        )
    if p.kappa_1 != p.kappa_2:
        warnings.warn(
            "reduction assumes kappa_1 = kappa_2; using their mean", stacklevel=2
        )
    J = abs(p.G_a) ** 2 / p.gamma
    theta = math.fmod(cmath.phase(np.conj(p.G_a) * p.G_b) + math.pi, TWO_PI)
    kappa_cav = 0.5 * (p.kappa_1 + p.kappa_2)
    # Split the cavity loss so a critically coupled lift round-trips exactly;
    # fall back to all-intrinsic when the critical split would be non-positive.
    kappa_i = 0.5 * (kappa_cav - J)
    if kappa_i <= 0:
        kappa_i, kappa_e = kappa_cav, 0.0
    else:
        kappa_e = kappa_cav - kappa_i
    return EffectiveParams(
        G=p.G,
        J=J,
        theta=theta,
        kappa_i=kappa_i,
        kappa_e=kappa_e,
        omega=p.delta_a,
    )
