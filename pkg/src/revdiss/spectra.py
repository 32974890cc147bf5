"""Complex eigenvalue computation, Riemann-sheet sweeps and exceptional points.

A two-mode exceptional point (EP) of the effective model sits exactly at
balanced coupling J = G together with the phase-matching condition
theta = (2n - 1) * pi/2; the integer n and its parity label the EP.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .model import (
    TWO_PI,
    CoefficientMatrix,
    EffectiveParams,
    RingParams,
    ValidationError,
    build_ring_matrix,
    coupling_coefficients,
    wrap_phase,
)

__all__ = [
    "Spectrum",
    "EpRecord",
    "SheetGrid",
    "radicand",
    "eig2_closed",
    "eig_numeric",
    "ring_eig_circulant",
    "ring_eig_paper",
    "sweep_riemann",
    "track_branches",
    "locate_eps",
    "locate_ring_defective",
    "locate_ring_coalescence",
    "classify_parity",
    "eigengap",
]

#: Eigenvalues closer than this (relative to G) count as coalesced.
COALESCENCE_RTOL = 1e-6
#: Phases closer than this to (2n-1)*pi/2 count as phase matched.
PHASE_TOL = 1e-9

_CUBE_ROOTS = tuple(cmath.exp(2j * math.pi * k / 3) for k in range(3))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue set with stable branch labels.

    Real parts are supermode frequencies, imaginary parts are minus the
    linewidths (half widths). ``source`` names the producing model/route.
    """

    eigenvalues: tuple[complex, ...]
    branch_ids: tuple[int, ...]
    source: str

    def __post_init__(self) -> None:
        if len(self.eigenvalues) != len(self.branch_ids):
            raise ValidationError("one branch id per eigenvalue required")


@dataclass(frozen=True)
class EpRecord:
    """A located exceptional point with its phase-matching integer and parity."""

    theta_star: float
    j_over_g: float
    n: int
    parity: str
    eigengap: float
    order: int = 2

    def __post_init__(self) -> None:
        expected = "odd" if self.n % 2 else "even"
        if self.parity != expected:
            raise ValidationError(f"parity {self.parity} inconsistent with n={self.n}")
        if abs(self.theta_star - (2 * self.n - 1) * math.pi / 2) > PHASE_TOL:
            raise ValidationError(
                f"theta_star={self.theta_star} too far from the n={self.n} "
                "phase-matching value"
            )
        if self.order not in (2, 3):
            raise ValidationError(f"order must be 2 or 3, got {self.order}")


@dataclass(frozen=True)
class SheetGrid:
    """Eigenvalue surfaces over a (theta, J/G) grid.

    ``raw`` holds the eigenvalues in formula order (principal branch first),
    ``tracked`` holds them re-ordered for continuity along the theta axis, so
    ``tracked[r, :, k]`` is one connected sheet. Shapes are
    (len(ratio_axis), len(theta_axis), n_branches).
    """

    theta_axis: np.ndarray
    ratio_axis: np.ndarray
    raw: np.ndarray
    tracked: np.ndarray
    source: str

    def __post_init__(self) -> None:
        th = np.asarray(self.theta_axis, dtype=float)
        ra = np.asarray(self.ratio_axis, dtype=float)
        if th.size == 0 or ra.size == 0:
            raise ValidationError("sweep grids must be non-empty")
        if np.any(np.diff(th) <= 0) or (ra.size > 1 and np.any(np.diff(ra) <= 0)):
            raise ValidationError("sweep grids must be strictly increasing")
        expected = (ra.size, th.size)
        if self.raw.shape[:2] != expected or self.tracked.shape[:2] != expected:
            raise ValidationError("sheet arrays must match the grid shape")
        for arr in (self.raw, self.tracked):
            arr.flags.writeable = False
        object.__setattr__(self, "theta_axis", th)
        object.__setattr__(self, "ratio_axis", ra)


def radicand(G: float, J: float, theta: float) -> complex:
    """Product (1j*J*e^{-i theta} + G) * (1j*J*e^{i theta} + G).

    Kept as the unsimplified product; it equals G**2 - J**2 + 2j*J*G*cos(theta)
    to rounding. Conjugation symmetry: radicand(theta + pi) = conj(radicand(theta)).
    """
    c_fwd, c_bwd = coupling_coefficients(G, J, theta)
    return c_fwd * c_bwd


def eigengap(G: float, J: float, theta: float) -> float:
    """Eigenvalue splitting |lambda_+ - lambda_-| = 2*|sqrt(radicand)|."""
    return 2.0 * abs(cmath.sqrt(radicand(G, J, theta)))


def eig2_closed(p: EffectiveParams) -> Spectrum:
    """Closed-form eigenvalues of the effective two-mode system.

    lambda_+- = omega - 1j*kappa +- sqrt(radicand), principal square root.
    Branch 0 is the plus branch.
    """
    s = cmath.sqrt(radicand(p.G, p.J, p.theta))
    base = p.omega - 1j * p.kappa
    return Spectrum((base + s, base - s), (0, 1), "effective-closed")


def eig_numeric(m: CoefficientMatrix) -> Spectrum:
    """Dense eigensolve of a coefficient matrix, sorted by (imag desc, real).

    The sort puts the least lossy modes first, which leaves mechanical-like
    branches (large negative imaginary part) at the end.
    """
    vals = np.linalg.eigvals(m.m)
    order = np.lexsort((vals.real, -vals.imag))
    vals = vals[order]
    return Spectrum(tuple(vals), tuple(range(vals.size)), "numeric")


def ring_eig_circulant(p: RingParams) -> Spectrum:
    """Exact eigenvalues of the ring matrix via circulant (DFT) diagonalization.

    lambda_k = (omega - 1j*kappa) + c1*w_k + c2*conj(w_k) for the cube roots of
    unity w_k, with c1/c2 the cyclic coupling entries.
    """
    c1, c2 = coupling_coefficients(p.G, p.J, p.theta)
    base = p.omega - 1j * p.kappa
    vals = tuple(base + c1 * w + c2 * w.conjugate() for w in _CUBE_ROOTS)
    return Spectrum(vals, (0, 1, 2), "ring-circulant")


def ring_eig_paper(p: RingParams) -> Spectrum:
    """As-published closed-form ring eigenvalue triple, reproduced verbatim.

    lambda_1 = omega - 1j*kappa and
    lambda_+- = omega - 1j*kappa +- sqrt((G**2 - J**2) + 1j*J*G*(e^{i theta} + e^{-i theta})).

    This triple does not diagonalize the ring coefficient matrix (the matrix
    is circulant, hence normal, and its exact spectrum is `ring_eig_circulant`);
    it is retained so the as-published coalescence structure can be reproduced
    and quantified against the exact one.
    """
    th = wrap_phase(p.theta)
    s = cmath.sqrt(
        (p.G**2 - p.J**2)
        + 1j * p.J * p.G * (cmath.exp(1j * th) + cmath.exp(-1j * th))
    )
    base = p.omega - 1j * p.kappa
    return Spectrum((base, base + s, base - s), (0, 1, 2), "ring-as-published")


def _match_order(new: np.ndarray, prev: np.ndarray) -> tuple[int, ...]:
    """Permutation of `new` minimizing total distance to `prev`.

    Near-ties are broken by matching real parts (supermode frequencies) first.
    """
    n = new.size
    best = None
    for perm in permutations(range(n)):
        cost = sum(abs(new[perm[k]] - prev[k]) for k in range(n))
        recost = sum(abs(new[perm[k]].real - prev[k].real) for k in range(n))
        key = (round(cost, 12), recost)
        if best is None or key < best[0]:
            best = (key, perm)
    return best[1]


def track_branches(values: np.ndarray) -> np.ndarray:
    """Reorder eigenvalues along the leading axis for branch continuity.

    ``values`` has shape (n_points, n_branches); entry 0 fixes the labels.
    """
    values = np.asarray(values)
    out = np.empty_like(values)
    out[0] = values[0]
    for i in range(1, values.shape[0]):
        perm = _match_order(values[i], out[i - 1])
        out[i] = values[i][list(perm)]
    return out


def sweep_riemann(
    template: EffectiveParams, theta_grid: np.ndarray, ratio_grid: np.ndarray
) -> SheetGrid:
    """Evaluate the closed-form eigenvalues over a (theta, J/G) grid.

    The template fixes G and the loss model; J is swept as ratio*G with the
    critical-coupling default re-applied at every point unless the template
    carries an explicit kappa_e. Branches are continuity-tracked along theta.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    ratio_grid = np.asarray(ratio_grid, dtype=float)
    if theta_grid.size == 0 or ratio_grid.size == 0:
        raise ValidationError("sweep grids must be non-empty")
    raw = np.empty((ratio_grid.size, theta_grid.size, 2), dtype=complex)
    for r, ratio in enumerate(ratio_grid):
        p_row = _with_coupling(template, ratio * template.G)
        base = p_row.omega - 1j * p_row.kappa
        for t, th in enumerate(theta_grid):
            s = cmath.sqrt(radicand(p_row.G, p_row.J, th))
            raw[r, t, 0] = base + s
            raw[r, t, 1] = base - s
    tracked = np.empty_like(raw)
    for r in range(ratio_grid.size):
        tracked[r] = track_branches(raw[r])
    return SheetGrid(theta_grid, ratio_grid, raw, tracked, "effective-closed")


def _with_coupling(template: EffectiveParams, J: float) -> EffectiveParams:
    """Template with J replaced; critical coupling is re-derived unless the
    template was constructed with an explicit non-critical kappa_e."""
    kappa_e = None if template.is_critical else template.kappa_e
    return EffectiveParams(
        G=template.G,
        J=J,
        theta=template.theta,
        kappa_i=template.kappa_i,
        kappa_e=kappa_e,
        omega=template.omega,
    )


def classify_parity(theta: float, tol: float = PHASE_TOL) -> tuple[int, str] | None:
    """Phase-matching integer n and parity for theta = (2n-1)*pi/2, else None."""
    half_pi = math.pi / 2
    if abs(abs(math.fmod(theta, math.pi)) - half_pi) > tol:
        return None
    n = round((theta / half_pi + 1.0) / 2.0)
    return n, ("odd" if n % 2 else "even")


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, iters: int = 90) -> float:
    """Golden-section minimum of a unimodal f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _grid_minima(values: np.ndarray) -> list[tuple[int, int]]:
    """Indices of 4-neighbourhood local minima (edges included)."""
    nr, nt = values.shape
    out = []
    for i in range(nr):
        for j in range(nt):
            v = values[i, j]
            neigh = []
            if i > 0:
                neigh.append(values[i - 1, j])
            if i < nr - 1:
                neigh.append(values[i + 1, j])
            if j > 0:
                neigh.append(values[i, j - 1])
            if j < nt - 1:
                neigh.append(values[i, j + 1])
            if all(v <= w for w in neigh):
                out.append((i, j))
    return out


def locate_eps(
    template: EffectiveParams,
    theta_range: tuple[float, float] = (0.0, 2.0 * TWO_PI),
    ratio_range: tuple[float, float] = (0.5, 1.5),
    *,
    grid_shape: tuple[int, int] = (97, 241),
    gap_tol: float | None = None,
) -> list[EpRecord]:
    """Locate two-mode exceptional points inside a (theta, J/G) box.

    Scans the eigengap on a coarse grid, refines every local minimum with
    two alternations of golden-section search (theta first, then J/G), and
    keeps the points whose residual gap is at or below the coalescence
    tolerance (default 1e-6 * G). Returns records sorted by theta; an empty
    list when nothing in the box coalesces.
    """
    G = template.G
    if G <= 0:
        raise ValidationError("EP search requires G > 0")
    tol = COALESCENCE_RTOL * G if gap_tol is None else gap_tol
    th_lo, th_hi = map(float, theta_range)
    ra_lo, ra_hi = map(float, ratio_range)
    if not (th_hi > th_lo and ra_hi > ra_lo):
        raise ValidationError("search box must have positive extent")

    nr, nt = grid_shape
    thetas = np.linspace(th_lo, th_hi, nt)
    ratios = np.linspace(ra_lo, ra_hi, nr)
    rad = (
        (G**2 - (ratios[:, None] * G) ** 2)
        + 2j * (ratios[:, None] * G) * G * np.cos(thetas[None, :])
    )
    gaps = 2.0 * np.sqrt(np.abs(rad))

    def gap(th: float, ratio: float) -> float:
        return eigengap(G, ratio * G, th)

    found: list[tuple[float, float, float]] = []
    for i, j in _grid_minima(gaps):
        th = thetas[j]
        ra = ratios[i]
        dth = thetas[1] - thetas[0] if nt > 1 else 0.0
        dra = ratios[1] - ratios[0] if nr > 1 else 0.0
        for _ in range(2):
            if dth > 0:
                th = _golden_min(
                    lambda x: gap(x, ra),
                    max(th_lo, th - dth),
                    min(th_hi, th + dth),
                )
            if dra > 0:
                ra = _golden_min(
                    lambda x: gap(th, x),
                    max(ra_lo, ra - dra),
                    min(ra_hi, ra + dra),
                )
        g = gap(th, ra)
        if g <= tol:
            if not any(
                abs(th - th0) < 1e-6 and abs(ra - ra0) < 1e-6 for th0, ra0, _ in found
            ):
                found.append((th, ra, g))

    records = []
    for th, ra, g in sorted(found):
        n = round((th / (math.pi / 2) + 1.0) / 2.0)
        records.append(
            EpRecord(
                theta_star=th,
                j_over_g=ra,
                n=n,
                parity="odd" if n % 2 else "even",
                eigengap=g,
                order=2,
            )
        )
    return records


def _ring_template(template: RingParams, J: float, theta: float) -> RingParams:
    return RingParams(
        G=template.G, J=J, theta=theta, kappa=template.kappa, omega=template.omega
    )


def _defectiveness(m: np.ndarray) -> float:
    """Smallest singular value of the normalized eigenvector matrix.

    1 for a normal matrix (orthonormal eigenvectors), 0 at a defective point
    where eigenvectors coalesce. Eigenvalue degeneracy alone (possible for
    circulant matrices at theta = k*pi) keeps this at 1.
    """
    _, vecs = np.linalg.eig(m)
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    return float(np.linalg.svd(vecs, compute_uv=False)[-1])


def locate_ring_defective(
    template: RingParams,
    theta_range: tuple[float, float] = (0.0, 2.0 * TWO_PI),
    ratio_range: tuple[float, float] = (0.5, 1.5),
    *,
    grid_shape: tuple[int, int] = (49, 121),
    gap_tol: float | None = None,
    defect_tol: float = 1e-6,
) -> list[EpRecord]:
    """Search the ring for genuinely defective (eigenvector-coalescing) spectra.

    Candidates are minima of the minimum pairwise eigenvalue gap; a candidate
    only counts when the eigenvectors coalesce as well (`_defectiveness`).
    The ring coefficient matrix is circulant, hence normal, so its occasional
    eigenvalue degeneracies keep independent eigenvectors and the search
    returns an empty list; performing it literally makes "nothing found" an
    output rather than an assumption.
    """
    G = template.G
    tol = COALESCENCE_RTOL * max(G, 1.0) if gap_tol is None else gap_tol
    th_lo, th_hi = map(float, theta_range)
    ra_lo, ra_hi = map(float, ratio_range)
    nr, nt = grid_shape

    def min_gap(th: float, ratio: float) -> float:
        vals = eig_numeric(
            build_ring_matrix(_ring_template(template, ratio * G, th))
        ).eigenvalues
        return min(
            abs(vals[a] - vals[b]) for a in range(3) for b in range(a + 1, 3)
        )

    thetas = np.linspace(th_lo, th_hi, nt)
    ratios = np.linspace(ra_lo, ra_hi, nr)
    gaps = np.array([[min_gap(th, ra) for th in thetas] for ra in ratios])
    records = []
    for i, j in _grid_minima(gaps):
        th, ra = thetas[j], ratios[i]
        dth = thetas[1] - thetas[0] if nt > 1 else 0.0
        dra = ratios[1] - ratios[0] if nr > 1 else 0.0
        for _ in range(2):
            if dth > 0:
                th = _golden_min(
                    lambda x: min_gap(x, ra), max(th_lo, th - dth), min(th_hi, th + dth), iters=60
                )
            if dra > 0:
                ra = _golden_min(
                    lambda x: min_gap(th, x), max(ra_lo, ra - dra), min(ra_hi, ra + dra), iters=60
                )
        g = min_gap(th, ra)
        if g > tol:
            continue
        m = build_ring_matrix(_ring_template(template, ra * G, th)).m
        if _defectiveness(m) > defect_tol:
            continue  # diagonalizable degeneracy, not an exceptional point
        n = round((th / (math.pi / 2) + 1.0) / 2.0)
        records.append(EpRecord(th, ra, n, "odd" if n % 2 else "even", g, order=3))
    return records


def locate_ring_coalescence(
    template: RingParams,
    theta_range: tuple[float, float] = (0.0, 2.0 * TWO_PI),
    ratio_range: tuple[float, float] = (0.5, 1.5),
    *,
    gap_tol: float | None = None,
) -> list[EpRecord]:
    """Coalescence points of the as-published ring eigenvalue formula.

    The as-published radical shares the two-mode radicand, so its triple
    degeneracies sit at J = G and theta = (2n-1)*pi/2; they are located with
    the two-mode machinery and reported with order 3.
    """
    eff = EffectiveParams(
        G=template.G, J=template.G, theta=0.0, kappa_i=1.0, kappa_e=0.0
    )
    points = locate_eps(
        eff, theta_range, ratio_range, gap_tol=gap_tol
    )
    return [
        EpRecord(r.theta_star, r.j_over_g, r.n, r.parity, r.eigengap, order=3)
        for r in points
    ]
