"""Acceptance suite: one test per top-level acceptance criterion.

Each test prints a single [PASS]/[FAIL] line (run with ``pytest -s`` to see
them all); tolerances are pinned here, not configurable.

The adiabatic-convergence criterion is implemented exactly as stated and is
expected to fail at its 5-percent clause: at balanced coupling and matched
phase the compared point IS the exceptional point, where any finite-gamma
perturbation splits the eigenvalues proportionally to the square root of the
perturbation, not linearly. The measured errors are printed by the test; the
monotone-decrease clause holds.
"""

import math
from itertools import permutations

import numpy as np

from revdiss.model import (
    EffectiveParams,
    RingParams,
    build_effective_matrix,
    build_full_matrix,
    build_ring_matrix,
    lift_to_full,
)
from revdiss.scattering import (
    ProbeGrid,
    chirality,
    fwhm,
    nonreciprocity_curve,
    ring_s_closed,
    s14_closed,
    s21_closed,
    s41_closed,
    s_general,
)
from revdiss.spectra import (
    eig2_closed,
    eig_numeric,
    locate_eps,
    ring_eig_circulant,
    ring_eig_paper,
)
from revdiss.sweeps import figure_dataset

TWO_PI = 2.0 * math.pi
HALF_PI = math.pi / 2


def _criterion(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    assert ok, line


def _pair_error(got, want):
    a = max(abs(got[0] - want[0]), abs(got[1] - want[1]))
    b = max(abs(got[0] - want[1]), abs(got[1] - want[0]))
    return min(a, b)


def _triple_error(got, want):
    return min(
        max(abs(got[p[k]] - want[k]) for k in range(3))
        for p in permutations(range(3))
    )


def test_ep_location_and_parity():
    G = 10.0
    template = EffectiveParams(G=G, J=G, theta=0.0)
    eps = locate_eps(template, (0.0, 2 * TWO_PI), (0.5, 1.5))
    ok = (
        len(eps) == 4
        and all(
            abs(ep.theta_star / HALF_PI - (2 * k + 1)) < 1e-6
            for k, ep in enumerate(eps)
        )
        and all(abs(ep.j_over_g - 1.0) < 1e-6 for ep in eps)
        and all(ep.eigengap <= 1e-6 * G for ep in eps)
        and [ep.parity for ep in eps] == ["odd", "even", "odd", "even"]
    )
    detail = ", ".join(
        f"n={ep.n} {ep.parity} theta/(pi/2)={ep.theta_star / HALF_PI:.9f} "
        f"J/G={ep.j_over_g:.9f} gap={ep.eigengap:.2e}"
        for ep in eps
    )
    _criterion("EP location and parity", ok, detail)


def test_theta_kpi_closed_form():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        G, J = rng.uniform(0.5, 10.0, 2)
        kappa_e = rng.uniform(0.0, 20.0)
        k = int(rng.integers(-2, 6))
        p = EffectiveParams(G=G, J=J, theta=k * math.pi, kappa_e=kappa_e)
        s = 1.0 if k % 2 == 0 else -1.0
        want = (
            complex(p.omega + G, -(p.kappa - J * s)),
            complex(p.omega - G, -(p.kappa + J * s)),
        )
        worst = max(worst, _pair_error(eig2_closed(p).eigenvalues, want))
    _criterion(
        "theta = k*pi closed form (100 random samples)",
        worst <= 1e-12,
        f"max set deviation {worst:.2e}",
    )


def test_unidirectionality():
    p_odd = EffectiveParams(G=10.0, J=10.0, theta=HALF_PI)  # kappa = 22
    deltas = np.linspace(-5 * p_odd.kappa, 5 * p_odd.kappa, 2001)
    max_s41 = max(abs(s41_closed(p_odd, d)) for d in deltas)
    s14_peak_err = abs(abs(s14_closed(p_odd, 0.0)) - 10.0 / 11.0)

    p_even = EffectiveParams(G=10.0, J=10.0, theta=3 * HALF_PI)
    max_s14 = max(abs(s14_closed(p_even, d)) for d in deltas)
    s41_peak_err = abs(abs(s41_closed(p_even, 0.0)) - 10.0 / 11.0)

    ok = (
        max_s41 <= 1e-12
        and s14_peak_err <= 1e-12
        and max_s14 <= 1e-12
        and s41_peak_err <= 1e-12
    )
    _criterion(
        "unidirectionality at odd/even matched phases",
        ok,
        f"max|S41|={max_s41:.2e}, |S14(0)|-10/11={s14_peak_err:.2e}; "
        f"mirrored: max|S14|={max_s14:.2e}, |S41(0)|-10/11={s41_peak_err:.2e}",
    )


def test_reciprocity_control():
    worst = 0.0
    for theta in (0.0, math.pi):
        p = EffectiveParams(G=10.0, J=10.0, theta=theta)
        for d in np.linspace(-5 * p.kappa, 5 * p.kappa, 2001):
            worst = max(worst, abs(abs(s41_closed(p, d)) - abs(s14_closed(p, d))))
    _criterion(
        "reciprocity control at theta in {0, pi}",
        worst <= 1e-12,
        f"max ||S41|-|S14|| = {worst:.2e}",
    )


def test_oracle_equivalence():
    rng = np.random.default_rng(102)
    worst_s = 0.0
    for _ in range(1000):
        G, J = rng.uniform(0.0, 15.0, 2)
        th = rng.uniform(0.0, 2 * TWO_PI)
        p = EffectiveParams(G=G, J=J, theta=th, kappa_i=rng.uniform(0.2, 3.0))
        d = rng.uniform(-5.0, 5.0) * p.kappa
        s = s_general(build_effective_matrix(p), p.omega - d).s
        # diagonal matches the through-port closed form as a complex number;
        # the cross-port closed forms use the opposite output-phase sign, so
        # compare magnitudes and the sign-mapped complex values
        worst_s = max(
            worst_s,
            abs(s[0, 0] - s21_closed(p, d)),
            abs(abs(s[1, 0]) - abs(s41_closed(p, d))),
            abs(abs(s[0, 1]) - abs(s14_closed(p, d))),
            abs(s[1, 0] + s41_closed(p, d)),
            abs(s[0, 1] + s14_closed(p, d)),
        )

    worst_e2 = 0.0
    for _ in range(10_000):
        G, J = rng.uniform(0.0, 15.0, 2)
        th = rng.uniform(0.0, 2 * TWO_PI)
        p = EffectiveParams(G=G, J=J, theta=th, kappa_i=rng.uniform(0.2, 3.0))
        got = eig_numeric(build_effective_matrix(p)).eigenvalues
        worst_e2 = max(worst_e2, _pair_error(got, eig2_closed(p).eigenvalues))

    worst_e3 = 0.0
    for _ in range(10_000):
        G, J = rng.uniform(0.0, 15.0, 2)
        th = rng.uniform(0.0, 2 * TWO_PI)
        ring = RingParams(G=G, J=J, theta=th, kappa=rng.uniform(0.5, 40.0))
        got = np.array(eig_numeric(build_ring_matrix(ring)).eigenvalues)
        want = np.array(ring_eig_circulant(ring).eigenvalues)
        worst_e3 = max(worst_e3, _triple_error(got, want))

    ok = worst_s <= 1e-10 and worst_e2 <= 1e-10 and worst_e3 <= 1e-10
    _criterion(
        "oracle equivalence (S matrix and eigensolvers)",
        ok,
        f"smatrix {worst_s:.2e}, eig 2x2 {worst_e2:.2e}, ring {worst_e3:.2e}",
    )


def test_adiabatic_convergence():
    G = 10.0
    eff = EffectiveParams(G=G, J=G, theta=HALF_PI)
    want = eig2_closed(eff).eigenvalues
    errors = []
    for g_over in (10.0, 20.0, 50.0, 100.0):
        full = lift_to_full(eff, gamma=g_over * G)
        vals = np.array(
            eig_numeric(build_full_matrix(full, port_rate=eff.kappa)).eigenvalues
        )
        # best pairing of any two of the three branches against the closed form
        err = min(
            _pair_error(vals[list(pair)], want)
            for pair in ((0, 1), (0, 2), (1, 2))
        )
        errors.append(err)
    monotone = all(errors[i] > errors[i + 1] for i in range(len(errors) - 1))
    within_5pct = errors[2] <= 0.05 * G
    detail = (
        "errors at gamma/G=(10,20,50,100): "
        + ", ".join(f"{e:.3f}" for e in errors)
        + f"; 5% bound is {0.05 * G:.2f}; at the exceptional point the "
        "splitting scales like sqrt(1/gamma), so the bound is out of reach "
        "(frequency parts alone agree to ~1e-14)"
    )
    _criterion(
        "adiabatic convergence at the matched balanced point",
        monotone and within_5pct,
        detail,
    )


def test_bandwidth_claim():
    p = EffectiveParams(G=10.0, J=10.0, theta=HALF_PI)
    grid = ProbeGrid.linspace(-5 * p.kappa, 5 * p.kappa, 2001)
    widths = []
    for g_over in (0.1, 0.5, 1.0, 5.0, 10.0, 50.0):
        widths.append(fwhm(nonreciprocity_curve(p, grid, gamma=g_over * p.G)))
    eff_width = fwhm(nonreciprocity_curve(p, grid))
    monotone = all(widths[i] <= widths[i + 1] for i in range(len(widths) - 1))
    ratio = widths[-1] / widths[-2]
    vs_eff = widths[-1] / eff_width
    ok = monotone and 0.8 <= ratio <= 1.25 and 0.5 <= vs_eff <= 2.0
    _criterion(
        "nonreciprocal bandwidth grows with gamma and saturates",
        ok,
        f"widths {', '.join(f'{w:.2f}' for w in widths)}; "
        f"w(50G)/w(10G)={ratio:.3f}; vs effective {vs_eff:.3f} "
        f"(effective width {eff_width:.2f} = 2*kappa)",
    )


def test_chirality():
    p_odd = EffectiveParams(G=10.0, J=10.0, theta=HALF_PI)
    p_even = EffectiveParams(G=10.0, J=10.0, theta=3 * HALF_PI)
    a_odd = chirality(p_odd, 0.0).alpha
    a_even = chirality(p_even, 0.0).alpha
    worst_flip = 0.0
    for th in np.linspace(0.0, 2 * TWO_PI, 401):
        a = chirality(EffectiveParams(G=10.0, J=10.0, theta=th), 0.0).alpha
        b = chirality(
            EffectiveParams(G=10.0, J=10.0, theta=th + math.pi), 0.0
        ).alpha
        worst_flip = max(worst_flip, abs(a + b))
    ok = (
        abs(a_odd + 1.0) <= 1e-12
        and abs(a_even - 1.0) <= 1e-12
        and worst_flip <= 1e-12
    )
    _criterion(
        "chirality extremes and parity flip",
        ok,
        f"alpha(pi/2)={a_odd:+.15f}, alpha(3pi/2)={a_even:+.15f}, "
        f"max|alpha(theta)+alpha(theta+pi)|={worst_flip:.2e}",
    )


def test_ring_circulator_contrast():
    G = 10.0
    kappa = 100.0 * G  # kappa / J = 100 at J = G
    ring = RingParams(G=G, J=G, theta=HALF_PI, kappa=kappa)
    s = ring_s_closed(ring, 0.0)[0].s
    contrast = abs(s[0, 1]) / abs(s[1, 0])
    cyclic = (
        s[1, 0] == s[2, 1] == s[0, 2] and s[0, 1] == s[1, 2] == s[2, 0]
    )
    ring_even = RingParams(G=G, J=G, theta=3 * HALF_PI, kappa=kappa)
    s_even = ring_s_closed(ring_even, 0.0)[0].s
    flipped = abs(s_even[1, 0]) / abs(s_even[0, 1])
    worst_recip = 0.0
    for th in (0.0, math.pi):
        ring_k = RingParams(G=G, J=G, theta=th, kappa=kappa)
        for d in np.linspace(-3 * kappa, 3 * kappa, 201):
            s_k = ring_s_closed(ring_k, d)[0].s
            worst_recip = max(worst_recip, abs(abs(s_k[0, 1]) - abs(s_k[1, 0])))
    ok = (
        abs(contrast - 50.0) <= 0.05 * 50.0
        and cyclic
        and abs(flipped - 50.0) <= 0.05 * 50.0
        and worst_recip <= 1e-12
    )
    _criterion(
        "ring circulator contrast and parity-controlled direction",
        ok,
        f"|S12|/|S21|={contrast:.3f} (odd), {flipped:.3f} (even, reversed); "
        f"cyclic equalities exact: {cyclic}; "
        f"max ||S12|-|S21|| at theta=k*pi: {worst_recip:.2e}",
    )


def test_ring_discrepancy_report():
    rng = np.random.default_rng(103)
    worst_norm = 0.0
    for _ in range(100):
        G, J = rng.uniform(0.0, 10.0, 2)
        th = rng.uniform(0.0, 2 * TWO_PI)
        m = build_ring_matrix(
            RingParams(G=G, J=J, theta=th, kappa=rng.uniform(0.5, 30.0))
        ).m
        comm = m @ m.conj().T - m.conj().T @ m
        worst_norm = max(worst_norm, float(np.max(np.abs(comm))))

    G = 10.0
    ring = RingParams(G=G, J=G, theta=HALF_PI, kappa=22.0)
    base = ring.omega - 1j * ring.kappa
    want = np.array(
        [
            base + 2 * G,
            base - G + 1j * math.sqrt(3.0) * G,
            base - G - 1j * math.sqrt(3.0) * G,
        ]
    )
    numeric = np.array(eig_numeric(build_ring_matrix(ring)).eigenvalues)
    offsets_err = _triple_error(numeric, want)
    paper = np.array(ring_eig_paper(ring).eigenvalues)
    paper_collapsed = float(np.max(np.abs(paper - base)))

    ds = figure_dataset("fig8b")
    has_gap_column = "discrepancy" in ds.columns and np.max(
        ds.columns["discrepancy"]
    ) > 10.0

    ok = (
        worst_norm <= 1e-12
        and offsets_err <= 1e-10
        and paper_collapsed <= 1e-6
        and has_gap_column
    )
    _criterion(
        "ring discrepancy report (normality, exact vs published spectra)",
        ok,
        f"max commutator {worst_norm:.2e}; circulant offsets error "
        f"{offsets_err:.2e}; published triple spread {paper_collapsed:.2e}; "
        f"dataset discrepancy column max {np.max(ds.columns['discrepancy']):.2f}",
    )
