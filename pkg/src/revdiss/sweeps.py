"""Deterministic parameter-sweep engine and per-figure dataset generators.

`run_sweep` evaluates one model family over the Cartesian product of named
axes in row-major order (first declared axis outermost). Results are
bit-identical across repeated runs and across any number of worker
processes, because points are evaluated independently and assembled in grid
order.

`figure_dataset` bakes in the parameter sets of the standard figures of this
model family (Riemann sheets, transmission spectra, nonreciprocity bandwidth,
chirality, ring spectra and circulation) and returns ready-to-plot datasets.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Mapping, Sequence

import numpy as np

from ._version import __version__
from .model import (
    EffectiveParams,
    RingParams,
    ValidationError,
    build_full_matrix,
    lift_to_full,
)
from .scattering import (
    PoleError,
    ring_s_closed,
    s14_closed,
    s21_closed,
    s23_closed,
    s41_closed,
    s_general,
)
from .spectra import (
    eig2_closed,
    eig_numeric,
    ring_eig_circulant,
    ring_eig_paper,
    track_branches,
)

__all__ = ["SweepSpec", "Dataset", "run_sweep", "figure_dataset", "FIGURE_IDS"]

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: a model family, named axis grids, fixed overrides and
    the requested output columns."""

    family: str
    axes: Mapping[str, Sequence[float]]
    fixed: Mapping[str, float] = field(default_factory=dict)
    outputs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dataset:
    """Named equal-length columns plus the provenance that produced them."""

    columns: dict[str, np.ndarray]
    provenance: dict

    def __post_init__(self) -> None:
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValidationError("dataset columns must have equal length")
        if not self.provenance:
            raise ValidationError("dataset provenance must be populated")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


# ---------------------------------------------------------------------------
# model families


def _resolve_effective(point: Mapping[str, float]) -> EffectiveParams:
    G = float(point["G"])
    if point.get("J") is not None and point.get("j_over_g") is not None:
        raise ValidationError("set either 'J' or 'j_over_g', not both")
    if point.get("j_over_g") is not None:
        J = float(point["j_over_g"]) * G
    elif point.get("J") is not None:
        J = float(point["J"])
    else:
        J = G
    if point.get("theta") is not None and point.get("theta_over_halfpi") is not None:
        raise ValidationError("set either 'theta' or 'theta_over_halfpi', not both")
    if point.get("theta_over_halfpi") is not None:
        theta = float(point["theta_over_halfpi"]) * HALF_PI
    elif point.get("theta") is not None:
        theta = float(point["theta"])
    else:
        theta = 0.0
    kappa_e = point.get("kappa_e")
    return EffectiveParams(
        G=G,
        J=J,
        theta=theta,
        kappa_i=float(point["kappa_i"]),
        kappa_e=None if kappa_e is None else float(kappa_e),
        omega=float(point["omega"]),
    )


def _resolve_gamma(point: Mapping[str, float], G: float) -> float:
    if point.get("gamma") is not None and point.get("gamma_over_g") is not None:
        raise ValidationError("set either 'gamma' or 'gamma_over_g', not both")
    if point.get("gamma") is not None:
        return float(point["gamma"])
    return float(point.get("gamma_over_g", 50.0)) * G


def _resolve_ring(point: Mapping[str, float]) -> RingParams:
    eff = _resolve_effective(
        {**point, "kappa_i": 1.0, "kappa_e": None, "omega": 0.0}
    )
    return RingParams(
        G=eff.G,
        J=eff.J,
        theta=eff.theta,
        kappa=float(point["kappa"]),
        omega=float(point["omega"]),
    )


_EFFECTIVE_DEFAULTS = {
    "G": 10.0,
    "J": None,
    "j_over_g": None,
    "theta": None,
    "theta_over_halfpi": None,
    "kappa_i": 1.0,
    "kappa_e": None,
    "omega": 0.0,
}


def _eval_effective_eigen(point: Mapping[str, float]) -> dict[str, float]:
    p = _resolve_effective(point)
    lam_p, lam_m = eig2_closed(p).eigenvalues
    return {
        "lam_plus_re": lam_p.real,
        "lam_plus_im": lam_p.imag,
        "lam_minus_re": lam_m.real,
        "lam_minus_im": lam_m.imag,
        "eigengap": abs(lam_p - lam_m),
        "kappa": p.kappa,
        "J": p.J,
        "theta": p.theta,
    }


def _eval_effective_smatrix(point: Mapping[str, float]) -> dict[str, float]:
    p = _resolve_effective(point)
    d = float(point["delta"])
    s21 = s21_closed(p, d)
    s41 = s41_closed(p, d)
    s14 = s14_closed(p, d)
    s23 = s23_closed(p, d)
    denom = abs(s41) + abs(s23)
    alpha = (abs(s41) - abs(s23)) / denom if denom > 0 else math.nan
    return {
        "s21_re": s21.real, "s21_im": s21.imag, "s21_abs": abs(s21),
        "s41_re": s41.real, "s41_im": s41.imag, "s41_abs": abs(s41),
        "s14_re": s14.real, "s14_im": s14.imag, "s14_abs": abs(s14),
        "s23_re": s23.real, "s23_im": s23.imag, "s23_abs": abs(s23),
        "d_value": abs(s14) - abs(s41),
        "alpha": alpha,
        "kappa": p.kappa,
        "J": p.J,
        "theta": p.theta,
    }


def _eval_full_eigen(point: Mapping[str, float]) -> dict[str, float]:
    eff = _resolve_effective(point)
    full = lift_to_full(eff, _resolve_gamma(point, eff.G))
    m = build_full_matrix(full, port_rate=eff.kappa)
    vals = eig_numeric(m).eigenvalues
    out: dict[str, float] = {"kappa": eff.kappa, "J": eff.J, "theta": eff.theta}
    for k, v in enumerate(vals):
        out[f"ev{k}_re"] = v.real
        out[f"ev{k}_im"] = v.imag
    return out


def _eval_full_smatrix(point: Mapping[str, float]) -> dict[str, float]:
    eff = _resolve_effective(point)
    full = lift_to_full(eff, _resolve_gamma(point, eff.G))
    m = build_full_matrix(full, port_rate=eff.kappa)
    d = float(point["delta"])
    s = s_general(m, eff.omega - d).s
    return {
        "s_ba_re": s[1, 0].real, "s_ba_im": s[1, 0].imag,
        "s_ab_re": s[0, 1].real, "s_ab_im": s[0, 1].imag,
        "s41_abs": abs(s[1, 0]),
        "s14_abs": abs(s[0, 1]),
        "d_value": abs(s[0, 1]) - abs(s[1, 0]),
        "kappa": eff.kappa, "J": eff.J, "theta": eff.theta,
    }


def _eval_ring_eigen(point: Mapping[str, float]) -> dict[str, float]:
    p = _resolve_ring(point)
    circ = np.array(ring_eig_circulant(p).eigenvalues)
    paper = np.array(ring_eig_paper(p).eigenvalues)
    best = min(
        permutations(range(3)),
        key=lambda perm: sum(abs(paper[perm[k]] - circ[k]) for k in range(3)),
    )
    out: dict[str, float] = {"J": p.J, "theta": p.theta}
    for k in range(3):
        out[f"circ{k}_re"] = circ[k].real
        out[f"circ{k}_im"] = circ[k].imag
        out[f"paper{k}_re"] = paper[best[k]].real
        out[f"paper{k}_im"] = paper[best[k]].imag
        out[f"disc{k}"] = abs(paper[best[k]] - circ[k])
    out["max_disc"] = max(out[f"disc{k}"] for k in range(3))
    return out


def _eval_ring_smatrix(point: Mapping[str, float]) -> dict[str, float]:
    p = _resolve_ring(point)
    d = float(point["delta"])
    keys = ("s21", "s12", "s32", "s13", "s23", "s31")
    idx = {"s21": (1, 0), "s12": (0, 1), "s32": (2, 1),
           "s13": (0, 2), "s23": (1, 2), "s31": (2, 0)}
    out: dict[str, float] = {"J": p.J, "theta": p.theta}
    try:
        s = ring_s_closed(p, d)[0].s
    except PoleError:
        for key in keys:
            out[f"{key}_re"] = out[f"{key}_im"] = out[f"{key}_abs"] = math.nan
        out["pole"] = 1.0
        return out
    for key in keys:
        v = s[idx[key]]
        out[f"{key}_re"] = v.real
        out[f"{key}_im"] = v.imag
        out[f"{key}_abs"] = abs(v)
    out["pole"] = 0.0
    return out


@dataclass(frozen=True)
class _Family:
    defaults: dict[str, float | None]
    evaluate: Callable[[Mapping[str, float]], dict[str, float]]
    columns: tuple[str, ...]


_FAMILIES: dict[str, _Family] = {
    "effective_eigen": _Family(
        dict(_EFFECTIVE_DEFAULTS),
        _eval_effective_eigen,
        ("lam_plus_re", "lam_plus_im", "lam_minus_re", "lam_minus_im",
         "eigengap", "kappa", "J", "theta"),
    ),
    "effective_smatrix": _Family(
        {**_EFFECTIVE_DEFAULTS, "delta": 0.0},
        _eval_effective_smatrix,
        ("s21_re", "s21_im", "s21_abs", "s41_re", "s41_im", "s41_abs",
         "s14_re", "s14_im", "s14_abs", "s23_re", "s23_im", "s23_abs",
         "d_value", "alpha", "kappa", "J", "theta"),
    ),
    "full_eigen": _Family(
        {**_EFFECTIVE_DEFAULTS, "gamma": None, "gamma_over_g": None},
        _eval_full_eigen,
        ("ev0_re", "ev0_im", "ev1_re", "ev1_im", "ev2_re", "ev2_im",
         "kappa", "J", "theta"),
    ),
    "full_smatrix": _Family(
        {**_EFFECTIVE_DEFAULTS, "gamma": None, "gamma_over_g": None, "delta": 0.0},
        _eval_full_smatrix,
        ("s_ba_re", "s_ba_im", "s_ab_re", "s_ab_im", "s41_abs", "s14_abs",
         "d_value", "kappa", "J", "theta"),
    ),
    "ring_eigen": _Family(
        {"G": 10.0, "J": None, "j_over_g": None, "theta": None,
         "theta_over_halfpi": None, "kappa": 22.0, "omega": 0.0},
        _eval_ring_eigen,
        tuple(
            [f"{src}{k}_{part}" for k in range(3) for src in ("circ", "paper")
             for part in ("re", "im")]
            + [f"disc{k}" for k in range(3)] + ["max_disc", "J", "theta"]
        ),
    ),
    "ring_smatrix": _Family(
        {"G": 10.0, "J": None, "j_over_g": None, "theta": None,
         "theta_over_halfpi": None, "kappa": 22.0, "omega": 0.0, "delta": 0.0},
        _eval_ring_smatrix,
        tuple(
            [f"{key}_{part}" for key in ("s21", "s12", "s32", "s13", "s23", "s31")
             for part in ("re", "im", "abs")]
            + ["pole", "J", "theta"]
        ),
    ),
}


def _family(name: str) -> _Family:
    if name not in _FAMILIES:
        raise ValidationError(
            f"unknown sweep family '{name}'; valid: {sorted(_FAMILIES)}"
        )
    return _FAMILIES[name]


def _eval_task(args: tuple[str, dict]) -> dict[str, float]:
    family_name, point = args
    return _FAMILIES[family_name].evaluate(point)


# ---------------------------------------------------------------------------
# the engine


def run_sweep(spec: SweepSpec, workers: int = 1) -> Dataset:
    """Cartesian-product evaluation of a sweep specification.

    Output rows follow row-major order over the declared axes (first axis
    outermost); requested output columns are appended after the axis columns.
    The result is independent of `workers`.
    """
    fam = _family(spec.family)
    for name in spec.axes:
        if name not in fam.defaults:
            raise ValidationError(
                f"unknown axis '{name}' for family '{spec.family}'"
            )
    for name in spec.fixed:
        if name not in fam.defaults:
            raise ValidationError(
                f"unknown fixed parameter '{name}' for family '{spec.family}'"
            )
    if not spec.outputs:
        raise ValidationError("at least one output column must be requested")
    for name in spec.outputs:
        if name not in fam.columns:
            raise ValidationError(
                f"unknown output '{name}' for family '{spec.family}'; "
                f"valid: {fam.columns}"
            )
    axes: dict[str, np.ndarray] = {}
    for name, values in spec.axes.items():
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"axis '{name}' must be a non-empty 1-d grid")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"axis '{name}' must be finite")
        if arr.size > 1 and np.any(np.diff(arr) <= 0):
            raise ValidationError(f"axis '{name}' must be strictly increasing")
        axes[name] = arr

    base = dict(fam.defaults)
    base.update(spec.fixed)
    names = list(axes)
    points = [
        {**base, **dict(zip(names, combo))}
        for combo in product(*axes.values())
    ]
    tasks = [(spec.family, pt) for pt in points]
    if workers > 1 and len(tasks) > 64:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_task, tasks, chunksize=chunk))
    else:
        rows = [_eval_task(t) for t in tasks]

    columns: dict[str, np.ndarray] = {}
    if names:
        mesh = np.meshgrid(*axes.values(), indexing="ij")
        for name, grid in zip(names, mesh):
            columns[name] = grid.reshape(-1)
    for out in spec.outputs:
        if out in columns:
            continue
        columns[out] = np.array([row[out] for row in rows])
    provenance = {
        "family": spec.family,
        "axes": {k: v.tolist() for k, v in axes.items()},
        "fixed": dict(spec.fixed),
        "outputs": list(spec.outputs),
        "version": __version__,
    }
    return Dataset(columns, provenance)


# ---------------------------------------------------------------------------
# figure datasets

FIGURE_IDS = (
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b",
    "fig5", "fig6b", "fig8a", "fig8b", "fig9",
)

_THETA_GRID = np.linspace(0.0, 4.0 * math.pi, 201)
_RATIO_GRID = np.linspace(0.0, 1.5, 201)
_DELTA_GRID = np.linspace(-110.0, 110.0, 401)
_GAMMA_LIST = (0.1, 0.5, 1.0, 5.0, 10.0, 50.0)


def _add_tracked_sheets(ds: Dataset, n_theta: int, branches: list[str]) -> Dataset:
    """Continuity-track eigenvalue columns along the (inner) theta axis."""
    n_rows = ds.n_rows
    n_ratio = n_rows // n_theta
    stacked = np.stack(
        [
            (ds.columns[f"{b}_re"] + 1j * ds.columns[f"{b}_im"]).reshape(
                n_ratio, n_theta
            )
            for b in branches
        ],
        axis=-1,
    )
    tracked = np.empty_like(stacked)
    for r in range(n_ratio):
        tracked[r] = track_branches(stacked[r])
    columns = dict(ds.columns)
    for k in range(len(branches)):
        columns[f"sheet{k}_re"] = tracked[:, :, k].real.reshape(-1)
        columns[f"sheet{k}_im"] = tracked[:, :, k].imag.reshape(-1)
    return Dataset(columns, ds.provenance)


def _fig2a(workers: int) -> Dataset:
    ds = run_sweep(
        SweepSpec(
            "effective_eigen",
            axes={"j_over_g": _RATIO_GRID, "theta": _THETA_GRID},
            fixed={"G": 10.0},
            outputs=("lam_plus_re", "lam_plus_im", "lam_minus_re",
                     "lam_minus_im", "eigengap", "kappa"),
        ),
        workers,
    )
    return _add_tracked_sheets(ds, _THETA_GRID.size, ["lam_plus", "lam_minus"])


def _fig2b(workers: int) -> Dataset:
    ds = run_sweep(
        SweepSpec(
            "full_eigen",
            axes={"j_over_g": _RATIO_GRID, "theta": _THETA_GRID},
            fixed={"G": 10.0, "gamma_over_g": 50.0},
            outputs=("ev0_re", "ev0_im", "ev1_re", "ev1_im", "ev2_re", "ev2_im"),
        ),
        workers,
    )
    return _add_tracked_sheets(ds, _THETA_GRID.size, ["ev0", "ev1", "ev2"])


def _fig3(theta_over_halfpi: float, workers: int) -> Dataset:
    return run_sweep(
        SweepSpec(
            "effective_smatrix",
            axes={
                "j_over_g": np.round(np.arange(0.0, 1.51, 0.1), 10),
                "delta": _DELTA_GRID,
            },
            fixed={"G": 10.0, "theta_over_halfpi": theta_over_halfpi},
            outputs=("s21_re", "s21_im", "s21_abs", "kappa", "J"),
        ),
        workers,
    )


def _fig4a(workers: int) -> Dataset:
    return run_sweep(
        SweepSpec(
            "effective_smatrix",
            axes={
                "theta_over_halfpi": np.array([0.0, 1.0, 2.0, 3.0]),
                "delta": _DELTA_GRID,
            },
            fixed={"G": 10.0, "j_over_g": 1.0},
            outputs=("s41_re", "s41_im", "s41_abs",
                     "s14_re", "s14_im", "s14_abs"),
        ),
        workers,
    )


def _fig4b(workers: int) -> Dataset:
    return run_sweep(
        SweepSpec(
            "effective_smatrix",
            axes={"j_over_g": _RATIO_GRID, "theta": _THETA_GRID},
            fixed={"G": 10.0, "delta": 0.0},
            outputs=("s41_abs", "s14_abs"),
        ),
        workers,
    )


def _fig5(workers: int) -> Dataset:
    delta = np.linspace(-110.0, 110.0, 2001)
    columns: dict[str, np.ndarray] = {"delta": delta}
    sub_provenance = {}
    for g_over in _GAMMA_LIST:
        full = run_sweep(
            SweepSpec(
                "full_smatrix",
                axes={"delta": delta},
                fixed={"G": 10.0, "j_over_g": 1.0, "theta_over_halfpi": 1.0,
                       "gamma_over_g": g_over},
                outputs=("d_value",),
            ),
            workers,
        )
        columns[f"d_gamma_{g_over:g}"] = full.columns["d_value"]
        sub_provenance[f"gamma_over_g={g_over:g}"] = full.provenance
    eff = run_sweep(
        SweepSpec(
            "effective_smatrix",
            axes={"delta": delta},
            fixed={"G": 10.0, "j_over_g": 1.0, "theta_over_halfpi": 1.0},
            outputs=("d_value",),
        ),
        workers,
    )
    columns["d_effective"] = eff.columns["d_value"]
    sub_provenance["effective"] = eff.provenance
    provenance = {
        "figure": "fig5",
        "sweeps": sub_provenance,
        "version": __version__,
        "note": "one nonreciprocity column per mechanical decay rate; "
        "d_effective is the adiabatic limit",
    }
    return Dataset(columns, provenance)


def _fig6b(workers: int) -> Dataset:
    theta = np.linspace(0.0, 4.0 * math.pi, 401)
    ds = run_sweep(
        SweepSpec(
            "effective_smatrix",
            axes={"theta": theta},
            fixed={"G": 10.0, "j_over_g": 1.0, "delta": 0.0},
            outputs=("alpha", "s41_abs", "s23_abs"),
        ),
        workers,
    )
    columns = dict(ds.columns)
    columns["theta_over_halfpi"] = columns["theta"] / HALF_PI
    return Dataset(columns, ds.provenance)


def _ring_long(ds: Dataset, axis: str) -> Dataset:
    """Melt wide per-branch ring eigenvalue columns into long format."""
    n = ds.n_rows
    columns = {
        axis: np.repeat(ds.columns[axis], 3),
        "branch": np.tile(np.arange(3.0), n),
    }
    for src in ("circ", "paper"):
        for part in ("re", "im"):
            columns[f"{src}_{part}"] = np.stack(
                [ds.columns[f"{src}{k}_{part}"] for k in range(3)], axis=1
            ).reshape(-1)
    columns["discrepancy"] = np.stack(
        [ds.columns[f"disc{k}"] for k in range(3)], axis=1
    ).reshape(-1)
    return Dataset(columns, ds.provenance)


def _fig8a(workers: int) -> Dataset:
    ds = run_sweep(
        SweepSpec(
            "ring_eigen",
            axes={"j_over_g": np.linspace(0.0, 1.5, 401)},
            fixed={"G": 10.0, "theta_over_halfpi": 1.0, "kappa": 22.0},
            outputs=_FAMILIES["ring_eigen"].columns[:-2],
        ),
        workers,
    )
    return _ring_long(ds, "j_over_g")


def _fig8b(workers: int) -> Dataset:
    ds = run_sweep(
        SweepSpec(
            "ring_eigen",
            axes={"theta": np.linspace(0.0, 4.0 * math.pi, 401)},
            fixed={"G": 10.0, "j_over_g": 1.0, "kappa": 22.0},
            outputs=_FAMILIES["ring_eigen"].columns[:-2],
        ),
        workers,
    )
    return _ring_long(ds, "theta")


def _fig9(workers: int) -> Dataset:
    kappa = 1000.0  # kappa / J = 100 with J = G = 10
    return run_sweep(
        SweepSpec(
            "ring_smatrix",
            axes={
                "theta_over_halfpi": np.array([1.0, 2.0, 3.0]),
                "delta": np.linspace(-3.0 * kappa, 3.0 * kappa, 1001),
            },
            fixed={"G": 10.0, "j_over_g": 1.0, "kappa": kappa},
            outputs=("s21_abs", "s12_abs", "s32_abs", "s13_abs",
                     "s23_abs", "s31_abs", "pole"),
        ),
        workers,
    )


_FIGURES: dict[str, Callable[[int], Dataset]] = {
    "fig2a": _fig2a,
    "fig2b": _fig2b,
    "fig3a": lambda w: _fig3(0.0, w),
    "fig3b": lambda w: _fig3(1.0, w),
    "fig4a": _fig4a,
    "fig4b": _fig4b,
    "fig5": _fig5,
    "fig6b": _fig6b,
    "fig8a": _fig8a,
    "fig8b": _fig8b,
    "fig9": _fig9,
}


def figure_dataset(figure_id: str, workers: int = 1) -> Dataset:
    """Dataset needed to redraw one of the standard figures.

    All caption parameters are baked in; see the provenance of the returned
    dataset for the exact grids and fixed values.
    """
    if figure_id not in _FIGURES:
        raise ValidationError(
            f"unknown figure id '{figure_id}'; valid ids: {', '.join(FIGURE_IDS)}"
        )
    ds = _FIGURES[figure_id](workers)
    provenance = dict(ds.provenance)
    provenance.setdefault("figure", figure_id)
    return Dataset(ds.columns, provenance)
