"""Command-line front end and the stable on-disk formats.

File formats written by the subcommands:

* transmission curves: CSV with columns ``delta, re, im, abs`` (one file per
  requested port pair); numbers are written with full round-trip precision,
  so ``float(text)`` recovers the computed value exactly;
* eigenvalue sweeps / figure datasets: CSV with named columns plus a JSON
  sidecar ``*.meta.json`` holding the provenance (parameters, grids, code
  version); figure files are named ``fig<id>.csv`` / ``fig<id>.meta.json``;
* exceptional-point search results: a JSON document of record objects.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from ._version import __version__
from .model import (
    EffectiveParams,
    RingParams,
    ValidationError,
    build_effective_matrix,
    build_full_matrix,
    build_ring_matrix,
    lift_to_full,
)
from .scattering import (
    NumericalError,
    PoleError,
    ProbeGrid,
    curve_area,
    fwhm,
    nonreciprocity_curve,
    ring_s_closed,
    s14_closed,
    s21_closed,
    s23_closed,
    s41_closed,
    s_general_grid,
)
from .spectra import (
    classify_parity,
    eig2_closed,
    eig_numeric,
    locate_eps,
    locate_ring_coalescence,
    locate_ring_defective,
    ring_eig_circulant,
    ring_eig_paper,
    sweep_riemann,
    track_branches,
    COALESCENCE_RTOL,
)
from .sweeps import FIGURE_IDS, Dataset, figure_dataset

HALF_PI = math.pi / 2

OUTDIR_ENV = "REVDISS_OUTDIR"

_CONFIG_MODEL_KEYS = {
    "type", "G", "J", "j_over_g", "theta", "theta_over_halfpi",
    "kappa_i", "kappa_e", "omega", "gamma", "gamma_over_g", "kappa",
}
_CONFIG_SWEEP_KEYS = {
    "delta_range", "points", "theta_range", "theta_points",
    "ratio_range", "ratio_points",
}
_CONFIG_OUTPUT_KEYS = {"dir"}


# ---------------------------------------------------------------------------
# formats


def format_number(x: float) -> str:
    """Shortest decimal text that round-trips to the exact double."""
    return repr(float(x))


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = arrays[0].size if arrays else 0
    lines = [",".join(names)]
    for i in range(n_rows):
        lines.append(",".join(format_number(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_dataset(ds: Dataset, out_dir: Path, stem: str) -> list[Path]:
    csv_path = out_dir / f"{stem}.csv"
    meta_path = out_dir / f"{stem}.meta.json"
    write_csv(csv_path, ds.columns)
    write_json(meta_path, ds.provenance)
    return [csv_path, meta_path]


def write_curve_csv(path: Path, delta: np.ndarray, values: np.ndarray) -> None:
    """The fixed transmission-curve schema: delta, re, im, abs."""
    values = np.asarray(values, dtype=complex)
    write_csv(
        path,
        {
            "delta": np.asarray(delta, dtype=float),
            "re": values.real,
            "im": values.imag,
            "abs": np.abs(values),
        },
    )


def _ep_record_dict(r) -> dict:
    return {
        "theta_star": r.theta_star,
        "theta_over_halfpi": r.theta_star / HALF_PI,
        "j_over_g": r.j_over_g,
        "n": r.n,
        "parity": r.parity,
        "eigengap": r.eigengap,
        "order": r.order,
    }


# ---------------------------------------------------------------------------
# configuration and parameter assembly


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors surface as validation errors."""

    def error(self, message: str):  # noqa: D102
        raise ValidationError(message)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"config file not found: {path}")
    try:
        cfg = tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config parse error: {exc}") from exc
    allowed = {"model": _CONFIG_MODEL_KEYS, "sweep": _CONFIG_SWEEP_KEYS,
               "output": _CONFIG_OUTPUT_KEYS}
    for section, table in cfg.items():
        if section not in allowed:
            raise ValidationError(f"unknown config section '{section}'")
        if not isinstance(table, dict):
            raise ValidationError(f"config section '{section}' must be a table")
        for key in table:
            if key not in allowed[section]:
                raise ValidationError(
                    f"unknown config key '{section}.{key}'"
                )
    return cfg


def _merged(args: argparse.Namespace, cfg: dict, key: str, flag_value):
    """Flag value if explicitly set, else the config value, else None."""
    if flag_value is not None:
        return flag_value
    return cfg.get("model", {}).get(key)


def _effective_from_args(args: argparse.Namespace, cfg: dict) -> EffectiveParams:
    model = cfg.get("model", {})
    G = args.G if args.G is not None else model.get("G", 10.0)
    J = _merged(args, cfg, "J", args.J)
    j_over_g = _merged(args, cfg, "j_over_g", args.j_over_g)
    if J is not None and j_over_g is not None:
        raise ValidationError("set either 'J' or 'j_over_g', not both")
    if J is None:
        J = (j_over_g if j_over_g is not None else 1.0) * G
    theta = _merged(args, cfg, "theta", args.theta)
    halfpi = _merged(args, cfg, "theta_over_halfpi", args.theta_over_halfpi)
    if theta is not None and halfpi is not None:
        raise ValidationError("set either 'theta' or 'theta_over_halfpi', not both")
    if theta is None:
        theta = (halfpi if halfpi is not None else 0.0) * HALF_PI
    kappa_i = args.kappa_i if args.kappa_i is not None else model.get("kappa_i", 1.0)
    kappa_e = _merged(args, cfg, "kappa_e", args.kappa_e)
    omega = args.omega if args.omega is not None else model.get("omega", 0.0)
    return EffectiveParams(
        G=G, J=J, theta=theta, kappa_i=kappa_i, kappa_e=kappa_e, omega=omega
    )


def _ring_from_args(args: argparse.Namespace, cfg: dict) -> RingParams:
    eff = _effective_from_args(args, cfg)
    kappa = args.kappa if args.kappa is not None else cfg.get("model", {}).get(
        "kappa", 2.0 * (eff.G + 1.0)
    )
    return RingParams(G=eff.G, J=eff.J, theta=eff.theta, kappa=kappa, omega=eff.omega)


def _gamma_from_args(args: argparse.Namespace, cfg: dict, G: float) -> float:
    model = cfg.get("model", {})
    gamma = args.gamma if getattr(args, "gamma", None) is not None else model.get("gamma")
    over = (
        args.gamma_over_g
        if getattr(args, "gamma_over_g", None) is not None
        else model.get("gamma_over_g")
    )
    if gamma is not None and over is not None:
        raise ValidationError("set either 'gamma' or 'gamma_over_g', not both")
    if gamma is not None:
        return gamma
    return (over if over is not None else 50.0) * G


def _out_dir(args: argparse.Namespace, cfg: dict) -> Path:
    if args.out is not None:
        d = args.out
    elif "output" in cfg and "dir" in cfg["output"]:
        d = cfg["output"]["dir"]
    else:
        d = os.environ.get(OUTDIR_ENV, ".")
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _delta_grid(args: argparse.Namespace, cfg: dict, kappa: float) -> ProbeGrid:
    sweep = cfg.get("sweep", {})
    rng = args.delta_range or sweep.get("delta_range")
    points = args.points if args.points is not None else sweep.get("points", 401)
    if rng is None:
        rng = (-5.0 * kappa, 5.0 * kappa)
    if len(rng) != 2 or rng[1] <= rng[0]:
        raise ValidationError("delta_range must be two increasing numbers")
    if points < 2:
        raise ValidationError("points must be >= 2")
    return ProbeGrid.linspace(float(rng[0]), float(rng[1]), int(points))


# ---------------------------------------------------------------------------
# subcommands


def _add_model_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--G", type=float, default=None, help="coherent coupling")
    sp.add_argument("--J", type=float, default=None, help="dissipative coupling")
    sp.add_argument("--j-over-g", dest="j_over_g", type=float, default=None,
                    help="dissipative coupling as a fraction of G")
    sp.add_argument("--theta", type=float, default=None, help="phase in radians")
    sp.add_argument("--theta-over-halfpi", dest="theta_over_halfpi", type=float,
                    default=None, help="phase in units of pi/2")
    sp.add_argument("--kappa-i", dest="kappa_i", type=float, default=None,
                    help="intrinsic loss (unit rate)")
    sp.add_argument("--kappa-e", dest="kappa_e", type=float, default=None,
                    help="external coupling; default: critical (kappa_i + J)")
    sp.add_argument("--omega", type=float, default=None, help="resonance offset")
    sp.add_argument("--kappa", type=float, default=None,
                    help="ring total loss (ring model only)")
    sp.add_argument("--gamma", type=float, default=None,
                    help="mechanical decay rate (full model)")
    sp.add_argument("--gamma-over-g", dest="gamma_over_g", type=float, default=None,
                    help="mechanical decay rate in units of G")
    sp.add_argument("--port-convention", choices=("total", "external"),
                    default="total",
                    help="port rate: total loss kappa (default) or kappa_e only")


def _port_rate(p: EffectiveParams, convention: str) -> float:
    return p.kappa if convention == "total" else p.kappa_e


def _cmd_eigen(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    sweep_cfg = cfg.get("sweep", {})
    theta_range = args.theta_range or sweep_cfg.get("theta_range")
    ratio_range = args.ratio_range or sweep_cfg.get("ratio_range")
    theta_points = args.theta_points or sweep_cfg.get("theta_points", 401)
    ratio_points = args.ratio_points or sweep_cfg.get("ratio_points", 201)

    if args.model == "ring":
        ring = _ring_from_args(args, cfg)
        forms = [f.strip() for f in args.closed_form.split(",") if f.strip()]
        for f in forms:
            if f not in ("paper", "circulant"):
                raise ValidationError(
                    f"unknown closed form '{f}'; valid: paper, circulant"
                )
        if theta_range is not None:
            thetas = np.linspace(theta_range[0], theta_range[1], int(theta_points))
            columns: dict[str, np.ndarray] = {"theta": thetas}
            circ = np.array(
                [ring_eig_circulant(_ring_at(ring, th)).eigenvalues for th in thetas]
            )
            paper = np.array(
                [ring_eig_paper(_ring_at(ring, th)).eigenvalues for th in thetas]
            )
            if "circulant" in forms:
                for k in range(3):
                    columns[f"circ{k}_re"] = circ[:, k].real
                    columns[f"circ{k}_im"] = circ[:, k].imag
            if "paper" in forms:
                for k in range(3):
                    columns[f"paper{k}_re"] = paper[:, k].real
                    columns[f"paper{k}_im"] = paper[:, k].imag
            if set(forms) == {"paper", "circulant"}:
                disc = _matched_discrepancy(paper, circ)
                for k in range(3):
                    columns[f"disc{k}"] = disc[:, k]
            ds = Dataset(columns, _ring_meta(ring, forms))
            files = write_dataset(ds, out, "eigen_ring")
        else:
            rows_src, rows_branch, rows_re, rows_im = [], [], [], []
            circ = ring_eig_circulant(ring)
            paper = ring_eig_paper(ring)
            for name, sp_ in (("circulant", circ), ("paper", paper)):
                if name in forms:
                    for b, v in zip(sp_.branch_ids, sp_.eigenvalues):
                        rows_src.append(name)
                        rows_branch.append(float(b))
                        rows_re.append(v.real)
                        rows_im.append(v.imag)
            path = out / "eigen_ring.csv"
            lines = ["source,branch,re,im"]
            for s, b, re, im in zip(rows_src, rows_branch, rows_re, rows_im):
                lines.append(
                    f"{s},{format_number(b)},{format_number(re)},{format_number(im)}"
                )
            path.write_text("\n".join(lines) + "\n")
            write_json(out / "eigen_ring.meta.json", _ring_meta(ring, forms))
            files = [path]
        print(f"wrote {', '.join(str(f) for f in files)}")
        return 0

    eff = _effective_from_args(args, cfg)
    if theta_range is not None and ratio_range is not None:
        grid = sweep_riemann(
            eff,
            np.linspace(theta_range[0], theta_range[1], int(theta_points)),
            np.linspace(ratio_range[0], ratio_range[1], int(ratio_points)),
        )
        nt, nr = grid.theta_axis.size, grid.ratio_axis.size
        columns = {
            "theta": np.tile(grid.theta_axis, nr),
            "ratio": np.repeat(grid.ratio_axis, nt),
            "raw_plus_re": grid.raw[:, :, 0].real.reshape(-1),
            "raw_plus_im": grid.raw[:, :, 0].imag.reshape(-1),
            "raw_minus_re": grid.raw[:, :, 1].real.reshape(-1),
            "raw_minus_im": grid.raw[:, :, 1].imag.reshape(-1),
            "sheet0_re": grid.tracked[:, :, 0].real.reshape(-1),
            "sheet0_im": grid.tracked[:, :, 0].imag.reshape(-1),
            "sheet1_re": grid.tracked[:, :, 1].real.reshape(-1),
            "sheet1_im": grid.tracked[:, :, 1].imag.reshape(-1),
        }
        ds = Dataset(columns, _eff_meta(eff, extra={"kind": "sheetgrid"}))
        files = write_dataset(ds, out, "eigen_sheets")
        print(f"wrote {', '.join(str(f) for f in files)}")
        return 0

    if theta_range is not None:
        thetas = np.linspace(theta_range[0], theta_range[1], int(theta_points))
        lam = np.array(
            [eig2_closed(_eff_at(eff, th)).eigenvalues for th in thetas]
        )
        tracked = track_branches(lam)
        columns = {
            "theta": thetas,
            "lam_plus_re": lam[:, 0].real, "lam_plus_im": lam[:, 0].imag,
            "lam_minus_re": lam[:, 1].real, "lam_minus_im": lam[:, 1].imag,
            "sheet0_re": tracked[:, 0].real, "sheet0_im": tracked[:, 0].imag,
            "sheet1_re": tracked[:, 1].real, "sheet1_im": tracked[:, 1].imag,
        }
        if args.compare_full:
            gamma = _gamma_from_args(args, cfg, eff.G)
            full_vals = np.array(
                [
                    eig_numeric(
                        build_full_matrix(
                            lift_to_full(_eff_at(eff, th), gamma),
                            port_rate=_port_rate(eff, args.port_convention),
                        )
                    ).eigenvalues
                    for th in thetas
                ]
            )
            full_tracked = track_branches(full_vals)
            for k in range(3):
                columns[f"full{k}_re"] = full_tracked[:, k].real
                columns[f"full{k}_im"] = full_tracked[:, k].imag
        ds = Dataset(columns, _eff_meta(eff, extra={"kind": "theta-sweep"}))
        files = write_dataset(ds, out, "eigen_sweep")
        print(f"wrote {', '.join(str(f) for f in files)}")
        return 0

    spectrum = eig2_closed(eff)
    lam_p, lam_m = spectrum.eigenvalues
    gap = abs(lam_p - lam_m)
    matching = classify_parity(eff.theta, tol=1e-6)
    # The eigengap grows like the square root of any parameter offset, so a
    # phase typed to a few digits of pi/2 still counts: flag on parameter
    # proximity as well as on the gap itself.
    near_balanced = eff.G > 0 and abs(eff.J - eff.G) <= 1e-6 * eff.G
    is_ep = (matching is not None and near_balanced) or (
        eff.G > 0 and gap <= COALESCENCE_RTOL * eff.G
    )
    lines = ["source,branch,re,im"]
    for b, v in zip(spectrum.branch_ids, spectrum.eigenvalues):
        lines.append(
            f"closed,{format_number(float(b))},"
            f"{format_number(v.real)},{format_number(v.imag)}"
        )
    if args.compare_full:
        gamma = _gamma_from_args(args, cfg, eff.G)
        full_sp = eig_numeric(
            build_full_matrix(
                lift_to_full(eff, gamma),
                port_rate=_port_rate(eff, args.port_convention),
            )
        )
        for b, v in zip(full_sp.branch_ids, full_sp.eigenvalues):
            lines.append(
                f"full,{format_number(float(b))},"
                f"{format_number(v.real)},{format_number(v.imag)}"
            )
    path = out / "eigen.csv"
    path.write_text("\n".join(lines) + "\n")
    meta = _eff_meta(
        eff,
        extra={
            "eigengap": gap,
            "is_ep": bool(is_ep),
            "phase_matching": (
                {"n": matching[0], "parity": matching[1]} if matching else None
            ),
        },
    )
    write_json(out / "eigen.meta.json", meta)
    if is_ep:
        print(f"exceptional point flagged: eigengap={gap:.3e}")
    print(f"wrote {path}")
    return 0


def _eff_at(eff: EffectiveParams, theta: float) -> EffectiveParams:
    kappa_e = None if eff.is_critical else eff.kappa_e
    return EffectiveParams(G=eff.G, J=eff.J, theta=theta, kappa_i=eff.kappa_i,
                           kappa_e=kappa_e, omega=eff.omega)


def _ring_at(ring: RingParams, theta: float) -> RingParams:
    return RingParams(G=ring.G, J=ring.J, theta=theta, kappa=ring.kappa,
                      omega=ring.omega)


def _matched_discrepancy(paper: np.ndarray, circ: np.ndarray) -> np.ndarray:
    from itertools import permutations

    out = np.empty_like(circ, dtype=float)
    for i in range(circ.shape[0]):
        best = min(
            permutations(range(3)),
            key=lambda perm: sum(abs(paper[i, perm[k]] - circ[i, k]) for k in range(3)),
        )
        for k in range(3):
            out[i, k] = abs(paper[i, best[k]] - circ[i, k])
    return out


def _eff_meta(eff: EffectiveParams, extra: dict | None = None) -> dict:
    meta = {
        "model": "effective",
        "params": {
            "G": eff.G, "J": eff.J, "theta": eff.theta,
            "kappa_i": eff.kappa_i, "kappa_e": eff.kappa_e,
            "kappa": eff.kappa, "omega": eff.omega,
        },
        "version": __version__,
    }
    if extra:
        meta.update(extra)
    return meta


def _ring_meta(ring: RingParams, forms) -> dict:
    return {
        "model": "ring",
        "params": {
            "G": ring.G, "J": ring.J, "theta": ring.theta,
            "kappa": ring.kappa, "omega": ring.omega,
        },
        "closed_forms": list(forms),
        "version": __version__,
    }


_EFFECTIVE_PAIRS = {"21": s21_closed, "41": s41_closed, "14": s14_closed,
                    "23": s23_closed}
_RING_PAIRS = {"21": (1, 0), "12": (0, 1), "32": (2, 1), "13": (0, 2),
               "23": (1, 2), "31": (2, 0), "11": (0, 0), "22": (1, 1),
               "33": (2, 2)}
_FULL_PAIRS = {"21": (0, 0), "43": (1, 1), "41": (1, 0), "14": (0, 1)}


def _cmd_smatrix(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    pole_deltas: list[float] = []
    if args.model == "ring":
        ring = _ring_from_args(args, cfg)
        grid = _delta_grid(args, cfg, ring.kappa)
        pairs = args.pair or ["21", "12"]
        for pr in pairs:
            if pr not in _RING_PAIRS:
                raise ValidationError(
                    f"unknown ring pair '{pr}'; valid: {sorted(_RING_PAIRS)}"
                )
        values = {pr: np.empty(len(grid), dtype=complex) for pr in pairs}
        for i, d in enumerate(grid.delta_values):
            try:
                s = ring_s_closed(ring, d)[0].s
            except PoleError:
                pole_deltas.append(float(d))
                for pr in pairs:
                    values[pr][i] = complex(math.nan, math.nan)
                continue
            for pr in pairs:
                values[pr][i] = s[_RING_PAIRS[pr]]
        meta = _ring_meta(ring, ["closed"])
        m = build_ring_matrix(ring)
        omega0 = ring.omega
    elif args.model == "full":
        eff = _effective_from_args(args, cfg)
        gamma = _gamma_from_args(args, cfg, eff.G)
        full = lift_to_full(eff, gamma)
        m = build_full_matrix(full, port_rate=_port_rate(eff, args.port_convention))
        grid = _delta_grid(args, cfg, eff.kappa)
        pairs = args.pair or ["41", "14"]
        for pr in pairs:
            if pr not in _FULL_PAIRS:
                raise ValidationError(
                    f"unknown full-model pair '{pr}'; valid: {sorted(_FULL_PAIRS)}"
                )
        s = s_general_grid(m, eff.omega - grid.delta_values)
        values = {pr: s[:, _FULL_PAIRS[pr][0], _FULL_PAIRS[pr][1]] for pr in pairs}
        meta = _eff_meta(eff, extra={"gamma": gamma, "model": "full"})
        omega0 = eff.omega
    else:
        eff = _effective_from_args(args, cfg)
        grid = _delta_grid(args, cfg, eff.kappa)
        pairs = args.pair or ["21"]
        for pr in pairs:
            if pr not in _EFFECTIVE_PAIRS:
                raise ValidationError(
                    f"unknown pair '{pr}'; valid: {sorted(_EFFECTIVE_PAIRS)}"
                )
        values = {
            pr: np.array(
                [_EFFECTIVE_PAIRS[pr](eff, d) for d in grid.delta_values]
            )
            for pr in pairs
        }
        meta = _eff_meta(eff)
        m = build_effective_matrix(eff, port_rate=_port_rate(eff, args.port_convention))
        omega0 = eff.omega

    files = []
    for pr in pairs:
        path = out / f"s{pr}.csv"
        write_curve_csv(path, grid.delta_values, values[pr])
        files.append(path)
    if args.all_ports:
        s = s_general_grid(m, omega0 - grid.delta_values)
        gridfile = out / "smatrix_grid.json"
        write_json(
            gridfile,
            {
                "delta": grid.delta_values.tolist(),
                "s_re": s.real.tolist(),
                "s_im": s.imag.tolist(),
                "meta": meta,
            },
        )
        files.append(gridfile)
    meta["pairs"] = list(pairs)
    if pole_deltas:
        meta["pole_deltas"] = pole_deltas
        print(f"warning: {len(pole_deltas)} pole rows flagged", file=sys.stderr)
    write_json(out / "smatrix.meta.json", meta)
    files.append(out / "smatrix.meta.json")
    print(f"wrote {', '.join(str(f) for f in files)}")
    return 0


def _cmd_ep_find(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    theta_range = (args.theta_min, args.theta_max)
    ratio_range = (args.ratio_min, args.ratio_max)
    if args.model == "ring":
        if args.order != 3:
            raise ValidationError("ring EP search is a third-order search; use --order 3")
        ring = _ring_from_args(args, cfg)
        defective = locate_ring_defective(ring, theta_range, ratio_range)
        published = locate_ring_coalescence(ring, theta_range, ratio_range)
        doc = {
            "model": "ring",
            "defective": [_ep_record_dict(r) for r in defective],
            "as_published_coalescence": [_ep_record_dict(r) for r in published],
            "version": __version__,
        }
        path = out / "eps.json"
        write_json(path, doc)
        print(
            f"{len(defective)} defective point(s), "
            f"{len(published)} as-published coalescence point(s); wrote {path}"
        )
        return 0
    if args.order != 2:
        raise ValidationError("two-mode EP search is a second-order search; use --order 2")
    eff = _effective_from_args(args, cfg)
    records = locate_eps(eff, theta_range, ratio_range)
    path = out / "eps.json"
    write_json(path, [_ep_record_dict(r) for r in records])
    print(f"{len(records)} exceptional point(s); wrote {path}")
    return 0


def _cmd_chirality(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    eff = _effective_from_args(args, cfg)
    if args.delta_range is not None:
        grid = _delta_grid(args, cfg, eff.kappa)
        alphas = np.empty(len(grid))
        for i, d in enumerate(grid.delta_values):
            a41 = abs(s41_closed(eff, d))
            a23 = abs(s23_closed(eff, d))
            denom = a41 + a23
            alphas[i] = (a41 - a23) / denom if denom > 0 else math.nan
        columns = {"delta": grid.delta_values, "alpha": alphas}
        stem = "chirality_delta"
    else:
        theta_range = args.theta_range or cfg.get("sweep", {}).get(
            "theta_range", (0.0, 4.0 * math.pi)
        )
        points = args.points if args.points is not None else cfg.get(
            "sweep", {}
        ).get("points", 401)
        thetas = np.linspace(theta_range[0], theta_range[1], int(points))
        alphas = np.empty(thetas.size)
        for i, th in enumerate(thetas):
            p = _eff_at(eff, th)
            a41 = abs(s41_closed(p, args.delta))
            a23 = abs(s23_closed(p, args.delta))
            denom = a41 + a23
            alphas[i] = (a41 - a23) / denom if denom > 0 else math.nan
        columns = {
            "theta": thetas,
            "theta_over_halfpi": thetas / HALF_PI,
            "alpha": alphas,
        }
        stem = "chirality"
    ds = Dataset(columns, _eff_meta(eff, extra={"delta": args.delta}))
    files = write_dataset(ds, out, stem)
    print(f"wrote {', '.join(str(f) for f in files)}")
    return 0


def _cmd_bandwidth(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    # the nonreciprocity bandwidth is defined at phase matching
    if (
        args.theta is None
        and args.theta_over_halfpi is None
        and "theta" not in cfg.get("model", {})
        and "theta_over_halfpi" not in cfg.get("model", {})
    ):
        args = argparse.Namespace(**{**vars(args), "theta_over_halfpi": 1.0})
    eff = _effective_from_args(args, cfg)
    try:
        gammas = [float(g) for g in args.gammas_over_g.split(",") if g.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad --gammas-over-g list: {exc}") from exc
    if not gammas:
        raise ValidationError("--gammas-over-g must name at least one value")
    if args.points is None:
        args = argparse.Namespace(**{**vars(args), "points": 2001})
    grid = _delta_grid(args, cfg, eff.kappa)
    columns: dict[str, np.ndarray] = {"delta": grid.delta_values}
    summary = {"gamma_over_g": gammas, "fwhm": [], "area": [], "version": __version__}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for g_over in gammas:
            curve = nonreciprocity_curve(eff, grid, gamma=g_over * eff.G)
            columns[f"d_gamma_{g_over:g}"] = np.real(curve.values)
            summary["fwhm"].append(fwhm(curve))
            summary["area"].append(curve_area(curve))
        eff_curve = nonreciprocity_curve(eff, grid)
    columns["d_effective"] = np.real(eff_curve.values)
    summary["effective_fwhm"] = fwhm(eff_curve)
    summary["effective_area"] = curve_area(eff_curve)
    ds = Dataset(columns, _eff_meta(eff, extra={"kind": "bandwidth"}))
    files = write_dataset(ds, out, "bandwidth")
    write_json(out / "bandwidth_summary.json", summary)
    print(f"wrote {', '.join(str(f) for f in files)}, {out / 'bandwidth_summary.json'}")
    return 0


def _cmd_figure(args: argparse.Namespace, cfg: dict) -> int:
    out = _out_dir(args, cfg)
    if not args.all and args.id is None:
        raise ValidationError(
            f"give a figure id or --all; valid ids: {', '.join(FIGURE_IDS)}"
        )
    ids = list(FIGURE_IDS) if args.all else [args.id]
    for fid in ids:
        ds = figure_dataset(fid, workers=args.workers)
        files = write_dataset(ds, out, fid)
        print(f"wrote {', '.join(str(f) for f in files)}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="revdiss",
        description=(
            "Eigenvalue topology and nonreciprocal scattering of dissipatively "
            "coupled cavity pairs and rings."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", default=None, help="TOML config file")
    parser.add_argument("--out", default=None,
                        help=f"output directory (default: ${OUTDIR_ENV} or '.')")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="parallel worker processes for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eigen", help="eigenvalue spectra and Riemann sheets")
    _add_model_flags(sp)
    sp.add_argument("--model", choices=("effective", "ring"), default="effective")
    sp.add_argument("--theta-range", dest="theta_range", type=float, nargs=2,
                    default=None)
    sp.add_argument("--theta-points", dest="theta_points", type=int, default=None)
    sp.add_argument("--ratio-range", dest="ratio_range", type=float, nargs=2,
                    default=None)
    sp.add_argument("--ratio-points", dest="ratio_points", type=int, default=None)
    sp.add_argument("--compare-full", dest="compare_full", action="store_true",
                    help="add numeric branches of the three-mode model")
    sp.add_argument("--closed-form", dest="closed_form", default="circulant",
                    help="ring spectra to emit: comma list of paper, circulant")
    sp.set_defaults(func=_cmd_eigen)

    sp = sub.add_parser("smatrix", help="transmission curves and S-matrix grids")
    _add_model_flags(sp)
    sp.add_argument("--model", choices=("effective", "full", "ring"),
                    default="effective")
    sp.add_argument("--pair", action="append", default=None,
                    help="port pair such as 21, 41, 14, 23 (repeatable)")
    sp.add_argument("--delta-range", dest="delta_range", type=float, nargs=2,
                    default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--all-ports", dest="all_ports", action="store_true",
                    help="also dump the full S-matrix grid as JSON")
    sp.set_defaults(func=_cmd_smatrix)

    sp = sub.add_parser("ep-find", help="locate exceptional points")
    _add_model_flags(sp)
    sp.add_argument("--model", choices=("effective", "ring"), default="effective")
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--theta-min", dest="theta_min", type=float, default=0.0)
    sp.add_argument("--theta-max", dest="theta_max", type=float,
                    default=4.0 * math.pi)
    sp.add_argument("--ratio-min", dest="ratio_min", type=float, default=0.5)
    sp.add_argument("--ratio-max", dest="ratio_max", type=float, default=1.5)
    sp.set_defaults(func=_cmd_ep_find)

    sp = sub.add_parser("chirality", help="chirality of the mirror transmission paths")
    _add_model_flags(sp)
    sp.add_argument("--delta", type=float, default=0.0,
                    help="probe detuning for the theta sweep")
    sp.add_argument("--theta-range", dest="theta_range", type=float, nargs=2,
                    default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--delta-range", dest="delta_range", type=float, nargs=2,
                    default=None, help="sweep delta at fixed theta instead")
    sp.set_defaults(func=_cmd_chirality)

    sp = sub.add_parser("bandwidth", help="nonreciprocity curves and their widths")
    _add_model_flags(sp)
    sp.add_argument("--gammas-over-g", dest="gammas_over_g",
                    default="0.1,0.5,1,5,10,50",
                    help="comma list of mechanical decay rates in units of G")
    sp.add_argument("--delta-range", dest="delta_range", type=float, nargs=2,
                    default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.set_defaults(func=_cmd_bandwidth)

    sp = sub.add_parser("figure", help="write a standard figure dataset")
    sp.add_argument("id", nargs="?", default=None,
                    help=f"one of: {', '.join(FIGURE_IDS)}")
    sp.add_argument("--all", action="store_true", help="write every figure dataset")
    sp.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
