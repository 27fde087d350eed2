"""Command line: phase tables, ICS curves, pole listings and self-checks.

    dressedzrp phases --preset x4 --k 0.25
    dressedzrp ics --preset silane --emin 0.1 --emax 12 --n 200 --log
    dressedzrp ics --preset silane-dressed --dress X:0.8,0.8
    dressedzrp poles --l 1 --alpha -8
    dressedzrp verify --preset yx4
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .core import (HARTREE_EV, Channel, DressingStep, Geometry, Site, ZRPError,
                   energy_to_wavenumber, wavenumber_to_energy)
from .estimator import ZRPCrossSection
from .gzrp import resonance_poles
from .oracle import det_scan
from .structures import QuadraticError, xn_phases, yxn_phases
from .presets import MODES, PRESETS, Target, dress, energy_grid, preset, target_from_geometry


class ConfigError(ZRPError):
    pass


def _float(tok: str, where: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ConfigError(f"{where}: cannot read {tok!r} as a number") from None


def parse_geometry_text(text: str, name: str = "<geometry>") -> Geometry:
    """Parse ``x y z alpha [b e]`` lines; ``#`` starts a comment, ``inf`` is allowed."""
    sites = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{name}:{lineno}"
        toks = line.split()
        if len(toks) not in (4, 6):
            raise ConfigError(f"{where}: expected 'x y z alpha [b e]', got {len(toks)} fields")
        x, y, z, alpha = (_float(t, where) for t in toks[:4])
        pos = (x, y, z)
        if not all(math.isfinite(c) for c in pos):
            raise ConfigError(f"{where}: coordinates must be finite")
        if pos in seen:
            raise ConfigError(f"{where}: duplicate site, same position as line {seen[pos]}")
        seen[pos] = lineno
        step = None
        if len(toks) == 6:
            b, e = _float(toks[4], where), _float(toks[5], where)
            try:
                step = DressingStep(b, e)
            except ZRPError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        try:
            sites.append(Site(pos, alpha, step))
        except ZRPError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    if not sites:
        raise ConfigError(f"{name}: no sites")
    try:
        return Geometry(tuple(sites))
    except ZRPError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def parse_geometry_file(path: str) -> Geometry:
    with open(path, encoding="utf-8") as fh:
        return parse_geometry_text(fh.read(), path)


def parse_dress(text: str):
    """``SITE:B[,E]`` -> (site, b, e or None)."""
    site, sep, rest = text.partition(":")
    if not sep or not site or not rest:
        raise ConfigError(f"--dress {text!r}: expected SITE:B[,E]")
    parts = rest.split(",")
    if len(parts) > 2:
        raise ConfigError(f"--dress {text!r}: expected SITE:B[,E]")
    b = _float(parts[0], f"--dress {text}")
    e = _float(parts[1], f"--dress {text}") if len(parts) == 2 else None
    return site, b, e


def parse_set(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set {item!r}: expected KEY=VALUE")
        out[key] = int(val) if key == "n" else _float(val, f"--set {key}")
    return out


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    geometry: str | None = None
    params: dict = field(default_factory=dict)
    dress: list = field(default_factory=list)
    mode: str = "effective-alpha"
    unit: str = "ev"
    energies: list = field(default_factory=list)  # Hartree
    ks: list = field(default_factory=list)

    def echo(self) -> dict:
        d = {"command": self.command, "unit": self.unit, "mode": self.mode}
        if self.preset:
            d["preset"] = self.preset
            d["params"] = self.params
        if self.geometry:
            d["geometry"] = self.geometry
        if self.dress:
            d["dress"] = [{"site": s, "b": b, "e": e} for s, b, e in self.dress]
        return d


def _grid(args, unit):
    if args.k:
        ks = [float(k) for k in args.k]
        if any(not k > 0 for k in ks):
            raise ConfigError("--k values must be positive")
        return [wavenumber_to_energy(k) for k in ks], ks
    scale = 1.0 / HARTREE_EV if unit == "ev" else 1.0
    E = energy_grid(args.emin, args.emax, args.n, args.log) * scale
    return list(E), [energy_to_wavenumber(e) for e in E]


def build_config(args) -> RunConfig:
    cfg = RunConfig(args.command, unit=args.unit, mode=args.mode)
    if args.preset and args.geometry:
        raise ConfigError("give either --preset or --geometry, not both")
    if not (args.preset or args.geometry):
        raise ConfigError("one of --preset or --geometry is required")
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        cfg.preset = args.preset
        params = {k: v for k, v in PRESETS[args.preset].items() if k not in ("structure", "needs_dressing")}
        params.update(parse_set(args.set))
        cfg.params = params
    else:
        if args.set:
            raise ConfigError("--set only applies to presets")
        cfg.geometry = args.geometry
    cfg.dress = [parse_dress(s) for s in args.dress or ()]
    cfg.energies, cfg.ks = _grid(args, args.unit)
    return cfg


def build_target(cfg: RunConfig) -> Target:
    if cfg.preset:
        t = preset(cfg.preset, **cfg.params)
    else:
        t = target_from_geometry(parse_geometry_file(cfg.geometry))
    for site, b, e in cfg.dress:
        t = dress(t, site, b, e, cfg.mode)
    return t


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def emit(columns, rows, config: dict, fmt: str, out=None) -> str:
    """Serialize a table; CSV uses round-trip float formatting."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    elif fmt == "json":
        clean = [[v if isinstance(v, str) else float(v) for v in r] for r in rows]
        text = json.dumps({"config": config, "columns": list(columns), "rows": clean}, indent=1) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _axis(cfg, E):
    return E * HARTREE_EV if cfg.unit == "ev" else E


def _e_col(cfg):
    return "E_eV" if cfg.unit == "ev" else "E_Ha"


def _eta_gap(a, b) -> float:
    """Distance of two tan(eta) values measured as eta modulo pi."""
    if np.isnan(a) or np.isnan(b):
        return math.nan
    ea = math.pi / 2 if math.isinf(a) else math.atan(a)
    eb = math.pi / 2 if math.isinf(b) else math.atan(b)
    d = abs(ea - eb) % math.pi
    return min(d, math.pi - d)


def _closed_columns(target: Target, k: float):
    """Distinct closed-form values with multiplicities, or ``None``."""
    p = target.params
    if target.dressed or target.structure not in ("xn", "yxn"):
        return None
    if target.structure == "xn":
        r = xn_phases(p["n"], p["R"], p["alpha"], k)
        return [r.tan_eta_1, r.tan_eta_deg], [1, p["n"] - 1]
    try:
        r = yxn_phases(p["n"], p["R"], p["D"], p["alpha"], p["beta"], k)
        pair = list(r.tan_eta_12)
        deg = r.tan_eta_deg
    except QuadraticError:
        pair = [math.nan, math.nan]
        deg = xn_phases(p["n"], p["R"], p["alpha"], k).tan_eta_deg
    return pair + [deg], [1, 1, p["n"] - 1]


def phase_table(cfg: RunConfig, target: Target):
    """Rows ``(E, k, tan_eta..., multiplicities)``.

    X_n and YX_n presets use the closed form with one column per distinct
    value (symmetric, paired, degenerate); other targets list every channel
    ascending with the multiplicity pattern as ``1+3``.
    """
    probe = _closed_columns(target, cfg.ks[0])
    rows = []
    if probe is not None:
        names = ["tan_eta_sym", "tan_eta_deg"] if target.structure == "xn" else \
            ["tan_eta_a", "tan_eta_b", "tan_eta_deg"]
        cols = [_e_col(cfg), "k_au"] + names + [f"mult_{n[8:]}" for n in names]
        for E, k in zip(cfg.energies, cfg.ks):
            vals, mult = _closed_columns(target, k)
            rows.append([_axis(cfg, E), k, *vals, *mult])
        return cols, rows
    cols = [_e_col(cfg), "k_au"] + [f"tan_eta_{i + 1}" for i in range(target.n)] + ["multiplicities"]
    for E, k in zip(cfg.energies, cfg.ks):
        if target.structure == "single" and not target.dressed:
            tans, mult = target.tan_etas(k), (1,)
        else:
            sol = target.solve(k)
            tans, mult = target.tan_etas(k, fast=False), sol.multiplicities
        rows.append([_axis(cfg, E), k, *tans, "+".join(map(str, mult))])
    return cols, rows


def closed_form_deviation(cfg: RunConfig, target: Target) -> float:
    """Max eta-mod-pi gap between the fast path and the generalized solver."""
    worst = 0.0
    for k in cfg.ks:
        a = target.tan_etas(k, fast=True)
        b = target.tan_etas(k, fast=False)
        gaps = [_eta_gap(x, y) for x, y in zip(a, b)]
        gaps = [g for g in gaps if not math.isnan(g)]
        if gaps:
            worst = max(worst, max(gaps))
    return worst


def ics_table(cfg: RunConfig, target: Target):
    cols = [_e_col(cfg), "k_au", "sigma_au"] + [f"sigma_{i + 1}" for i in range(target.n)]
    rows = []
    for E, k in zip(cfg.energies, cfg.ks):
        rows.append([_axis(cfg, E), k, target.ics(k), *target.channel_sections(k)])
    return cols, rows


def pole_table(l: int, alpha: float):
    ch = Channel(l, alpha)
    ps = resonance_poles(ch)
    cols = ["kind", "k_re", "k_im", "E_re_Ha", "E_im_Ha", "E_re_eV", "E_im_eV", "binding_Ha", "binding_eV"]
    rows = []
    for p in ps.all:
        E = p.energy
        bind = p.binding_energy if p.kind != "resonance" else math.nan
        rows.append([p.kind, p.k.real, p.k.imag, E.real, E.imag, E.real * HARTREE_EV,
                     E.imag * HARTREE_EV, bind, bind * HARTREE_EV])
    return cols, rows


def _read_reference(path: str):
    E, y = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.replace(",", " ").split()
            try:
                E.append(float(toks[0]))
                y.append(float(toks[1]))
            except (ValueError, IndexError):
                if not E:  # header row
                    continue
                raise ConfigError(f"{path}:{lineno}: expected 'E sigma'") from None
    if len(E) < 2:
        raise ConfigError(f"{path}: reference needs at least two points")
    return np.array(E), np.array(y)


def cmd_phases(args) -> int:
    cfg = build_config(args)
    target = build_target(cfg)
    cols, rows = phase_table(cfg, target)
    emit(cols, rows, cfg.echo(), args.format, args.out)
    if args.verify:
        dev = closed_form_deviation(cfg, target)
        print(f"max |closed-form - solver| (eta mod pi): {dev:.3e}", file=sys.stderr)
    return 0


def cmd_ics(args) -> int:
    cfg = build_config(args)
    needs = cfg.preset and PRESETS[cfg.preset].get("needs_dressing")
    if args.reference:
        if not cfg.preset or cfg.dress:
            raise ConfigError("--reference fits b for a preset and excludes --dress")
        E_ref, y_ref = _read_reference(args.reference)
        est = ZRPCrossSection(preset=cfg.preset, mode=cfg.mode, dress_sites=args.dress_sites,
                              energy_unit="eV" if cfg.unit == "ev" else "Ha",
                              **{k: v for k, v in cfg.params.items() if k in ("alpha", "beta", "R", "D")})
        est.fit(E_ref, y_ref)
        cfg.dress = [(args.dress_sites, est.b_, None)]
        print(f"fitted b = {est.b_!r}", file=sys.stderr)
    elif needs and not cfg.dress:
        raise ConfigError(f"preset {cfg.preset!r} needs --dress SITE:B[,E] or --reference")
    target = build_target(cfg)
    cols, rows = ics_table(cfg, target)
    emit(cols, rows, cfg.echo(), args.format, args.out)
    return 0


def cmd_poles(args) -> int:
    alpha = args.alpha
    if alpha is None:
        if args.preset != "single":
            raise ConfigError("poles needs --alpha (or --preset single)")
        alpha = PRESETS["single"]["alpha"]
    cols, rows = pole_table(args.l, alpha)
    emit(cols, rows, {"command": "poles", "l": args.l, "alpha": alpha}, args.format, args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = build_config(args)
    target = build_target(cfg)
    lines = []
    ok = True
    if target.closed_form(cfg.ks[0]) is not None or target.structure == "single":
        dev = closed_form_deviation(cfg, target)
        ok &= dev < 1e-10
        lines.append(f"max |closed-form - solver| (eta mod pi): {dev:.3e}")
    worst, count_bad = 0.0, 0
    for k in cfg.ks:
        Ms, Mc = target.system(k)
        a = [x for x in target.tan_etas(k, fast=False) if not np.isnan(x)]
        b = det_scan(Ms, Mc)
        if len(a) != len(b):
            count_bad += 1
            continue
        for x, y in zip(a, b):
            worst = max(worst, _eta_gap(x, y))
    ok &= count_bad == 0 and worst < 1e-8
    lines.append(f"max |det_scan - solver| (eta mod pi): {worst:.3e}; root-count mismatches: {count_bad}")
    lines.append("OK" if ok else "FAILED")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if ok else 1


def _add_target_args(p):
    src = p.add_argument_group("target")
    src.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")
    src.add_argument("--geometry", help="site file with lines 'x y z alpha [b e]' (a0, a0^-1)")
    src.add_argument("--set", action="append", metavar="KEY=VAL",
                     help="override a preset parameter (alpha, beta, R, D, n)")
    src.add_argument("--dress", action="append", metavar="SITE:B[,E]",
                     help="dress a site (label, 1-based index, X or all); repeatable")
    src.add_argument("--mode", choices=MODES, default="effective-alpha",
                     help="default e for --dress without E: -b (effective-alpha) or inf (dressed-kernels)")
    grid = p.add_argument_group("grid")
    grid.add_argument("--emin", type=float, default=0.1)
    grid.add_argument("--emax", type=float, default=12.0)
    grid.add_argument("--n", type=int, default=100)
    grid.add_argument("--log", action="store_true", help="logarithmic energy spacing")
    grid.add_argument("--unit", choices=("ev", "ha"), default="ev", help="energy unit for grid and output")
    grid.add_argument("--k", nargs="+", type=float, help="explicit wavenumbers (a0^-1) instead of an energy grid")


def _add_output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dressedzrp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phases", help="tan(eta) of every partial wave on a grid")
    _add_target_args(p)
    _add_output_args(p)
    p.add_argument("--verify", action="store_true", help="also run the generalized solver and report the gap")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("ics", help="orientation-averaged integral cross section curve")
    _add_target_args(p)
    _add_output_args(p)
    p.add_argument("--reference", help="CSV/whitespace file 'E sigma' to fit the dressing b against")
    p.add_argument("--dress-sites", default="X", help="sites dressed when fitting b (default X)")
    p.set_defaults(func=cmd_ics)

    p = sub.add_parser("poles", help="S-matrix poles of a single GZRP channel")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--preset", help="'single' takes alpha from the preset")
    _add_output_args(p)
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser("verify", help="cross-check closed forms, the solver and det_scan")
    _add_target_args(p)
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ZRPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
