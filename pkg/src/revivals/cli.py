"""Config-driven command line: design, verify, evolve, carpet, levels.

A job is described by a JSON config; flags can override the tolerance, the
grid and the output directory.  Outputs are deterministic for a fixed config
and package version: no timestamps, floats written with shortest round-trip
precision, meta files with sorted keys.  Exit codes: 0 success, 2 a
verification ran and failed its tolerance, 1 anything else went wrong.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .eigensolve import discretize, eigenstates, verify_design
from .evolve import (
    autocorrelation,
    autocorrelation_to_csv,
    cosine_packet,
    decompose,
    gaussian_packet,
    project_to_bound,
    propagate_spectral,
    quantum_carpet,
    carpet_to_pgm,
)
from .grids import (
    Grid,
    SampledPotential,
    Wavefunction,
    constant_potential,
    harmonic_potential,
    metadata_to_json,
    suggest_grid_constant_base,
    suggest_grid_harmonic_base,
)
from .intertwine import design_potential
from .spectra import (
    LevelSet,
    alternating_gap_levels,
    biperiodic_levels,
    fibonacci_levels,
    harmonic_levels,
    prime_levels,
    reverse_biperiodic_levels,
    revival_params,
)

GENERATED_BY = f"revivals {__version__}"

FAMILIES = (
    "harmonic",
    "biperiodic",
    "reverse_biperiodic",
    "alternating",
    "primes",
    "fibonacci",
    "custom",
)

HARMONIC_GROUND = Fraction(1, 2)
AUTO_BASE_MARGIN = 3.0


class ConfigError(ValueError):
    pass


def _require_keys(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {context}")


def _rational(value: Any, context: str) -> Fraction:
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"{context}: bad rational {value!r}") from err
    raise ConfigError(f"{context}: expected int or 'p/q' string, got {value!r}")


@dataclass(frozen=True)
class JobConfig:
    """Normalized job description; `data` holds the echo-ready dict."""

    data: dict

    ALLOWED = {
        "family",
        "count",
        "harmonic_count",
        "gaps",
        "ground",
        "levels",
        "base",
        "grid",
        "tolerance",
        "evolution",
        "out_dir",
    }
    ALLOWED_GRID = {"half_width", "n_points"}
    ALLOWED_EVOLUTION = {"packet", "basis_size", "t_max", "rows", "energies"}
    ALLOWED_PACKET = {"type", "components", "window"}
    ALLOWED_COMPONENT = {"center", "momentum", "width", "amplitude"}

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        _require_keys(raw, cls.ALLOWED, "config")
        data: dict = {}
        family = raw.get("family")
        if family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {family!r}")
        data["family"] = family

        if family == "custom":
            levels = raw.get("levels")
            if not isinstance(levels, list) or not levels:
                raise ConfigError("custom family needs a nonempty `levels` list")
            data["levels"] = [str(_rational(e, "levels")) for e in levels]
        elif "levels" in raw:
            raise ConfigError("`levels` is only valid for the custom family")

        if family != "custom":
            count = raw.get("count")
            if not isinstance(count, int) or count < 1:
                raise ConfigError("`count` must be a positive integer")
            data["count"] = count
        elif "count" in raw:
            raise ConfigError("`count` is not valid for the custom family")

        if family in ("biperiodic", "reverse_biperiodic", "custom"):
            harmonic_count = raw.get("harmonic_count", 10)
            if not isinstance(harmonic_count, int) or harmonic_count < 1:
                raise ConfigError("`harmonic_count` must be a positive integer")
            data["harmonic_count"] = harmonic_count
        elif "harmonic_count" in raw:
            raise ConfigError(f"`harmonic_count` is not valid for family {family}")

        if family == "alternating":
            gaps = raw.get("gaps")
            if not isinstance(gaps, list) or len(gaps) != 2:
                raise ConfigError("alternating family needs `gaps: [gap1, gap2]`")
            g1, g2 = (_rational(g, "gaps") for g in gaps)
            if g1 <= 0 or g2 <= 0:
                raise ConfigError("gaps must be positive")
            data["gaps"] = [str(g1), str(g2)]
            data["ground"] = str(_rational(raw.get("ground", 0), "ground"))
        else:
            for key in ("gaps", "ground"):
                if key in raw:
                    raise ConfigError(f"`{key}` is only valid for the alternating family")

        base = raw.get("base", _default_base(family))
        if base != "harmonic" and base != "constant:auto":
            if not (isinstance(base, str) and base.startswith("constant:")):
                raise ConfigError(
                    "base must be 'harmonic', 'constant:auto' or 'constant:<rational>'"
                )
            _rational(base.split(":", 1)[1], "base")
        data["base"] = base

        if "grid" in raw:
            grid = raw["grid"]
            if not isinstance(grid, dict):
                raise ConfigError("`grid` must be an object")
            _require_keys(grid, cls.ALLOWED_GRID, "grid")
            out: dict = {}
            if "half_width" in grid:
                out["half_width"] = float(grid["half_width"])
            if "n_points" in grid:
                n = grid["n_points"]
                if not isinstance(n, int) or n < 3 or n % 2 == 0:
                    raise ConfigError("grid.n_points must be an odd integer >= 3")
                out["n_points"] = n
            data["grid"] = out

        tolerance = raw.get("tolerance", 1e-4)
        if not isinstance(tolerance, (int, float)) or tolerance <= 0:
            raise ConfigError("tolerance must be a positive number")
        data["tolerance"] = float(tolerance)

        data["evolution"] = cls._parse_evolution(raw.get("evolution", {}))
        data["out_dir"] = str(raw.get("out_dir", "out"))
        return cls(data=data)

    @classmethod
    def _parse_evolution(cls, raw: Any) -> dict:
        if not isinstance(raw, dict):
            raise ConfigError("`evolution` must be an object")
        _require_keys(raw, cls.ALLOWED_EVOLUTION, "evolution")
        evo: dict = {}
        packet = raw.get("packet", {"type": "gaussians", "components": [
            {"center": 0.0, "momentum": 0.0, "width": 1.0, "amplitude": 1.0}
        ]})
        if not isinstance(packet, dict):
            raise ConfigError("evolution.packet must be an object")
        _require_keys(packet, cls.ALLOWED_PACKET, "evolution.packet")
        ptype = packet.get("type")
        if ptype == "gaussians":
            components = packet.get("components")
            if not isinstance(components, list) or not components:
                raise ConfigError("gaussians packet needs a nonempty `components` list")
            comps = []
            for comp in components:
                if not isinstance(comp, dict):
                    raise ConfigError("each gaussian component must be an object")
                _require_keys(comp, cls.ALLOWED_COMPONENT, "packet component")
                parsed = {
                    "center": float(comp.get("center", 0.0)),
                    "momentum": float(comp.get("momentum", 0.0)),
                    "width": float(comp.get("width", 1.0)),
                    "amplitude": float(comp.get("amplitude", 1.0)),
                }
                if parsed["width"] <= 0:
                    raise ConfigError("gaussian width must be positive")
                comps.append(parsed)
            evo["packet"] = {"type": "gaussians", "components": comps}
        elif ptype == "cosine":
            window = packet.get("window")
            if window is not None:
                if not (isinstance(window, list) and len(window) == 2):
                    raise ConfigError("cosine packet window must be [lo, hi]")
                lo, hi = float(window[0]), float(window[1])
                if not lo < hi:
                    raise ConfigError("cosine window must satisfy lo < hi")
                evo["packet"] = {"type": "cosine", "window": [lo, hi]}
            else:
                evo["packet"] = {"type": "cosine"}
        else:
            raise ConfigError("packet type must be 'gaussians' or 'cosine'")

        if "basis_size" in raw:
            basis_size = raw["basis_size"]
            if not isinstance(basis_size, int) or basis_size < 1:
                raise ConfigError("evolution.basis_size must be a positive integer")
            evo["basis_size"] = basis_size

        t_max = raw.get("t_max", "Nrev:1")
        if isinstance(t_max, str):
            if not t_max.startswith("Nrev:"):
                raise ConfigError("t_max string form must be 'Nrev:<float>'")
            float(t_max.split(":", 1)[1])
        else:
            t_max = float(t_max)
        evo["t_max"] = t_max

        rows = raw.get("rows", 512)
        if not isinstance(rows, int) or rows < 2:
            raise ConfigError("evolution.rows must be an integer >= 2")
        evo["rows"] = rows

        energies = raw.get("energies", "computed")
        if energies not in ("computed", "designed"):
            raise ConfigError("evolution.energies must be 'computed' or 'designed'")
        evo["energies"] = energies
        return evo

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "JobConfig":
        return cls.from_dict(json.loads(text))


def _default_base(family: str) -> str:
    if family in ("harmonic", "biperiodic", "reverse_biperiodic"):
        return "harmonic"
    return "constant:auto"


@dataclass(frozen=True)
class JobPlan:
    """Everything a pipeline run needs, resolved from a JobConfig."""

    config: JobConfig
    target: LevelSet
    add_levels: tuple[Fraction, ...]  # descending
    base_kind: str  # "harmonic" | "constant"
    base_constant: Fraction | None
    grid: Grid
    verify_levels: tuple[Fraction, ...]


def _family_levels(cfg: dict) -> tuple[LevelSet, Fraction | None]:
    family = cfg["family"]
    if family == "harmonic":
        return harmonic_levels(cfg["count"]), None
    if family == "biperiodic":
        return biperiodic_levels(cfg["count"], cfg["harmonic_count"]), None
    if family == "reverse_biperiodic":
        return reverse_biperiodic_levels(cfg["count"], cfg["harmonic_count"]), None
    if family == "alternating":
        g1, g2 = (Fraction(g) for g in cfg["gaps"])
        return alternating_gap_levels(g1, g2, cfg["count"], Fraction(cfg["ground"])), None
    if family == "primes":
        return prime_levels(cfg["count"])
    if family == "fibonacci":
        return fibonacci_levels(cfg["count"])
    levels = LevelSet(tuple(Fraction(e) for e in cfg["levels"]), origin="custom")
    return levels, None


def plan_job(
    config: JobConfig,
    half_width: float | None = None,
    n_points: int | None = None,
) -> JobPlan:
    cfg = config.data
    family = cfg["family"]
    levels, suggested_base = _family_levels(cfg)
    base_spec = cfg["base"]

    if base_spec == "harmonic":
        below = tuple(e for e in levels if e < HARMONIC_GROUND)
        if family == "custom":
            if len(below) != len(levels):
                raise ConfigError(
                    "custom levels above the harmonic ground 1/2 cannot be added "
                    "below a harmonic base; use a constant base"
                )
            ladder = harmonic_levels(cfg.get("harmonic_count", 10))
            target = LevelSet(below + ladder.levels, origin=f"custom+{ladder.origin}")
        else:
            # family generators already carry their harmonic section
            target = levels
        add_desc = tuple(sorted(below, reverse=True))
        kept_top = float(target.levels[-1])
        grid = suggest_grid_harmonic_base(add_desc, kept_top, cfg["tolerance"])
        plan = JobPlan(
            config=config,
            target=target,
            add_levels=add_desc,
            base_kind="harmonic",
            base_constant=None,
            grid=grid,
            verify_levels=target.levels,
        )
    else:
        token = base_spec.split(":", 1)[1]
        if token == "auto":
            if suggested_base is not None:
                base_constant = suggested_base
            else:
                base_constant = Fraction(levels[-1]) + Fraction(int(AUTO_BASE_MARGIN))
        else:
            base_constant = Fraction(token)
        if levels[-1] >= base_constant:
            raise ConfigError(
                f"base constant {base_constant} must lie above the top level {levels[-1]}"
            )
        grid = suggest_grid_constant_base(levels, float(base_constant), cfg["tolerance"])
        plan = JobPlan(
            config=config,
            target=levels,
            add_levels=tuple(sorted(levels, reverse=True)),
            base_kind="constant",
            base_constant=base_constant,
            grid=grid,
            verify_levels=levels.levels,
        )

    grid_cfg = dict(cfg.get("grid", {}))
    if half_width is not None:
        grid_cfg["half_width"] = half_width
    if n_points is not None:
        grid_cfg["n_points"] = n_points
    if grid_cfg:
        grid = Grid(
            half_width=grid_cfg.get("half_width", plan.grid.half_width),
            n_points=grid_cfg.get("n_points", plan.grid.n_points),
        )
        plan = replace(plan, grid=grid)
    return plan


def run_design(plan: JobPlan) -> SampledPotential:
    if plan.base_kind == "harmonic":
        base = harmonic_potential(plan.grid)
    else:
        base = constant_potential(plan.grid, float(plan.base_constant))
    return design_potential(base, plan.add_levels)


def _meta(plan: JobPlan, potential: SampledPotential | None = None) -> dict:
    rp = revival_params(plan.target)
    meta = {
        "config": plan.config.data,
        "generated_by": GENERATED_BY,
        "grid": {"half_width": plan.grid.half_width, "n_points": plan.grid.n_points},
        "base": plan.base_kind
        if plan.base_constant is None
        else f"{plan.base_kind}:{plan.base_constant}",
        "target_levels": [f"{e.numerator}/{e.denominator}" for e in plan.target],
        "revival": {
            "spacing": str(rp.spacing),
            "offset": str(rp.offset),
            "period_over_2pi": str(rp.period_factor),
        },
    }
    if potential is not None:
        meta["injected_levels"] = [
            f"{e.numerator}/{e.denominator}" for e in potential.injected_levels
        ]
    return meta


def _build_packet(plan: JobPlan, grid: Grid) -> Wavefunction:
    packet = plan.config.data["evolution"]["packet"]
    if packet["type"] == "cosine":
        window = packet.get("window")
        return cosine_packet(grid, tuple(window) if window else None)
    total = None
    for comp in packet["components"]:
        part = comp["amplitude"] * gaussian_packet(
            grid, comp["center"], comp["momentum"], comp["width"]
        )
        total = part if total is None else total + part
    return total.normalized()


def _resolve_t_max(plan: JobPlan) -> float:
    t_max = plan.config.data["evolution"]["t_max"]
    if isinstance(t_max, str):
        factor = float(t_max.split(":", 1)[1])
        return factor * revival_params(plan.target).revival_time
    return float(t_max)


def _evolution_pieces(plan: JobPlan, potential: SampledPotential):
    evo = plan.config.data["evolution"]
    basis_size = evo.get("basis_size", len(plan.verify_levels))
    pairs = eigenstates(discretize(potential), basis_size)
    packet = _build_packet(plan, potential.grid)
    projected = project_to_bound(decompose(packet, pairs))
    decomposition = decompose(projected, pairs)
    if evo["energies"] == "designed":
        if basis_size > len(plan.verify_levels):
            raise ConfigError("designed energies need basis_size <= number of target levels")
        energies = [float(e) for e in plan.verify_levels[:basis_size]]
    else:
        energies = None
    return decomposition, energies


def _write(path: Path, content: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(content, bytes):
        path.write_bytes(content)
    else:
        path.write_text(content)


def cmd_design(plan: JobPlan, out_dir: Path) -> int:
    potential = run_design(plan)
    _write(out_dir / "potential.csv", potential.to_csv())
    _write(out_dir / "levels.txt", plan.target.to_text())
    _write(out_dir / "meta.json", metadata_to_json(_meta(plan, potential)))
    return 0


def cmd_verify(plan: JobPlan, out_dir: Path, tolerance: float) -> int:
    potential = run_design(plan)
    report = verify_design(potential, plan.verify_levels, tolerance)
    _write(out_dir / "report.csv", report.to_csv())
    _write(out_dir / "meta.json", metadata_to_json(_meta(plan, potential)))
    return 0 if report.passed else 2


def cmd_verify_files(potential_path: Path, levels_path: Path, out_dir: Path, tolerance: float) -> int:
    potential = SampledPotential.from_csv(potential_path.read_text())
    levels = LevelSet.from_text(levels_path.read_text())
    report = verify_design(potential, levels.levels, tolerance)
    _write(out_dir / "report.csv", report.to_csv())
    return 0 if report.passed else 2


def cmd_evolve(plan: JobPlan, out_dir: Path) -> int:
    potential = run_design(plan)
    decomposition, energies = _evolution_pieces(plan, potential)
    t_max = _resolve_t_max(plan)
    rows = plan.config.data["evolution"]["rows"]
    psi = propagate_spectral(decomposition, t_max, energies=energies)
    times = np.linspace(0.0, t_max, rows)
    series = autocorrelation(decomposition, times, energies=energies)
    lines = ["x,re,im,abs"]
    x = potential.grid.x
    for k in range(potential.grid.n_points):
        a = psi.amplitudes[k]
        lines.append(f"{float(x[k])!r},{float(a.real)!r},{float(a.imag)!r},{float(abs(a))!r}")
    _write(out_dir / "psi.csv", "\n".join(lines) + "\n")
    _write(out_dir / "autocorr.csv", autocorrelation_to_csv(times, series))
    meta = _meta(plan, potential)
    meta["evolution_summary"] = {
        "t_max": t_max,
        "residual_norm": decomposition.residual_norm,
        "abs_autocorrelation_final": float(abs(series[-1])),
    }
    _write(out_dir / "meta.json", metadata_to_json(meta))
    return 0


def cmd_carpet(plan: JobPlan, out_dir: Path) -> int:
    potential = run_design(plan)
    decomposition, energies = _evolution_pieces(plan, potential)
    t_max = _resolve_t_max(plan)
    rows = plan.config.data["evolution"]["rows"]
    carpet = quantum_carpet(decomposition, t_max, n_times=rows, energies=energies)
    _write(out_dir / "carpet.pgm", carpet_to_pgm(carpet))
    _write(out_dir / "autocorr.csv", autocorrelation_to_csv(carpet.times, carpet.autocorrelation))
    meta = _meta(plan, potential)
    meta["carpet_summary"] = {
        "t_max": t_max,
        "rows": rows,
        "residual_norm": carpet.residual_norm,
        "abs_autocorrelation_final": float(abs(carpet.autocorrelation[-1])),
    }
    _write(out_dir / "meta.json", metadata_to_json(meta))
    return 0


def cmd_levels(plan: JobPlan, out_dir: Path | None) -> int:
    rp = revival_params(plan.target)
    sys.stdout.write(plan.target.to_text())
    sys.stdout.write(
        f"# spacing={rp.spacing} offset={rp.offset} "
        f"T_rev={rp.period_factor}*2pi = {rp.revival_time!r}\n"
    )
    if plan.base_constant is not None:
        sys.stdout.write(f"# base_constant={plan.base_constant}\n")
    if out_dir is not None:
        _write(out_dir / "levels.txt", plan.target.to_text())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revivals",
        description="Design 1D potentials with prescribed spectra and demonstrate revivals.",
    )
    parser.add_argument("--version", action="version", version=GENERATED_BY)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument("--config", type=Path, required=config_required, help="JSON job config")
        p.add_argument("--tolerance", type=float, help="verification tolerance override")
        p.add_argument("--grid-points", type=int, help="override grid node count (odd)")
        p.add_argument("--half-width", type=float, help="override grid half width")
        p.add_argument("--out", type=Path, help="output directory override")

    common(sub.add_parser("design", help="design the potential and write artifacts"))
    verify = sub.add_parser("verify", help="diagonalize and compare against target levels")
    common(verify, config_required=False)
    verify.add_argument("--potential", type=Path, help="potential.csv to verify directly")
    verify.add_argument("--levels", type=Path, help="levels.txt with the target spectrum")
    common(sub.add_parser("evolve", help="propagate the configured packet to t_max"))
    common(sub.add_parser("carpet", help="rasterize |psi(x,t)| and the autocorrelation"))
    levels = sub.add_parser("levels", help="print a family's level set and revival params")
    common(levels)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify" and args.potential is not None:
            if args.levels is None:
                raise ConfigError("verify --potential also needs --levels")
            out_dir = args.out if args.out is not None else Path("out")
            tolerance = args.tolerance if args.tolerance is not None else 1e-4
            return cmd_verify_files(args.potential, args.levels, out_dir, tolerance)

        if args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        config = JobConfig.from_json(args.config.read_text())
        if args.tolerance is not None:
            raw = dict(config.data)
            raw["tolerance"] = args.tolerance
            config = JobConfig.from_dict(raw)
        plan = plan_job(config, half_width=args.half_width, n_points=args.grid_points)
        out_dir = args.out if args.out is not None else Path(config.data["out_dir"])

        if args.command == "design":
            return cmd_design(plan, out_dir)
        if args.command == "verify":
            return cmd_verify(plan, out_dir, config.data["tolerance"])
        if args.command == "evolve":
            return cmd_evolve(plan, out_dir)
        if args.command == "carpet":
            return cmd_carpet(plan, out_dir)
        if args.command == "levels":
            return cmd_levels(plan, args.out)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # numeric/pipeline failures
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
