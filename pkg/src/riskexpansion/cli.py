"""Command line entry point: ``riskexpansion <command> [options]``.

Commands
--------
validate  load an instance and list every violation
build     assemble the LP and print its size (optionally write it with --lp-out)
solve     solve at each --omega and print a summary (CSV tables with --out)
sweep     run the omega grid over one or more --flex settings and write CSV tables
export    write the LP interchange file to --lp-out
synth     write a synthetic instance document to --out
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import OMEGA_GRID, RiskSettings
from .instance import InstanceError
from .io import load_instance, save_instance
from .model import build
from .report import sweep
from .solve import SolverOptions, write_interchange
from .synthetic import hedging_instance, interconnect_instance, make_synthetic
from .validation import check_alpha, check_flex, check_omegas


COMMANDS = ("validate", "build", "solve", "sweep", "export", "synth")
BUNDLED = ("toy", "hedging", "interconnect")


def bundled_path(name: str) -> Path:
    """Path of a bundled instance document (toy, hedging or interconnect)."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled instance {name!r}; choose from {BUNDLED}")
    return Path(str(resources.files("riskexpansion") / "data" / f"{name}.json"))


def resolve_instance(ref: str) -> Path:
    path = Path(ref)
    if not path.exists() and ref in BUNDLED:
        return bundled_path(ref)
    return path


@dataclass(frozen=True)
class RunConfig:
    command: str
    instance: Optional[str] = None
    omegas: tuple = OMEGA_GRID
    alpha: float = 0.9
    flex: tuple = ("dr-none",)
    solver: str = "simplex"
    out: Optional[str] = None
    seed: int = 1
    hours_weight: Optional[float] = None
    lp_out: Optional[str] = None
    synth: dict = field(default_factory=dict)  # size knobs for the synth command

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        object.__setattr__(self, "omegas", check_omegas(self.omegas))
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "flex", tuple(self.flex))
        for name in self.flex:
            check_flex(name)
        if self.solver not in ("simplex", "highs"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.hours_weight is not None and not self.hours_weight > 0:
            raise ValueError("--hours-weight must be positive")
        if self.command != "synth" and self.instance is None:
            raise ValueError(f"{self.command} needs --instance")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["omegas"] = list(self.omegas)
        d["flex"] = list(self.flex)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["omegas"] = tuple(d.get("omegas", OMEGA_GRID))
        d["flex"] = tuple(d.get("flex", ("dr-none",)))
        return cls(**d)


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="riskexpansion", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", help="instance JSON path, or a bundled name: " + ", ".join(BUNDLED))
    p.add_argument("--omega", type=float, action="append",
                   help="CVaR weight; repeat for several (default: the six-point grid)")
    p.add_argument("--alpha", type=float, default=0.9, help="CVaR tail level (default 0.9)")
    p.add_argument("--flex", action="append", help="named flexibility setting; repeatable")
    p.add_argument("--solver", choices=("simplex", "highs"), default="simplex")
    p.add_argument("--out", help="output directory (solve/sweep) or file (synth)")
    p.add_argument("--seed", type=int, default=1, help="seed for synth")
    p.add_argument("--nodes", type=int, default=2, help="synth: number of nodes")
    p.add_argument("--hours", type=int, default=6, help="synth: representative hours")
    p.add_argument("--techs", type=int, default=3, help="synth: technologies from the catalog")
    p.add_argument("--kind", choices=("synthetic",) + BUNDLED[1:], default="synthetic",
                   help="synth: generator to use")
    p.add_argument("--hours-weight", type=float, help="override every hour weight")
    p.add_argument("--lp-out", help="write the LP interchange file here")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def config_from_args(args) -> RunConfig:
    synth = {}
    if args.command == "synth":
        synth = {"kind": args.kind, "nodes": args.nodes, "hours": args.hours, "techs": args.techs}
    return RunConfig(
        command=args.command, instance=args.instance,
        omegas=tuple(args.omega) if args.omega else OMEGA_GRID, alpha=args.alpha,
        flex=tuple(args.flex) if args.flex else ("dr-none",), solver=args.solver,
        out=args.out, seed=args.seed, hours_weight=args.hours_weight, lp_out=args.lp_out,
        synth=synth,
    )


def _load(cfg: RunConfig):
    inst = load_instance(resolve_instance(cfg.instance))
    if cfg.hours_weight is not None:
        inst = inst.with_hour_weight(cfg.hours_weight)
    return inst


def _writable(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    return out


def _print_cell(c, out):
    print(f"[{c.setting} omega={c.omega:g}] status={c.status}", file=out)
    if not c.ok:
        print(f"  error: {c.error}", file=out)
        return
    print(f"  TC={c.tc:.6g}  IC={c.ic:.6g}  E[OC]={c.expected_oc:.6g}  CVaR={c.cvar:.6g}  "
          f"ex-post={c.ex_post:.6g}", file=out)
    mix = ", ".join(f"{k}={v:.4g}" for k, v in sorted(c.mix.items())) or "none"
    print(f"  capacity added by last year: {mix}; NTC={c.ntc_total:.4g} MW; PSP={c.psp_total:.4g} MW",
          file=out)
    print(f"  expected shedding={c.shedding_total:.6g} MWh  lost load={c.lost_load:.6g} MWh", file=out)
    if c.tail is not None:
        print(f"  tail: {', '.join(c.tail.strict) or '(none)'}"
              f"{'  boundary: ' + ', '.join(c.tail.boundary) if c.tail.boundary else ''}", file=out)


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command; returns the process exit status."""
    out = sys.stdout if out is None else out
    options = SolverOptions(method=cfg.solver)
    if cfg.command == "synth":
        kind = cfg.synth.get("kind", "synthetic")
        if kind == "hedging":
            inst = hedging_instance()
        elif kind == "interconnect":
            inst = interconnect_instance()
        else:
            inst = make_synthetic(seed=cfg.seed, n_nodes=cfg.synth.get("nodes", 2),
                                  n_hours=cfg.synth.get("hours", 6),
                                  n_techs=cfg.synth.get("techs", 3))
        if cfg.out is None:
            raise ValueError("synth needs --out")
        save_instance(inst, cfg.out)
        print(f"wrote {inst.name} ({len(inst.scenarios)} scenarios) to {cfg.out}", file=out)
        return 0

    inst = _load(cfg)
    if cfg.command == "validate":
        print(f"{inst.name}: valid; {len(inst.nodes)} nodes, {len(inst.technologies)} technologies, "
              f"{len(inst.hours)} hours, {len(inst.years)} years, {len(inst.scenarios)} scenarios"
              f"{', deduplicated' if inst.scenarios.deduplicated else ''}"
              f"{f', {inst.scenarios.clamped} clamped values' if inst.scenarios.clamped else ''}",
              file=out)
        return 0

    if cfg.command in ("build", "export"):
        if cfg.command == "export" and cfg.lp_out is None:
            raise ValueError("export needs --lp-out")
        flex = check_flex(cfg.flex[0])
        lp = build(inst, RiskSettings(cfg.omegas[0], cfg.alpha), flex)
        m, n = lp.shape
        print(f"{inst.name} [{cfg.flex[0]} omega={cfg.omegas[0]:g}]: {m} rows, {n} columns, "
              f"{lp.nnz} nonzeros", file=out)
        if cfg.lp_out:
            Path(cfg.lp_out).write_text(write_interchange(lp), encoding="utf-8")
            print(f"wrote {cfg.lp_out}", file=out)
        return 0

    if cfg.command == "solve" and len(cfg.flex) != 1:
        raise ValueError("solve takes a single --flex setting; use sweep for several")
    outdir = _writable(cfg.out) if cfg.out else None
    hook = None
    if cfg.lp_out:
        def hook(setting, omega, lp, _dir=Path(cfg.lp_out)):
            _dir.mkdir(parents=True, exist_ok=True)
            (_dir / f"{setting}_omega{omega:g}.mps").write_text(write_interchange(lp), encoding="utf-8")
    result = sweep(inst, cfg.omegas, cfg.flex, alpha=cfg.alpha, options=options, lp_hook=hook)
    for c in result.cells:
        _print_cell(c, out)
    if outdir is not None:
        for path in result.write_csv(outdir):
            print(f"wrote {path}", file=out)
    if result.failures:
        print(f"{len(result.failures)} of {len(result.cells)} cells failed", file=out)
        return 1
    return 0


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except InstanceError as exc:
        print(f"invalid instance ({len(exc.violations)} violations):", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, FileNotFoundError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
