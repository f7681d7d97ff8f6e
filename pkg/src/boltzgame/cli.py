"""Command-line entry point: ``boltzgame {run,validate,presets,compare,stationary}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from . import io
from .errors import ConfigError, DomainError
from .moments import MeanSystemParams, integrate_means
from .scenario import PRESET_NAMES, load_scenario, preset
from .simulation import init, run
from .stationary import StationaryDensity, assumption_violations, stationary_params

EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def _scenario(args):
    if (args.scenario is None) == (args.preset is None):
        raise ConfigError("give exactly one of --scenario or --preset")
    sc = load_scenario(args.scenario) if args.scenario else preset(args.preset)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "T", None) is not None:
        changes["T"] = args.T
        changes["snapshots"] = tuple(t for t in sc.snapshots if t <= args.T)
    if getattr(args, "n_followers", None) is not None:
        changes["n_followers"] = args.n_followers
    return sc.with_(**changes).validate() if changes else sc


def _add_source(p, overrides=True):
    p.add_argument("--scenario", help="YAML scenario file")
    p.add_argument("--preset", choices=PRESET_NAMES)
    if overrides:
        p.add_argument("--seed", type=int)
        p.add_argument("--T", type=float, help="override the time horizon")
        p.add_argument("--n-followers", type=int, dest="n_followers")


def cmd_run(args):
    sc = _scenario(args)
    rec = run(sc, threads=args.threads)
    paths = io.write_run(rec, args.out)
    print(f"{sc.name}: {sc.n_steps} steps, seed {sc.seed}, wrote {len(paths)} files to {args.out}")
    for rule in rec.attempts:
        print(f"  {rule}: rejection rate {rec.rejection_rate(rule):.3g}")
    return 0


def cmd_validate(args):
    sc = load_scenario(args.path)
    print(f"{args.path}: valid ({sc.mode}, {sc.control}, M={sc.M})")
    return 0


def cmd_presets(args):
    if args.action == "list":
        for name in PRESET_NAMES:
            sc = preset(name)
            print(f"{name}\t{sc.mode}\tM={sc.M}\tT={sc.T:g}\tN_F={sc.n_followers}")
    else:
        if args.name is None:
            raise ConfigError("presets show: missing preset name")
        sys.stdout.write(yaml.safe_dump(preset(args.name).to_dict(), sort_keys=False))
    return 0


def cmd_compare(args):
    sc = _scenario(args)
    rec = run(sc, threads=args.threads)
    params = MeanSystemParams.from_scenario(sc)
    row0 = rec.moments[0]
    dt = sc.epsilon / 10.0
    t, m_F, m_L = integrate_means(row0[1], row0[2:2 + sc.M], params, sc.T, dt)
    stride = 10
    oracle = np.full_like(rec.moments, np.nan)
    oracle[:, 0] = t[::stride]
    oracle[:, 1] = m_F[::stride]
    oracle[:, 2:2 + sc.M] = m_L[::stride]
    gap = float(np.max(np.abs(rec.m_F - oracle[:, 1])))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_timeseries(rec.moments, out / "timeseries.csv", sc.M)
    io.write_timeseries(oracle, out / "oracle.csv", sc.M)
    print(f"sup |m_F(MC) - m_F(oracle)| = {gap:.6g}")
    return 0


def cmd_stationary(args):
    sc = _scenario(args)
    bad = assumption_violations(sc)
    if bad:
        print("warning: closed form assumes " + "; ".join(bad), file=sys.stderr)
    followers, leaders = init(sc)
    sp = stationary_params(sc, float(np.mean(followers.opinions)), [g.m_L0 for g in leaders], strict=False)
    w = np.linspace(-1.0, 1.0, args.points + 2)[1:-1]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    f = StationaryDensity.build(sp.vbar, sp.sigma_F2)
    io.write_table(out / "follower_stationary.csv", ["w", "density"], [w, f(w)])
    for k in range(sc.M):
        g = StationaryDensity.build(sp.b_L[k], sp.sigma_eta2[k]) if sp.sigma_eta2[k] > 0 else None
        if g is None:
            continue
        io.write_table(out / f"leader{k + 1}_stationary.csv", ["v", "density"], [w, g(w)])
    print(f"vbar = {sp.vbar:.6g}, sigma_F^2 = {sp.sigma_F2:.6g}, b_L = {', '.join(f'{b:.6g}' for b in sp.b_L)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boltzgame", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a Monte Carlo simulation")
    _add_source(p)
    p.add_argument("--out", default="out")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list or print built-in scenarios")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("compare", help="overlay Monte Carlo means against the mean-opinion ODE")
    _add_source(p)
    p.add_argument("--out", default="out")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stationary", help="tabulate the analytic stationary densities")
    _add_source(p)
    p.add_argument("--out", default="out")
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_stationary)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain violation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
