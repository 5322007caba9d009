"""Command-line entry points.

Four groups of subcommands:

* `enumerate`, `ortho-dp`, `gibbs` run one posterior on a dataset (from a
  CSV file or generated from a scenario config) and write the model table
  plus inclusion probabilities.
* `bounds tail` evaluates one tail inequality and optionally the exact
  reference probability it dominates.
* `bounds global` writes the posterior-mass bound curves over a sample-size
  grid for the four stress-test cases.
* `simulate` runs a replicated study (or a sample-size sweep) from a TOML
  config mirroring the Scenario fields.

Configs are TOML with a [scenario] table, optional [[bundles]] entries and,
for the engine subcommands, an optional [data] table pointing at a CSV whose
first column is the response.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from . import sim_harness as sh
from . import tail_bounds as tb
from .core import Dataset, ModelIndex, SufficientStats
from .global_bounds import bound_curves, write_curve_csv
from .l0 import make_criterion, normalized_l0
from .posterior import (GibbsConfig, enumerate_posterior, gibbs_posterior,
                        orthogonal_dp_posterior)

__all__ = ["main", "scenario_from_config"]


# ---------------------------------------------------------------------------
# config parsing


def _load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _design_from_table(tbl: dict):
    kind = tbl.get("design", "orthogonal")
    if kind == "orthogonal":
        return sh.Orthogonal()
    if kind == "equicorrelated":
        return sh.Equicorrelated(rho=float(tbl.get("rho", 0.5)))
    if kind == "custom":
        return sh.CustomMatrix(path=str(tbl["design_path"]))
    if kind == "misspecified-mean":
        return sh.MisspecifiedMean(omitted=tuple(tbl["omitted"]),
                                   rho=float(tbl.get("rho", 0.0)))
    if kind == "heteroskedastic":
        return sh.Heteroskedastic(recipe=tbl.get("recipe", "variance-ramp"),
                                  param=float(tbl.get("param", 3.0)),
                                  rho=float(tbl.get("rho", 0.0)))
    raise ValueError(f"unknown design kind: {kind!r}")


def _bundle_from_table(tbl: dict) -> sh.Bundle:
    coef = tbl.get("coef", "zellner")
    model = tbl.get("model", "betabinomial")
    return sh.Bundle(
        name=tbl.get("name", f"{coef}-{model}"),
        coef=coef,
        model=model,
        tau=tbl.get("tau", "unit-information"),
        c=float(tbl.get("c", 1.0)),
        a_phi=float(tbl.get("a_phi", 0.01)),
        l_phi=float(tbl.get("l_phi", 0.01)),
        phi_known=float(tbl.get("phi_known", 1.0)),
        mc_draws=int(tbl.get("mc_draws", 2000)),
    )


def scenario_from_config(cfg: dict, *, seed=None, engine=None) -> sh.Scenario:
    """Build a Scenario from a parsed config; seed/engine override the file."""
    tbl = dict(cfg.get("scenario", {}))
    if "n" not in tbl or "p" not in tbl or "coef" not in tbl:
        raise ValueError("[scenario] needs at least n, p and coef")
    bundles = tuple(_bundle_from_table(b) for b in cfg.get("bundles", []))
    if not bundles:
        bundles = sh.standard_bundles()
    kwargs = dict(
        design=_design_from_table(tbl),
        n=int(tbl["n"]),
        p=int(tbl["p"]),
        coef=tuple(float(v) for v in tbl["coef"]),
        phi=float(tbl.get("phi", 1.0)),
        bundles=bundles,
        replicates=int(tbl.get("replicates", 20)),
        seed=int(seed if seed is not None else tbl.get("seed", 0)),
        engine=engine if engine is not None else tbl.get("engine", "enumerate"),
        threshold=float(tbl.get("threshold", 0.5)),
        gibbs_sweeps=int(tbl.get("gibbs_sweeps", 10_000)),
        gibbs_burn_in=int(tbl.get("gibbs_burn_in", 1_000)),
        gibbs_chains=int(tbl.get("gibbs_chains", 1)),
    )
    if "p_bar" in tbl:
        kwargs["p_bar"] = int(tbl["p_bar"])
    return sh.Scenario(**kwargs)


# ---------------------------------------------------------------------------
# posterior engine subcommands


def _write_models_csv(path: Path, records) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model_bitmask", "size", "log_evidence",
                    "log_prior", "probability"])
        for rec in records:
            w.writerow([rec.model.bitmask(), rec.model.size, rec.log_evidence,
                        rec.log_prior, rec.probability])


def _write_pips_csv(path: Path, names, pips) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable", "name", "pip"])
        for j, (name, pip) in enumerate(zip(names, pips)):
            w.writerow([j, name, float(pip)])


def _cmd_engine(args) -> int:
    cfg = _load_toml(args.config)
    engine = args.engine_name
    scenario = None
    if "data" in cfg:
        data = Dataset.from_csv(cfg["data"]["file"])
        tbl = cfg.get("scenario", {})
        p_bar = int(tbl["p_bar"]) if "p_bar" in tbl else min(data.n - 5, data.p)
        seed = int(args.seed if args.seed is not None else tbl.get("seed", 0))
        sweeps = int(tbl.get("gibbs_sweeps", 10_000))
        burn_in = int(tbl.get("gibbs_burn_in", 1_000))
        chains = int(tbl.get("gibbs_chains", 1))
    else:
        scenario = scenario_from_config(cfg, seed=args.seed, engine=engine)
        data = sh.generate(scenario, args.replicate)
        p_bar = scenario.resolved_p_bar()
        seed = scenario.seed
        sweeps, burn_in = scenario.gibbs_sweeps, scenario.gibbs_burn_in
        chains = scenario.gibbs_chains
    if p_bar < 0:
        raise ValueError("size cap came out negative; give p_bar explicitly")

    bundle_tables = cfg.get("bundles", [])
    bundle = (_bundle_from_table(bundle_tables[0]) if bundle_tables
              else sh.Bundle("zellner-betabinomial"))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if getattr(args, "criterion", None):
        spec = make_criterion(args.criterion)
        stats = SufficientStats(data)
        models = [ModelIndex(c) for l in range(p_bar + 1)
                  for c in itertools.combinations(range(data.p), l)]
        weights = normalized_l0(stats, models, spec)
        # criterion weights have no evidence/prior split; probability holds
        # the normalized weight and log_evidence its log
        with (out / "models.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["model_bitmask", "size", "log_evidence",
                        "log_prior", "probability"])
            order = np.argsort(-weights)
            for i in order:
                m, wt = models[i], float(weights[i])
                log_wt = float(np.log(wt)) if wt > 0 else float("-inf")
                w.writerow([m.bitmask(), m.size, log_wt, 0.0, wt])
        mask = np.zeros((len(models), data.p))
        for i, m in enumerate(models):
            mask[i, list(m.indices)] = 1.0
        _write_pips_csv(out / "pips.csv", data.column_names(), weights @ mask)
        print(f"criterion={args.criterion} models={len(models)}")
        print(f"wrote {out / 'models.csv'} and {out / 'pips.csv'}")
        return 0

    coef_spec, model_prior = bundle.build(data.n, data.p, p_bar, seed)
    if engine == "enumerate":
        summary = enumerate_posterior(data, coef_spec, model_prior)
    elif engine == "ortho-dp":
        summary = orthogonal_dp_posterior(
            data, coef_spec, model_prior,
            pmom_factorized=bundle.coef == "pmom")
    else:
        cfg_g = GibbsConfig(sweeps=sweeps, burn_in=burn_in, seed=seed,
                            chains=chains)
        summary = gibbs_posterior(data, coef_spec, model_prior, cfg=cfg_g)

    records = sorted(summary.table,
                     key=lambda r: (-r.probability, r.model.bitmask()))
    _write_models_csv(out / "models.csv", records)
    _write_pips_csv(out / "pips.csv", data.column_names(), summary.pips)
    print(f"engine={summary.method} bundle={bundle.name} "
          f"models={len(records)} complete={summary.table_complete}")
    line = f"map_model={sorted(summary.map_model.indices)}"
    if summary.log_normalizer is not None:
        line += f" log_normalizer={summary.log_normalizer:.6f}"
    print(line)
    print(f"wrote {out / 'models.csv'} and {out / 'pips.csv'}")
    return 0


# ---------------------------------------------------------------------------
# bound subcommands


def _tail_dispatch(args):
    fam, side = args.family, args.side

    def need(*names):
        for name in names:
            if getattr(args, name.replace("-", "_")) is None:
                raise SystemExit(f"--family {fam} needs --{name}")

    if fam == "chisq":
        need("nu")
        fn = tb.chisq_right if side == "right" else tb.chisq_left
        return fn(args.nu, args.w)
    if fam == "ncchisq":
        need("nu", "lam")
        if side == "right":
            variant = args.variant or "sqrt_choice"
            return tb.ncchisq_right(args.nu, args.lam, args.w, variant=variant)
        variant = args.variant or "closed"
        return tb.ncchisq_left(args.nu, args.lam, args.w, s=args.s,
                               variant=variant)
    if fam == "f":
        need("nu1", "nu2")
        lam = args.lam if args.lam is not None else 0.0
        if side == "right":
            variant = args.variant or "corollary"
            return tb.f_right(args.nu1, args.nu2, lam, args.w, s=args.s,
                              variant=variant)
        need("s")
        variant = args.variant or "closed"
        return tb.f_left(args.nu1, args.nu2, lam, args.w, args.s, t=args.t,
                         variant=variant)
    # fmoment has no left tail
    need("nu1", "nu2")
    variant = args.variant or "general"
    return tb.f_moment(args.nu1, args.nu2, args.w, s=args.s, variant=variant)


def _tail_reference(args) -> float:
    from scipy import stats

    fam, side, w = args.family, args.side, args.w
    if fam == "chisq":
        dist = stats.chi2(args.nu)
        return float(dist.sf(w) if side == "right" else dist.cdf(w))
    if fam == "ncchisq":
        dist = stats.ncx2(args.nu, args.lam)
        return float(dist.sf(w) if side == "right" else dist.cdf(w))
    if fam == "f":
        lam = args.lam if args.lam is not None else 0.0
        # the statistic is nu1 * F, so rescale the threshold
        if lam > 0:
            dist = stats.ncf(args.nu1, args.nu2, lam)
        else:
            dist = stats.f(args.nu1, args.nu2)
        x = w / args.nu1
        return float(dist.sf(x) if side == "right" else dist.cdf(x))
    return float(stats.f(args.nu1, args.nu2).sf(w))


def _cmd_bounds_tail(args) -> int:
    if args.family == "fmoment" and args.side == "left":
        raise SystemExit("fmoment only bounds the right tail")
    result = _tail_dispatch(args)
    print(f"family={args.family} side={args.side} w={args.w}")
    line = f"bound={result.bound:.10g} applicable={result.applicable}"
    if result.param is not None:
        line += f" param={result.param:.10g}"
    print(line)
    if args.reference:
        ref = _tail_reference(args)
        line = f"reference={ref:.10g}"
        if ref > 0:
            line += f" ratio={result.bound / ref:.6g}"
        print(line)
    return 0


def _cmd_bounds_global(args) -> int:
    n_grid = range(args.n_from, args.n_to + 1, args.n_step)
    if len(n_grid) == 0:
        raise SystemExit("empty sample-size grid")
    rows = bound_curves(args.case, n_grid, lambda_rule=args.lambda_rule,
                        alpha=args.alpha, alpha_prime=args.alpha_prime,
                        c=args.c)
    write_curve_csv(rows, args.out)
    print(f"case={args.case} lambda_rule={args.lambda_rule} "
          f"rows={len(rows)} out={args.out}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _cmd_simulate(args) -> int:
    cfg = _load_toml(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if "sweep" in cfg:
        grid = [int(n) for n in cfg["sweep"]["n_grid"]]

        def factory(n: int) -> sh.Scenario:
            local = {k: v for k, v in cfg.items() if k != "sweep"}
            local["scenario"] = dict(local.get("scenario", {}), n=n)
            return scenario_from_config(local, seed=args.seed)

        rows = sh.run_size_sweep(grid, factory)
        path = sh.write_sweep_csv(rows, out / "curves.csv")
        print(f"sweep over n={grid}: wrote {len(rows)} rows to {path}")
        return 0

    scenario = scenario_from_config(cfg, seed=args.seed)
    result = sh.run(scenario)
    paths = sh.emit(result, args.format, out)
    print(f"replicates={scenario.replicates} bundles={len(scenario.bundles)} "
          f"failures={len(result.failures)}")
    failing = [(a.bundle, c.name) for a in result.aggregates
               for c in a.checks if not c.holds]
    if failing:
        print(f"inequality checks failing: {failing}")
    else:
        print("all inequality checks hold")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modsel",
        description="Posterior model probabilities, selection bounds and "
                    "simulation studies for Gaussian variable selection.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("enumerate", "ortho-dp", "gibbs"):
        sp = sub.add_parser(name, help=f"run the {name} posterior engine")
        sp.add_argument("--config", required=True, help="TOML config")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--replicate", type=int, default=0,
                        help="replicate index when generating data")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        if name == "enumerate":
            sp.add_argument("--criterion", default=None,
                            help="normalized L0 criterion instead of a "
                                 "posterior: bic, ebic, ebic:<xi>, or ric")
        sp.set_defaults(func=_cmd_engine, engine_name=name)

    bounds = sub.add_parser("bounds", help="evaluate tail or global bounds")
    bsub = bounds.add_subparsers(dest="bounds_command", required=True)

    tail = bsub.add_parser("tail", help="one tail inequality")
    tail.add_argument("--family", required=True,
                      choices=["chisq", "ncchisq", "f", "fmoment"])
    tail.add_argument("--side", choices=["right", "left"], default="right")
    tail.add_argument("--w", type=float, required=True, help="threshold")
    tail.add_argument("--nu", type=float, default=None)
    tail.add_argument("--nu1", type=float, default=None)
    tail.add_argument("--nu2", type=float, default=None)
    tail.add_argument("--lam", type=float, default=None,
                      help="noncentrality (default 0 for f)")
    tail.add_argument("--s", type=float, default=None,
                      help="free split/moment parameter where the lemma "
                           "offers one")
    tail.add_argument("--t", type=float, default=None,
                      help="numerator exponent for the left f tail")
    tail.add_argument("--variant", default=None,
                      help="bound variant (family-specific; default is the "
                           "closed-form choice)")
    tail.add_argument("--reference", action="store_true",
                      help="also print the exact probability")
    tail.set_defaults(func=_cmd_bounds_tail)

    gb = bsub.add_parser("global", help="posterior-mass bound curves")
    gb.add_argument("--case", type=int, required=True, choices=[1, 2, 3, 4])
    gb.add_argument("--n-from", type=int, required=True)
    gb.add_argument("--n-to", type=int, required=True)
    gb.add_argument("--n-step", type=int, required=True)
    gb.add_argument("--lambda-rule", default="theta-squared-n",
                    choices=["theta-squared-n", "quarter-n"])
    gb.add_argument("--alpha", type=float, default=0.99)
    gb.add_argument("--alpha-prime", type=float, default=0.95)
    gb.add_argument("--c", type=float, default=1.0)
    gb.add_argument("--out", required=True, help="curves CSV path")
    gb.set_defaults(func=_cmd_bounds_global)

    sim = sub.add_parser("simulate", help="run a replicated study")
    sim.add_argument("--config", required=True, help="TOML config")
    sim.add_argument("--seed", type=int, required=True,
                     help="base seed (required for reproducibility)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--format", choices=["csv", "plotdata"], default="csv")
    sim.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
