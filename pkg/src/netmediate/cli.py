"""Command-line front end for the two-stage network mediation pipeline.

Subcommands:

* ``stats``     network descriptive statistics as JSON
* ``simulate``  seeded network generators, adjacency CSV + ground truth
* ``eigenfit``  stage one: latent eigenmodel fit + mediator extraction
* ``mediate``   stage two: Bayesian mediation on exported mediators
* ``diagnose``  convergence table for a draw export
* ``pipeline``  both stages end to end with a manifest

Every run is reproducible: all randomness flows from ``--seed`` through
deterministic per-stage seed derivation, and floats are written with
full round-trip precision, so identical configurations give
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .diagnostics import effective_sample_size, geweke_z, split_rhat
from .eigenmodel import (
    EigenmodelConfig,
    extract_mediators,
    fit_eigenmodel,
    save_fit_json,
    scree_elbow,
    select_dimension_conditional,
)
from .generators import (
    gen_eigenmodel,
    gen_erdos_renyi,
    gen_latent_class,
    gen_latent_distance,
    gen_structured_u,
)
from .graphs import (
    adjacency_spectrum,
    density,
    diameter,
    transitivity,
    uniform_homophily,
)
from .mediation import (
    MediationConfig,
    MediationData,
    fit_binary_mediation,
    fit_continuous_mediation,
    fit_total_effect,
    summarize,
)

EFFECT_FLAG_THRESHOLD = 1.96


def _stage_seeds(root_seed):
    """Derive the stage-one and stage-two seeds from the root seed."""
    state = np.random.SeedSequence(root_seed).generate_state(2)
    return int(state[0]), int(state[1])


def _read_network(args):
    if getattr(args, "network", None) and getattr(args, "edges", None):
        raise ValueError("give exactly one of --network or --edges")
    if getattr(args, "network", None):
        return io.read_adjacency_csv(args.network)
    if getattr(args, "edges", None):
        node_ids = None
        if getattr(args, "nodes", None):
            node_ids = [line.strip() for line in Path(args.nodes).read_text().splitlines() if line.strip()]
        return io.read_edge_list_csv(args.edges, node_ids)
    raise ValueError("a network input is required: --network or --edges")


def _effect_row_names(q: int):
    return (
        ["cp"]
        + [f"a{k}" for k in range(1, q + 1)]
        + [f"b{k}" for k in range(1, q + 1)]
        + [f"ab{k}" for k in range(1, q + 1)]
        + ["ab", "total"]
    )


def _diagnostic_rows(param_chains: dict, order):
    """Per-parameter convergence table from per-chain draw arrays."""
    rows = []
    for name in order:
        chains = param_chains[name]
        row = {"parameter": name, "geweke_z": None, "ess": None,
               "split_rhat": None, "flag": False, "error": ""}
        try:
            zs = [geweke_z(c) for c in chains]
            z = zs[int(np.argmax(np.abs(zs)))]
            row["geweke_z"] = float(z)
            row["ess"] = float(sum(effective_sample_size(c) for c in chains))
            row["split_rhat"] = float(split_rhat(chains))
            row["flag"] = bool(abs(z) >= EFFECT_FLAG_THRESHOLD)
        except ValueError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# stats


def cmd_stats(args) -> int:
    a, _ = _read_network(args)
    spectrum = adjacency_spectrum(a)
    diam = diameter(a)
    report = {
        "n": int(a.shape[0]),
        "edges": int(a.sum() // 2),
        "density": density(a),
        "diameter": diam.value,
        "disconnected_flag": diam.disconnected,
        "transitivity": transitivity(a),
        "top_eigenvalues": [float(v) for v in spectrum[: min(10, len(spectrum))]],
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _parse_floats(text, flag):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated list of numbers, got {text!r}") from None


def _parse_ints(text, flag):
    return [int(v) for v in _parse_floats(text, flag)]


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    truth = {"family": args.family, "seed": args.seed, "n": args.n}
    if args.family == "erdos-renyi":
        if args.p is None:
            raise ValueError("--p is required for the erdos-renyi family")
        a = gen_erdos_renyi(args.n, args.p, seed=args.seed)
        truth["p"] = args.p
    elif args.family == "latent-class":
        if not args.block_sizes:
            raise ValueError("--block-sizes is required for the latent-class family")
        sizes = _parse_ints(args.block_sizes, "--block-sizes")
        if sum(sizes) != args.n:
            raise ValueError(f"--block-sizes sum to {sum(sizes)}, expected n={args.n}")
        memberships = np.repeat(np.arange(len(sizes)), sizes)
        k = len(sizes)
        prob = np.full((k, k), args.p_between)
        np.fill_diagonal(prob, args.p_within)
        a = gen_latent_class(memberships, prob, seed=args.seed)
        truth.update({"block_sizes": sizes, "p_within": args.p_within, "p_between": args.p_between})
    elif args.family == "latent-distance":
        rng = np.random.default_rng(args.seed)
        positions = rng.standard_normal((args.n, args.dims))
        a = gen_latent_distance(positions, args.intercept, seed=args.seed)
        truth.update({"dims": args.dims, "intercept": args.intercept,
                      "positions": positions.tolist()})
    elif args.family == "eigenmodel":
        lambdas = _parse_floats(args.lambdas, "--lambdas")
        u = gen_structured_u(args.n, len(lambdas))
        h = None
        if args.beta is not None:
            labels = (np.arange(args.n) % 2).tolist()
            h = uniform_homophily(labels)
        a = gen_eigenmodel(u, lambdas, beta=args.beta, h=h, seed=args.seed)
        truth.update({"lambdas": lambdas, "beta": args.beta,
                      "u": u.tolist(), "ulu": ((u * np.asarray(lambdas)) @ u.T).tolist()})
    else:
        raise ValueError(f"unknown family: {args.family!r}")

    ids = [str(i) for i in range(a.shape[0])]
    io.write_adjacency_csv(a, ids, out / "adjacency.csv")
    with open(out / "truth.json", "w") as handle:
        json.dump(truth, handle, indent=2, sort_keys=True)
    print(json.dumps({"out": str(out), "n": int(a.shape[0]), "edges": int(a.sum() // 2)}))
    return 0


# ---------------------------------------------------------------------------
# eigenfit


def _load_homophily(args, ids):
    if not getattr(args, "homophily", None):
        return None
    if not getattr(args, "covariates", None):
        raise ValueError("--homophily requires --covariates")
    cov_ids, columns = io.read_covariates_csv(args.covariates)
    if args.homophily not in columns:
        raise ValueError(f"covariates file has no column {args.homophily!r}")
    labels = io.align_covariate(cov_ids, columns[args.homophily], ids, args.homophily)
    return uniform_homophily(labels)


def _stage_one(a, h, args, seed):
    """Shared by eigenfit and pipeline: fit, pick Q, extract mediators."""
    base = EigenmodelConfig(
        rank=2,
        total_iterations=args.iters,
        burn_in=args.burnin,
        thin=args.thin,
        link=args.link,
        seed=seed,
        keep_u_draws=False,
    )
    selection_info = None
    if args.rank == "auto":
        if h is None:
            scree = scree_elbow(adjacency_spectrum(a))
            q = max(scree.q, 1)
            selection_info = {
                "method": "scree_elbow",
                "selected_q": q,
                "heuristic_available": scree.heuristic_available,
                "positive_adjacency_eigenvalues": [float(v) for v in scree.positive_eigenvalues],
            }
            cfg = EigenmodelConfig(**{**base.__dict__, "rank": q})
            fit = fit_eigenmodel(a, h, cfg)
        else:
            selection = select_dimension_conditional(a, h, args.q_max, base)
            q = selection.selected_q
            selection_info = {
                "method": "negative_eigenvalue_rule",
                "selected_q": q,
                "flagged": selection.flagged,
                "per_q_spectra": {str(k): [float(v) for v in vals] for k, vals in selection.spectra.items()},
            }
            fit = selection.fits[q]
    else:
        q = int(args.rank)
        cfg = EigenmodelConfig(**{**base.__dict__, "rank": q})
        fit = fit_eigenmodel(a, h, cfg)
    mediators = extract_mediators(fit, q)
    return fit, mediators, q, selection_info


def cmd_eigenfit(args) -> int:
    a, ids = _read_network(args)
    h = _load_homophily(args, ids)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fit, mediators, q, selection_info = _stage_one(a, h, args, args.seed)
    save_fit_json(fit, out / "fit.json", include_u=args.full_draws)
    io.write_mediators_csv(ids, mediators.vectors, out / "mediators.csv")
    io.write_scree_csv(np.linalg.eigvalsh(fit.ulu_postmean)[::-1], out / "scree.csv")
    manifest = {
        "command": "eigenfit",
        "version": __version__,
        "seed": args.seed,
        "rank": q,
        "selection": selection_info,
        "warnings": fit.warnings,
        "files": ["fit.json", "mediators.csv", "scree.csv"],
    }
    with open(out / "manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    print(json.dumps({"out": str(out), "rank": q, "warnings": fit.warnings}))
    return 0


# ---------------------------------------------------------------------------
# mediate


def _run_stage2(data: MediationData, args, seed, out: Path):
    """Fit stage two plus the total-effect cross-check; write exports.

    Returns (posterior, effect summary rows, diagnostic rows, extras).
    """
    seq = np.random.SeedSequence(seed).generate_state(2)
    config = MediationConfig(
        iterations=args.iters,
        burn_in=args.burnin,
        thin=args.thin,
        n_chains=args.chains,
        hpd_prob=args.hpd,
        seed=int(seq[0]),
    )
    if data.y_family == "binary":
        posterior = fit_binary_mediation(data, config)
    else:
        posterior = fit_continuous_mediation(data, config)
    total_config = MediationConfig(**{**config.__dict__, "seed": int(seq[1])})
    total_post = fit_total_effect(data, total_config)

    rows_all = summarize(posterior)
    effect_names = _effect_row_names(data.n_mediators)
    rows_effect = [r for name in effect_names for r in rows_all if r.parameter == name]
    total_rows = summarize(total_post)
    total_c = next(r for r in total_rows if r.parameter == "c")

    diag_rows = _diagnostic_rows(
        {name: list(posterior.params[name]) for name in posterior.param_order},
        posterior.param_order,
    )
    effect_flags = [r["parameter"] for r in diag_rows
                    if r["parameter"] in effect_names and r["flag"]]
    extras = {
        "y_family": data.y_family,
        "warnings": list(posterior.warnings),
        "convergence_warning": bool(effect_flags),
        "nonconverged_parameters": effect_flags,
        "total_effect_regression": {
            "parameter": "c",
            "estimate": total_c.estimate,
            "post_sd": total_c.post_sd,
            "hpd_lower": total_c.hpd_lower,
            "hpd_upper": total_c.hpd_upper,
            "significant": bool(total_c.significant),
        },
    }

    io.write_summary_csv(rows_effect, out / "summary.csv")
    io.write_summary_json(rows_effect, out / "summary.json", extra=extras)
    io.write_diagnostics_csv(diag_rows, out / "diagnostics.csv")
    if args.save_draws:
        io.write_draws_csv(posterior, out / "draws.csv")
    return posterior, rows_effect, diag_rows, extras


def cmd_mediate(args) -> int:
    med_ids, mediators = io.read_mediators_csv(args.mediators)
    cov_ids, columns = io.read_covariates_csv(args.covariates)
    for col in (args.x, args.y):
        if col not in columns:
            raise ValueError(f"covariates file has no column {col!r}")
    x = io.numeric_column(io.align_covariate(cov_ids, columns[args.x], med_ids, args.x), args.x)
    y = io.numeric_column(io.align_covariate(cov_ids, columns[args.y], med_ids, args.y), args.y)
    data = MediationData(x=x, y=y, mediators=mediators, y_family=args.y_family)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, rows_effect, _, extras = _run_stage2(data, args, args.seed, out)
    manifest = {
        "command": "mediate",
        "version": __version__,
        "seed": args.seed,
        "y_family": data.y_family,
        "n": data.n,
        "q": data.n_mediators,
        "convergence_warning": extras["convergence_warning"],
        "warnings": extras["warnings"],
        "files": ["summary.csv", "summary.json", "diagnostics.csv"]
        + (["draws.csv"] if args.save_draws else []),
    }
    with open(out / "manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    print(json.dumps({"out": str(out), "convergence_warning": extras["convergence_warning"]}))
    return 0


# ---------------------------------------------------------------------------
# diagnose


def cmd_diagnose(args) -> int:
    params = io.read_draws_csv(args.draws)
    order = list(params)
    rows = _diagnostic_rows(params, order)
    if args.out:
        io.write_diagnostics_csv(rows, args.out)
    for row in rows:
        if row["error"]:
            print(f"{row['parameter']}: error: {row['error']}")
        else:
            flag = " CONVERGENCE-FLAG" if row["flag"] else ""
            print(
                f"{row['parameter']}: geweke_z={row['geweke_z']:+.3f} "
                f"ess={row['ess']:.1f} split_rhat={row['split_rhat']:.4f}{flag}"
            )
    return 0


# ---------------------------------------------------------------------------
# pipeline


def cmd_pipeline(args) -> int:
    a, ids = _read_network(args)
    cov_ids, columns = io.read_covariates_csv(args.covariates)
    for col in (args.x, args.y):
        if col not in columns:
            raise ValueError(f"covariates file has no column {col!r}")
    x = io.numeric_column(io.align_covariate(cov_ids, columns[args.x], ids, args.x), args.x)
    y = io.numeric_column(io.align_covariate(cov_ids, columns[args.y], ids, args.y), args.y)
    h = _load_homophily(args, ids)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed_eigen, seed_mediate = _stage_seeds(args.seed)

    fit, mediators, q, selection_info = _stage_one(a, h, args, seed_eigen)
    save_fit_json(fit, out / "fit.json", include_u=args.full_draws)
    io.write_mediators_csv(ids, mediators.vectors, out / "mediators.csv")
    io.write_scree_csv(np.linalg.eigvalsh(fit.ulu_postmean)[::-1], out / "scree.csv")

    data = MediationData(x=x, y=y, mediators=mediators.vectors, y_family=args.y_family)
    _, rows_effect, diag_rows, extras = _run_stage2(data, args, seed_mediate, out)

    warnings = list(fit.warnings) + list(extras["warnings"])
    manifest = {
        "command": "pipeline",
        "version": __version__,
        "seed": args.seed,
        "stage_seeds": {"eigenmodel": seed_eigen, "mediation": seed_mediate},
        "model": "conditional" if h is not None else "unconditional",
        "y_family": args.y_family,
        "n": int(a.shape[0]),
        "rank": q,
        "selection": selection_info,
        "config": {
            "iters": args.iters,
            "burnin": args.burnin,
            "thin": args.thin,
            "chains": args.chains,
            "link": args.link,
            "hpd": args.hpd,
        },
        "warnings": warnings,
        "convergence_warning": extras["convergence_warning"],
        "nonconverged_parameters": extras["nonconverged_parameters"],
        "files": ["fit.json", "mediators.csv", "scree.csv", "summary.csv",
                  "summary.json", "diagnostics.csv", "manifest.json"]
        + (["draws.csv"] if args.save_draws else []),
    }
    with open(out / "manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    print(json.dumps({
        "out": str(out),
        "rank": q,
        "convergence_warning": extras["convergence_warning"],
        "warnings": warnings,
    }))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_network_args(p):
    p.add_argument("--network", help="adjacency matrix CSV (square 0/1, optional header)")
    p.add_argument("--edges", help="edge list CSV with header 'from,to'")
    p.add_argument("--nodes", help="node universe file, one id per line (with --edges)")


def _add_chain_args(p, iters=30000, burnin=5000):
    p.add_argument("--iters", type=int, default=iters, help="MCMC iterations per chain")
    p.add_argument("--burnin", type=int, default=burnin, help="burn-in iterations")
    p.add_argument("--thin", type=int, default=1, help="thinning interval")
    p.add_argument("--seed", type=int, default=0, help="root RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netmediate",
        description="Two-stage network mediation analysis (latent eigenmodel + Bayesian mediation)",
    )
    parser.add_argument("--version", action="version", version=f"netmediate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="network descriptive statistics")
    _add_network_args(p)
    p.add_argument("--out", help="optional path for the JSON report")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("simulate", help="generate a seeded network with ground truth")
    p.add_argument("--family", required=True,
                   choices=["erdos-renyi", "latent-class", "latent-distance", "eigenmodel"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--p", type=float, help="edge probability (erdos-renyi)")
    p.add_argument("--block-sizes", help="comma-separated class sizes (latent-class)")
    p.add_argument("--p-within", type=float, default=0.5)
    p.add_argument("--p-between", type=float, default=0.05)
    p.add_argument("--dims", type=int, default=2, help="latent dimension (latent-distance)")
    p.add_argument("--intercept", type=float, default=0.0, help="intercept (latent-distance)")
    p.add_argument("--lambdas", default="8,4", help="comma-separated eigen weights (eigenmodel)")
    p.add_argument("--beta", type=float, help="dyadic covariate coefficient (eigenmodel)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eigenfit", help="stage one: fit the latent eigenmodel")
    _add_network_args(p)
    p.add_argument("--covariates", help="nodal covariates CSV (id column first)")
    p.add_argument("--homophily", help="categorical column for the dyadic homophily covariate")
    p.add_argument("--rank", default="2", help="latent dimension Q, or 'auto'")
    p.add_argument("--q-max", type=int, default=5, help="largest Q tried with --rank auto")
    p.add_argument("--link", default="logit", choices=["logit", "probit"])
    p.add_argument("--full-draws", action="store_true", help="include latent draws in fit.json")
    _add_chain_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_eigenfit)

    p = sub.add_parser("mediate", help="stage two: mediation on exported mediators")
    p.add_argument("--mediators", required=True, help="mediators.csv from eigenfit")
    p.add_argument("--covariates", required=True, help="nodal covariates CSV")
    p.add_argument("--x", required=True, help="predictor column")
    p.add_argument("--y", required=True, help="outcome column")
    p.add_argument("--y-family", default="continuous", choices=["continuous", "binary"])
    p.add_argument("--chains", type=int, default=3, help="number of MCMC chains")
    p.add_argument("--hpd", type=float, default=0.95, help="HPD interval probability")
    p.add_argument("--save-draws", action="store_true", help="export draws.csv")
    _add_chain_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_mediate)

    p = sub.add_parser("diagnose", help="convergence diagnostics for a draw export")
    p.add_argument("--draws", required=True, help="draws.csv produced with --save-draws")
    p.add_argument("--out", help="optional diagnostics CSV path")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("pipeline", help="two-stage pipeline with manifest")
    _add_network_args(p)
    p.add_argument("--covariates", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--y-family", default="continuous", choices=["continuous", "binary"])
    p.add_argument("--homophily", help="categorical column: triggers the conditional model")
    p.add_argument("--rank", default="auto", help="latent dimension Q, or 'auto'")
    p.add_argument("--q-max", type=int, default=5)
    p.add_argument("--link", default="logit", choices=["logit", "probit"])
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--hpd", type=float, default=0.95)
    p.add_argument("--save-draws", action="store_true")
    p.add_argument("--full-draws", action="store_true")
    _add_chain_args(p)
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
