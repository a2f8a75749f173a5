"""Command-line front end: one subcommand per analysis surface.

Every run emits machine-readable output (JSON by default, CSV for sweeps)
with an embedded manifest recording the command line, resolved config,
seed, profile, and tool version, so any artifact can be replayed.  Output
is byte-stable for identical inputs: keys are sorted, floats use their
shortest round-trip form, and the manifest timestamp stays null unless
KCOLORLAB_TIMESTAMP=1 is set.  The worker count is an execution resource,
not an input, so the manifest omits it and output is byte-identical
across --workers values.

Exit codes: 0 success, 1 computation error (domain or budget), 2 usage
error.  Randomized subcommands refuse to run without --seed.
"""

from __future__ import annotations

import argparse
import datetime
import io
import json
import os
import sys
from typing import Optional

from . import __version__
from .errors import BudgetError, DomainError
from . import corepeel, graphs, moments, variational
from .thresholds import threshold_rows, write_threshold_csv
from .overlap import (
    ConstantsProfile,
    ModelParams,
    OverlapMatrix,
    classify_region,
    energy_E,
    f_value,
    special_matrix,
)

CONFIG_ENV = "KCOLORLAB_CONFIG"
TIMESTAMP_ENV = "KCOLORLAB_TIMESTAMP"


def _load_config() -> dict:
    """Optional key=value config file pointed to by the environment variable."""
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    config: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, _, value = line.partition("=")
                config[key.strip()] = value.strip()
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}")
    return config


def _resolve(flag_value, config: dict, key: str, default, cast):
    """Flag beats config file beats built-in default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return cast(config[key])
    return default


def _strip_workers(argv: list) -> list:
    out = []
    skip = False
    for token in argv:
        if skip:
            skip = False
            continue
        if token == "--workers":
            skip = True
            continue
        if token.startswith("--workers="):
            continue
        out.append(token)
    return out


def _manifest(args: argparse.Namespace, resolved: dict) -> dict:
    timestamp = None
    if os.environ.get(TIMESTAMP_ENV) == "1":
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return {
        "command": _strip_workers(getattr(args, "_argv", sys.argv[1:])),
        "config": {k: resolved[k] for k in sorted(resolved) if k != "workers"},
        "seed": getattr(args, "seed", None),
        "profile": resolved.get("profile"),
        "version": __version__,
        "timestamp": timestamp,
    }


def _emit(payload: dict, args: argparse.Namespace, csv_text: Optional[str] = None) -> None:
    if getattr(args, "csv", False):
        if csv_text is None:
            raise DomainError("this subcommand has no CSV form")
        text = csv_text
    elif getattr(args, "json", False) or not payload.get("plain"):
        body = {k: v for k, v in payload.items() if k != "plain"}
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    else:
        text = str(payload["plain"]) + "\n"
    out = getattr(args, "out", None)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise DomainError(f"cannot write {out}: {exc}")
    else:
        sys.stdout.write(text)


def _profile_for(args: argparse.Namespace, config: dict, k: int) -> ConstantsProfile:
    name = _resolve(getattr(args, "profile", None), config, "profile", "desk", str)
    return ConstantsProfile.by_name(name, k)


def _require_seed(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if getattr(args, "seed", None) is None:
        parser.error("this command is randomized; --seed is required")
    return args.seed


def _matrix_from_args(args: argparse.Namespace) -> OverlapMatrix:
    if getattr(args, "matrix_file", None):
        path = args.matrix_file
        try:
            return OverlapMatrix.from_json(_load_json_object(path, "matrix"))
        except DomainError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"{path} does not describe an overlap matrix: {exc!r}")
    kind = getattr(args, "matrix", None)
    if kind is None:
        raise DomainError("need --matrix KIND or --matrix-file PATH")
    return special_matrix(kind, args.k, s=getattr(args, "s", None))


def _load_json_object(path: str, wrapper_key: str) -> str:
    """Read a JSON object, unwrapping `sample --out` artifacts transparently."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if wrapper_key in data:
            data = data[wrapper_key]
        return json.dumps(data)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}")
    except (json.JSONDecodeError, TypeError) as exc:
        raise DomainError(f"{path} is not a JSON object: {exc}")


def _load_graph(path: str) -> graphs.Graph:
    try:
        return graphs.Graph.from_json(_load_json_object(path, "graph"))
    except DomainError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise DomainError(f"{path} does not describe a graph: {exc!r}")


def _load_coloring(path: str) -> graphs.Coloring:
    try:
        return graphs.Coloring.from_json(_load_json_object(path, "sigma"))
    except DomainError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise DomainError(f"{path} does not describe a coloring: {exc!r}")


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_thresholds(args, config) -> None:
    k_max = args.k_max if args.k_max is not None else args.k
    if k_max < args.k:
        raise DomainError("--k-max must be at least --k")
    ks = list(range(args.k, k_max + 1))
    rows = threshold_rows(ks)
    buf = io.StringIO()
    write_threshold_csv(ks, buf)
    manifest = _manifest(args, {"k": args.k, "k_max": k_max})
    payload = {
        "manifest": manifest,
        "rows": rows,
        "plain": json.dumps(rows[0], sort_keys=True) if len(rows) == 1 else None,
    }
    csv_text = "".join(f"# {k}={v}\n" for k, v in sorted(manifest["config"].items()))
    _emit(payload, args, csv_text + buf.getvalue())


def _cmd_fvalue(args, config) -> None:
    rho = _matrix_from_args(args)
    params = ModelParams(k=rho.k, d=args.d)
    profile = _profile_for(args, config, rho.k)
    region = classify_region(rho, profile)
    value = f_value(rho, params)
    manifest = _manifest(args, {"profile": profile.name, "d": args.d})
    payload = {
        "manifest": manifest,
        "f": value,
        "energy": energy_E(rho, params),
        "entropy": value - energy_E(rho, params),
        "norm2_sq": rho.norm2_sq(),
        "region": region.to_dict(),
        "plain": repr(value),
    }
    _emit(payload, args)


def _cmd_certify(args, config) -> None:
    seed = _require_seed(args, args._parser)
    workers = _resolve(args.workers, config, "workers", 1, int)
    starts = _resolve(args.starts, config, "starts", 64, int)
    params = ModelParams(k=args.k, d=args.d)
    profile = _profile_for(args, config, args.k)
    cfg = variational.AscentConfig(
        max_iterations=args.max_iterations,
        step_tolerance=1e-10,
        multistart_count=starts,
        seed=seed,
    )
    report = variational.certify_barycenter_max(params, cfg, profile, workers=workers)
    manifest = _manifest(
        args, {"profile": profile.name, "workers": workers, "starts": starts}
    )
    payload = {"manifest": manifest, "report": json.loads(report.to_json())}
    _emit(payload, args)


def _cmd_hessian(args, config) -> None:
    params = ModelParams(k=args.k, d=args.d)
    rep = variational.hessian_at_barycenter(params)
    manifest = _manifest(args, {"k": args.k, "d": args.d})
    payload = {
        "manifest": manifest,
        "closed_form_c": rep.closed_form_c,
        "spectrum_distinct": sorted(set(rep.spectrum)),
        "multiplicities": {
            repr(-rep.closed_form_c): args.k**2 - 2,
            repr(-rep.closed_form_c * args.k**2): 1,
        },
        "negative_definite": rep.negative_definite,
        "plain": repr(rep.closed_form_c),
    }
    _emit(payload, args)


def _cmd_sample(args, config) -> None:
    seed = _require_seed(args, args._parser)
    if args.d is None and args.m is None:
        raise DomainError("need --d or --m")
    d = args.d if args.d is not None else 2.0 * args.m / args.n
    params = ModelParams(k=args.k, d=d, n=args.n, m=args.m)
    sigma = None
    if args.model in ("planted_m", "planted_p"):
        if args.sigma_file:
            sigma = _load_coloring(args.sigma_file)
        else:
            sigma = graphs.random_balanced(args.n, args.k, seed=seed + 1)
    g = graphs.sample_graph(args.model, params, sigma=sigma, seed=seed)
    manifest = _manifest(args, {"model": args.model, "n": args.n, "m": params.m})
    payload = {
        "manifest": manifest,
        "graph": json.loads(g.to_json()),
        "sigma": json.loads(sigma.to_json()) if sigma is not None else None,
    }
    _emit(payload, args)


def _cmd_moments(args, config) -> None:
    budget = _resolve(args.budget, config, "budget", moments.DEFAULT_MOMENT_BUDGET, int)
    if args.mc:
        seed = _require_seed(args, args._parser)
        trials = _resolve(args.trials, config, "trials", 200, int)
        rep = moments.mc_colorable(args.n, args.m, args.k, trials=trials, seed=seed)
        manifest = _manifest(args, {"trials": trials, "budget": budget})
        payload = {
            "manifest": manifest,
            "fraction": rep.fraction,
            "ci95": rep.ci95,
            "successes": rep.successes,
            "trials": rep.trials,
            "method": rep.method,
            "plain": repr(rep.fraction),
        }
        _emit(payload, args)
        return
    rep = moments.exact_moment(
        args.n, args.m, args.k, order=args.order,
        balanced_only=args.balanced, budget=budget,
    )
    manifest = _manifest(args, {"budget": budget})
    report_json = json.loads(rep.to_json())
    buf = io.StringIO()
    moments.write_moment_csv([rep], buf)
    csv_text = "".join(f"# {k}={v}\n" for k, v in sorted(manifest["config"].items()))
    payload = {
        "manifest": manifest,
        "report": report_json,
        "plain": report_json["value"],
    }
    _emit(payload, args, csv_text + buf.getvalue())


def _cmd_cluster(args, config) -> None:
    budget = _resolve(args.budget, config, "budget", graphs.DEFAULT_BUDGET, int)
    profile = _profile_for(args, config, args.k)
    if args.graph_file and args.sigma_file:
        g = _load_graph(args.graph_file)
        sigma = _load_coloring(args.sigma_file)
        seed = getattr(args, "seed", None)
    else:
        seed = _require_seed(args, args._parser)
        d = args.d if args.d is not None else 2.0 * args.m / args.n
        params = ModelParams(k=args.k, d=d, n=args.n, m=args.m)
        sigma = graphs.random_balanced(args.n, args.k, seed=seed + 1)
        g = graphs.sample_graph("planted_m", params, sigma=sigma, seed=seed)
    cset = graphs.cluster(g, sigma, profile, budget=budget)
    res = corepeel.core(g, sigma, profile)
    census = corepeel.vertex_census(g, sigma, res.core_vertices, profile)
    bound = corepeel.cluster_bound(census, sigma.k)
    manifest = _manifest(args, {"profile": profile.name, "budget": budget})
    payload = {
        "manifest": manifest,
        "cluster_size": len(cset.members),
        "census_bound": bound,
        "f1": len(census.f1),
        "f2": len(census.f2),
        "sigma_complete": len(census.sigma_complete),
        "plain": len(cset.members),
    }
    _emit(payload, args)


def _cmd_core(args, config) -> None:
    profile = _profile_for(args, config, args.k)
    if args.graph_file and args.sigma_file:
        g = _load_graph(args.graph_file)
        sigma = _load_coloring(args.sigma_file)
    else:
        seed = _require_seed(args, args._parser)
        d = args.d if args.d is not None else 2.0 * args.m / args.n
        params = ModelParams(k=args.k, d=d, n=args.n, m=args.m)
        sigma = graphs.random_balanced(args.n, args.k, seed=seed + 1)
        g = graphs.sample_graph("planted_m", params, sigma=sigma, seed=seed)
    res = corepeel.core(g, sigma, profile)
    sets = corepeel.cr_sets(g, sigma, profile)
    census = corepeel.vertex_census(g, sigma, res.core_vertices, profile)
    outside = sorted(set(range(g.n)) - sets.w_union() - set(sets.Z))
    manifest = _manifest(args, {"profile": profile.name})
    payload = {
        "manifest": manifest,
        "core": json.loads(res.to_json()),
        "cr": json.loads(sets.to_json()),
        "census": json.loads(census.to_json()),
        "v_minus_wz_in_core": all(v in res.core_vertices for v in outside),
        "plain": len(res.core_vertices),
    }
    _emit(payload, args)


def _cmd_partition(args, config) -> None:
    rho = _matrix_from_args(args)
    profile = _profile_for(args, config, rho.k)
    label = moments.laplace_partition(rho, args.eta, profile)
    manifest = _manifest(args, {"profile": profile.name, "eta": args.eta})
    payload = {
        "manifest": manifest,
        "label": label.label,
        "eta": label.eta,
        "plain": label.label,
    }
    _emit(payload, args)


def _cmd_xi(args, config) -> None:
    prof = variational.xi_profile(args.k)
    check = prof.grid_check()
    manifest = _manifest(args, {"k": args.k})
    payload = {
        "manifest": manifest,
        "mu": prof.mu,
        "xi_at_1": prof.xi(1.0),
        "xi_prime_at_1": prof.xi_prime(1.0),
        "monotone_segments": prof.monotone_segments,
        "grid_check": check,
        "plain": repr(prof.mu),
    }
    _emit(payload, args)


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed for randomized work")
    p.add_argument("--profile", choices=["paper", "desk"], default=None)
    p.add_argument("--json", action="store_true", help="emit JSON (default)")
    p.add_argument("--csv", action="store_true", help="emit CSV where supported")
    p.add_argument("--out", type=str, default=None, help="write output to this path")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcolorlab",
        description="Desk-scale laboratory for coloring-count moment analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="degree thresholds and windows")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--k-max", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("fvalue", help="objective value of a named or stored matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--matrix", choices=["barycenter", "identity", "stable", "half", "s_stable"])
    p.add_argument("--matrix-file", type=str, default=None)
    p.add_argument("--s", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_fvalue)

    p = sub.add_parser("certify", help="multistart barycenter certification")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=400)
    _add_common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("hessian", help="closed-form Hessian at the barycenter")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_hessian)

    p = sub.add_parser("sample", help="draw one graph from a model")
    p.add_argument("--model", choices=["gnm", "gnp", "planted_m", "planted_p"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--sigma-file", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("moments", help="exact or Monte-Carlo moments")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", type=int, choices=[1, 2], default=1)
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--exact", action="store_true", help="exact enumeration (default)")
    p.add_argument("--mc", action="store_true", help="Monte-Carlo colorability instead")
    p.add_argument("--trials", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("cluster", help="cluster of a planted or supplied coloring")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--graph-file", type=str, default=None)
    p.add_argument("--sigma-file", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("core", help="core, W/U/Z sets, and vertex census")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--graph-file", type=str, default=None)
    p.add_argument("--sigma-file", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_core)

    p = sub.add_parser("partition", help="Laplace region label of a matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--matrix", choices=["barycenter", "identity", "stable", "half", "s_stable"])
    p.add_argument("--matrix-file", type=str, default=None)
    p.add_argument("--s", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("xi", help="xi profile and its interior minimum")
    p.add_argument("--k", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_xi)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    args._parser = parser
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        config = _load_config()
        args.func(args, config)
    except (DomainError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
