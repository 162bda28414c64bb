"""Seeded, reproducible experiment runner.

Every verification pipeline is a subcommand emitting a JSON report on stdout
(sorted keys; bit-for-bit reproducible for fixed params+seed).  Exit status:
0 success, 1 a theorem-backed check failed, 2 usage/input error, 3 a resource
guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, asymptotics, coupling, exactcount, graphcore, overlap, sampler, symmat
from .errors import EdgeListFormatError, RegglabError, RegimeViolation, Singular, TooLarge
from .rng import SeedSpec

EXIT_OK = 0
EXIT_THEOREM_FAIL = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

REPORT_SCHEMA = "v1"


@dataclass
class ExperimentReport:
    command: str
    params: dict
    seed: SeedSpec
    results: dict = field(default_factory=dict)
    runtime_ms: int = 0
    version: str = __version__

    def to_json(self) -> str:
        payload = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "params": _plain(self.params),
            "seed": self.seed.to_dict(),
            "results": _plain(self.results),
            "runtime_ms": self.runtime_ms,
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @staticmethod
    def from_json(text: str) -> "ExperimentReport":
        raw = json.loads(text)
        return ExperimentReport(
            command=raw["command"],
            params=raw["params"],
            seed=SeedSpec(**raw["seed"]),
            results=raw["results"],
            runtime_ms=raw["runtime_ms"],
            version=raw["version"],
        )


def _plain(obj):
    """JSON-safe copy: Fractions become 'p/q' strings, tuples become lists."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _parse_config(path: str) -> dict:
    """key = value lines; '#' comments and blank lines ignored."""
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args, config: dict, name: str, default, cast):
    val = getattr(args, name, None)
    if val is not None:
        return val
    if name in config:
        return cast(config[name])
    return default


def _default_seed(args, config) -> SeedSpec:
    base = _resolve(args, config, "seed", None, int)
    if base is None:
        base = int(os.environ.get("REGGLAB_SEED", "0"))
    return SeedSpec(int(base))


def _map_trials(fn, indices, threads: int):
    """Order-preserving map over trial indices; results are positionally
    reduced so the outcome is thread-count invariant."""
    if threads <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, indices))


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")


# -- subcommands -----------------------------------------------------------------


def cmd_count(args, config) -> tuple[ExperimentReport, int]:
    seed = _default_seed(args, config)
    h = _resolve(args, config, "h", None, int)
    if h is None:
        raise ValueError("--h is required")
    if args.complete is not None:
        g = graphcore.complete_graph(args.complete)
        source = f"complete:{args.complete}"
    else:
        g = graphcore.load_edge_list(args.graph)
        source = args.graph
    report = ExperimentReport(
        command="count",
        params={"graph": source, "h": h, "n": g.n},
        seed=seed,
    )
    exact = exactcount.count_regular_spanning_subgraphs(g, h)
    report.results["exact_count"] = exact
    cert = g.is_regular()
    if cert.valid and 0 < h < cert.degree:
        est = asymptotics.rhat(g.n, h, cert.degree)
        report.results["rhat_log"] = est.log_value
        if exact > 0:
            report.results["rhat_ratio"] = est.ratio_to(exact)
        try:
            t5 = asymptotics.theorem5_count(g, h)
            report.results["theorem5_log"] = t5.log_value
            if exact > 0:
                report.results["theorem5_ratio"] = t5.ratio_to(exact)
        except Singular:
            report.results["theorem5_log"] = None
            report.results["note"] = "singular signless Laplacian (bipartite host)"
    return report, EXIT_OK


def cmd_conjectures(args, config) -> tuple[ExperimentReport, int]:
    seed = _default_seed(args, config)
    n, d1, d2 = args.n, args.d1, args.d2
    mode = args.mode
    threads = _resolve(args, config, "threads", 1, int)
    max_enum = _resolve(args, config, "max_enum", 12, int)
    report = ExperimentReport(
        command="conjectures",
        params={"n": n, "d1": d1, "d2": d2, "mode": mode},
        seed=seed,
    )
    status = EXIT_OK
    d = d1 + d2
    est = asymptotics.conjecture2_estimate(n, d1, d2)
    report.results["estimate_log"] = est.log_value
    if mode == "exact":
        moments = exactcount.exact_moments(n, d1, d, max_enum=max_enum)
        report.results["first_moment"] = moments.first
        report.results["second_moment"] = moments.second
        report.results["second_over_first_sq"] = moments.ratio
        report.results["estimate_over_first"] = est.ratio_to(float(moments.first))
        d3 = n - 1 - d
        if d3 >= 0:
            partitions = exactcount.count_clique_partitions(n, [d1, d2, d3], max_n=max(n, 8))
            host_count = exactcount.count_regular_spanning_subgraphs(graphcore.complete_graph(n), d)
            identity_holds = moments.first * host_count == partitions
            report.results["partition_count"] = partitions
            report.results["double_counting_identity"] = "pass" if identity_holds else "fail"
            if not identity_holds:
                status = EXIT_THEOREM_FAIL
        eps_star, _, sprink = coupling.build_sprinkling_coupling(n, d1, d2, max_n=max(n, 8))
        report.results["sprinkling_eps_star"] = eps_star
        report.results["count_histogram"] = {str(k): v for k, v in sorted(sprink.count_histogram.items())}
    else:
        trials = _resolve(args, config, "trials", 1000, int)

        def one(i: int) -> int:
            g, _ = sampler.sample_switching(n, d, seed.child(i))
            return exactcount.count_regular_spanning_subgraphs(g, d1)

        counts = _map_trials(one, range(trials), threads)
        mean = sum(counts) / trials
        mean_sq = sum(c * c for c in counts) / trials
        var = max(0.0, mean_sq - mean * mean)
        report.results["trials"] = trials
        report.results["first_moment_mc"] = mean
        report.results["first_moment_stderr"] = math.sqrt(var / trials)
        report.results["second_moment_mc"] = mean_sq
        if mean > 0:
            report.results["second_over_first_sq_mc"] = mean_sq / (mean * mean)
        report.results["estimate_over_first"] = est.ratio_to(mean) if mean > 0 else None
        if args.csv:
            _write_csv(args.csv, ["trial", "count"], [[i, c] for i, c in enumerate(counts)])
    return report, status


def cmd_overlap(args, config) -> tuple[ExperimentReport, int]:
    seed = _default_seed(args, config)
    n, h = args.n, args.h
    mode = args.mode
    alphas = [float(a) if a != "e" else math.e for a in (args.alpha or ["e"])]
    max_perm = _resolve(args, config, "max_perm", 9, int)
    report = ExperimentReport(
        command="overlap",
        params={"n": n, "h": h, "mode": mode, "alpha": [round(a, 6) for a in alphas]},
        seed=seed,
    )
    status = EXIT_OK
    h1 = sampler.circulant_start(n, h)
    h2 = h1
    if mode == "exact":
        dist = overlap.overlap_distribution_exact(h1, h2, max_perm=max_perm)
        report.results["pmf"] = {str(m): p for m, p in sorted(dist.pmf.items())}
    else:
        trials = _resolve(args, config, "trials", 10000, int)
        dist = overlap.overlap_distribution_mc(h1, h2, trials, seed)
        report.results["pmf"] = {str(m): list(v) for m, v in sorted(dist.pmf.items())}
    ref = {m: asymptotics.overlap_pmf(h, m) for m in range(0, max(50, n * h))}
    report.results["tv_to_poisson"] = dist.tv_distance_to(ref)
    tail_results = {}
    for alpha in alphas:
        m_alpha, bound, _ = asymptotics.overlap_tail_bound(h, n, alpha)
        p_tail = dist.tail_probability(m_alpha)
        ok = float(p_tail) <= bound
        tail_results[f"{alpha:.4f}"] = {
            "m_alpha": m_alpha,
            "bound": bound,
            "tail_probability": p_tail,
            "pass": ok,
        }
        if mode == "exact" and not ok:
            status = EXIT_THEOREM_FAIL
    report.results["tail_bounds"] = tail_results
    if args.csv:
        rows = []
        if mode == "exact":
            for m, p in sorted(dist.pmf.items()):
                rows.append([m, p.numerator, p.denominator])
            _write_csv(args.csv, ["m", "numerator", "denominator"], rows)
        else:
            for m, (est, se) in sorted(dist.pmf.items()):
                rows.append([m, repr(est), repr(se)])
            _write_csv(args.csv, ["m", "estimate", "stderr"], rows)
    return report, status


def cmd_spectra(args, config) -> tuple[ExperimentReport, int]:
    seed = _default_seed(args, config)
    n, d = args.n, args.d
    samples = args.samples
    regime = args.regime
    threads = _resolve(args, config, "threads", 1, int)
    report = ExperimentReport(
        command="spectra",
        params={"n": n, "d": d, "samples": samples, "regime": regime,
                "alpha": args.alpha_param},
        seed=seed,
    )
    status = EXIT_OK

    def one(i: int):
        g, _ = sampler.sample_switching(n, d, seed.child(i))
        sign, logdet = symmat.determinant(graphcore.signless_laplacian(g))
        lo, hi = graphcore.common_neighbour_range(g)
        return g, sign, logdet, lo, hi

    rows = _map_trials(one, range(samples), threads)
    band_pass = 0
    band_fail = 0
    qualifying = 0
    det_zero = 0
    window_pass = 0
    csv_rows = []
    target = d * d / n
    width = d ** 3 / (n * n * math.log(n)) if n >= 2 else 0.0
    for i, (g, sign, logdet, lo, hi) in enumerate(rows):
        in_window = (target - width) <= lo and hi <= (target + width)
        window_pass += in_window
        if sign == 0:
            det_zero += 1
            csv_rows.append([i, "nan", lo, hi, "det_zero"])
            continue
        if regime == "dense":
            alpha = args.alpha_param if args.alpha_param is not None else d / n
            try:
                center, hw = asymptotics.detq_band(n, d, "dense", alpha)
            except RegimeViolation:
                csv_rows.append([i, logdet, lo, hi, "regime_violation"])
                continue
            qualifying += 1
            ok = abs(logdet - center) <= hw
        else:
            eps = asymptotics.measured_codegree_eps(g)
            if eps > 0.25:
                csv_rows.append([i, logdet, lo, hi, f"eps={eps:.3f}>1/4"])
                continue
            center, hw = asymptotics.detq_band(n, d, "quasirandom", eps)
            qualifying += 1
            ok = abs(logdet - center) <= hw
        band_pass += ok
        band_fail += not ok
        csv_rows.append([i, logdet, lo, hi, "pass" if ok else "FAIL"])
    if band_fail:
        status = EXIT_THEOREM_FAIL
    report.results["qualifying_samples"] = qualifying
    report.results["band_pass"] = band_pass
    report.results["band_fail"] = band_fail
    report.results["det_zero_flagged"] = det_zero
    report.results["codegree_window_pass"] = window_pass
    report.results["codegree_window"] = [target - width, target + width]
    if args.csv:
        _write_csv(args.csv, ["sample", "logdetQ", "codeg_min", "codeg_max", "band"], csv_rows)
    return report, status


def cmd_moments(args, config) -> tuple[ExperimentReport, int]:
    seed = _default_seed(args, config)
    n, d, h = args.n, args.d, args.h
    samples = args.samples
    mc_trials = _resolve(args, config, "mc_trials", 100000, int)
    threads = _resolve(args, config, "threads", 1, int)
    max_enum = _resolve(args, config, "max_enum", 12, int)
    report = ExperimentReport(
        command="moments",
        params={"n": n, "d": d, "h": h, "samples": samples, "mc_trials": mc_trials},
        seed=seed,
    )
    status = EXIT_OK
    lam = h / d

    def one(i: int):
        g, _ = sampler.sample_switching(n, d, seed.child(i))
        try:
            exp_u, exp_v2 = asymptotics.isserlis_moments(g, lam)
        except Singular:
            return {"sample": i, "singular": True}
        field_ = asymptotics.GaussianField.from_graph(g)
        x = field_.sample(seed.child(10**6 + i), mc_trials)
        eu, ev = asymptotics._edge_arrays(g)
        s = x[:, eu] + x[:, ev]
        cu = (1 / 24) * lam * (1 - lam) * (1 - 6 * lam + 6 * lam * lam)
        cv = (1 / 6) * lam * (1 - lam) * (1 - 2 * lam)
        u_samp = cu * (s ** 4).sum(axis=1)
        v2_samp = (cv * (s ** 3).sum(axis=1)) ** 2
        out = {"sample": i, "singular": False}
        for name, vals, exact in (("u", u_samp, exp_u), ("v2", v2_samp, exp_v2)):
            se = vals.std(ddof=1) / math.sqrt(mc_trials)
            z = 0.0 if se == 0 else (vals.mean() - exact) / se
            out[f"exp_{name}"] = exact
            out[f"mc_{name}"] = float(vals.mean())
            out[f"z_{name}"] = float(z)
        if n <= max_enum and g.n <= 64:
            exact_count = exactcount.count_regular_spanning_subgraphs(g, h)
            if exact_count > 0 and 0 < h < d:
                t5 = asymptotics.theorem5_count(g, h)
                out["exact_count"] = exact_count
                out["theorem5_ratio"] = t5.ratio_to(exact_count)
        return out

    rows = _map_trials(one, range(samples), threads)
    zmax = 0.0
    singular = 0
    for r in rows:
        if r.get("singular"):
            singular += 1
            continue
        zmax = max(zmax, abs(r["z_u"]), abs(r["z_v2"]))
    report.results["samples"] = rows
    report.results["max_abs_z"] = zmax
    report.results["singular_flagged"] = singular
    if args.csv:
        hdr = ["sample", "z_u", "z_v2", "exp_u", "exp_v2"]
        _write_csv(args.csv, hdr,
                   [[r["sample"], r.get("z_u"), r.get("z_v2"), r.get("exp_u"), r.get("exp_v2")]
                    for r in rows if not r.get("singular")])
    return report, status


# -- wiring ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regglab",
        description="Exact counting, sampling, spectra, and coupling experiments "
                    "on regular graph ensembles.",
    )
    parser.add_argument("--version", action="version", version=f"regglab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="base seed (default: REGGLAB_SEED env var or 0)")
    common.add_argument("--config", default=None, help="key = value preset file")
    common.add_argument("--threads", type=int, default=None,
                        help="parallelise trial loops (thread-count invariant)")
    common.add_argument("--csv", default=None, help="write tabular dump to this path")
    common.add_argument("--max-enum", dest="max_enum", type=int, default=None,
                        help="exhaustive enumeration guard (default 12)")
    common.add_argument("--max-perm", dest="max_perm", type=int, default=None,
                        help="n! permutation guard (default 9)")

    p = sub.add_parser("count", parents=[common],
                       help="exact spanning-subgraph count plus estimates")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--complete", type=int, help="use the complete graph on N vertices")
    src.add_argument("--graph", help="edge-list file")
    p.add_argument("--h", type=int, required=True, help="target subgraph degree")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("conjectures", parents=[common],
                       help="moments, double-counting identity, optimal coupling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(handler=cmd_conjectures)

    p = sub.add_parser("overlap", parents=[common],
                       help="common-edge law, Poisson distance, tail bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--alpha", nargs="+", default=None,
                   help="tail-bound alphas ('e' or numbers >= e)")
    p.set_defaults(handler=cmd_overlap)

    p = sub.add_parser("spectra", parents=[common],
                       help="log det Q band membership and codegree windows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--regime", choices=["dense", "quasirandom"], default="dense")
    p.add_argument("--alpha-param", dest="alpha_param", type=float, default=None,
                   help="alpha for the dense band (default d/n)")
    p.set_defaults(handler=cmd_spectra)

    p = sub.add_parser("moments", parents=[common],
                       help="Gaussian moment checks and corrected-count ratios")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--mc-trials", dest="mc_trials", type=int, default=None)
    p.set_defaults(handler=cmd_moments)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if getattr(args, "config", None):
        try:
            config = _parse_config(args.config)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    start = time.perf_counter()
    try:
        report, status = args.handler(args, config)
    except EdgeListFormatError as exc:
        print(f"error: malformed edge list: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooLarge as exc:
        print(f"error: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (RegglabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.runtime_ms = int((time.perf_counter() - start) * 1000)
    print(report.to_json())
    return status


if __name__ == "__main__":
    sys.exit(main())
