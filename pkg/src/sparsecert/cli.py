"""Command-line front end.

Subcommands: analyze, certify, tight-example, experiment, prob-bound,
sparsity-curve, szarek-check, gen-instance. Exit codes are a stable
contract for scripting: 0 success, 2 precondition or domain failure,
3 subset budget exceeded, 4 I/O or parse failure.

Machine CSV output carries 17 significant digits; human summaries use 6.
Every randomized subcommand echoes its master seed and derives per-trial
seeds deterministically, so re-running with the echoed seed reproduces the
output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import gamma_profile, kruskal_rank
from .backend import ACTIVE_BACKEND
from .certify import (
    first_bound,
    loose_bound,
    noisy_loose_bound,
    noisy_tight_bound,
    tight_bound,
    tightness_example,
    THETA_MAX_DEGREES,
)
from .errors import (
    BudgetExceededError,
    DomainError,
    InvalidInputError,
    ParseError,
    PreconditionError,
    SingularityError,
    SparseCertError,
    UnsupportedSizeError,
)
from .matops import read_matrix, read_vector
from .random_dict import failure_bound, sparsity_supremum, szarek_check
from .recover import make_instance, sl0_solve, write_instance
from .seeding import RNG_ALGORITHM, trial_seeds

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _g17(v: float) -> str:
    return f"{v:.17g}"


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    a = read_matrix(args.matrix)
    if args.depth is None:
        rank = kruskal_rank(a, budget=args.budget)
        depth = min(rank.q, a.shape[1] - 1)
    else:
        depth = args.depth
    profile = gamma_profile(a, depth=depth, budget=args.budget)
    _emit(args, profile.to_csv())
    spark = "unknown" if profile.spark is None else str(profile.spark)
    print(
        f"n={profile.n} m={profile.m} q={profile.q} spark={spark} "
        f"depth={profile.depth} unit_columns={profile.unit_columns}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

BOUND_KINDS = ("first", "loose", "tight", "noisy-loose", "noisy-tight")


def cmd_certify(args) -> int:
    a = read_matrix(args.matrix)
    s_hat = read_vector(args.shat)
    n, m = a.shape
    if s_hat.size != m:
        raise InvalidInputError(
            f"candidate has {s_hat.size} entries but the dictionary has {m} columns"
        )
    kind = args.bound
    if kind != "first" and args.ell is None:
        raise InvalidInputError(f"--ell is required for bound kind {kind!r}")
    if kind == "first":
        profile = gamma_profile(a, depth=1, budget=args.budget)
        cert = first_bound(a, profile, s_hat, budget=args.budget)
    elif kind == "noisy-tight":
        cert = noisy_tight_bound(a, s_hat, args.ell, args.eps, args.delta, budget=args.budget)
    else:
        profile = gamma_profile(a, depth=args.ell, budget=args.budget)
        if kind == "loose":
            cert = loose_bound(profile, s_hat, args.ell)
        elif kind == "tight":
            cert = tight_bound(profile, s_hat, args.ell)
        else:
            cert = noisy_loose_bound(profile, s_hat, args.ell, args.eps, args.delta)
    print(cert.to_json())
    if cert.withheld:
        failed = ", ".join(c.name for c in cert.checks if not c.passed)
        print(f"bound withheld: failed checks: {failed}", file=sys.stderr)
        return EXIT_PRECONDITION
    if cert.bound == 0.0 and cert.delta_total == 0.0:
        print("uniqueness certified: the candidate is the sparsest solution", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# tight-example
# ---------------------------------------------------------------------------


def cmd_tight_example(args) -> int:
    try:
        ex = tightness_example(args.theta, args.alpha)
    except DomainError as exc:
        print(f"error: {exc} (valid range is 0 < theta < {THETA_MAX_DEGREES:.6g})", file=sys.stderr)
        return EXIT_PRECONDITION
    x_norm = float(np.linalg.norm(ex.x))
    feas_ok = max(ex.s0_residual, ex.s_hat_residual) <= 1e-10 * max(x_norm, 1e-300)
    gamma_rel = abs(ex.gamma_bar - ex.gamma_bar_closed_form) / ex.gamma_bar_closed_form
    gamma_ok = gamma_rel < 1e-9
    equality_ok = ex.equality_residual < 1e-9
    lines = [
        f"theta_degrees {ex.theta_degrees:.6g}",
        f"alpha {ex.alpha:.6g}",
        f"beta {ex.beta:.6g}",
        f"check both_solve_system: residuals {ex.s0_residual:.6g} {ex.s_hat_residual:.6g} "
        f"-> {'PASS' if feas_ok else 'FAIL'}",
        f"check amplification_constant: computed {ex.gamma_bar:.6g} closed_form "
        f"{ex.gamma_bar_closed_form:.6g} -> {'PASS' if gamma_ok else 'FAIL'}",
        f"check equality_attained: error {ex.error_norm:.6g} bound {ex.bound:.6g} "
        f"relative_residual {ex.equality_residual:.6g} -> {'PASS' if equality_ok else 'FAIL'}",
    ]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if (feas_ok and gamma_ok and equality_ok) else EXIT_PRECONDITION


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialReport:
    trial: int
    seed: int
    status: str
    actual_error: float
    first_bound: float
    loose_bound: float
    tight_bound: float
    first_ratio: float
    loose_ratio: float
    tight_ratio: float


@dataclass(frozen=True)
class ExperimentReport:
    n: int
    m: int
    p: int
    ell: int
    sigma_min: float
    trials: int
    master_seed: int
    rows: tuple[TrialReport, ...]
    mean_first_ratio: float
    mean_loose_ratio: float
    mean_tight_ratio: float

    def to_csv(self) -> str:
        lines = [
            f"# config n={self.n} m={self.m} p={self.p} ell={self.ell} "
            f"sigma_min={_g17(self.sigma_min)} trials={self.trials} "
            f"master_seed={self.master_seed} rng={RNG_ALGORITHM} backend={ACTIVE_BACKEND}",
            "trial,seed,status,actual_error,first_bound,loose_bound,tight_bound,"
            "first_ratio,loose_ratio,tight_ratio",
        ]
        for r in self.rows:
            lines.append(
                f"{r.trial},{r.seed},{r.status},"
                + ",".join(
                    _g17(v)
                    for v in (
                        r.actual_error,
                        r.first_bound,
                        r.loose_bound,
                        r.tight_bound,
                        r.first_ratio,
                        r.loose_ratio,
                        r.tight_ratio,
                    )
                )
            )
        lines.append(f"# mean_first_ratio={_g17(self.mean_first_ratio)}")
        lines.append(f"# mean_loose_ratio={_g17(self.mean_loose_ratio)}")
        lines.append(f"# mean_tight_ratio={_g17(self.mean_tight_ratio)}")
        return "\n".join(lines) + "\n"


def run_experiment(
    n: int,
    m: int,
    p: int,
    trials: int,
    sigma_min: float,
    master_seed: int,
    budget: int | None = None,
) -> ExperimentReport:
    """Deliberately-coarse solver runs with all three noiseless bounds.

    Each trial draws a normalized Gaussian dictionary and a p-sparse truth,
    solves with the smoothed-l0 solver at the given final smoothing width,
    and certifies the result at ell = 2p. Trial failures are recorded in
    the status column and the run continues.
    """
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    ell = 2 * p
    seeds = trial_seeds(master_seed, trials)
    rows = []
    for t in range(trials):
        seed = int(seeds[t])
        try:
            inst = make_instance(n, m, p, 0.0, seed, normalize_columns=True)
            s_hat = sl0_solve(inst.dictionary, inst.x, sigma_min=sigma_min)
            profile = gamma_profile(inst.dictionary, depth=ell, budget=budget)
            cert_first = first_bound(inst.dictionary, profile, s_hat, budget=budget)
            cert_loose = loose_bound(profile, s_hat, ell)
            cert_tight = tight_bound(profile, s_hat, ell)
            if cert_first.withheld:
                raise PreconditionError("first bound withheld")
            actual = float(np.linalg.norm(s_hat - inst.s0))
            rows.append(
                TrialReport(
                    trial=t,
                    seed=seed,
                    status="ok",
                    actual_error=actual,
                    first_bound=cert_first.bound,
                    loose_bound=cert_loose.bound,
                    tight_bound=cert_tight.bound,
                    first_ratio=cert_first.bound / actual,
                    loose_ratio=cert_loose.bound / actual,
                    tight_ratio=cert_tight.bound / actual,
                )
            )
        except SparseCertError as exc:
            note = str(exc).replace(",", ";")
            rows.append(
                TrialReport(t, seed, f"error: {note}", *([math.nan] * 7))
            )
    ok = [r for r in rows if r.status == "ok"]
    mean = lambda vals: float(np.mean(vals)) if vals else math.nan
    return ExperimentReport(
        n=n,
        m=m,
        p=p,
        ell=ell,
        sigma_min=sigma_min,
        trials=trials,
        master_seed=int(master_seed),
        rows=tuple(rows),
        mean_first_ratio=mean([r.first_ratio for r in ok]),
        mean_loose_ratio=mean([r.loose_ratio for r in ok]),
        mean_tight_ratio=mean([r.tight_ratio for r in ok]),
    )


def cmd_experiment(args) -> int:
    report = run_experiment(
        args.n, args.m, args.p, args.trials, args.sigma_min, args.seed, budget=args.budget
    )
    _emit(args, report.to_csv())
    print(
        f"mean ratios over {len([r for r in report.rows if r.status == 'ok'])} ok trials: "
        f"first {report.mean_first_ratio:.6g} loose {report.mean_loose_ratio:.6g} "
        f"tight {report.mean_tight_ratio:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# prob-bound
# ---------------------------------------------------------------------------


def cmd_prob_bound(args) -> int:
    report = failure_bound(args.n, args.m, args.ell, args.r1, args.r2)
    record = {
        "n": report.n,
        "m": report.m,
        "ell": report.ell,
        "r1": report.r1,
        "r2": report.r2,
        "gamma_value": report.gamma_value,
        "binom_sum": report.binom_sum,
        "log_binom_sum": report.log_binom_sum,
        "failure_prob_rhs": report.failure_prob_rhs,
        "log_failure_prob": report.log_failure_prob,
        "vacuous": report.vacuous,
        "regime_ok": report.regime_ok,
        "regime_margin": report.regime_margin,
    }
    print(json.dumps(record, separators=(", ", ": ")))
    if report.vacuous:
        print("vacuous bound: failure probability right-hand side >= 1", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sparsity-curve
# ---------------------------------------------------------------------------


def cmd_sparsity_curve(args) -> int:
    if args.beta_min < 1.0 or args.beta_max < args.beta_min or args.steps < 1:
        raise DomainError("need 1 <= beta_min <= beta_max and steps >= 1")
    try:
        c_values = [float(c) for c in args.c_list.split(",") if c.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"bad --c-list {args.c_list!r}") from exc
    if not c_values:
        raise InvalidInputError("--c-list is empty")
    betas = np.linspace(args.beta_min, args.beta_max, args.steps)
    lines = ["beta,c,u_star"]
    if any(c == 1.0 for c in c_values):
        lines.insert(
            0,
            "# c=1 rows are a supremum envelope only: that slack choice sends the "
            "amplification constant to infinity",
        )
    for c in c_values:
        for beta in betas:
            u = sparsity_supremum(float(beta), c)
            lines.append(f"{_g17(float(beta))},{_g17(c)},{_g17(u)}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# szarek-check
# ---------------------------------------------------------------------------


def cmd_szarek_check(args) -> int:
    result = szarek_check(args.n, args.p, args.r, args.trials, args.seed)
    lines = [
        f"# config n={result.n} p={result.p} r={_g17(result.r)} trials={result.trials} "
        f"seed={result.seed} rng={RNG_ALGORITHM}",
        "trial,statistic,value,threshold,exceeded",
    ]
    for t in range(result.trials):
        lines.append(
            f"{t},sigma_max,{_g17(result.sigma_max[t])},{_g17(result.threshold_max)},"
            f"{int(result.sigma_max[t] > result.threshold_max)}"
        )
        lines.append(
            f"{t},sigma_min,{_g17(result.sigma_min[t])},{_g17(result.threshold_min)},"
            f"{int(result.sigma_min[t] < result.threshold_min)}"
        )
    lines.append(f"# freq_max={_g17(result.freq_max)} freq_min={_g17(result.freq_min)}")
    lines.append(f"# prob_bound={_g17(result.prob_bound)} sampling_slack={_g17(result.sampling_slack)}")
    _emit(args, "\n".join(lines) + "\n")
    print(
        f"freq_max {result.freq_max:.6g}, freq_min {result.freq_min:.6g}, "
        f"limit {result.prob_bound + result.sampling_slack:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK if result.within_bound else EXIT_PRECONDITION


# ---------------------------------------------------------------------------
# gen-instance
# ---------------------------------------------------------------------------


def cmd_gen_instance(args) -> int:
    inst = make_instance(
        args.n, args.m, args.p, args.eps, args.seed, normalize_columns=not args.raw_columns
    )
    matrix_path = f"{args.out}.matrix"
    sidecar_path = f"{args.out}.instance.json"
    write_instance(inst, matrix_path, sidecar_path)
    print(f"wrote {matrix_path} and {sidecar_path}")
    print(
        f"n={inst.n} m={inst.m} p={inst.p} epsilon={inst.noise_norm:.6g} "
        f"seed={inst.seed} support={list(inst.support)}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--budget",
        type=int,
        default=None,
        help="subset enumeration budget (default: SPARSECERT_BUDGET or 10^7)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecert",
        description="Certified error bounds for estimated sparse solutions of "
        "underdetermined linear systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectral profile of a dictionary, as CSV")
    p.add_argument("--matrix", required=True, help="dictionary in matrix text format")
    p.add_argument("--depth", type=int, default=None, help="profile depth (default: Kruskal rank)")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    _add_budget(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="certify one candidate solution")
    p.add_argument("--matrix", required=True)
    p.add_argument("--shat", required=True, help="candidate vector file (one-row matrix format)")
    p.add_argument("--bound", required=True, choices=BOUND_KINDS)
    p.add_argument("--ell", type=int, default=None, help="cardinality parameter of the bound")
    p.add_argument("--eps", type=float, default=0.0, help="measurement noise norm budget")
    p.add_argument("--delta", type=float, default=0.0, help="candidate residual norm budget")
    _add_budget(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("tight-example", help="worst-case construction attaining the tight bound")
    p.add_argument("--theta", type=float, required=True, help="opening angle in degrees")
    p.add_argument("--alpha", type=float, required=True, help="candidate threshold value")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tight_example)

    p = sub.add_parser("experiment", help="solver-vs-bounds comparison over seeded trials")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m", type=int, default=12)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--sigma-min", type=float, default=0.1, dest="sigma_min")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", default=None)
    _add_budget(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("prob-bound", help="failure probability of the slacked constant")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.set_defaults(func=cmd_prob_bound)

    p = sub.add_parser("sparsity-curve", help="sparsity limit of the exponential regime")
    p.add_argument("--beta-min", type=float, default=1.0, dest="beta_min")
    p.add_argument("--beta-max", type=float, default=10.0, dest="beta_max")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--c-list", default="0.25,0.5,0.75,1", dest="c_list")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sparsity_curve)

    p = sub.add_parser("szarek-check", help="empirical singular-value tail check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_szarek_check)

    p = sub.add_parser("gen-instance", help="write a synthetic problem instance to disk")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--raw-columns", action="store_true", help="skip column normalization")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen_instance)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (
        PreconditionError,
        DomainError,
        InvalidInputError,
        UnsupportedSizeError,
        SingularityError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
