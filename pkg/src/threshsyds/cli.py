"""Command-line entry point.

Exit codes: 0 on success, 2 when the computed answer is "no" (a learner
refusal, a failed consistency check), 1 on any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bruteforce, evaluation, hardness, theory
from .core import (
    FormatError,
    Graph,
    ThresholdSystem,
    as_config,
    format_config,
    format_system,
    parse_graph,
    parse_system,
    random_directed_system,
    random_matching_system,
    random_undirected_system,
    trajectory,
)
from .learners import (
    LearnerRefusal,
    PartialInstance,
    UnsupportedInstance,
    learn_directed_bounded,
    learn_known_graph,
    learn_matching,
    learn_partial,
)
from .observations import (
    BernoulliDistribution,
    UniformDistribution,
    format_training_set,
    is_consistent,
    make_rng,
    parse_training_set,
    sample_training_set,
)

EXIT_OK, EXIT_ERROR, EXIT_NO = 0, 1, 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc.strerror}") from None


def _load_system(path: str) -> ThresholdSystem:
    return parse_system(_read(path))


def _load_graph(path: str) -> Graph:
    return parse_graph(_read(path))[0]


def _distribution(args, n: int):
    if args.dist == "uniform":
        return UniformDistribution(n)
    if args.p is None:
        raise CliError("--dist bernoulli needs --p")
    return BernoulliDistribution((args.p,) * n)


def _echo(args) -> None:
    items = {k: v for k, v in sorted(vars(args).items()) if k != "handler"}
    print("# " + " ".join(f"{k}={v}" for k, v in items.items()), file=sys.stderr)


# -- handlers ------------------------------------------------------------------------


def cmd_gen_system(args) -> int:
    rng = make_rng(args.seed)
    if args.system_class == "matching":
        system = random_matching_system(args.n, rng)
    elif args.system_class == "directed":
        if args.delta is None:
            raise CliError("--class directed needs --delta")
        system = random_directed_system(args.n, args.delta, rng)
    else:
        system = random_undirected_system(args.n, args.edge_prob, rng)
    _emit(format_system(system), args.out)
    return EXIT_OK


def cmd_step(args) -> int:
    system = _load_system(args.system)
    config = as_config(args.config, system.n)
    _emit("".join(format_config(c) + "\n" for c in trajectory(system, config, args.steps)), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    system = _load_system(args.system)
    obs = sample_training_set(system, _distribution(args, system.n), args.q, args.seed)
    _emit(format_training_set(obs), args.out)
    return EXIT_OK


def cmd_learn(args) -> int:
    obs = parse_training_set(_read(args.obs))
    n = obs.n
    cls = args.learn_class
    if cls == "matching":
        system = learn_matching(n, obs)
    elif cls == "directed":
        if args.delta is None:
            raise CliError("--class directed needs --delta")
        system = learn_directed_bounded(n, obs, args.delta, jobs=args.jobs)
    elif cls == "known":
        if args.graph is None:
            raise CliError("--class known needs --graph")
        system = learn_known_graph(_load_graph(args.graph), obs)
    elif cls == "partial":
        if args.gobs is None or args.k is None:
            raise CliError("--class partial needs --gobs and --k")
        cap = None if args.cap == 0 else args.cap
        instance = PartialInstance(_load_graph(args.gobs), args.k, cap)
        system = learn_partial(instance, obs, fallback=args.fallback)
    else:
        if args.brute_class is None:
            raise CliError("--class brute needs --brute-class")
        g_obs = _load_graph(args.gobs) if args.gobs else None
        cap = None if args.cap == 0 else args.cap
        system = bruteforce.brute_force_consistent(
            n, obs, args.brute_class, delta=args.delta, g_obs=g_obs, k=args.k, cap=cap,
            limit=args.limit, jobs=args.jobs,
        )
    _emit(format_system(system), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    system = _load_system(args.system)
    obs = parse_training_set(_read(args.obs))
    ok = is_consistent(system, obs)
    print(f"consistent={'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_NO


def cmd_reduce(args) -> int:
    formula = hardness.parse_dimacs(_read(args.cnf))
    _emit(hardness.format_reduction(hardness.reduce_3sat(formula, args.variant)), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    q = theory.BoundQuery(args.n, args.eps, args.delta, args.d_avg, args.k, args.m, args.c, args.c1)
    lines = [
        f"eq1={theory.sample_complexity_upper(q)!r}",
        f"eq1_tight={theory.sample_complexity_upper_tight(q)!r}",
        f"ndim_sample_lower={theory.ndim_sample_lower_bound(q)!r}",
    ]
    if args.n >= 2:
        lines.append(f"ndim_lower={theory.ndim_lower_bound(args.n)}")
    if args.d_avg is not None and args.k is not None:
        lines.append(f"partial={theory.sample_complexity_partial(q)!r}")
    if args.m is not None:
        lines.append(f"m_edges={theory.sample_complexity_m_edges(q)!r}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_shatter(args) -> int:
    instance = theory.build_shatter_instance(args.n)
    ok = theory.verify_shattering(args.n, limit=args.limit, jobs=args.jobs)
    print(f"n={args.n}")
    print(f"size={len(instance.configs)}")
    print(f"ndim_lower={theory.ndim_lower_bound(args.n)}")
    print(f"subsets={2 ** len(instance.configs)}")
    print(f"shattered={'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_NO


def cmd_eval_error(args) -> int:
    hypothesis = _load_system(args.system)
    truth = _load_system(args.truth)
    dist = _distribution(args, truth.n)
    if args.mc_samples is None:
        print(f"error={evaluation.true_error_exact(hypothesis, truth, dist)!r}")
    else:
        if args.seed is None:
            raise CliError("Monte-Carlo estimation needs --seed")
        est = evaluation.true_error_mc(hypothesis, truth, dist, args.mc_samples, args.seed)
        print(f"error={est.estimate!r}")
        print(f"stderr={est.stderr!r}")
    return EXIT_OK


def cmd_pac(args) -> int:
    truth = _load_system(args.truth) if args.truth else None
    n = truth.n if truth is not None else args.n
    if n is None:
        raise CliError("pac-experiment needs --n or --truth")
    config = evaluation.PacExperimentConfig(
        n=n,
        eps=args.eps,
        delta=args.delta,
        trials=args.trials,
        learner=args.learner,
        seed=args.seed,
        q=args.q,
        max_indegree=args.max_indegree,
        edge_prob=args.edge_prob,
        distribution=_distribution(args, n),
        truth=truth,
    )
    report = evaluation.run_pac_experiment(config, jobs=args.jobs)
    print(evaluation.format_pac_report(report, per_trial=args.per_trial), end="")
    print(f"# wall_time={report.wall_time:.3f}", file=sys.stderr)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def _add_dist(p) -> None:
    p.add_argument("--dist", choices=("uniform", "bernoulli"), default="uniform")
    p.add_argument("--p", type=float, help="per-vertex probability for --dist bernoulli")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="threshsyds", description="Threshold dynamical systems: simulate, learn, reduce, bound.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on this)")
        p.set_defaults(handler=handler)
        return p

    p = command("gen-system", cmd_gen_system, "generate a random ground-truth system")
    p.add_argument("--class", dest="system_class", choices=("matching", "directed", "undirected"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, help="in-degree bound for directed systems")
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = command("step", cmd_step, "print the trajectory of a configuration")
    p.add_argument("--system", required=True)
    p.add_argument("--config", required=True, help="bitstring, vertex 0 first")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--out")

    p = command("sample", cmd_sample, "draw a training set from a system")
    p.add_argument("--system", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_dist(p)
    p.add_argument("--out")

    p = command("learn", cmd_learn, "learn a consistent system from observations")
    p.add_argument("--class", dest="learn_class", choices=("matching", "directed", "partial", "known", "brute"), required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--delta", type=int, help="in-degree bound (directed, brute directed-threshold)")
    p.add_argument("--graph", help="known graph file (system format, thresholds optional)")
    p.add_argument("--gobs", help="observed subgraph file (partial, brute supergraph)")
    p.add_argument("--k", type=int, help="missing-edge budget")
    p.add_argument("--cap", type=int, default=1, help="missing edges per vertex; 0 means unbounded")
    p.add_argument("--fallback", action="store_true", help="partial: use exhaustive search when --cap is not 1")
    p.add_argument("--brute-class", choices=bruteforce.CLASSES)
    p.add_argument("--limit", type=int, help="vertex-count limit for exhaustive search")
    p.add_argument("--out")

    p = command("check", cmd_check, "check a system against observations")
    p.add_argument("--system", required=True)
    p.add_argument("--obs", required=True)

    p = command("reduce-3sat", cmd_reduce, "reduce a DIMACS CNF formula to an observation set")
    p.add_argument("--cnf", required=True)
    p.add_argument("--variant", choices=("undirected", "tree"), default="undirected")
    p.add_argument("--out")

    p = command("bounds", cmd_bounds, "evaluate sample-complexity bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d-avg", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=1.0)

    p = command("shatter", cmd_shatter, "verify the quadratic shattered set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int, default=8)

    p = command("eval-error", cmd_eval_error, "true error of a hypothesis against a ground truth")
    p.add_argument("--system", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--mc-samples", type=int)
    p.add_argument("--seed", type=int)
    _add_dist(p)

    p = command("pac-experiment", cmd_pac, "repeated learn-and-measure trials")
    p.add_argument("--learner", choices=evaluation.LEARNERS, default="matching")
    p.add_argument("--n", type=int)
    p.add_argument("--truth", help="fixed ground-truth system file")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--q", type=int, help="sample size; defaults to the finite-class bound")
    p.add_argument("--max-indegree", type=int)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--per-trial", action="store_true")
    _add_dist(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    _echo(args)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.handler(args)
    except LearnerRefusal as exc:
        print(f"refused: {exc.reason.value}" + (f" ({exc.detail})" if exc.detail else ""))
        print(f"reason={exc.reason.name}")
        return EXIT_NO
    except (CliError, FormatError, UnsupportedInstance, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
