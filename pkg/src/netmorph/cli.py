"""Command-line front end: ``netmorph synth|evolve|eval|compare|baseline|gensim``.

Every command is deterministic given ``--seed``. Results are printed as JSON
on stdout; diagnostics go to stderr as a single line. Exit status is 0 on
success, 1 for usage errors, 2 for unreadable or malformed input and 3 for
runtime failures (for example a saturated graph).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .edgelist import EdgeListError, format_edge_list, read_edge_list
from .evolve import SearchParams, run_search
from .fitness import BaselineError, baseline_norms, cached_baseline_norms, default_cache_dir, fitness
from .genlang import GenlangError, TreeGenParams, load_program, print_program
from .gensim import generator_dissimilarity
from .growth import GrowthParams, SaturatedError, grow_network
from .netmetrics import CONNECTED_TRIADS, UNDIRECTED_TRIADS, ProfileParams, dissimilarity_vector, metric_profile
from .rng import stream

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2, 3

IDENTIFIER_NOTE = """\
identifiers: edge-list labels are mapped to 1-based sequential identifiers in
order of first appearance. Generator programs can read identifiers (the
variables i and j), so this ordering is part of the input; pass --shuffle-ids
to assign identifiers in a seeded random order instead.
"""

TOLERANCE_HELP = (
    "relative fitness slack allowed for the shortest champion (default 0.10). "
    "Around 0.15 tends to stall evolution; around 0.05 tends to give bloated, "
    "hard to interpret programs."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _ratio(text):
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1], got {text}")
    return value


def _common(p: argparse.ArgumentParser, growth: bool = True) -> None:
    p.add_argument("--seed", type=_nonneg_int, default=0, help="master random seed (default 0)")
    p.add_argument("--undirected", action="store_true", help="treat graphs and programs as undirected")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker threads for baseline ensembles")
    if growth:
        g = p.add_argument_group("growth")
        g.add_argument("--sample-ratio", type=_ratio, default=GrowthParams.sample_ratio,
                       help="candidate sample size as a fraction of n^2 (default %(default)s)")
        g.add_argument("--min-sample", type=_positive_int, default=GrowthParams.min_sample,
                       help="minimum number of candidates per step (default %(default)s)")
        g.add_argument("--walk-count", type=_positive_int, default=GrowthParams.walk_count,
                       help="random walks per distance estimate (default %(default)s)")
        g.add_argument("--walk-max-len", type=_positive_int, default=GrowthParams.walk_max_len,
                       help="maximum walk length; longer distances are capped (default %(default)s)")


def _growth_params(args) -> GrowthParams:
    return GrowthParams(
        sample_ratio=args.sample_ratio,
        min_sample=args.min_sample,
        walk_count=args.walk_count,
        walk_max_len=args.walk_max_len,
        distance_cap=args.walk_max_len + 1.0,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="netmorph",
        description="Evolve and evaluate network generator programs.",
        epilog=IDENTIFIER_NOTE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="grow a network from a program file")
    p.add_argument("--program", required=True, help="generator program file")
    p.add_argument("--vertices", type=_positive_int, required=True)
    p.add_argument("--arcs", type=_nonneg_int, required=True)
    p.add_argument("--out", help="output edge list (default stdout)")
    _common(p)

    p = sub.add_parser(
        "evolve", help="search for a generator reproducing a target network",
        epilog=IDENTIFIER_NOTE, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--target", required=True, help="target edge list")
    p.add_argument("--out-dir", required=True, help="run directory to write")
    p.add_argument("--stable-gens", type=_positive_int, default=SearchParams.stable_limit,
                   help="stop after this many generations without a champion change (default %(default)s)")
    p.add_argument("--max-gens", type=_positive_int, default=None, help="hard cap on generations")
    p.add_argument("--tolerance", type=float, default=SearchParams.tolerance, help=TOLERANCE_HELP)
    p.add_argument("--ensemble-size", type=_positive_int, default=SearchParams.ensemble_size,
                   help="ER networks in the normalization ensemble (default %(default)s)")
    p.add_argument("--shuffle-ids", action="store_true", help="assign identifiers in seeded random order")
    p.add_argument("--cache-dir", help="baseline cache directory (default $NETMORPH_CACHE_DIR or ~/.cache/netmorph)")
    p.add_argument("--no-cache", action="store_true", help="do not read or write the baseline cache")
    _common(p)

    p = sub.add_parser("eval", help="score a program (or a network) against a target")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--program", help="program file; a network is grown from it")
    src.add_argument("--network", help="edge list scored as-is")
    p.add_argument("--target", required=True, help="target edge list")
    p.add_argument("--ensemble-size", type=_positive_int, default=SearchParams.ensemble_size)
    p.add_argument("--cache-dir")
    p.add_argument("--no-cache", action="store_true")
    _common(p)

    p = sub.add_parser("compare", help="dissimilarity vector between two edge lists")
    p.add_argument("--a", required=True, help="first edge list")
    p.add_argument("--b", required=True, help="second edge list")
    p.add_argument("--hist-dir", help="write 'bin count' histogram dumps and sorted samples here")
    _common(p, growth=False)

    p = sub.add_parser("baseline", help="build (and cache) the ER normalization for a target")
    p.add_argument("--target", required=True)
    p.add_argument("--count", type=_positive_int, default=30, help="ensemble size (default %(default)s)")
    p.add_argument("--cache-dir")
    p.add_argument("--no-cache", action="store_true")
    _common(p, growth=False)

    p = sub.add_parser("gensim", help="behavioural dissimilarity between two programs")
    p.add_argument("--a", required=True, help="first program file")
    p.add_argument("--b", required=True, help="second program file")
    p.add_argument("--vertices", type=_positive_int, required=True)
    p.add_argument("--arcs", type=_nonneg_int, required=True)
    _common(p)
    return parser


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _read_graph(path, args, shuffle=False):
    g, _ = read_edge_list(path, not args.undirected, shuffle, stream(args.seed, "identifiers"))
    return g


def _norms(target, size, args, target_profile):
    if args.no_cache:
        return baseline_norms(target, size, ProfileParams(), stream(args.seed, "baseline"), target_profile, args.jobs)
    return cached_baseline_norms(target, size, ProfileParams(), args.seed, args.cache_dir, target_profile, args.jobs)


def cmd_synth(args) -> int:
    prog = load_program(args.program, not args.undirected)
    g = grow_network(prog, args.vertices, args.arcs, _growth_params(args), stream(args.seed, "growth"))
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_evolve(args) -> int:
    if args.tolerance < 0:
        raise UsageError("--tolerance must be non-negative")
    directed = not args.undirected
    params = SearchParams(
        tolerance=args.tolerance,
        stable_limit=args.stable_gens,
        max_generations=args.max_gens,
        ensemble_size=args.ensemble_size,
        tree=TreeGenParams(directed=directed),
        growth=_growth_params(args),
    )
    cache_dir = None if args.no_cache else (args.cache_dir or default_cache_dir())
    result = run_search(args.target, params, args.seed, directed, args.shuffle_ids, args.out_dir, cache_dir, args.jobs)
    _emit({
        "generations": result.state.generation,
        "shortest": print_program(result.shortest.program),
        "best": print_program(result.best.program),
        **result.shortest.report.to_dict(),
        "out_dir": str(args.out_dir),
    })
    return EXIT_OK


def cmd_eval(args) -> int:
    target = _read_graph(args.target, args)
    target_profile = metric_profile(target, ProfileParams(), stream(args.seed, "target"))
    norms = _norms(target, args.ensemble_size, args, target_profile)
    if args.program:
        prog = load_program(args.program, target.directed)
        cand = grow_network(prog, target.n, target.m, _growth_params(args), stream(args.seed, "growth"))
    else:
        cand = _read_graph(args.network, args)
    report = fitness(metric_profile(cand, ProfileParams(), stream(args.seed, "candidate")), target_profile, norms)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_compare(args) -> int:
    a, b = _read_graph(args.a, args), _read_graph(args.b, args)
    pa = metric_profile(a, ProfileParams(), stream(args.seed, "target"))
    pb = metric_profile(b, ProfileParams(), stream(args.seed, "candidate"))
    vector = dissimilarity_vector(pa, pb)
    if args.hist_dir:
        out = Path(args.hist_dir)
        out.mkdir(parents=True, exist_ok=True)
        for tag, prof in (("a", pa), ("b", pb)):
            for name, hist in prof.histograms.items():
                (out / f"{tag}-{name}.txt").write_text(hist.to_lines())
            for name, sample in prof.distributions.items():
                (out / f"{tag}-{name}.txt").write_text("".join(f"{x!r}\n" for x in sample.tolist()))
            tau = "".join(f"{k} {v!r}\n" for k, v in zip(CONNECTED_TRIADS if prof.directed else UNDIRECTED_TRIADS, prof.triad_frequencies.tolist()))
            (out / f"{tag}-tau.txt").write_text(tau)
        (out / "radar.json").write_text(json.dumps(vector, indent=2) + "\n")
    _emit(vector)
    return EXIT_OK


def cmd_baseline(args) -> int:
    target = _read_graph(args.target, args)
    target_profile = metric_profile(target, ProfileParams(), stream(args.seed, "target"))
    norms = _norms(target, args.count, args, target_profile)
    _emit({"target_hash": norms.target_id, "ensemble_size": norms.ensemble_size, "means": norms.per_metric_mean})
    return EXIT_OK


def cmd_gensim(args) -> int:
    directed = not args.undirected
    w, w2 = load_program(args.a, directed), load_program(args.b, directed)
    d = generator_dissimilarity(w, w2, args.vertices, args.arcs, _growth_params(args), (args.seed, args.seed + 1))
    _emit(d.to_dict())
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "evolve": cmd_evolve,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "baseline": cmd_baseline,
    "gensim": cmd_gensim,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"netmorph: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListError, GenlangError) as exc:
        print(f"netmorph: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SaturatedError, BaselineError) as exc:
        print(f"netmorph: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        # parameter validation and directedness mismatches
        print(f"netmorph: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
