"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 internal
invariant violation.

``compare`` prints tab-separated tables, each introduced by ``## name``:

  divergence       metric, value, note   (degree_kl_nats, cc_by_degree_mae)
  joint_degree_kl  probe_degree, kl_nats ("absent" when a side lacks the degree)
  components       graph, count, giant_fraction
  kcore            shell, source, generated

``validate`` prints summary, degree, cc_by_degree, components, kcore and
pagerank tables in the same layout.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import metrics
from .edgegen import GenerationConfig, InvariantViolation, build
from .graph import EdgeListError, load_edge_list, save_edge_list
from .model import DEFAULT_CC_BINS, ModelFormatError, extract_model, load_model, save_model
from .refgraphs import erdos_renyi, two_class, watts_strogatz
from .supercomm import SpillError, generate_sharded, plan_shards

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _probes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None


def cmd_extract(args) -> int:
    g = load_edge_list(args.source_graph)
    m = extract_model(g, args.cc_bins)
    save_model(m, args.out)
    max_deg = max(m.degree_hist, default=0)
    print(f"vertices\t{m.source_vertex_count}\nedges\t{m.source_edge_count}\nmax_degree\t{max_deg}")
    return EXIT_OK


def _source_model(args):
    if args.model:
        return load_model(args.model)
    return extract_model(load_edge_list(args.source_graph), args.cc_bins)


def cmd_generate(args) -> int:
    if not 0 < args.intra_fraction <= 1:
        raise UsageError("--intra-fraction must be in (0, 1]")
    model = _source_model(args)
    cfg = GenerationConfig(seed=args.seed, max_iters=args.max_iters)
    if args.communities == 1 and args.intra_fraction == 1.0:
        state = build(model, args.vertices, cfg, args.threads)
        save_edge_list(state.graph, args.out)
        unsat = int(np.count_nonzero(state.residual))
        print(f"vertices\t{args.vertices}\nedges\t{state.graph.edge_count}")
        print(f"unsatisfied_vertices\t{unsat}\ntotal_residual\t{state.total_residual()}")
        return EXIT_OK
    plan = plan_shards(args.vertices, args.communities, args.intra_fraction)
    g = generate_sharded(model, args.vertices, plan, cfg, args.spill_dir, args.threads)
    save_edge_list(g, args.out)
    print(f"vertices\t{args.vertices}\nedges\t{g.edge_count}")
    frac = metrics.intra_community_fraction(g, plan.community_of())
    print(f"communities\t{args.communities}\nintra_edge_fraction\t{frac:.6f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    g = load_edge_list(args.graph)
    print(metrics.compute_report(g).to_tsv(), end="")
    return EXIT_OK


def cmd_compare(args) -> int:
    src = load_model(args.source_model) if args.source_model else load_edge_list(args.source)
    gen = load_edge_list(args.generated)
    print(metrics.compare(src, gen, args.probe_degrees).to_tsv(), end="")
    return EXIT_OK


def cmd_refgraph(args) -> int:
    if args.kind == "erdos-renyi":
        g = erdos_renyi(args.n, args.p, args.seed)
    elif args.kind == "watts-strogatz":
        g = watts_strogatz(args.n, args.k, args.beta, args.seed)
    else:
        g = two_class(args.n, args.d_low, args.d_high, args.mix, args.seed, args.high_fraction)
    save_edge_list(g, args.out)
    print(f"vertices\t{g.vertex_count}\nedges\t{g.edge_count}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="synthgraph", description="Synthetic graphs matching degree and clustering distributions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("extract", help="measure a source graph into a model file")
    s.add_argument("--source-graph", required=True)
    s.add_argument("--cc-bins", type=_positive, default=DEFAULT_CC_BINS)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("generate", help="generate a synthetic graph")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--model")
    src.add_argument("--source-graph")
    s.add_argument("--cc-bins", type=_positive, default=DEFAULT_CC_BINS)
    s.add_argument("--vertices", type=_positive, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--communities", type=_positive, default=1)
    s.add_argument("--intra-fraction", type=float, default=1.0)
    s.add_argument("--max-iters", type=_positive, default=20)
    s.add_argument("--threads", type=int, default=0, help="worker threads (0 = all cores)")
    s.add_argument("--spill-dir", default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("validate", help="print metric tables for a graph")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("compare", help="compare a generated graph to its source",
                       description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    srcg = s.add_mutually_exclusive_group(required=True)
    srcg.add_argument("--source")
    srcg.add_argument("--source-model")
    s.add_argument("--generated", required=True)
    s.add_argument("--probe-degrees", type=_probes, default=list(metrics.DEFAULT_PROBES))
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("refgraph", help="write a reference source graph")
    s.add_argument("--kind", choices=("erdos-renyi", "watts-strogatz", "two-class"), required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--p", type=float, default=0.01)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--beta", type=float, default=0.1)
    s.add_argument("--d-low", type=int, default=10)
    s.add_argument("--d-high", type=int, default=500)
    s.add_argument("--mix", type=float, default=0.2)
    s.add_argument("--high-fraction", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_refgraph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"synthgraph: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListError, ModelFormatError, SpillError) as e:
        print(f"synthgraph: error: {e}", file=sys.stderr)
        return EXIT_IO
    except InvariantViolation as e:
        print(f"synthgraph: invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as e:
        print(f"synthgraph: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
