from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from entangle.config.constants import (
    GRAPH_ACTIONS,
    OUTPUT_FORMATS,
    REPRODUCE_ALIASES,
    REPRODUCE_TARGETS,
    SEPARABILITY_CRITERIA,
)
from entangle.config.settings import get_settings, override_settings
from entangle.features.factor import full_factorize
from entangle.features.graphstate import (
    NOT_PSD,
    PSD,
    UNKNOWN,
    degree_criterion,
    degree_mismatch,
    density_from_graph,
    graph_partial_transpose,
    is_pure_graph,
    laplacian,
    psd_screen,
    von_neumann_entropy,
)
from entangle.features.measures import e_t
from entangle.features.numcore import as_density, is_psd
from entangle.features.separability import (
    degree_test,
    kyfan_test,
    kyfan_test_partition,
    ppt_test,
    sufficiency_test,
)
from entangle.io.loaders import load_graph, load_state
from entangle.io.writers import (
    df_to_text,
    emit_csv,
    format_factor_tree,
    format_mapping,
    format_matrix,
    format_verdict,
    graph_to_dict,
    state_to_dict,
)
from entangle.models.errors import EntangleError, InvalidStateError, ParseError
from entangle.models.schema import Context, PartitionSpec
from entangle.pipelines.build_tables import reproduce

logger = logging.getLogger("entangle")

_TOLERANCE_FIELDS = ("state_tol", "degree_tol", "ppt_tol")


def _groups(text: str, n_parts: int) -> list[list[int]]:
    """``"1,2|3"`` -> [[1, 2], [3]]; a single group gets its complement appended."""
    try:
        groups = [[int(tok) for tok in part.split(",") if tok.strip()] for part in text.replace(" ", "").split("|")]
    except ValueError as exc:
        raise ParseError(f"bad partition '{text}'") from exc
    groups = [g for g in groups if g]
    if len(groups) == 1:
        rest = [k for k in range(1, n_parts + 1) if k not in groups[0]]
        groups.append(rest)
    return groups


def _cut(text: str | None, n_parts: int) -> PartitionSpec:
    groups = _groups(text or "1", n_parts)
    if len(groups) != 2:
        raise ParseError(f"a bipartite cut s|t is required, got '{text}'")
    partition = PartitionSpec.from_subset(groups[0], n_parts)
    if sorted(groups[1]) != list(partition.t):
        raise ParseError(f"cut '{text}' does not split subsystems 1..{n_parts} into two sides")
    return partition


def cmd_separability(args: argparse.Namespace) -> str:
    if args.graph:
        g = load_graph(args.graph)
        cut = _cut(args.partition, len(g.dims))
        holds = degree_criterion(g, g.dims, cut)
        values = {
            "criterion": "degree",
            "partition": cut.label(),
            "degree_criterion": holds,
            "mismatch": degree_mismatch(g, g.dims, cut),
        }
        return format_mapping(values, args.format)
    spec = load_state(args.state)
    rho, dims = as_density(spec.data), spec.dims
    if args.criterion == "kyfan":
        if args.partition:
            verdict = kyfan_test_partition(rho, dims, _groups(args.partition, len(dims)))
        else:
            verdict = kyfan_test(rho, dims)
    elif args.criterion == "degree":
        verdict = degree_test(rho, dims, _cut(args.partition, len(dims)))
    elif args.criterion == "ppt":
        verdict = ppt_test(rho, dims, _cut(args.partition, len(dims)))
    else:
        verdict = sufficiency_test(rho, dims)
    return format_verdict(verdict, args.format)


def cmd_measure(args: argparse.Namespace) -> str:
    spec = load_state(args.state)
    if not spec.is_pure:
        raise InvalidStateError("E_T is defined for pure states; supply a state vector")
    result = e_t(spec.data, spec.dims, normalize=args.normalize)
    values = result.to_dict()
    if not args.normalize:
        values.pop("E_T_over_R_N")
    return format_mapping(values, args.format, title=spec.name)


def cmd_factorize(args: argparse.Namespace) -> str:
    spec = load_state(args.state)
    if not spec.is_pure:
        raise InvalidStateError("factorization needs a pure state")
    return format_factor_tree(full_factorize(spec.data, spec.dims), args.format)


def cmd_graph(args: argparse.Namespace) -> str:
    g = load_graph(args.graph)
    fmt = args.format
    if args.action == "to-density":
        rho = density_from_graph(g)
        if fmt == "json":
            return json.dumps(state_to_dict("mixed", g.dims, rho))
        return format_matrix(rho, fmt)
    if args.action == "check-psd":
        screen = psd_screen(g)
        verdict = screen
        if screen == UNKNOWN:
            verdict = PSD if is_psd(laplacian(g)) else NOT_PSD
        return format_mapping({"screen": screen, "laplacian": verdict}, fmt)
    if args.action == "purity":
        density_from_graph(g)
        return format_mapping({"pure": is_pure_graph(g)}, fmt)
    if args.action == "entropy":
        return format_mapping({"entropy": von_neumann_entropy(g)}, fmt)
    pt = graph_partial_transpose(g, g.dims, _cut(args.cut, len(g.dims)))
    if fmt == "json":
        return json.dumps(graph_to_dict(pt))
    return format_matrix(pt.adjacency, fmt)


def cmd_reproduce(args: argparse.Namespace) -> str:
    ctx = Context(settings=get_settings())
    df = reproduce(ctx, args.which, n=args.n, save=args.save)
    if args.format == "csv":
        emit_csv(df, sys.stdout)
        return ""
    if args.format == "json":
        return df.to_json(orient="records", indent=2)
    return df_to_text(df)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entangle", description="Entanglement detection, measures and graph states.")
    parser.add_argument("--state", help="state file path or builtin:<name>")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="text")
    parser.add_argument("--tolerance", type=float, help="override state, degree and PPT tolerances")
    parser.add_argument("--verbose", "-v", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separability", help="run a separability criterion")
    p.add_argument("--criterion", choices=SEPARABILITY_CRITERIA, default="kyfan")
    p.add_argument("--partition", help="cut such as 1|2,3 (kyfan also accepts 1|2|3,4)")
    p.add_argument("--graph", help="graph file; evaluates the degree criterion on the graph itself")
    p.set_defaults(func=cmd_separability, needs_state=True)

    p = sub.add_parser("measure", help="E_T and eps_T of an N-qubit pure state")
    p.add_argument("--normalize", action="store_true", help="also report E_T / R_N")
    p.set_defaults(func=cmd_measure, needs_state=True)

    p = sub.add_parser("factorize", help="factor a pure state into its product components")
    p.set_defaults(func=cmd_factorize, needs_state=True)

    p = sub.add_parser("graph", help="operations on a weighted graph file")
    p.add_argument("action", choices=GRAPH_ACTIONS)
    p.add_argument("--graph", required=True, help="graph file (JSON)")
    p.add_argument("--cut", help="cut for the pt action, e.g. 1|2")
    p.set_defaults(func=cmd_graph, needs_state=False)

    p = sub.add_parser("reproduce", help="rerun a published experiment")
    p.add_argument("which", choices=REPRODUCE_TARGETS + list(REPRODUCE_ALIASES))
    p.add_argument("--n", type=int, help="system size where the experiment takes one")
    p.add_argument("--save", action="store_true", help="also write the table under the output directory")
    p.set_defaults(func=cmd_reproduce, needs_state=False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    changes = {}
    if args.tolerance is not None:
        changes = {name: args.tolerance for name in _TOLERANCE_FIELDS}
    with override_settings(**changes):
        return _run(args)


def _run(args: argparse.Namespace) -> int:
    settings = get_settings()
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else settings.log_level
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.needs_state and not args.state and not getattr(args, "graph", None):
            raise ParseError("--state is required for this command")
        out = args.func(args)
    except EntangleError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    if out:
        sys.stdout.write(out.rstrip("\n") + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
