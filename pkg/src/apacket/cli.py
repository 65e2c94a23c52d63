"""Command-line front end: packet, resolve, verify and reorder."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Sequence

from . import dsl, verify
from .packet import PacketIndex
from .params import ArthurParameter, BlockOrder, Finding, ValidationError, canonical_order
from .reduce import resolve
from .reorder import reorder_path

EXIT_OK, EXIT_INVALID, EXIT_FINDING = 0, 1, 2


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _load(path: str | None) -> ArthurParameter:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", dsl.DslWarning)
        param = dsl.parse_parameter(_read(path))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return param


def parse_order(text: str, param: ArthurParameter) -> BlockOrder:
    """``canonical``, ``as-given`` or explicit ``r=0,1,2;s=3``."""
    if text == "canonical":
        return canonical_order(param)
    if text == "as-given":
        return BlockOrder.as_given(param)
    mapping = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        name, _, positions = part.partition("=")
        try:
            mapping[name.strip()] = [int(x) for x in positions.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"cannot read order {part!r}; use name=0,1,2", "order syntax") from None
    for name in param.rho_names():
        mapping.setdefault(name, param.positions_of(name))
    return BlockOrder.from_mapping(mapping)


def parse_index(text: str, param: ArthurParameter) -> PacketIndex:
    """Comma-separated ``l`` plus sign per block, e.g. ``0+,1-``."""
    ls, etas = [], []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if part[-1] not in "+-" or not part[:-1].isdigit():
            raise ValidationError(f"cannot read index entry {part!r}; use l followed by + or -", "index syntax")
        ls.append(int(part[:-1]))
        etas.append(1 if part[-1] == "+" else -1)
    if len(ls) != len(param.blocks):
        raise ValidationError(f"index has {len(ls)} entries for {len(param.blocks)} blocks", "index shape")
    return PacketIndex(tuple(ls), tuple(etas))


def _select_class(elements, wanted: str | None):
    if wanted is None:
        return elements
    name, _, k = wanted.rpartition(":")
    try:
        k_value = int(k)
    except ValueError:
        raise ValidationError(f"--class expects k or rho:k, got {wanted!r}", "class syntax") from None
    if not any(el.classes for el in elements):
        raise ValidationError("--class only applies to parameters with a half-integral rho carrying zeta=- blocks",
                              "class")
    return [el for el in elements
            if any(kk == k_value and (not name or nn == name) for nn, kk in el.classes)]


def _resolved(args, param: ArthurParameter):
    order = parse_order(args.order, param)
    preferred = None if args.order == "canonical" else order
    elements = _select_class(resolve(param, preferred), args.klass)
    return order, elements


def cmd_packet(args) -> int:
    param = _load(args.input)
    order, elements = _resolved(args, param)
    if args.format == "json":
        sys.stdout.write(dsl.serialize_result(param, elements, order, include_phi=False))
    else:
        rows = [(dsl.index_text(el), dsl.class_text(el)) for el in elements]
        sys.stdout.write(dsl.table(rows, ("index", "class")))
    return EXIT_OK


def cmd_resolve(args) -> int:
    param = _load(args.input)
    order, elements = _resolved(args, param)
    if args.format == "json":
        sys.stdout.write(dsl.serialize_result(param, elements, order))
    else:
        rows = [(dsl.index_text(el), dsl.class_text(el), dsl.phi_text(el), dsl.epsilon_text(el)) for el in elements]
        sys.stdout.write(dsl.table(rows, ("index", "class", "phi", "epsilon")))
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = verify.run_all(args.cases, args.seed)
    if args.format == "json":
        doc = [{"suite": r.suite, "cases": r.cases, "passed": r.passed, "skipped": r.skipped,
                "failures": r.failures} for r in reports]
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        for r in reports:
            print(r.summary())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FINDING


def cmd_reorder(args) -> int:
    param = _load(args.input)
    source = parse_order(args.source, param)
    target = parse_order(args.target, param)
    index = parse_index(args.index, param)
    moved = reorder_path(param, source, target, index)
    if args.format == "json":
        doc = {"schema": dsl.SCHEMA_VERSION, "parameter": dsl.parameter_json(param, target),
               "index": {"l": list(moved.l), "eta": list(moved.eta)}}
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        print(moved)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apacket",
                                     description="Arthur packet indices, reductions and Langlands data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", nargs="?", help="parameter file (default: stdin)")
        p.add_argument("--format", choices=("json", "table"), default="json")

    for name, func, text in (("packet", cmd_packet, "list the (l, eta) indices of the packet"),
                             ("resolve", cmd_resolve, "print (phi, epsilon) for every packet element")):
        p = sub.add_parser(name, help=text)
        with_input(p)
        p.add_argument("--order", default="canonical",
                       help="canonical, as-given or name=0,1,2;... (indices are reported in this order)")
        p.add_argument("--class", dest="klass", metavar="K", help="keep half-integral class K (or rho:K)")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run the consistency suites")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--cases", type=int, default=None, help="cases per randomized suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reorder", help="transport an index between two admissible orders")
    with_input(p)
    p.add_argument("--from", dest="source", default="as-given", help="order the index refers to")
    p.add_argument("--to", dest="target", default="canonical", help="order to move it to")
    p.add_argument("--index", required=True, help="per-block l and sign, e.g. 0+,1-")
    p.set_defaults(func=cmd_reorder)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Finding as exc:
        print(f"finding: {exc}", file=sys.stderr)
        return EXIT_FINDING
    except ValidationError as exc:
        tag = f" [{exc.invariant}]" if getattr(exc, "invariant", "") else ""
        print(f"error{tag}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
