"""Command-line client for the engine.

Commands build the same request models the HTTP service accepts and
call the shared handlers in process, so the two surfaces cannot drift.
Reports go to stdout as JSON lines; a human summary goes to stderr.

Exit codes: 0 on success, 1 when a suite or check found a
counterexample, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .serialize import dumps


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(_input_error(f"cannot read {path}: {exc}"))


def _input_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _emit(payload: dict, summary: str) -> None:
    print(dumps(payload))
    print(summary, file=sys.stderr)


def _group_argument(value: Optional[str]):
    if value is None:
        return None
    from .equivariant import BUILTIN_GROUPS

    if value in BUILTIN_GROUPS:
        return value
    return _load_json(value)


def cmd_span(args) -> int:
    from .service import InputError, SpanActRequest, handle_span_act, handle_span_rigid

    span_doc = _load_json(args.span)
    if args.action == "act":
        inputs_doc = {"sets": [], "inputs": []}
        if args.inputs:
            merged_sets = []
            merged_inputs = []
            for path in args.inputs:
                doc = _load_json(path)
                merged_sets.extend(doc.get("sets", []))
                merged_inputs.extend(doc.get("inputs", []))
            inputs_doc = {"sets": merged_sets, "inputs": merged_inputs}
        try:
            out = handle_span_act(SpanActRequest(span=span_doc, inputs=inputs_doc))
        except InputError as exc:
            return _input_error(str(exc))
        _emit(out.document, "span action computed")
        return 0
    try:
        out = handle_span_rigid(SpanActRequest(span=span_doc))
    except InputError as exc:
        return _input_error(str(exc))
    if out.rigid:
        _emit({"rigid": True}, "rigid")
    else:
        _emit({"rigid": False, "witness": out.witness}, "not-rigid")
    return 0


def cmd_coherence(args) -> int:
    from .service import CoherenceRequest, InputError, handle_coherence

    base = _load_json(args.base) if args.base else None
    try:
        report = handle_coherence(
            CoherenceRequest(
                suite=args.suite,
                instances=args.instances,
                seed=args.seed,
                max_size=args.max_size,
                max_total=args.max_total,
                n=args.n,
                base=base,
                group=_group_argument(args.group),
                subgroup=args.subgroup,
                workers=args.workers,
            )
        )
    except InputError as exc:
        return _input_error(str(exc))
    payload = report.model_dump()
    _emit(
        payload,
        f"{report.suite}: {'pass' if report.passed else 'FAIL'} "
        f"({report.instances} instances, {len(report.failures)} failures)",
    )
    return 0 if report.passed else 1


def cmd_count(args) -> int:
    from .service import CountRequest, InputError, handle_count

    doc = _load_json(args.map)
    try:
        out = handle_count(
            CountRequest(
                kind=args.kind,
                map=doc,
                n=args.n,
                group=_group_argument(args.group),
                subgroup=args.subgroup,
                certify=args.certify,
            )
        )
    except InputError as exc:
        return _input_error(str(exc))
    payload = {"count": out.count}
    if out.certificate is not None:
        payload["certificate"] = out.certificate
    _emit(payload, str(out.count))
    return 0


def cmd_deform(args) -> int:
    from .service import DeformRequest, InputError, handle_deform

    model = args.model
    if model != "graph":
        model = _load_json(model)
    names = args.list.split(",") if args.list else None
    budget = None if args.budget == 0 else args.budget
    try:
        out = handle_deform(
            DeformRequest(
                op=args.op,
                model=model,
                size=args.size,
                functor=args.functor,
                list=names,
                budget=budget,
            )
        )
    except InputError as exc:
        return _input_error(str(exc))
    _emit(
        {"ok": out.ok, "report": out.report},
        f"deform {args.op}: {'ok' if out.ok else 'FAIL'}",
    )
    return 0 if out.ok else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spancat",
        description="coherence suites, span actions and fixed-point counts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    span = sub.add_parser("span", help="act with a span or test its rigidity")
    span_sub = span.add_subparsers(dest="action", required=True)
    act = span_sub.add_parser("act")
    act.add_argument("span", help="span document (JSON)")
    act.add_argument("inputs", nargs="*", help="input documents (JSON)")
    rigid = span_sub.add_parser("rigid")
    rigid.add_argument("span", help="span document (JSON)")

    coh = sub.add_parser("coherence", help="run a named coherence suite")
    coh.add_argument("suite")
    coh.add_argument("--instances", type=int, default=100)
    coh.add_argument("--seed", type=int, default=0)
    coh.add_argument("--max-size", type=int, default=4, dest="max_size")
    coh.add_argument("--max-total", type=int, default=6, dest="max_total")
    coh.add_argument("--n", type=int, default=2)
    coh.add_argument("--base", help="base set document (JSON)")
    coh.add_argument("--group", help="built-in group name or document path")
    coh.add_argument("--subgroup", help="alias or comma list of members")
    coh.add_argument("--workers", type=int, default=None)

    count = sub.add_parser("count", help="fixed- and periodic-point counts")
    count.add_argument("kind", choices=["fix", "fuller", "least-period", "equivariant"])
    count.add_argument("--map", required=True, help="endo map document (JSON)")
    count.add_argument("--n", type=int, required=True)
    count.add_argument("--group", help="built-in group name or document path")
    count.add_argument("--subgroup")
    count.add_argument("--certify", action="store_true")

    deform = sub.add_parser("deform", help="derived functor calculus")
    deform.add_argument("op", choices=["validate", "derive", "compare", "ho"])
    deform.add_argument("--model", default="graph")
    deform.add_argument("--size", type=int, default=3)
    deform.add_argument("--functor", default="vertices")
    deform.add_argument("--list", help="comma list of functor names")
    deform.add_argument(
        "--budget",
        type=int,
        default=200_000,
        help="morphism enumeration budget; 0 means unlimited",
    )

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


_COMMANDS = {
    "span": cmd_span,
    "coherence": cmd_coherence,
    "count": cmd_count,
    "deform": cmd_deform,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
