"""Command-line interface.

Exit codes: 0 success, 2 input or file-schema error, 3 violated invariant,
4 numerical failure. Numbers print with 12 significant digits; ``--json``
emits machine-readable reports where available.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .contextuality import HardyTriple, evaluate_inequality, max_violation
from .errors import (
    ScenarioFileError,
    SpaceMismatchError,
    UnknownLabelError,
    ValidationError,
)
from .hilbert import resolve_tol, set_default_tol
from .dilation import Dilation, naimark_dilate, povm_from_dilation
from .interferometer import build_three_path, joint_outcomes_DA, joint_outcomes_VH
from .povm import Povm, coarse_grain, completeness_check, context_graph
from .scenario_io import Scenario, load_scenario, save_scenario, scenario_to_dict


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _fmt_complex(z: complex) -> str:
    if z.imag == 0.0:
        return _fmt(z.real)
    return f"{_fmt(z.real)}{z.imag:+.12g}j"


def _fmt_vector(amplitudes) -> str:
    return "[" + ", ".join(_fmt_complex(complex(z)) for z in amplitudes) + "]"


def _print_povm_report(p: Povm, tol: float | None) -> None:
    print(f"povm: {len(p)} elements, system_dim={p.system_dim}")
    print("elements:")
    for el in p.elements:
        if el.is_vector:
            print(
                f"  {el.label}: weight={_fmt(el.weight())} "
                f"vector={_fmt_vector(el.vector.amplitudes)}"
            )
        else:
            eigs = np.linalg.eigvalsh(el.operator.entries)
            print(
                f"  {el.label}: operator trace={_fmt(el.weight())} "
                f"eigenvalues={_fmt_vector(eigs)}"
            )
    print(f"completeness residual: {_fmt(completeness_check(p))}")
    vector_elements = [el for el in p.elements if el.is_vector]
    if len(vector_elements) > 1:
        print("gram (vector elements):")
        stack = np.stack([el.vector.amplitudes for el in vector_elements])
        matrix = stack.conj() @ stack.T
        for el, row in zip(vector_elements, matrix):
            print(f"  {el.label}: {_fmt_vector(row)}")
    graph = context_graph(p, tol)
    print(f"context graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    for a, b, witness in graph.edges:
        print(f"  {a} -- {b} (witness={_fmt(witness)})")
    if graph.skipped:
        print(f"  skipped zero-weight outcomes: {', '.join(graph.skipped)}")


def _cmd_scenario_run(args: argparse.Namespace) -> int:
    if args.name != "three-path":
        print(f"unknown scenario {args.name!r}; available: three-path", file=sys.stderr)
        return 2
    if args.merge_a and args.basis != "DA":
        print("--merge-a needs --basis DA (the V/H basis has no A outcomes)", file=sys.stderr)
        return 2
    s = build_three_path()
    phi = {"D": s.d, "A": s.a, "H": s.h, "V": s.v}[args.phi_init]
    outcomes = joint_outcomes_DA(s) if args.basis == "DA" else joint_outcomes_VH(s)
    p = povm_from_dilation(Dilation(outcomes, phi))
    if args.merge_a:
        p = coarse_grain(p, ("A1", "A2", "A3"), "A")
    merged = "yes" if args.merge_a else "no"
    print(f"scenario three-path: basis={args.basis} phi_init={args.phi_init} merge_A={merged}")
    print(f"system_dim=3 env_dim=2 outcomes={len(outcomes)}")
    _print_povm_report(p, args.tol)
    return 0


def _bound_residual(p: Povm) -> float:
    worst = 0.0
    for el in p.elements:
        if el.is_vector:
            worst = max(worst, el.weight() - 1.0)
        else:
            eigs = np.linalg.eigvalsh(el.operator.entries)
            worst = max(worst, float(-eigs[0]), float(eigs[-1] - 1.0))
    return max(worst, 0.0)


def _cmd_povm_check(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file, args.tol)
    p = scenario.resolve_povm()
    tol = resolve_tol(args.tol)
    completeness = completeness_check(p)
    bounds = _bound_residual(p)
    ok = completeness <= tol and bounds <= tol
    if args.json:
        print(
            json.dumps(
                {
                    "elements": len(p),
                    "system_dim": p.system_dim,
                    "completeness_residual": completeness,
                    "element_bound_residual": bounds,
                    "tol": tol,
                    "ok": ok,
                }
            )
        )
    else:
        print(f"povm: {len(p)} elements, system_dim={p.system_dim}")
        print(f"completeness residual: {_fmt(completeness)}")
        print(f"element bound residual: {_fmt(bounds)}")
        print(f"result: {'ok' if ok else 'FAIL'} (tol={_fmt(tol)})")
    if args.strict and not ok:
        raise ValidationError(
            f"completeness residual {completeness:.3e} exceeds tol", invariant="completeness"
        )
    return 0


def _cmd_dilate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file, args.tol)
    p = scenario.resolve_povm()
    d = naimark_dilate(p, args.tol)
    raw = scenario_to_dict(
        system_dim=p.system_dim,
        env_dim=d.outcomes.space.env_dim,
        outcomes=d.outcomes,
        phi_init=d.phi_init,
        povm=povm_from_dilation(d),
    )
    save_scenario(args.output, raw)
    print(
        f"wrote {args.output}: env_dim={d.outcomes.space.env_dim}, "
        f"{len(d.outcomes)} joint outcomes"
    )
    return 0


def _cmd_context_graph(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file, args.tol)
    graph = context_graph(scenario.resolve_povm(), args.tol)
    if args.dot:
        print(graph.to_dot())
    elif args.json:
        print(
            json.dumps(
                {
                    "nodes": list(graph.nodes),
                    "edges": [[a, b, w] for a, b, w in graph.edges],
                    "skipped": list(graph.skipped),
                }
            )
        )
    else:
        print(f"context graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
        for a, b, witness in graph.edges:
            print(f"  {a} -- {b} (witness={_fmt(witness)})")
        if graph.skipped:
            print(f"  skipped zero-weight outcomes: {', '.join(graph.skipped)}")
    return 0


def _hardy_inputs(scenario: Scenario, tol: float | None) -> HardyTriple:
    if scenario.hardy is None:
        raise ScenarioFileError("the file carries no hardy block")
    p = scenario.resolve_povm()
    return HardyTriple.from_povm(p, *scenario.hardy, tol=tol)


def _cmd_inequality(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file, args.tol)
    triple = _hardy_inputs(scenario, args.tol)
    if args.state is not None:
        if args.state not in scenario.states:
            raise ScenarioFileError(f"no state labelled {args.state!r} in the file")
        label, state = args.state, scenario.states[args.state]
    elif len(scenario.states) == 1:
        label, state = next(iter(scenario.states.items()))
    else:
        raise ScenarioFileError("choose a state with --state; the file has none or several")
    report = evaluate_inequality(triple.povm, triple, state, args.tol)
    if args.json:
        print(
            json.dumps(
                {
                    "lhs": report.lhs,
                    "rhs": report.rhs,
                    "violated": report.violated,
                    "state": label,
                    "certification": {
                        "c1": report.certification.c1,
                        "c2": report.certification.c2,
                        "r1": report.certification.r1,
                        "r2": report.certification.r2,
                    },
                }
            )
        )
    else:
        print(f"lhs {_fmt(report.lhs)}")
        print(f"rhs {_fmt(report.rhs)}")
        print(f"violated {'true' if report.violated else 'false'}")
        c = report.certification
        print(
            f"certification c1={_fmt(c.c1)} c2={_fmt(c.c2)} "
            f"r1={_fmt(c.r1)} r2={_fmt(c.r2)}"
        )
        print(f"state {label}")
    return 0


def _cmd_max_violation(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file, args.tol)
    triple = _hardy_inputs(scenario, args.tol)
    value, state = max_violation(triple, args.tol)
    if args.json:
        print(
            json.dumps(
                {
                    "value": value,
                    "state": [[float(z.real), float(z.imag)] for z in state.amplitudes],
                }
            )
        )
    else:
        print(f"max violation {_fmt(value)}")
        print(f"state {_fmt_vector(state.amplitudes)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxlab",
        description="POVMs from system-environment dilations and context-selection analysis.",
    )
    parser.add_argument("--version", action="version", version=f"ctxlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol", type=float, default=None, help="override the global tolerance for this run"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scenario = sub.add_parser("scenario", help="run bundled scenarios")
    scenario_sub = scenario.add_subparsers(dest="scenario_command", required=True)
    run = scenario_sub.add_parser("run", parents=[common], help="build and report a scenario")
    run.add_argument("name", help="scenario name (three-path)")
    run.add_argument("--basis", choices=("VH", "DA"), default="DA")
    run.add_argument("--merge-a", action="store_true", dest="merge_a")
    run.add_argument("--phi-init", choices=("D", "A", "H", "V"), default="D", dest="phi_init")
    run.set_defaults(handler=_cmd_scenario_run)

    povm = sub.add_parser("povm", help="POVM file checks")
    povm_sub = povm.add_subparsers(dest="povm_command", required=True)
    check = povm_sub.add_parser("check", parents=[common], help="report completeness residuals")
    check.add_argument("file")
    check.add_argument("--strict", action="store_true")
    check.add_argument("--json", action="store_true")
    check.set_defaults(handler=_cmd_povm_check)

    dilate = sub.add_parser("dilate", parents=[common], help="rebuild a dilation from a POVM")
    dilate.add_argument("file")
    dilate.add_argument("-o", "--output", required=True)
    dilate.set_defaults(handler=_cmd_dilate)

    graph = sub.add_parser("context-graph", parents=[common], help="context-sharing structure")
    graph.add_argument("file")
    graph.add_argument("--dot", action="store_true")
    graph.add_argument("--json", action="store_true")
    graph.set_defaults(handler=_cmd_context_graph)

    inequality = sub.add_parser(
        "inequality", parents=[common], help="evaluate the rescaled-probability inequality"
    )
    inequality.add_argument("file")
    inequality.add_argument("--state", default=None, help="state label from the file")
    inequality.add_argument("--json", action="store_true")
    inequality.set_defaults(handler=_cmd_inequality)

    violation = sub.add_parser(
        "max-violation", parents=[common], help="largest achievable inequality gap"
    )
    violation.add_argument("file")
    violation.add_argument("--json", action="store_true")
    violation.set_defaults(handler=_cmd_max_violation)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None and args.tol <= 0:
        print("input error: --tol must be positive", file=sys.stderr)
        return 2
    previous_tol = resolve_tol(None)
    if args.tol is not None:
        set_default_tol(args.tol)
    try:
        return args.handler(args)
    except ScenarioFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (SpaceMismatchError, UnknownLabelError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        name = exc.invariant or "unnamed"
        print(f"invariant violation [{name}]: {exc}", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    finally:
        set_default_tol(previous_tol)


if __name__ == "__main__":
    sys.exit(main())
