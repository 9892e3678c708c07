"""Command-line client for the nonvanish service layer.

Thin by design: flags are parsed into the pydantic request models, the
request is dispatched either in-process (default) or to a running server
(--server URL), and the Report envelope is rendered as json, csv or text.

Exit codes: 0 success, 2 validation error, 3 capacity error, 4 accuracy
error.  Hypothesis-range warnings go to stderr and never change the exit
status.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import AccuracyError, CapacityError, NonvanishError, SpecValidationError
from .schemas import (
    CensusRequest,
    EmpiricalRequest,
    KernelPoint,
    KernelsRequest,
    MellinPoint,
    MomentsRequest,
    OptimizeRequest,
    OraclesRequest,
    ProportionRequest,
    Report,
    ScanRequest,
    ShiftedRequest,
    parse_spec_args,
)
from .service import HANDLERS


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["paper", "is-baseline"])
    p.add_argument("--theta1", help="rational string, e.g. 1/2")
    p.add_argument("--theta2", help="rational string")
    p.add_argument("--p-coeffs", help="comma-separated rationals for P at x^1,x^2,...")
    p.add_argument("--q-coeffs", help="comma-separated rationals for Q at x^1,x^2,...")


def _csv_list(s: str | None) -> list[str] | None:
    if s is None:
        return None
    s = s.strip()
    return [] if s == "" else [tok.strip() for tok in s.split(",")]


def _spec_params(args, q_for_lengths: int | None = None):
    return parse_spec_args(
        args.preset,
        args.theta1,
        args.theta2,
        _csv_list(args.p_coeffs),
        _csv_list(args.q_coeffs),
        q_for_lengths,
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nonvanish",
        description="Two-piece mollifier main terms, optimization, and "
        "central-value verification for even Dirichlet L-functions",
    )
    ap.add_argument("--server", help="base URL of a running service; default in-process")
    ap.add_argument("--format", choices=["json", "csv", "text"], default="json")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized oracles")
    # the same options are accepted after the subcommand; SUPPRESS keeps an
    # absent sub-level flag from clobbering a top-level value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", default=argparse.SUPPRESS)
    common.add_argument(
        "--format", choices=["json", "csv", "text"], default=argparse.SUPPRESS
    )
    common.add_argument("--output", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_command(name: str, help_: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_, parents=[common])

    p = add_command("proportion", "exact non-vanishing proportion of a spec")
    _add_spec_flags(p)

    p = add_command("optimize", "maximize the proportion on a degree basis")
    p.add_argument("--dp", type=int, required=True)
    p.add_argument("--dq", type=int, default=0)
    p.add_argument("--theta1", default="1/2")
    p.add_argument("--theta2", default="1/2")

    p = add_command("scan", "optimum over a degree grid")
    p.add_argument("--max-dp", type=int, required=True)
    p.add_argument("--max-dq", type=int, required=True)
    p.add_argument("--theta1", default="1/2")
    p.add_argument("--theta2", default="1/2")

    p = add_command("moments", "exact main terms and optional shifted values")
    _add_spec_flags(p)
    p.add_argument("--q", type=int)
    p.add_argument(
        "--shift",
        action="append",
        default=[],
        metavar="ALPHA,BETA",
        help="may repeat; floats",
    )

    p = add_command("shifted", "shifted moment main terms at one (alpha,beta)")
    _add_spec_flags(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--method", choices=["jet", "fd"], default="jet")

    p = add_command("empirical", "empirical moments against predictions")
    _add_spec_flags(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1e-8)

    p = add_command("census", "non-vanishing census over moduli")
    _add_spec_flags(p)
    p.add_argument("--q", action="append", type=int, default=[], help="may repeat")
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--no-moments", action="store_true")

    p = add_command("kernels", "evaluate smoothing kernels / Mellin profile")
    p.add_argument("--kind", choices=["cutoff", "pair_plus", "pair_minus"], default="cutoff")
    p.add_argument("--x", action="append", type=float, default=[])
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--contour-re", type=float, default=2.0)
    p.add_argument("--truncation-t", type=float, default=10.0)
    p.add_argument("--node-count", type=int, default=768)
    p.add_argument("--mellin", action="append", default=[], metavar="I,Y,H")

    p = add_command("oracles", "closed-form vs brute-force oracle checks")
    p.add_argument(
        "--which",
        choices=["orthogonality", "twisted", "divisor-integral", "divisor-bound"],
        required=True,
    )
    p.add_argument("--q", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--y1", type=float)
    p.add_argument("--y2", type=float)
    p.add_argument("--count", type=int, default=20)

    sub.add_parser("serve", help="run the HTTP service (uvicorn)")
    return ap


def build_request(args):
    cmd = args.command
    if cmd == "proportion":
        return ProportionRequest(spec=_spec_params(args))
    if cmd == "optimize":
        return OptimizeRequest(
            dp=args.dp, dq=args.dq, theta1=args.theta1, theta2=args.theta2
        )
    if cmd == "scan":
        return ScanRequest(
            max_dp=args.max_dp, max_dq=args.max_dq,
            theta1=args.theta1, theta2=args.theta2,
        )
    if cmd == "moments":
        shifts = []
        for tok in args.shift:
            a, b = tok.split(",")
            shifts.append((float(a), float(b)))
        return MomentsRequest(spec=_spec_params(args), q=args.q, shifts=shifts)
    if cmd == "shifted":
        return ShiftedRequest(
            spec=_spec_params(args), q=args.q,
            alpha=args.alpha, beta=args.beta, method=args.method,
        )
    if cmd == "empirical":
        return EmpiricalRequest(
            spec=_spec_params(args, q_for_lengths=args.q),
            q=args.q, threshold=args.threshold,
        )
    if cmd == "census":
        if not args.q:
            raise SpecValidationError("census needs at least one --q")
        return CensusRequest(
            spec=_spec_params(args),
            q_list=args.q,
            threshold=args.threshold,
            with_moments=not args.no_moments,
        )
    if cmd == "kernels":
        points = [
            KernelPoint(
                kind=args.kind, x=x, alpha=args.alpha, beta=args.beta,
                contour_re=args.contour_re, truncation_T=args.truncation_t,
                node_count=args.node_count,
            )
            for x in args.x
        ]
        mellin = []
        for tok in args.mellin:
            i, y, h = tok.split(",")
            mellin.append(MellinPoint(i=int(i), y=float(y), h=float(h)))
        return KernelsRequest(points=points, mellin=mellin)
    if cmd == "oracles":
        return OraclesRequest(
            which=args.which, q=args.q, h=args.h, k=args.k, alpha=args.alpha,
            order=args.order, z=args.z, sigma=args.sigma,
            y1=args.y1, y2=args.y2, count=args.count, seed=args.seed,
        )
    raise SpecValidationError(f"unknown command {cmd!r}")


def dispatch(command: str, request, server: str | None) -> Report:
    if server:
        import httpx

        resp = httpx.post(
            f"{server.rstrip('/')}/{command}", json=request.model_dump(), timeout=600.0
        )
        if resp.status_code != 200:
            payload = resp.json()
            kind = payload.get("error", {}).get("kind", "validation")
            msg = payload.get("error", {}).get("message", resp.text)
            if kind == "capacity":
                raise CapacityError(msg)
            if kind == "accuracy":
                raise AccuracyError(msg)
            raise SpecValidationError(msg)
        return Report.model_validate(resp.json())
    _, handler = HANDLERS[command]
    return handler(request)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.model_dump(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        csv = report.results.get("csv")
        if csv is None:
            raise SpecValidationError(
                f"command {report.command!r} has no CSV representation"
            )
        return csv
    lines = [f"{report.command}:"]
    for key, val in sorted(report.results.items()):
        if key == "csv":
            continue
        lines.append(f"  {key}: {val}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host="127.0.0.1", port=8710)
        return 0
    try:
        request = build_request(args)
        report = dispatch(args.command, request, args.server)
        text = render(report, args.format)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 4
    except (SpecValidationError, NonvanishError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    warnings = report.results.get("spec", {}).get("warnings") or report.results.get(
        "warnings", []
    )
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
