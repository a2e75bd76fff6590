"""Command-line client for the service.

Subcommands: check, equiv, family, verify-gig, serve.  By default requests
run against the application in-process (no server needed); --server points
the same client at a running instance instead.  Reports print to stdout as
canonical JSON (sorted keys), diagnostics go to stderr, and exit codes are:

    0  success / positive verdict
    1  verification failure (verify-gig)
    2  input or spec error
    3  negative verdict (not injective / no equivalence found)
    4  parameter outside the family's domain
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx


class _InProcessTransport(httpx.BaseTransport):
    """Serve requests from the ASGI app inside this process, synchronously."""

    def __init__(self, app):
        self._transport = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        import asyncio

        async def _dispatch():
            response = await self._transport.handle_async_request(request)
            body = await response.aread()
            await response.aclose()
            return httpx.Response(status_code=response.status_code,
                                  headers=response.headers, content=body)

        return asyncio.run(_dispatch())


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    from .service import create_app
    return httpx.Client(transport=_InProcessTransport(create_app()),
                        base_url="http://repfam.local", timeout=300.0)


def _load_spec(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read spec file {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: {path} is not valid JSON: line {exc.lineno}, column "
              f"{exc.colno}: {exc.msg}", file=sys.stderr)
        raise SystemExit(2)


def _post(client: httpx.Client, url: str, payload: dict) -> dict:
    response = client.post(url, json=payload)
    if response.status_code in (400, 422):
        print("error: specification rejected:", file=sys.stderr)
        try:
            for item in response.json().get("detail", []):
                loc = ".".join(str(p) for p in item.get("loc", []))
                prefix = f"  [{loc}] " if loc else "  "
                print(f"{prefix}{item.get('msg', item)}", file=sys.stderr)
        except (ValueError, AttributeError):
            print(f"  {response.text}", file=sys.stderr)
        raise SystemExit(2)
    response.raise_for_status()
    return response.json()


def _emit(report: dict) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))


def _parse_theta(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        print(f"error: --theta must be comma-separated numbers, got {text!r}",
              file=sys.stderr)
        raise SystemExit(2)


def _parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        print(f"error: --grid must look like lo:hi:n, got {text!r}", file=sys.stderr)
        raise SystemExit(2)


def cmd_check(args) -> int:
    with _client(args.server) as client:
        report = _post(client, "/check", _load_spec(args.spec))
    _emit(report)
    return 0 if report["injective"]["value"] else 3


def cmd_equiv(args) -> int:
    payload = {"spec_a": _load_spec(args.spec_a), "spec_b": _load_spec(args.spec_b)}
    with _client(args.server) as client:
        report = _post(client, "/equiv", payload)
    _emit(report)
    return 0 if report["equivalent"] else 3


def cmd_family(args) -> int:
    if (args.grid is None) == (args.sample is None):
        print("error: choose exactly one of --grid or --sample", file=sys.stderr)
        return 2
    payload = {"spec": _load_spec(args.spec), "theta": _parse_theta(args.theta)}
    if args.grid is not None:
        lo, hi, n = _parse_grid(args.grid)
        payload["grid"] = {"lo": lo, "hi": hi, "n": n}
    else:
        payload["sample"] = {"n": args.sample, "seed": args.seed}
    with _client(args.server) as client:
        report = _post(client, "/family", payload)
    if report["status"] != "ok":
        membership = report["membership"]
        print(f"error: parameter outside the family's domain "
              f"({membership['method']}): {json.dumps(membership['detail'], sort_keys=True)}",
              file=sys.stderr)
        return 4
    print(f"phi = {report['phi']!r}", file=sys.stderr)
    if report.get("grid") is not None:
        print("x,pdf")
        for x, value in report["grid"]:
            print(f"{x!r},{value!r}")
    else:
        for value in report["samples"]:
            print(repr(value))
    return 0


def cmd_verify_gig(args) -> int:
    with _client(args.server) as client:
        report = _post(client, "/verify-gig", {"seed": args.seed})
    _emit(report)
    lines = [f"{'a':>10} {'b':>10} {'lam':>8} {'case':>14} {'rel_error':>12}  status"]
    for case in report["normalizer_cases"]:
        lines.append(f"{case['a']:>10.4f} {case['b']:>10.4f} {case['lam']:>8.3f} "
                     f"{case['case']:>14} {case['rel_error']:>12.3e}  "
                     f"{'pass' if case['passed'] else 'FAIL'}")
    inj = report["injectivity"]
    lines.append(f"injectivity: {'pass' if inj['passed'] else 'FAIL'} ({inj['assumption']})")
    for case in report["equivalence_cases"]:
        lines.append(f"equivalence r={case['r']:+.4f} s={case['s']:+.4f}: "
                     f"psi_error={case['psi_error']:.3e} pdf_residual={case['pdf_residual']:.3e} "
                     f"{'pass' if case['passed'] else 'FAIL'}")
    print("\n".join(lines), file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("repfam.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repfam",
        description="Exponential families from matrix group actions: "
                    "identifiability checks, equivalence tests, density "
                    "evaluation and sampling.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the diagnostic pipeline on a spec file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("equiv", help="test two spec files for equivalence")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("family", help="evaluate the realized family")
    p.add_argument("spec")
    p.add_argument("--theta", required=True,
                   help="comma-separated natural parameter (statistic "
                        "coefficients, then character coefficients)")
    p.add_argument("--grid", default=None, help="lo:hi:n -> CSV of x,pdf rows")
    p.add_argument("--sample", type=int, default=None,
                   help="emit this many samples, one per line")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify-gig",
                       help="end-to-end verification of the worked example")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_gig)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
