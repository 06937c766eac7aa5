"""Command-line front door: a thin client over the analysis service.

Every subcommand builds a request model, sends it through the service
(in-process by default, or to a remote `--server` URL), and writes the
response to files.  Exit codes: 0 success, 2 validation error, 3 numeric
non-convergence.  Randomized runs take `--seed` (fallback: the
CMSPRESS_SEED environment variable); fixed seed means byte-identical
output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional

import httpx

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        _fail(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        _fail(f"{what} file {path} is not valid JSON: {exc}")


def _fail(msg: str, code: int = EXIT_VALIDATION):
    print(f"error: {msg}", file=sys.stderr)
    raise SystemExit(code)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    return _handle(resp)


def _handle(resp: httpx.Response) -> dict:
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except Exception:
        detail = resp.text
    if isinstance(detail, dict):
        kind = detail.get("kind", "validation")
        msg = detail.get("error", str(detail))
        field = detail.get("field")
        suffix = f" (field: {field})" if field else ""
        if kind == "non_convergence":
            _fail(f"{msg}{suffix}", EXIT_NONCONVERGENCE)
        _fail(f"{msg}{suffix}", EXIT_VALIDATION)
    _fail(str(detail), EXIT_VALIDATION)


def _write_json(path: Optional[str], data: dict):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: Optional[str], header: list[str], rows: list[list]):
    def fmt(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return repr(x)
        return str(x)

    out = sys.stdout if not path else open(path, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    finally:
        if path:
            out.close()


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CMSPRESS_SEED")
    return int(env) if env else 0


def _spec_payload(args) -> dict:
    out = {}
    if getattr(args, "gallery", None):
        out["gallery"] = args.gallery
    elif getattr(args, "spec", None):
        out["spec"] = _load_json(args.spec, "spec")
    else:
        _fail("provide --spec FILE or --gallery NAME")
    return out


def cmd_pressure(args) -> int:
    payload = _spec_payload(args)
    payload.update({
        "method": args.method,
        "seed": _seed(args),
        "theta": args.theta,
    })
    if args.potential:
        payload["potential"] = _load_json(args.potential, "potential")
    if args.schedule:
        payload["schedule"] = [int(x) for x in args.schedule.split(",")]
    if args.N is not None:
        payload["N"] = args.N
    if args.n is not None:
        payload["n"] = args.n
    if args.eps is not None:
        payload["eps"] = args.eps
    if args.base is not None:
        payload["base"] = args.base
    if args.n_max is not None:
        payload["n_max"] = args.n_max
    if args.nmax_cap is not None:
        payload["N_max"] = args.nmax_cap
    if args.cutoff is not None:
        payload["cutoff"] = args.cutoff
    if args.metric:
        payload["metric"] = _load_json(args.metric, "metric")
    if args.boundary:
        payload["boundary"] = _load_json(args.boundary, "boundary")
    if args.p_seq:
        payload["p_seq"] = [int(x) for x in args.p_seq.split(",")]
    with _client(args.server) as client:
        data = _post(client, "/pressure", payload)
    if args.format == "json" or (args.out or "").endswith(".json"):
        _write_json(args.out, data)
    else:
        rows = data.get("rows") or []
        if rows and rows[0].get("n") is not None:
            _write_csv(args.out, ["n", "value"],
                       [[r["n"], r["value"]] for r in rows])
        elif rows:
            _write_csv(args.out, ["N", "value", "lower", "upper", "increment"],
                       [[r["N"], r["value"], r["lower"], r["upper"], r["increment"]]
                        for r in rows])
        else:
            _write_csv(args.out, ["value", "lower", "upper"],
                       [[data["value"], data["lower"], data.get("upper")]])
    return EXIT_OK


def cmd_sectors(args) -> int:
    payload = _spec_payload(args)
    payload["nmax"] = args.nmax
    payload["seed"] = _seed(args)
    if args.cutoffs:
        payload["cutoffs"] = [int(x) for x in args.cutoffs.split(",")]
    if args.metric:
        payload["metric"] = _load_json(args.metric, "metric")
    with _client(args.server) as client:
        data = _post(client, "/sectors", payload)
    _write_json(args.out, data)
    return EXIT_OK


def cmd_boundary(args) -> int:
    payload = _spec_payload(args)
    payload["nmax"] = args.nmax
    payload["seed"] = _seed(args)
    if args.metric:
        payload["metric"] = _load_json(args.metric, "metric")
    if args.cutoffs:
        payload["cutoffs"] = [int(x) for x in args.cutoffs.split(",")]
    if args.m_max is not None:
        payload["m_max"] = args.m_max
    with _client(args.server) as client:
        data = _post(client, "/boundary", payload)
    _write_json(args.out, data)
    return EXIT_OK


def cmd_diff_scan(args) -> int:
    try:
        start, stop, step = (float(x) for x in args.grid.split(":"))
    except ValueError:
        _fail("grid must look like start:stop:step, e.g. -1:1:0.01")
    payload = {
        "spec": _load_json(args.spec, "spec"),
        "phi": _load_json(args.phi, "phi potential"),
        "psi": _load_json(args.psi, "psi potential"),
        "grid": [start, stop, step],
        "tol": args.tol,
        "seed": _seed(args),
    }
    if args.n_trunc:
        payload["N"] = args.n_trunc
    with _client(args.server) as client:
        data = _post(client, "/diff-scan", payload)
    if (args.out or "").endswith(".json") or args.format == "json":
        _write_json(args.out, data)
    else:
        _write_csv(args.out, ["t", "P", "d2P"],
                   [[r["t"], r["P"], r["d2P"]] for r in data["rows"]])
        if data["kinks"]:
            print(f"kinks detected: {json.dumps(data['kinks'], sort_keys=True)}")
    return EXIT_OK


def cmd_metric_classify(args) -> int:
    payload = {
        "metric": _load_json(args.metric, "metric"),
        "n_max": args.nmax,
        "seed": _seed(args),
    }
    if args.eps_grid:
        payload["eps_grid"] = [float(x) for x in args.eps_grid.split(",")]
    with _client(args.server) as client:
        data = _post(client, "/metric-classify", payload)
    _write_json(args.out, data)
    return EXIT_OK


def cmd_gallery(args) -> int:
    with _client(args.server) as client:
        if args.action == "list":
            data = _handle(client.get("/gallery"))
            for item in data["entries"]:
                print(item["name"])
            return EXIT_OK
        if not args.name:
            _fail("gallery export needs --name")
        data = _handle(client.get(f"/gallery/{args.name}"))
    _write_json(args.out, data)
    return EXIT_OK


def cmd_explore_conjecture(args) -> int:
    payload = {"name": args.name, "seed": _seed(args)}
    if args.potential:
        payload["potential"] = _load_json(args.potential, "potential")
    if args.schedule:
        payload["schedule"] = [int(x) for x in args.schedule.split(",")]
    with _client(args.server) as client:
        data = _post(client, "/explore-conjecture", payload)
    _write_json(args.out, data)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("cmspress.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cmspress",
        description="Pressure, sectors and boundary structure of countable "
                    "Markov shifts and their metric compactifications")
    ap.add_argument("--server", help="remote service URL (default: in-process)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--threads", type=int, default=1,
                       help="reserved; results are independent of thread count")

    p = sub.add_parser("pressure", help="pressure estimates")
    p.add_argument("--spec"), p.add_argument("--gallery")
    p.add_argument("--potential")
    p.add_argument("--method", default="interior",
                   choices=["interior", "spectral", "gurevich", "separated",
                            "loop_gf", "compactified"])
    p.add_argument("--schedule", help="comma-separated truncation bounds")
    p.add_argument("--n", dest="n", type=int)
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--base", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--N-max", dest="nmax_cap", type=int)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--p-seq", dest="p_seq")
    p.add_argument("--metric")
    p.add_argument("--boundary")
    common(p)
    p.set_defaults(fn=cmd_pressure)

    p = sub.add_parser("sectors", help="sector decomposition and certificate")
    p.add_argument("--spec"), p.add_argument("--gallery")
    p.add_argument("--metric")
    p.add_argument("--cutoffs", help="comma-separated cutoffs, e.g. 4,16,64")
    p.add_argument("--nmax", type=int, default=256)
    common(p)
    p.set_defaults(fn=cmd_sectors)

    p = sub.add_parser("boundary", help="boundary model and lemma checks")
    p.add_argument("--spec"), p.add_argument("--gallery")
    p.add_argument("--metric")
    p.add_argument("--cutoffs")
    p.add_argument("--nmax", type=int, default=128)
    p.add_argument("--m-max", dest="m_max", type=int)
    common(p)
    p.set_defaults(fn=cmd_boundary)

    p = sub.add_parser("diff-scan", help="pressure curve and kink report")
    p.add_argument("--spec", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--grid", default="-1:1:0.01")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--N", dest="n_trunc", type=int)
    common(p)
    p.set_defaults(fn=cmd_diff_scan)

    p = sub.add_parser("metric-classify", help="vanishing/totally-bounded verdicts")
    p.add_argument("--metric", required=True)
    p.add_argument("--nmax", type=int, default=256)
    p.add_argument("--eps-grid", dest="eps_grid")
    common(p)
    p.set_defaults(fn=cmd_metric_classify)

    p = sub.add_parser("gallery", help="list or export example systems")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("--name")
    common(p)
    p.set_defaults(fn=cmd_gallery)

    p = sub.add_parser("explore-conjecture",
                       help="dual pressure estimates on a gallery entry")
    p.add_argument("--name", required=True)
    p.add_argument("--potential")
    p.add_argument("--schedule")
    common(p)
    p.set_defaults(fn=cmd_explore_conjecture)

    p = sub.add_parser("serve", help="run the analysis service under uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
