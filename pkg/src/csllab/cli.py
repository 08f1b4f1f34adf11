"""Command-line client for the laboratory service.

The CLI is a thin HTTP client: it ships the config to a service endpoint and
writes the returned artifact files to disk.  By default it mounts the service
in-process (no network, same contract); pass --server to talk to a remote
instance.  `csllab serve` starts a standalone server.

Every run writes the returned CSV/JSON artifacts plus manifest.txt recording
the config digest, seed, and code version; the manifest is the only file
carrying a timestamp.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

import httpx

from . import __version__
from .config import SUBCOMMANDS

_COMMON_HELP = {
    "collapse": "two-level (or n-level) collapse ensemble, Born-rule statistics",
    "epr": "entangled-pair reduction with a massive pointer",
    "frame": "boosted-vs-rest noise comparison of individual outcomes",
    "mott": "conditional scattering amplitude and angular collimation profile",
    "heating": "bulk-heating effective coupling sweep and bound report",
    "ordering": "event-pair temporal ordering under a boost",
    "noise": "raw white/colored noise trajectory export",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csllab",
        description="Collapse-model numerical laboratory (thin client).",
    )
    parser.add_argument("--version", action="version", version=f"csllab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=_COMMON_HELP[name])
        p.add_argument("--config", required=True, type=Path, help="YAML config file")
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed; overrides the config key")
        p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--trajectories", type=int, default=None,
                       help="override the trajectory/run/pair count in the config")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; default runs in-process")
        p.add_argument("--quiet", action="store_true")
    return parser


_COUNT_KEYS = {"collapse": "trajectories", "epr": "runs", "frame": "pairs"}


def _apply_count_override(config_text: str, subcommand: str, count: int) -> str:
    key = _COUNT_KEYS.get(subcommand)
    if key is None:
        raise SystemExit(f"--trajectories is not applicable to '{subcommand}'")
    # config files are flat YAML mappings; append wins because parse rejects
    # duplicate representations only at the YAML layer, so rewrite the line
    lines = [ln for ln in config_text.splitlines() if not ln.strip().startswith(f"{key}:")]
    lines.append(f"{key}: {count}")
    return "\n".join(lines) + "\n"


def _post(path: str, payload: dict, server: str | None) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)

    import asyncio

    from .service.app import app  # imported lazily; pulls in the numeric stack

    async def _in_process() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://csllab.internal") as client:
            return await client.post(path, json=payload)

    return asyncio.run(_in_process())


def run_command(args: argparse.Namespace) -> int:
    config_text = args.config.read_text()
    if args.trajectories is not None:
        config_text = _apply_count_override(config_text, args.subcommand, args.trajectories)
    payload = {"config_text": config_text, "seed": args.seed}
    response = _post(f"/run/{args.subcommand}", payload, args.server)
    if response.status_code != 200:
        body = response.json()
        detail = body.get("detail", body)
        if isinstance(detail, dict) and "exit_code" in detail:
            print(f"error [{detail['error_class']}]: {detail['detail']}", file=sys.stderr)
            return int(detail["exit_code"])
        if isinstance(body, dict) and "exit_code" in body:
            print(f"error [{body['error_class']}]: {body['detail']}", file=sys.stderr)
            return int(body["exit_code"])
        print(f"error: HTTP {response.status_code}: {response.text}", file=sys.stderr)
        return 1
    result = response.json()

    out_dir: Path = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in sorted(result["files"].items()):
        (out_dir / name).write_text(content)
    manifest = (
        f"subcommand: {result['subcommand']}\n"
        f"seed: {result['seed']}\n"
        f"config_digest: {result['config_digest']}\n"
        f"version: {__version__}\n"
        f"written_at: {datetime.now(timezone.utc).isoformat()}\n"
    )
    (out_dir / "manifest.txt").write_text(manifest)
    if not args.quiet:
        names = ", ".join(sorted(result["files"]) + ["manifest.txt"])
        print(f"{result['subcommand']}: wrote {names} to {out_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.subcommand == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        return run_command(args)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
