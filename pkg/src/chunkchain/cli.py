"""Teacher command line: run the node, validate packs, run analytics.

Exit codes: 0 clean, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import asyncio
import json
import sys
import urllib.error
import urllib.request

import click

from .analytics import (
    CsvFormatError,
    GraphError,
    StatsError,
    ancova,
    correlation_t,
    hits,
    read_edges_csv,
    read_records_csv,
    render_score_table,
    render_test_report,
    two_sample_t,
)
from .analytics.stats import Group
from .missions import PackValidationError, load_mission_pack
from .node import ConfigError, load_config, run_node
from .node.config import DEFAULT_API_PORT


@click.group()
def main() -> None:
    """Ephemeral classroom blockchain chat and the teacher analytics toolkit."""


# -- node ---------------------------------------------------------------------

@main.group()
def node() -> None:
    """Run and inspect a classroom node."""


@node.command("start")
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file (or CHUNKCHAIN_CONFIG).")
@click.option("--classroom", "classroom_name", default=None, help="Classroom name; nodes only peer within one classroom.")
@click.option("--passphrase", "classroom_passphrase", default=None, help="Shared classroom passphrase (min 8 chars).")
@click.option("--tcp-port", "listen_tcp", type=int, default=None, help="Peer-to-peer TCP port.")
@click.option("--api-port", "client_api", type=int, default=None, help="Client API (HTTP/WebSocket) port.")
@click.option("--discovery/--no-discovery", default=None, help="LAN UDP discovery beacons.")
@click.option("--peer", "static_peers", multiple=True, help="Static peer address host:port (repeatable).")
@click.option("--difficulty", type=int, default=None, help="Proof-of-work difficulty in leading zero bits.")
@click.option("--mine-interval-ms", "auto_mine_interval_ms", type=int, default=None, help="Auto-miner interval; 0 disables it.")
@click.option("--pack", "mission_pack_path", type=click.Path(), default=None, help="Mission pack JSON overriding the bundled one.")
@click.option("--ui-path", "serve_ui_path", type=click.Path(), default=None, help="Directory of built UI assets to serve at /.")
@click.option("--log-level", default=None, help="debug, info, warning or error.")
@click.option("--bind-host", default=None, help="Interface to bind (default 0.0.0.0).")
@click.option("--advertise-host", default=None, help="Address other nodes should dial back.")
def node_start(config_path: str | None, static_peers: tuple[str, ...], **overrides) -> None:
    """Start a node and serve students until interrupted."""
    try:
        config = load_config(
            config_path,
            static_peers=list(static_peers) if static_peers else None,
            **overrides,
        )
    except (ConfigError, PackValidationError) as exc:
        raise click.UsageError(str(exc)) from exc
    try:
        code = asyncio.run(run_node(config))
    except KeyboardInterrupt:
        code = 0
    sys.exit(code)


@node.command("status")
@click.option("--api", default=f"127.0.0.1:{DEFAULT_API_PORT}", show_default=True, help="host:port of the node's client API.")
def node_status(api: str) -> None:
    """Print tip index, peer count, session count and mempool size."""
    url = f"http://{api}/status"
    try:
        with urllib.request.urlopen(url, timeout=5) as response:
            status = json.loads(response.read().decode("utf-8"))
    except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"cannot reach node at {url}: {exc}", err=True)
        sys.exit(1)
    click.echo(f"classroom:  {status['classroom']}")
    click.echo(f"tip index:  {status['tip_index']}")
    click.echo(f"tip hash:   {status['tip_hash']}")
    click.echo(f"peers:      {status['peer_count']}")
    click.echo(f"sessions:   {status['session_count']}")
    click.echo(f"mempool:    {status['mempool_size']}")


# -- packs ----------------------------------------------------------------------

@main.group()
def packs() -> None:
    """Mission pack tooling."""


@packs.command("validate")
@click.argument("pack_file", type=click.Path(exists=True, dir_okay=False))
def packs_validate(pack_file: str) -> None:
    """Validate a mission pack file; nonzero exit when it violates the schema."""
    with open(pack_file, encoding="utf-8") as fh:
        text = fh.read()
    try:
        pack = load_mission_pack(text)
    except PackValidationError as exc:
        click.echo(f"{pack_file}: {len(exc.violations)} violation(s)", err=True)
        for violation in exc.violations:
            click.echo(f"  - {violation}", err=True)
        sys.exit(1)
    levels = pack.levels()
    click.echo(
        f"{pack_file}: ok ({len(pack.missions)} missions over "
        f"{len(levels)} level{'s' if len(levels) != 1 else ''})"
    )


# -- analytics ---------------------------------------------------------------------

@main.group()
def analytics() -> None:
    """Topic weighting and pretest/posttest statistics."""


@analytics.command("hits")
@click.argument("edges_csv", type=click.File("r"))
def analytics_hits(edges_csv) -> None:
    """Rank topics from an edge list CSV with header content,prerequisite."""
    try:
        graph = read_edges_csv(edges_csv)
        scores = hits(graph)
    except (CsvFormatError, GraphError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(render_score_table(scores))
    click.echo()
    report = {
        "scores": [
            {"label": s.label, "hub": s.hub, "authority": s.authority} for s in scores
        ]
    }
    click.echo(json.dumps(report, indent=2))


@analytics.command("assess")
@click.argument("records_csv", type=click.File("r"))
@click.option("--test", "test_kind", type=click.Choice(["t", "ancova", "cor"]), required=True, help="Which test to run.")
def analytics_assess(records_csv, test_kind: str) -> None:
    """Run one statistical test over a records CSV.

    Expected header: student_id,group,cohort,pretest,posttest,grade
    (grade may be empty). Groups A and B are treatments, P is the placebo.
    """
    try:
        records = read_records_csv(records_csv)
        if test_kind == "t":
            treatment = [r.posttest for r in records if r.group in (Group.A, Group.B)]
            placebo = [r.posttest for r in records if r.group == Group.P]
            if not treatment or not placebo:
                raise StatsError("need both treatment (A/B) and placebo (P) records")
            report = two_sample_t(treatment, placebo)
        elif test_kind == "ancova":
            report = ancova(records)
        else:
            graded = [r for r in records if r.grade is not None]
            if not graded:
                raise StatsError("no grade column values present")
            report = correlation_t(
                [r.posttest for r in graded], [r.grade for r in graded]
            )
    except (CsvFormatError, StatsError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(render_test_report(report))
    click.echo()
    click.echo(json.dumps(report.to_json(), indent=2))


if __name__ == "__main__":
    main()
