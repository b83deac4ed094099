"""Command-line entry points: simulate, replay, score, ttest, serve."""

from __future__ import annotations

import sys
from statistics import mean

import click

from .errors import GharError, ValidationError
from .evalstats import group_scores, harus_score, load_responses_csv, pooled_ttest, sus_score
from .session import replay_trace
from .tracking import PROFILES, load_profile


def _resolve_profile(name_or_path: str):
    if name_or_path in PROFILES:
        return PROFILES[name_or_path]
    return load_profile(name_or_path)


@click.group()
def main():
    """Geospatial-AR engine tools."""


@main.command()
@click.option("--profile", default="geospatial", help="geospatial, gps, or a profile JSON path")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
def simulate(profile, trace_path, seed):
    """Run a trace headless and print the final scene snapshot."""
    try:
        final, _ = replay_trace(trace_path, _resolve_profile(profile), seed)
    except GharError as e:
        raise click.ClickException(str(e))
    click.echo(final.to_json())


@main.command()
@click.option("--profile", default="geospatial")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
def replay(profile, trace_path, seed):
    """Replay a trace and print the full snapshot log, one line per event."""
    try:
        _, log = replay_trace(trace_path, _resolve_profile(profile), seed)
    except GharError as e:
        raise click.ClickException(str(e))
    for line in log:
        click.echo(line)


@main.command()
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True))
def score(csv_path):
    """Print per-participant scores and the group mean for a response CSV."""
    try:
        responses = load_responses_csv(csv_path)
    except GharError as e:
        raise click.ClickException(str(e))
    if not responses:
        raise click.ClickException("no responses in file")
    instrument = responses[0].instrument
    totals = []
    for r in responses:
        if r.instrument != instrument:
            raise click.ClickException("mixed instruments in one file")
        if instrument == "SUS":
            s = sus_score(r)
            click.echo(f"{r.participant_id}  SUS  {s:.2f}")
            totals.append(s)
        else:
            m, c, t = harus_score(r)
            click.echo(f"{r.participant_id}  HARUS  manip={m:.2f}  compr={c:.2f}  total={t:.2f}")
            totals.append(t)
    click.echo(f"group mean ({instrument}): {mean(totals):.2f}")
    if instrument == "HARUS":
        ms = [harus_score(r)[0] for r in responses]
        cs = [harus_score(r)[1] for r in responses]
        click.echo(f"group mean manipulability: {mean(ms):.2f}")
        click.echo(f"group mean comprehensibility: {mean(cs):.2f}")


@main.command()
@click.option("--csv-a", required=True, type=click.Path(exists=True))
@click.option("--csv-b", required=True, type=click.Path(exists=True))
@click.option(
    "--measure",
    required=True,
    type=click.Choice(["usability", "manipulability", "comprehensibility", "harus_total"]),
)
def ttest(csv_a, csv_b, measure):
    """Pooled t-test between two groups; prints t, df, Sig.(2-tailed), d."""
    try:
        a = group_scores(load_responses_csv(csv_a), measure)
        b = group_scores(load_responses_csv(csv_b), measure)
        result = pooled_ttest(a, b)
    except GharError as e:
        raise click.ClickException(str(e))
    click.echo(result.table_row())


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8787, type=int)
@click.option("--profile", default="geospatial")
@click.option("--seed", default=None, type=int)
def serve(host, port, profile, seed):
    """Start the WebSocket session service."""
    from .server import serve as run

    try:
        run(host=host, port=port, profile=_resolve_profile(profile), seed=seed)
    except OSError as e:
        raise click.ClickException(f"failed to bind {host}:{port}: {e}")


if __name__ == "__main__":
    sys.exit(main())
