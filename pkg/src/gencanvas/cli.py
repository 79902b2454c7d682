"""Command line: serve a session, run a script headlessly, dump a document."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import RuntimeConfig
from .errors import GenCanvasError


@click.group()
def main():
    """Canvas runtime for prompt instruments: fragments, lenses, containers,
    brushes, and palettes."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--adapter", type=click.Choice(["mock", "remote"]), default=None)
def serve(host, port, config_path, adapter):
    """Host a live session (WebSocket commands/events + HTTP assets)."""
    from .runtime import CanvasRuntime
    from .scheduler import SystemClock
    from .server import serve as serve_app

    cfg = RuntimeConfig.load(config_path, overrides={"adapter": adapter})
    runtime = CanvasRuntime(cfg, clock=SystemClock())
    click.echo(f"session on ws://{host}:{port}/session (adapter={cfg.adapter})")
    serve_app(runtime, host=host, port=port)


@main.command()
@click.argument("script", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--transcript", "transcript_path", type=click.Path(), default=None,
              help="Write the canonical transcript JSON here.")
@click.option("--save-doc", "doc_path", type=click.Path(), default=None,
              help="Save the final document (JSON + asset dir).")
@click.option("--render", "render_path", type=click.Path(), default=None,
              help="Render the final canvas to an image file.")
def run(script, config_path, transcript_path, doc_path, render_path):
    """Run a command script headlessly on mock adapters + a virtual clock."""
    from .document import CanvasDocument
    from .persistence import save_document
    from .render import render_document, write_delimited
    from .session import run_script

    cfg = RuntimeConfig.load(config_path) if config_path else None
    try:
        transcript = run_script(script, cfg)
    except GenCanvasError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc

    doc = CanvasDocument.from_dict(transcript.final_document)
    if transcript_path:
        Path(transcript_path).write_bytes(transcript.to_bytes())
        click.echo(f"transcript -> {transcript_path}")
    if doc_path:
        save_document(doc, doc_path)
        click.echo(f"document -> {doc_path}")
    if render_path:
        render_document(doc, render_path)
        click.echo(f"figure -> {render_path}")
    write_delimited(doc, sys.stdout)
    click.echo(f"# events={len(transcript.events)} revision={doc.revision}", err=True)


@main.command()
@click.argument("doc_path", type=click.Path(exists=True))
@click.option("--render", "render_path", type=click.Path(), default=None,
              help="Render the canvas to an image file next to the table.")
@click.option("--sep", default="\t", help="Field separator for the table.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the delimited table here instead of stdout.")
def dump(doc_path, render_path, sep, out_path):
    """Inspect a saved document: delimited element table, optional figure."""
    from .persistence import load_document
    from .render import render_document, write_delimited

    try:
        doc = load_document(doc_path)
    except GenCanvasError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            write_delimited(doc, fh, sep)
        click.echo(f"table -> {out_path}")
    else:
        write_delimited(doc, sys.stdout, sep)
    if render_path:
        render_document(doc, render_path)
        click.echo(f"figure -> {render_path}")


if __name__ == "__main__":
    main()
