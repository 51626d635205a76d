"""Entry point for ``python -m ips2``."""

from ips2.cli import app

app(prog_name="ips2")
