"""Command-line interface: ``batchenvs {list,bench,rollout,train,render-demo}``."""

from batchenvs.cli.main import main

__all__ = ["main"]
