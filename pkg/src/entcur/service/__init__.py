"""HTTP service wrapping the experiment handlers."""

from .app import app, create_app

__all__ = ["app", "create_app"]
