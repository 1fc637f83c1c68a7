"""Offline figure rendering for contphase sweep tables."""

__version__ = "0.1.0"

from .render import PlotJob, RenderError, render

__all__ = ["PlotJob", "RenderError", "render", "__version__"]
