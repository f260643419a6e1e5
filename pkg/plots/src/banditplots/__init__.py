"""Figure rendering for banditpoison experiment CSVs."""

__version__ = "0.1.0"

from .figures import (
    FigureSpec,
    FigureSpecError,
    PanelData,
    PanelSpec,
    SeriesData,
    SeriesSpec,
    extract_series,
    render_figure,
)

__all__ = [
    "__version__",
    "FigureSpec",
    "FigureSpecError",
    "PanelData",
    "PanelSpec",
    "SeriesData",
    "SeriesSpec",
    "extract_series",
    "render_figure",
]
