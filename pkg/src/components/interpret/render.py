"""
HTML and ANSI renderings of word support and of the q(c|f) / p(f|w,s) grids.

Highlight intensity is linear in the probability: 0 leaves a word unmarked and 1
gives the full category colour. HTML output is a fragment unless wrapped with
`html_report`, which produces a standalone page with its styles inlined.
"""
import html
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.components.interpret.support import WordSupport
from src.core.errors import DimensionError

FORMATS = ("html", "ansi")

# one base colour per category, cycled when there are more categories
PALETTE: Tuple[Tuple[int, int, int], ...] = (
    (214, 39, 40),
    (31, 119, 180),
    (44, 160, 44),
    (255, 127, 14),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (23, 190, 207),
)
HEAT_COLOUR = (31, 119, 180)
ANSI_RESET = "\x1b[0m"

REPORT_STYLE = """
body { font-family: Helvetica, Arial, sans-serif; margin: 2em; }
h2 { font-size: 1.1em; margin-top: 1.5em; }
.row { margin: 0.3em 0; line-height: 1.9em; }
.label { display: inline-block; min-width: 7em; font-weight: bold; }
.w { padding: 0.1em 0.2em; margin-right: 0.15em; border-radius: 3px; }
sub { font-size: 0.7em; }
table.heatmap { border-collapse: collapse; font-size: 0.8em; }
table.heatmap th, table.heatmap td { border: 1px solid #ddd; padding: 0.2em 0.4em; text-align: center; }
""".strip()


def _check_format(format: str) -> None:
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")


def _intensity(value: float) -> float:
    return float(min(1.0, max(0.0, value)))


def category_colour(category: int) -> Tuple[int, int, int]:
    return PALETTE[category % len(PALETTE)]


def _html_word(text: str, value: float, colour: Tuple[int, int, int], subscript: Optional[int] = None) -> str:
    r, g, b = colour
    sub = f"<sub>{subscript}</sub>" if subscript is not None else ""
    return (
        f'<span class="w" style="background-color: rgba({r}, {g}, {b}, {_intensity(value):.3f})">'
        f"{html.escape(text)}{sub}</span>"
    )


def _ansi_word(text: str, value: float, colour: Tuple[int, int, int], subscript: Optional[int] = None) -> str:
    word = text if subscript is None else f"{text}_{subscript}"
    alpha = _intensity(value)
    if alpha == 0.0:
        return word
    # blend from white towards the colour
    r, g, b = (round(255 + (c - 255) * alpha) for c in colour)
    return f"\x1b[48;2;{r};{g};{b}m\x1b[38;2;0;0;0m{word}{ANSI_RESET}"


def _row(words: List[str], format: str, label: Optional[str] = None) -> str:
    if format == "html":
        prefix = f'<b class="label">{html.escape(label)}</b> ' if label is not None else ""
        return f'<div class="row">{prefix}{" ".join(words)}</div>'
    prefix = f"{label} " if label is not None else ""
    return prefix + " ".join(words)


def render_highlight(
    ws: WordSupport, categories: Sequence[str], category: Optional[int] = None, format: str = "html"
) -> str:
    """
    Words of one text highlighted by q(category | w, s).

    With `category=None` every category gets its own row, led by its label.
    """
    _check_format(format)
    m = ws.q.shape[1]
    if len(categories) != m:
        raise DimensionError(f"{len(categories)} category labels for word support over {m} categories")
    if category is not None and not 0 <= category < m:
        raise ValueError(f"category {category} outside [0, {m})")
    word = _html_word if format == "html" else _ansi_word
    rows = []
    for c in range(m) if category is None else [category]:
        words = [word(token, ws.q[i, c], category_colour(c)) for i, token in enumerate(ws.tokens)]
        rows.append(_row(words, format, categories[c] if category is None else None))
    return "\n".join(rows)


def render_heatmap(
    matrix: np.ndarray, row_labels: Sequence[str], col_labels: Sequence[str], format: str = "html"
) -> str:
    """Grid of probabilities, every cell annotated with its value in percent."""
    _check_format(format)
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape != (len(row_labels), len(col_labels)):
        raise DimensionError(
            f"heatmap of shape {matrix.shape} needs {matrix.shape[0] if matrix.ndim == 2 else '?'} row labels "
            f"and {matrix.shape[-1] if matrix.ndim == 2 else '?'} column labels, "
            f"got {len(row_labels)} and {len(col_labels)}"
        )
    if not np.all(np.isfinite(matrix)) or matrix.min(initial=0.0) < 0.0 or matrix.max(initial=0.0) > 1.0:
        raise ValueError("heatmap values must be finite probabilities in [0, 1]")

    if format == "html":
        r, g, b = HEAT_COLOUR
        head = "".join(f"<th>{html.escape(str(label))}</th>" for label in col_labels)
        lines = ['<table class="heatmap">', f"<tr><th></th>{head}</tr>"]
        for label, values in zip(row_labels, matrix):
            cells = "".join(
                f'<td style="background-color: rgba({r}, {g}, {b}, {v:.3f})">{100 * v:.0f}</td>' for v in values
            )
            lines.append(f"<tr><th>{html.escape(str(label))}</th>{cells}</tr>")
        lines.append("</table>")
        return "\n".join(lines)

    label_width = max((len(str(label)) for label in row_labels), default=0)
    cell_width = max([4] + [len(str(label)) for label in col_labels])
    lines = [" " * label_width + " " + " ".join(f"{str(label):>{cell_width}}" for label in col_labels)]
    for label, values in zip(row_labels, matrix):
        cells = [_ansi_word(f"{100 * v:>{cell_width}.0f}", v, HEAT_COLOUR) for v in values]
        lines.append(f"{str(label):<{label_width}} " + " ".join(cells))
    return "\n".join(lines)


def render_feature_subscripts(
    items: Sequence[Tuple[WordSupport, str, str]], format: str = "html"
) -> str:
    """
    One line per (word support, gold label, predicted label): "GOLD-PRED" followed by every
    word with its argmax feature as subscript, highlighted by that feature's probability.
    """
    _check_format(format)
    word = _html_word if format == "html" else _ansi_word
    rows = []
    for ws, gold, predicted in items:
        weights = ws.feature_weights
        words = [
            word(token, weights[i], HEAT_COLOUR, int(ws.features[i])) for i, token in enumerate(ws.tokens)
        ]
        rows.append(_row(words, format, f"{gold}-{predicted}"))
    return "\n".join(rows)


def html_report(title: str, sections: Sequence[Tuple[str, str]]) -> str:
    """A standalone page: each section is a (heading, html fragment) pair."""
    body = "\n".join(f"<h2>{html.escape(heading)}</h2>\n{fragment}" for heading, fragment in sections)
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{html.escape(title)}</title>\n<style>\n{REPORT_STYLE}\n</style>\n</head>\n"
        f"<body>\n<h1>{html.escape(title)}</h1>\n{body}\n</body>\n</html>\n"
    )


def ansi_report(title: str, sections: Sequence[Tuple[str, str]]) -> str:
    body = "\n\n".join(f"== {heading} ==\n{fragment}" for heading, fragment in sections)
    return f"{title}\n\n{body}\n"
