"""The three-source binary worked example and its published fused values."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Domain, MultinomialOpinion, project_probability
from .fusion import fuse

DOMAIN = Domain(("x", "not_x"))

#: actor -> (b(x), b(not x), u); base rate is 0.5 / 0.5 throughout
INPUTS = {
    "A1": (0.10, 0.30, 0.60),
    "A2": (0.40, 0.20, 0.40),
    "A3": (0.70, 0.10, 0.20),
}
INPUT_PROJECTIONS = {"A1": 0.40, "A2": 0.60, "A3": 0.80}

#: column title -> operator tag, in published order
COLUMNS = {"aCBF": "cbf", "eCBF": "ecbf", "BCF": "bcf", "ABF": "abf", "WBF": "wbf", "CCF": "ccf"}

ROWS = ("b(x)", "b(not x)", "u", "a(x)", "P(x)")
CHECKED_ROWS = ("b(x)", "b(not x)", "u", "P(x)")

#: column title -> published (rounded) value per checked row
EXPECTED = {
    "aCBF": {"b(x)": 0.651, "b(not x)": 0.209, "u": 0.140, "P(x)": 0.721},
    "eCBF": {"b(x)": 0.442, "b(not x)": 0.0, "u": 0.558, "P(x)": 0.721},
    "BCF": {"b(x)": 0.738, "b(not x)": 0.184, "u": 0.078, "P(x)": 0.777},
    "ABF": {"b(x)": 0.509, "b(not x)": 0.164, "u": 0.327, "P(x)": 0.673},
    "WBF": {"b(x)": 0.562, "b(not x)": 0.146, "u": 0.292, "P(x)": 0.708},
    "CCF": {"b(x)": 0.629, "b(not x)": 0.182, "u": 0.189, "P(x)": 0.723},
}

DEFAULT_TOLERANCE = 1e-3


def table_inputs(inputs=None) -> list[MultinomialOpinion]:
    inputs = INPUTS if inputs is None else inputs
    return [
        MultinomialOpinion.from_vector(DOMAIN, (bx, bnx), u, (0.5, 0.5))
        for bx, bnx, u in inputs.values()
    ]


def row_values(op) -> dict[str, float]:
    x, not_x = DOMAIN.singletons()
    return {
        "b(x)": op.b(x),
        "b(not x)": op.b(not_x),
        "u": op.uncertainty,
        "a(x)": op.base_rate[0],
        "P(x)": project_probability(op)[0],
    }


@dataclass(frozen=True)
class Cell:
    column: str
    row: str
    value: float
    expected: float
    passed: bool


def compute_columns(inputs=None) -> dict[str, dict[str, float]]:
    """Fuse the example inputs with every operator; column title -> row values."""
    ops = table_inputs(inputs)
    return {title: row_values(fuse(tag, ops)) for title, tag in COLUMNS.items()}


def check_table(inputs=None, expected=None, tolerance=DEFAULT_TOLERANCE) -> list[Cell]:
    expected = EXPECTED if expected is None else expected
    columns = compute_columns(inputs)
    cells = []
    for title in COLUMNS:
        for row in CHECKED_ROWS:
            value, want = columns[title][row], expected[title][row]
            cells.append(Cell(title, row, value, want, abs(value - want) <= tolerance))
    return cells


def render(inputs=None, expected=None, tolerance=DEFAULT_TOLERANCE) -> tuple[str, bool]:
    """Text table of inputs and fused columns with a PASS/FAIL mark per checked cell."""
    ops = table_inputs(inputs)
    names = list((INPUTS if inputs is None else inputs).keys())
    input_rows = [row_values(op) for op in ops]
    columns = compute_columns(inputs)
    cells = {(c.column, c.row): c for c in check_table(inputs, expected, tolerance)}

    width = 12
    header = f"{'':<10}" + "".join(f"{n:>7}" for n in names) + " |" + "".join(
        f"{t:>{width}}" for t in COLUMNS
    )
    lines = [header, "-" * len(header)]
    for row in ROWS:
        line = f"{row:<10}" + "".join(f"{r[row]:>7.3f}" for r in input_rows) + " |"
        for title in COLUMNS:
            text = f"{columns[title][row]:.3f}"
            cell = cells.get((title, row))
            if cell is not None:
                text += " " + ("PASS" if cell.passed else "FAIL")
            line += f"{text:>{width}}"
        lines.append(line)
    passed = sum(c.passed for c in cells.values())
    lines.append("")
    lines.append(f"{passed}/{len(cells)} checked cells PASS (tolerance {tolerance:g})")
    for cell in cells.values():
        if not cell.passed:
            lines.append(
                f"FAIL {cell.column} {cell.row}: got {cell.value:.6f}, expected {cell.expected}"
            )
    return "\n".join(lines), passed == len(cells)
