"""Export of the all-pairs degree matrix to CSV and XLSX."""
import csv
from typing import Dict, List, Sequence, Tuple

import openpyxl
from openpyxl.utils import get_column_letter
from openpyxl.worksheet.table import Table, TableStyleInfo

from algebra import Degree, format_degree
from data_store import dbg

# Model state names never contain whitespace, so this header cannot repeat one.
CORNER = "from \\ to"


def _rows(states: Sequence[str], matrix: Dict[Tuple[str, str], Degree]) -> List[List[str]]:
    return [[x] + [format_degree(matrix[(x, y)]) for y in states] for x in states]


def export_matrix_csv(path: str, states: Sequence[str],
                      matrix: Dict[Tuple[str, str], Degree]) -> None:
    """One row per state; cells hold exact rational degrees."""
    fieldnames = ["state"] + list(states)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(fieldnames)
        writer.writerows(_rows(states, matrix))
    dbg(f"Degree matrix exported to {path}")


def export_matrix_xlsx(path: str, states: Sequence[str],
                       matrix: Dict[Tuple[str, str], Degree], k: int, tnorm: str) -> None:
    """Degree matrix as an Excel table.

    Numeric cells hold floats so Excel can sort and colour them; the exact
    rationals go to a second sheet.
    """
    if CORNER in states:
        raise ValueError(f"State name '{CORNER}' clashes with the table header")
    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = "Degrees"
    ws.append([CORNER] + list(states))
    for x in states:
        ws.append([x] + [float(matrix[(x, y)]) for y in states])
    # the table spans the header row and one row per state
    last_col = get_column_letter(ws.max_column)
    last_row = ws.max_row
    tab = Table(displayName="Degrees", ref=f"A1:{last_col}{last_row}")
    tab.tableStyleInfo = TableStyleInfo(
        name="TableStyleMedium9",
        showFirstColumn=True, showLastColumn=False,
        showRowStripes=True, showColumnStripes=False,
    )
    ws.add_table(tab)

    exact = wb.create_sheet("Exact")
    exact.append([CORNER] + list(states))
    for row in _rows(states, matrix):
        exact.append(row)

    info = wb.create_sheet("Run")
    info.append(["k", k])
    info.append(["tnorm", tnorm])
    wb.save(path)
    dbg(f"Degree matrix exported to {path}")
