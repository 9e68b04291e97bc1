import csv
import logging
import math
from typing import List, Optional

from .utils import format_exponent, parse_exponent

HEADER = [
    "experiment",
    "case",
    "s",
    "p",
    "q",
    "J",
    "besov_f",
    "tl_f",
    "besov_Tf",
    "tl_Tf",
    "oracle_tl_Tf_lo",
    "oracle_tl_Tf_hi",
    "K_emp",
    "boundary_ok",
]

FLOATS = [
    "s",
    "p",
    "q",
    "besov_f",
    "tl_f",
    "besov_Tf",
    "tl_Tf",
    "oracle_tl_Tf_lo",
    "oracle_tl_Tf_hi",
]


class NormRow(dict):
    """Wrapper around a dict to represent one row of a NormTable"""

    def __init__(self, **values):
        missing = [key for key in HEADER if key not in values]
        if missing:
            raise ValueError(f"Row misses columns: {missing}")
        extra = [key for key in values if key not in HEADER]
        if extra:
            raise ValueError(f"Unknown columns: {extra}")
        super().__init__(values)
        if self["oracle_tl_Tf_lo"] > self["oracle_tl_Tf_hi"]:
            raise ValueError("Oracle lower bound above upper bound")

    @property
    def besovRatio(self) -> float:
        """
        :rtype: float
        """
        return self["besov_Tf"] / self["besov_f"]

    @property
    def tlRatio(self) -> float:
        """
        :rtype: float
        """
        return self["tl_Tf"] / self["tl_f"]

    def cells(self) -> List[str]:
        out = []
        for key in HEADER:
            value = self[key]
            if key in FLOATS:
                out.append(format_exponent(float(value)))
            elif key == "K_emp":
                out.append("" if value is None else str(int(value)))
            elif key == "boundary_ok":
                out.append("true" if value else "false")
            else:
                out.append(str(value))
        return out

    @classmethod
    def fromCells(cls, cells: dict) -> "NormRow":
        values = dict(cells)
        for key in FLOATS:
            values[key] = parse_exponent(values[key])
        values["J"] = int(values["J"])
        values["K_emp"] = int(values["K_emp"]) if values["K_emp"] else None
        values["boundary_ok"] = values["boundary_ok"] == "true"
        return cls(**values)

    def __repr__(self):
        return "<NormRow {} {} J={}>".format(self["experiment"], self["case"], self["J"])


def _same(value, wanted) -> bool:
    if isinstance(wanted, float) and isinstance(value, float):
        return value == wanted or math.isclose(value, wanted)
    return value == wanted


class NormTable(list):
    """Rows of measured norms, in the order they were produced"""

    def select(self, experiment: Optional[str] = None, **keys) -> "NormTable":
        rows = NormTable()
        for row in self:
            if experiment is not None and row["experiment"] != experiment:
                continue
            if all(_same(row[k], v) for k, v in keys.items()):
                rows.append(row)
        return rows


def emit(table: NormTable, path: str):
    """Write the table as CSV, floats with 12 significant digits.

    :param table: rows to write, may be empty
    :type  table: NormTable
    :param path: target file
    :type  path: str
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for row in table:
            writer.writerow(row.cells())
    logging.info("Wrote %s rows: %s", len(table), path)


def read_table(path: str) -> NormTable:
    """Parse a CSV written by emit

    :rtype: NormTable
    """
    with open(path, "r", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != HEADER:
            raise ValueError(f"Unexpected header in {path}: {reader.fieldnames}")
        return NormTable(NormRow.fromCells(cells) for cells in reader)
