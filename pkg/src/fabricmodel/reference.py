"""Published reference figures for the Aurora system.

The dataset ships as a versioned CSV asset (reference/paper_values.csv)
with columns table,row,quantity,value,unit. Values are stored exactly as
published, in the published unit; si_value() converts to base SI units
using decimal prefixes (1 PB = 1e15 bytes). Message sizes quoted in KiB
elsewhere in the package are binary; everything in this table is decimal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

_UNIT_TO_SI = {
    "count": 1.0,
    "ops": 1.0,
    "%": 0.01,
    "W": 1.0,
    "kW": 1e3,
    "GHz": 1e9,
    "us": 1e-6,
    "GB": 1e9,
    "TB": 1e12,
    "PB": 1e15,
    "GB/s": 1e9,
    "TB/s": 1e12,
    "PB/s": 1e15,
    "TF/s": 1e12,
    "PF/s": 1e15,
    "EF/s": 1e18,
    "Gb/s": 1e9 / 8,
}


@dataclass(frozen=True)
class PaperValue:
    """One published figure with its citation coordinates."""

    table: str
    row: str
    quantity: str
    value: float
    unit: str

    @property
    def si_value(self) -> float:
        """Value converted to base SI units (bytes, seconds, flops, watts)."""
        try:
            return self.value * _UNIT_TO_SI[self.unit]
        except KeyError:
            raise ValueError(f"no SI conversion for unit {self.unit!r}") from None

    @property
    def citation(self) -> str:
        return f"{self.table}: {self.row}"


@lru_cache(maxsize=1)
def paper_values() -> dict[str, PaperValue]:
    """Load the reference dataset, keyed by the machine-readable quantity id."""
    text = (
        resources.files("fabricmodel").joinpath("reference").joinpath("paper_values.csv")
    ).read_text()
    out: dict[str, PaperValue] = {}
    for rec in csv.DictReader(text.splitlines()):
        pv = PaperValue(
            table=rec["table"],
            row=rec["row"],
            quantity=rec["quantity"],
            value=float(rec["value"]),
            unit=rec["unit"],
        )
        if pv.quantity in out:
            raise ValueError(f"duplicate quantity id {pv.quantity!r}")
        out[pv.quantity] = pv
    return out


def paper_value(quantity: str) -> PaperValue:
    return paper_values()[quantity]


def paper_si(quantity: str) -> float:
    return paper_values()[quantity].si_value
