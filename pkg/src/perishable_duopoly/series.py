"""Sampled trajectories shared by the agent simulator and the mean-field integrator."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_QUANTITIES = ("p", "s", "h", "x")


@dataclass
class TimeSeries:
    """Rows of (t, mean choice probability, satisfaction, freshness, price) per seller.

    ``p``, ``s``, ``h`` and ``x`` are arrays of shape ``(n_rows, n_sellers)``.
    """

    t: np.ndarray
    p: np.ndarray
    s: np.ndarray
    h: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name in _QUANTITIES:
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[0] != self.t.shape[0]:
                raise ValueError(f"{name} must have shape (n_rows, n_sellers)")
            setattr(self, name, arr)
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    @property
    def n_sellers(self) -> int:
        return self.p.shape[1]

    def __len__(self) -> int:
        return len(self.t)

    def after(self, t0: float) -> "TimeSeries":
        keep = self.t >= t0
        return TimeSeries(self.t[keep], *(getattr(self, q)[keep] for q in _QUANTITIES))

    def header(self) -> list[str]:
        k = self.n_sellers
        return ["t"] + [f"{q}{i + 1}" for q in _QUANTITIES for i in range(k)]

    def to_csv(self, target=None) -> str:
        """Write the series as CSV (9 significant digits); returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        table = np.column_stack([self.t] + [getattr(self, q) for q in _QUANTITIES])
        for row in table:
            writer.writerow([f"{v:.9g}" for v in row])
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "TimeSeries":
        text = Path(source).read_text() if not isinstance(source, io.IOBase) else source.read()
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
        k = (len(header) - 1) // len(_QUANTITIES)
        cols = {q: body[:, 1 + j * k: 1 + (j + 1) * k] for j, q in enumerate(_QUANTITIES)}
        return cls(body[:, 0], **cols)
