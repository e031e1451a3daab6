"""Row-per-triple defect dumps for external plotting."""

import csv
import io
from collections.abc import Iterator
from typing import Any

import numpy as np

from sqc_lab.engine.estimators import SampleSet

DUMP_COLUMNS = ("x", "y", "lambda", "f_x", "f_y", "f_mid", "defect", "ratio")


def format_vector(values: Any) -> str:
    return ";".join(repr(float(v)) for v in values)


def dump_rows(samples: SampleSet, sigma: float = 0.0) -> Iterator[dict[str, Any]]:
    """One row per scored triple, in sample order; vectors stay as float lists."""
    defects = samples.defects(sigma)
    ratios = samples.raw_ratios()
    for i, j in zip(*np.nonzero(np.isfinite(ratios))):
        yield {
            "x": samples.xs[i].tolist(),
            "y": samples.ys[i].tolist(),
            "lambda": float(samples.lams[j]),
            "f_x": float(samples.f_x[i]),
            "f_y": float(samples.f_y[i]),
            "f_mid": float(samples.f_mid[i, j]),
            "defect": float(defects[i, j]),
            "ratio": float(ratios[i, j]),
        }


def rows_to_csv(rows: Iterator[dict[str, Any]]) -> str:
    """CSV text with DUMP_COLUMNS; vectors are ';'-joined floats."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(DUMP_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                format_vector(row[column]) if isinstance(row[column], list) else repr(row[column])
                for column in DUMP_COLUMNS
            ]
        )
    return buffer.getvalue()
