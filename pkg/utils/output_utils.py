"""
Utility functions for command outputs
Handles CSV tables with headers and the key=value run manifest
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every double exactly
FLOAT_FORMAT = "%.17g"
MANIFEST_NAME = "manifest.txt"


def write_table(path, rows, columns):
    """Write dict rows as CSV with the given column order; None becomes empty"""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return Path(path)


def write_columns(path, **columns):
    """Write equal-length arrays as named CSV columns"""
    frame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return Path(path)


def write_matrix(path, matrix):
    """Write a square matrix with to_1..to_m headers, one row per source state"""
    matrix = np.asarray(matrix)
    columns = [f"to_{j + 1}" for j in range(matrix.shape[1])]
    pd.DataFrame(matrix, columns=columns).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return Path(path)


def write_manifest(out_dir, manifest):
    """Write the run manifest as key=value lines"""
    path = Path(out_dir) / MANIFEST_NAME
    path.write_text("\n".join(manifest.lines()) + "\n")
    return path


def read_manifest(path):
    """Parse a manifest back into a dict of strings"""
    entries = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            entries[key] = value
    return entries
