#!/usr/bin/env python3
"""Download the seeds and glass UCI datasets as feature-only CSVs.

Usage:
    python scripts/fetch_datasets.py [OUT_DIR]

OUT_DIR defaults to tests/data, where the acceptance tests look first.
"""

import logging
import os
import sys
import urllib.request

# Add the src directory to the Python path
current_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(current_dir, "src"))

import numpy as np

from kcenter_global.dataset import Dataset, write_csv

logger = logging.getLogger("fetch_datasets")

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

# name -> (url, field separator or None for whitespace, feature columns, rows)
DATASETS = {
    "seeds": (f"{UCI}/00236/seeds_dataset.txt", None, slice(0, 7), 210),
    "glass": (f"{UCI}/glass/glass.data", ",", slice(1, 10), 214),
}


def parse(text, sep, columns):
    """Keep the feature columns of every non-blank line."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            rows.append([float(v) for v in line.split(sep)][columns])
    return Dataset(np.array(rows))


def main():
    logging.basicConfig(level=logging.INFO, format="%(levelname)s - %(message)s")
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(current_dir, "tests", "data")
    os.makedirs(out_dir, exist_ok=True)

    for name, (url, sep, columns, expected_rows) in DATASETS.items():
        try:
            with urllib.request.urlopen(url, timeout=60) as response:
                text = response.read().decode("utf-8")
        except OSError as e:
            logger.error(f"Could not download {name} from {url}: {e}")
            return 1
        d = parse(text, sep, columns)
        if d.n_samples != expected_rows:
            logger.error(f"{name}: expected {expected_rows} rows, parsed {d.n_samples}")
            return 1
        path = os.path.join(out_dir, f"{name}.csv")
        write_csv(d, path)
        logger.info(f"Wrote {d.n_samples} x {d.n_attrs} {name} samples to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
