"""Artifact writers and the matching readers.

CSV floats use 12 significant digits; JSON is written with sorted keys so
identical runs produce identical bytes.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "{:.12g}"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT.format(float(v))
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def read_csv(path):
    """Header list and a float array of the rows (shape (rows, columns))."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return float(FLOAT_FORMAT.format(v))
    return obj


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def write_band_diagram(path, bd):
    header = ["alpha"] + [f"band_{b}" for b in range(bd.n_bands)]
    rows = ([a] + list(r) for a, r in zip(bd.alphas, bd.bands))
    return write_csv(path, header, rows)


def read_band_diagram(path):
    """(alphas, bands) from a band CSV."""
    header, data = read_csv(path)
    if header[0] != "alpha":
        raise ValueError(f"{path} is not a band diagram")
    return data[:, 0], data[:, 1:]


def gaps_to_json(gaps):
    return [{"lo": lo, "hi": hi} for lo, hi in gaps]


def write_gaps(path, gaps):
    return write_json(path, gaps_to_json(gaps))


def read_gaps(path):
    return [(g["lo"], g["hi"]) for g in read_json(path)]


def write_spectrum(path, eigenvalues):
    return write_csv(path, ["index", "eigenvalue"], enumerate(eigenvalues))


def write_gnuplot_bands(path, csv_name, n_bands, title, xlabel="alpha", ylabel="lambda"):
    """Gnuplot script plotting every band column of `csv_name` against column 1."""
    lines = [
        "set datafile separator ','",
        "set key off",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        f"plot for [c=2:{n_bands + 1}] '{csv_name}' every ::1 using 1:c with lines lc rgb 'black'",
    ]
    Path(path).write_text("\n".join(lines) + "\n")
    return path


def write_gnuplot_xy(path, csv_name, title, xcol=1, ycol=2, xlabel="x", ylabel="u"):
    lines = [
        "set datafile separator ','",
        "set key off",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        f"plot '{csv_name}' every ::1 using {xcol}:{ycol} with lines",
    ]
    Path(path).write_text("\n".join(lines) + "\n")
    return path
