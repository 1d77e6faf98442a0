"""Build the benchmark CSVs under data/ from the MASS copies of the UCI files.

Usage: python3 scripts/prepare_data.py <dir containing biopsy.csv, Pima.tr.csv, Pima.te.csv>

The MASS tables ship inside the `pydataset` sdist (pydataset/resources.tar.gz,
rdata/csv/MASS/). Output layout: header line, feature columns, label column
last with +1 (target) / -1 (outlier).
"""
import csv
import statistics
import sys
from pathlib import Path


def read(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


def write(path, names, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(names + ["label"])
        w.writerows(rows)


def breast_cancer(src, out):
    header, rows = read(src / "biopsy.csv")
    feats = header[2:11]
    # V6 (bare nuclei) has 16 missing cells; fill with the column median.
    col = [float(r[7]) for r in rows if r[7] != "NA"]
    fill = statistics.median(col)
    data = []
    for r in rows:
        vals = [fill if v == "NA" else float(v) for v in r[2:11]]
        label = "+1" if r[11] == "benign" else "-1"
        data.append([repr(v) for v in vals] + [label])
    write(out / "breast_cancer.csv", feats, data)


def diabetes(src, out):
    data = []
    feats = None
    for name in ("Pima.tr.csv", "Pima.te.csv"):
        header, rows = read(src / name)
        feats = header[1:8]
        for r in rows:
            label = "+1" if r[8] == "No" else "-1"
            data.append(r[1:8] + [label])
    write(out / "diabetes.csv", feats, data)


if __name__ == "__main__":
    src = Path(sys.argv[1])
    out = Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    breast_cancer(src, out)
    diabetes(src, out)
