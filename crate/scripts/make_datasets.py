"""Regenerate the bundled libsvm files in data/.

breast-cancer_scale: MASS::biopsy (699 rows, sample ID + 9 attributes), rows
with missing values dropped (683 left), labels benign=2 / malignant=4.
diabetes_scale: Pima Indians diabetes (768 rows, 8 attributes), labels
tested_positive=-1 / tested_negative=+1.

Every feature is min/max scaled to [-1, 1] and zero values are omitted, as
svm-scale does. Sources are the `rdatasets` and `keel-ds` wheels on PyPI:

    pip download --no-deps rdatasets keel-ds
    python3 scripts/make_datasets.py rdatasets-*.whl keel_ds-*.whl
"""
import io
import lzma
import pickle
import sys
import zipfile


def scale(rows):
    d = len(rows[0])
    lo = [min(r[k] for r in rows) for k in range(d)]
    hi = [max(r[k] for r in rows) for k in range(d)]
    out = []
    for r in rows:
        feats = []
        for k, v in enumerate(r):
            s = 0.0 if hi[k] == lo[k] else -1.0 + 2.0 * (v - lo[k]) / (hi[k] - lo[k])
            if s != 0.0:
                feats.append(f"{k + 1}:{s:g}")
        out.append(feats)
    return out


def write(path, labels, rows):
    with open(path, "w") as f:
        for y, feats in zip(labels, scale(rows)):
            f.write(" ".join([y] + feats) + "\n")


def breast_cancer(wheel):
    with zipfile.ZipFile(wheel) as z:
        raw = z.read("rdatasets/_data/MASS/biopsy.pkl.compress")
    df = pickle.loads(lzma.decompress(raw)).dropna()
    cols = ["V%d" % i for i in range(1, 10)]
    rows = [[float(r.ID)] + [float(getattr(r, c)) for c in cols] for r in df.itertuples()]
    labels = ["2" if r["class"] == "benign" else "4" for _, r in df.iterrows()]
    write("data/breast-cancer_scale", labels, rows)


def diabetes(wheel):
    with zipfile.ZipFile(wheel) as z:
        raw = z.read("keel_ds/data/balanced/raw/pima.dat").decode()
    labels, rows = [], []
    for line in io.StringIO(raw):
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        *vals, cls = line.split(",")
        rows.append([float(v) for v in vals])
        labels.append("-1" if cls.strip() == "tested_positive" else "+1")
    write("data/diabetes_scale", labels, rows)


if __name__ == "__main__":
    breast_cancer(sys.argv[1])
    diabetes(sys.argv[2])
