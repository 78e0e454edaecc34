"""Write a 100-row stand-in for the Kaggle prostate-cancer CSV.

The stand-in uses the eight "mean" columns of the Wisconsin diagnostic
breast-cancer data shipped with scikit-learn (same feature semantics as the
prostate file), sampled to 62 malignant and 38 benign rows. It exercises the
pipeline end to end; it is not the reference dataset.

    python scripts/make_proxy_dataset.py tests/data/proxy_prostate.csv
"""

import csv
import sys

import numpy as np
from sklearn.datasets import load_breast_cancer

COLUMNS = {
    "radius": "mean radius",
    "texture": "mean texture",
    "perimeter": "mean perimeter",
    "area": "mean area",
    "smoothness": "mean smoothness",
    "compactness": "mean compactness",
    "symmetry": "mean symmetry",
    "fractal_dimension": "mean fractal dimension",
}


def main(out_path, seed=2023, n_malignant=62, n_benign=38):
    data = load_breast_cancer()
    names = list(data.feature_names)
    idx = [names.index(COLUMNS[c]) for c in COLUMNS]
    # sklearn target: 0 = malignant, 1 = benign
    rng = np.random.default_rng(seed)
    mal = rng.choice(np.flatnonzero(data.target == 0), n_malignant, replace=False)
    ben = rng.choice(np.flatnonzero(data.target == 1), n_benign, replace=False)
    rows = np.concatenate([mal, ben])
    rng.shuffle(rows)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "diagnosis_result", *COLUMNS])
        for n, r in enumerate(rows, start=1):
            code = "M" if data.target[r] == 0 else "B"
            w.writerow([n, code, *(f"{data.data[r, i]:.6g}" for i in idx)])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "proxy_prostate.csv")
