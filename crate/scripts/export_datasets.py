"""Export the binary benchmark datasets bundled with scikit-learn as CSV.

Writes into ../data relative to this script:
  wdbc.csv          Wisconsin diagnostic breast cancer, label 1 = malignant
  digits38.csv      8x8 handwritten digits, 3 (label 0) vs 8 (label 1)
  diabetes_hi.csv   diabetes progression, label 1 = target above the median
"""
import os

import numpy as np
from sklearn import datasets

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def write(name, X, y, feature_names):
    path = os.path.join(OUT, name)
    header = ",".join(list(feature_names) + ["label"])
    rows = np.column_stack([X, y])
    fmt = ["%.10g"] * X.shape[1] + ["%d"]
    np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt=fmt)
    print(f"{name}: n={len(y)} m={X.shape[1]} n0={int((y == 0).sum())} n1={int((y == 1).sum())}")


def main():
    os.makedirs(OUT, exist_ok=True)

    bc = datasets.load_breast_cancer()
    names = [n.replace(" ", "_") for n in bc.feature_names]
    write("wdbc.csv", bc.data, 1 - bc.target, names)

    dg = datasets.load_digits()
    mask = (dg.target == 3) | (dg.target == 8)
    write("digits38.csv", dg.data[mask], (dg.target[mask] == 8).astype(int),
          [f"px{i}" for i in range(dg.data.shape[1])])

    db = datasets.load_diabetes(scaled=False)
    y = (db.target > np.median(db.target)).astype(int)
    write("diabetes_hi.csv", db.data, y, db.feature_names)


if __name__ == "__main__":
    main()
