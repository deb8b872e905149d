"""Regenerates the bundled desk-scale datasets in data/.

iris is copied from the copy shipped with scikit-learn. The other three are
seeded reconstructions, since the original archives are not reachable from
the build environment:

  monks_3             all 432 attribute combinations labelled by the MONK-3
                      target rule, plus 122 rows drawn from them with 5% of
                      labels flipped (554 rows, the size of the usual
                      train+test union).
  acute_inflammation  120 patients: temperature 35.5-41.5 and five yes/no
                      symptoms, labelled by a deterministic symptom rule.
  thyroid_small       720 rows, 21 features (6 hormone levels, 15 flags),
                      three imbalanced classes decided by hormone thresholds.
"""

import csv
import itertools
import json
from pathlib import Path

import numpy as np
from sklearn.datasets import load_iris

OUT = Path(__file__).resolve().parent.parent / "data"


def write(name, header, rows):
    with open(OUT / f"{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def iris():
    data = load_iris()
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]
    rows = [[*(f"{v:g}" for v in x), data.target_names[t]] for x, t in zip(data.data, data.target)]
    write("iris", header, rows)


def monks3_label(a):
    a1, a2, a3, a4, a5, a6 = a
    return int((a5 == 3 and a4 == 1) or (a5 != 4 and a2 != 3))


def monks_3():
    rng = np.random.default_rng(3)
    grid = list(itertools.product([1, 2, 3], [1, 2, 3], [1, 2], [1, 2, 3], [1, 2, 3, 4], [1, 2]))
    rows = [[*a, monks3_label(a)] for a in grid]
    picks = rng.choice(len(grid), size=122, replace=False)
    flips = set(rng.choice(122, size=6, replace=False).tolist())
    for i, p in enumerate(picks):
        a = grid[p]
        y = monks3_label(a)
        rows.append([*a, 1 - y if i in flips else y])
    order = rng.permutation(len(rows))
    write("monks_3", ["a1", "a2", "a3", "a4", "a5", "a6", "class"], [rows[i] for i in order])


def acute_inflammation():
    rng = np.random.default_rng(7)
    rows = []
    for _ in range(120):
        temp = round(float(rng.uniform(35.5, 41.5)), 1)
        nausea, lumbar, urine, micturition, burning = (int(v) for v in rng.integers(0, 2, size=5))
        sick = urine == 1 and (micturition == 1 or lumbar == 0)
        rows.append([temp, nausea, lumbar, urine, micturition, burning, "yes" if sick else "no"])
    write("acute_inflammation",
          ["temperature", "nausea", "lumbar_pain", "urine_pushing", "micturition_pains", "burning", "inflammation"],
          rows)


def thyroid_small():
    rng = np.random.default_rng(11)
    n = 720
    age = rng.uniform(0.01, 0.97, n)
    flags = rng.binomial(1, 0.12, size=(n, 15))
    tsh = rng.lognormal(np.log(0.002), 0.6, n)
    t3 = rng.normal(0.020, 0.005, n)
    tt4 = rng.normal(0.11, 0.025, n)
    t4u = rng.normal(0.10, 0.015, n)
    cls = np.full(n, "normal", dtype=object)
    hyper = rng.random(n) < 0.05
    hypo = (~hyper) & (rng.random(n) < 0.08)
    tsh[hypo] = rng.lognormal(np.log(0.03), 0.5, hypo.sum())
    tt4[hypo] = rng.normal(0.06, 0.015, hypo.sum())
    tsh[hyper] = rng.lognormal(np.log(0.0008), 0.4, hyper.sum())
    t3[hyper] = rng.normal(0.032, 0.006, hyper.sum())
    tt4[hyper] = rng.normal(0.16, 0.02, hyper.sum())
    cls[hypo] = "hypo"
    cls[hyper] = "hyper"
    fti = tt4 / t4u
    header = ["age", *(f"flag_{i + 1}" for i in range(15)), "tsh", "t3", "tt4", "t4u", "fti", "class"]
    rows = []
    for i in range(n):
        rows.append([f"{age[i]:.4f}", *flags[i].tolist(), f"{tsh[i]:.5f}", f"{t3[i]:.5f}",
                     f"{tt4[i]:.5f}", f"{t4u[i]:.5f}", f"{fti[i]:.5f}", cls[i]])
    write("thyroid_small", header, rows)


def main():
    OUT.mkdir(exist_ok=True)
    iris()
    monks_3()
    acute_inflammation()
    thyroid_small()
    manifest = {"datasets": [
        {"file": f"{name}.csv", "name": name, "label_column": "last", "header": True, "delimiter": ","}
        for name in ["acute_inflammation", "iris", "monks_3", "thyroid_small"]
    ]}
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
