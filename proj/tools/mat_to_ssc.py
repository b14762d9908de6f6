#!/usr/bin/env python3
"""Convert a hyperspectral scene stored as a pair of .mat files to SSC1.

    mat_to_ssc.py Indian_pines_corrected.mat Indian_pines_gt.mat indian_pines.ssc

The cube is expected as rows x cols x bands and the ground truth as
rows x cols with 0 for unlabeled pixels. The variable names are guessed
(the single non-metadata array in each file) unless --cube-key/--gt-key
are given. Class names default to class_1..class_L.
"""

import argparse
import sys

import numpy as np
import scipy.io


def pick(mat, key, what):
    if key:
        return mat[key]
    arrays = [k for k in mat if not k.startswith("__")]
    if len(arrays) != 1:
        sys.exit(f"{what}: cannot guess the variable among {arrays}; pass --{what}-key")
    return mat[arrays[0]]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("cube")
    ap.add_argument("gt")
    ap.add_argument("output")
    ap.add_argument("--cube-key")
    ap.add_argument("--gt-key")
    ap.add_argument("--classes", help="comma-separated class names")
    args = ap.parse_args()

    cube = np.asarray(pick(scipy.io.loadmat(args.cube), args.cube_key, "cube"))
    gt = np.asarray(pick(scipy.io.loadmat(args.gt), args.gt_key, "gt"))
    if cube.ndim != 3 or gt.shape != cube.shape[:2]:
        sys.exit(f"shape mismatch: cube {cube.shape}, ground truth {gt.shape}")
    values = cube.astype(np.float64)
    if not np.isfinite(values).all():
        sys.exit("cube contains non-finite values")
    as_f32 = values.astype("<f4")
    if not np.array_equal(as_f32.astype(np.float64), values):
        print("warning: some values are not exactly representable as float32", file=sys.stderr)

    n_classes = int(gt.max())
    names = args.classes.split(",") if args.classes else [f"class_{k}" for k in range(1, n_classes + 1)]
    if len(names) != n_classes:
        sys.exit(f"{len(names)} class names given, ground truth has {n_classes} classes")

    rows, cols, attrs = cube.shape
    with open(args.output, "wb") as f:
        f.write(b"SSC1\n")
        f.write(f"attrs={attrs} rows={rows} cols={cols} classes={n_classes}\n".encode())
        f.write(np.ascontiguousarray(as_f32.transpose(2, 0, 1)).tobytes())
        f.write(np.ascontiguousarray(gt.astype("<i4")).tobytes())
        for name in names:
            f.write((name + "\n").encode())
    print(f"{args.output}: {attrs} attributes, {rows}x{cols} pixels, {n_classes} classes")


if __name__ == "__main__":
    main()
