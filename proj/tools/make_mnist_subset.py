#!/usr/bin/env python3
"""Write a small MNIST subset as IDX files.

Source: the per-digit JSON files of the `mnist` npm package
(src/digits/<d>.json, each {"data": [784 * count floats in [0, 1]]}).
Obtain them with `npm pack mnist && tar xzf mnist-*.tgz`.
"""
import argparse
import json
import pathlib
import struct

import numpy as np


def write_images(path, images):
    n, d = images.shape
    side = int(round(d ** 0.5))
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, side, side))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--src", required=True, help="directory holding 0.json .. 9.json")
    ap.add_argument("--out", required=True)
    ap.add_argument("--train", type=int, default=2000)
    ap.add_argument("--holdout", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    xs, ys = [], []
    for digit in range(10):
        flat = np.asarray(json.loads((pathlib.Path(args.src) / f"{digit}.json").read_text())["data"], dtype=np.float64)
        imgs = flat.reshape(-1, 784)
        xs.append(np.rint(imgs * 255.0))
        ys.append(np.full(len(imgs), digit))
    x = np.concatenate(xs)
    y = np.concatenate(ys)

    order = np.random.default_rng(args.seed).permutation(len(x))
    if args.train + args.holdout > len(order):
        raise SystemExit(f"only {len(order)} images available")
    train = order[: args.train]
    hold = order[args.train : args.train + args.holdout]

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_images(out / "train-images.idx3-ubyte", x[train])
    write_labels(out / "train-labels.idx1-ubyte", y[train])
    write_images(out / "holdout-images.idx3-ubyte", x[hold])
    write_labels(out / "holdout-labels.idx1-ubyte", y[hold])
    print(f"wrote {len(train)} train / {len(hold)} holdout images to {out}")


if __name__ == "__main__":
    main()
