#!/usr/bin/env python3
"""Convert landmark arrays exported from R into the pwshape TSV format.

In R, with the shapes package loaded, dump each k x m x n array as a flat
column-major vector:

    write(qset2.dat, "small.txt")
    write(qlet2.dat, "large.txt")

then

    tools/convert_shapes_array.py small=small.txt large=large.txt \
        --landmarks 6 --dims 2 --out data/mouse.tsv

Any whitespace- or comma-separated stream of numbers is accepted, so
write.table(as.vector(x)) output works too (a header line is skipped).
"""
import argparse
import re
import sys

import numpy as np


def read_numbers(path):
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            for tok in re.split(r"[\s,;]+", line.strip()):
                tok = tok.strip('"')
                if not tok:
                    continue
                try:
                    values.append(float(tok))
                except ValueError:
                    if lineno == 1:
                        break  # header
                    sys.exit(f"{path}:{lineno}: not a number: {tok!r}")
    return np.array(values)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("groups", nargs="+", metavar="GROUP=FILE")
    ap.add_argument("--landmarks", type=int, default=6)
    ap.add_argument("--dims", type=int, default=2, choices=(2, 3))
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    axes = "xyz"[: args.dims]
    rows = ["# group\tspecimen\tlandmark\t" + "\t".join(axes)]
    for item in args.groups:
        if "=" not in item:
            ap.error(f"expected GROUP=FILE, got {item!r}")
        group, path = item.split("=", 1)
        v = read_numbers(path)
        per = args.landmarks * args.dims
        if v.size == 0 or v.size % per:
            sys.exit(f"{path}: {v.size} values is not a multiple of {args.landmarks} x {args.dims}")
        arr = v.reshape((args.landmarks, args.dims, v.size // per), order="F")
        for s in range(arr.shape[2]):
            sid = f"{group[0]}{s + 1:02d}"
            for k in range(args.landmarks):
                coords = "\t".join(repr(float(c)) for c in arr[k, :, s])
                rows.append(f"{group}\t{sid}\t{k + 1}\t{coords}")

    text = "\n".join(rows) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
