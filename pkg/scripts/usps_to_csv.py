"""Convert the LIBSVM copies of USPS into one CSV for ``maxprob``.

Download ``usps.bz2`` and ``usps.t.bz2`` (or their unpacked versions) from
the LIBSVM multi-class dataset page yourself, then run::

    python scripts/usps_to_csv.py usps.bz2 usps.t.bz2 -o data/usps.csv

The output has a header, then ``label,p0,...,p255`` per image, with the
label being the digit 0-9 (LIBSVM stores digit + 1).  Training and test
files are concatenated in that order, 7291 + 2007 = 9298 rows.  Select the
"0" class with ``--label-col 0 --member-value 0``.
"""
import argparse
import bz2
import sys

N_PIXELS = 256


def _open(path):
    return bz2.open(path, "rt") if path.endswith(".bz2") else open(path, encoding="ascii")


def read_libsvm(path):
    with _open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            label = int(float(parts[0])) - 1
            pixels = [0.0] * N_PIXELS
            for item in parts[1:]:
                idx, val = item.split(":")
                k = int(idx) - 1
                if not 0 <= k < N_PIXELS:
                    raise ValueError(f"{path}:{lineno}: feature index {idx} out of range")
                pixels[k] = float(val)
            yield label, pixels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("inputs", nargs="+", help="LIBSVM files, optionally .bz2")
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args(argv)
    rows = 0
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        out.write("label," + ",".join(f"p{k}" for k in range(N_PIXELS)) + "\n")
        for path in args.inputs:
            for label, pixels in read_libsvm(path):
                out.write(f"{label}," + ",".join(f"{v:.9g}" for v in pixels) + "\n")
                rows += 1
    print(f"wrote {rows} rows to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
