import argparse
import sys

from .bundle import BundleError
from .convert import ConvertError, convert


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="planetoid-convert",
        description="convert an upstream citation-dataset bundle to a NDGG1 container",
    )
    parser.add_argument("--in", dest="input_dir", required=True,
                        help="directory holding the ind.<name>.* files")
    parser.add_argument("--name", required=True, choices=["cora", "citeseer", "pubmed"])
    parser.add_argument("--out", required=True, help="output container path")
    args = parser.parse_args(argv)
    try:
        header = convert(args.input_dir, args.name, args.out)
    except (BundleError, ConvertError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    flags = header["flags"]
    print(
        f"wrote {args.out}: n={header['n']} m={header['m']} f={header['f']} "
        f"c={header['c']} zero_filled={flags['zero_filled_test_rows']} "
        f"multihot={flags['multihot_labels']}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
