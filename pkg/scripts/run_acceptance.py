"""Run the acceptance criteria and print one verdict line each.

    python scripts/run_acceptance.py            # all ten
    python scripts/run_acceptance.py -k c03     # a subset, by pytest keyword
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-k", dest="keyword", help="only criteria matching this pytest keyword")
    args = p.parse_args(argv)
    cmd = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider", "--rootdir", str(ROOT)]
    if args.keyword:
        cmd += ["-k", args.keyword]
    return int(pytest.main(cmd))


if __name__ == "__main__":
    sys.exit(main())
