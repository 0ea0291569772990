"""Regenerate tests/data/golden from the toy corpus.

Only rerun this when an output format changes on purpose; the acceptance
suite compares fresh runs against these bytes.
"""

import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from golden import CORPUS, GOLDEN, artefacts, run_pipeline  # noqa: E402

from caft.synthetic import make_toy_corpus  # noqa: E402


def main():
    shutil.rmtree(GOLDEN, ignore_errors=True)
    make_toy_corpus(GOLDEN / "inputs", **CORPUS)
    run_pipeline(GOLDEN / "inputs", GOLDEN / "expected")
    for name in artefacts(GOLDEN):
        print(name)


if __name__ == "__main__":
    main()
