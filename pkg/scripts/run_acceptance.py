#!/usr/bin/env python3
"""Run the full acceptance suite and write report.json next to this file.

Equivalent to `csflab verify --suite all --out report.json`, kept as a
script so intermediate measurements are easy to poke at interactively.
"""

import json
import pathlib
import sys
import time

from csflab import verify


def main() -> int:
    t0 = time.time()
    results = verify.run_all(progress=lambda r: print(
        f"{r.line()}   [{time.time() - t0:6.1f}s]", flush=True))
    report = verify.report_dict(results)
    out = pathlib.Path(__file__).with_name("report.json")
    out.write_text(json.dumps(report, indent=1))
    print(f"wrote {out}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
