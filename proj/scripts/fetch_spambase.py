#!/usr/bin/env python3
# Copyright 2026 The Hash-Comb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Downloads the Spambase data set, verifies it and writes a headed CSV.

Sources, tried in order:
  1. The UCI repository archive (4601 rows).
  2. The keel-ds wheel on PyPI, pinned by SHA-256 (KEEL's 4597-row copy).

Usage: fetch_spambase.py [--out data/spambase.csv]
"""

import argparse
import hashlib
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

UCI_URL = "https://archive.ics.uci.edu/static/public/94/spambase.zip"
KEEL_WHEEL = "keel_ds-0.2.5-py3-none-any.whl"
KEEL_WHEEL_SHA256 = (
    "79faf1bd2f3ac2082d16eb9c8c49b2b1a60a5182e94464c5d32c7c642ea9650e")
KEEL_MEMBER = "keel_ds/data/balanced/raw/spambase.dat"

WORDS = [
    "make", "address", "all", "3d", "our", "over", "remove", "internet",
    "order", "mail", "receive", "will", "people", "report", "addresses",
    "free", "business", "email", "you", "credit", "your", "font", "000",
    "money", "hp", "hpl", "george", "650", "lab", "labs", "telnet", "857",
    "data", "415", "85", "technology", "1999", "parts", "pm", "direct", "cs",
    "meeting", "original", "project", "re", "edu", "table", "conference",
]
CHARS = ["semicolon", "parenthesis", "bracket", "exclamation", "dollar",
         "hash"]
HEADER = ([f"word_freq_{w}" for w in WORDS] +
          [f"char_freq_{c}" for c in CHARS] +
          ["capital_run_length_average", "capital_run_length_longest",
           "capital_run_length_total", "spam"])


def parse_rows(lines):
    rows = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 58:
            raise ValueError(f"expected 58 cells, got {len(cells)}")
        label = cells[-1]
        if label not in ("0", "1"):
            raise ValueError(f"bad label {label!r}")
        [float(c) for c in cells[:-1]]
        rows.append(cells)
    return rows


def from_uci():
    with urllib.request.urlopen(UCI_URL, timeout=20) as resp:
        blob = resp.read()
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        text = zf.read("spambase.data").decode("ascii")
    rows = parse_rows(text.splitlines())
    if len(rows) != 4601:
        raise ValueError(f"UCI archive has {len(rows)} rows, expected 4601")
    return rows, "uci"


def from_keel():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "keel-ds==0.2.5",
             "--no-deps", "--only-binary=:all:", "-d", tmp, "-q"],
            check=True)
        path = os.path.join(tmp, KEEL_WHEEL)
        with open(path, "rb") as f:
            blob = f.read()
    digest = hashlib.sha256(blob).hexdigest()
    if digest != KEEL_WHEEL_SHA256:
        raise ValueError(f"wheel checksum mismatch: {digest}")
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        text = zf.read(KEEL_MEMBER).decode("ascii")
    rows = parse_rows(text.splitlines())
    if len(rows) != 4597:
        raise ValueError(f"KEEL copy has {len(rows)} rows, expected 4597")
    return rows, "keel-ds"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data",
        "spambase.csv"))
    args = parser.parse_args()

    rows = None
    for source in (from_uci, from_keel):
        try:
            rows, name = source()
            break
        except Exception as e:  # noqa: BLE001
            print(f"{source.__name__}: {e}", file=sys.stderr)
    if rows is None:
        print("no Spambase source reachable", file=sys.stderr)
        return 1

    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", newline="\n") as f:
        f.write(",".join(HEADER) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")
    spam = sum(r[-1] == "1" for r in rows)
    print(f"wrote {args.out}: {len(rows)} rows ({spam} spam) from {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
