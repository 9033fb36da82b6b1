# Copyright 2026 The hdring Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Checks the command-line contract: exit statuses and one-line diagnostics.

Usage: cli_contract.py path/to/hdring
"""

import pathlib
import re
import subprocess
import sys
import tempfile

DIAGNOSTIC = re.compile(r'^hdring: error kind=(\w+) exit=(\d) message=".*"$')

GOOD = """
dataset: synthetic
synthetic: {train_samples: 80, test_samples: 40, features: 6, classes: 2}
clients: 2
rounds: 2
dimension: 128
seed: 3
output_dir: {out}
"""


def run(binary, *args):
    return subprocess.run([binary, *args], capture_output=True, text=True,
                          check=False)


def expect_failure(binary, status, kind, *args):
    proc = run(binary, *args)
    lines = proc.stderr.strip().splitlines()
    assert proc.returncode == status, (args, proc.returncode, proc.stderr)
    assert len(lines) == 1, proc.stderr
    match = DIAGNOSTIC.match(lines[0])
    assert match, lines[0]
    assert match.group(1) == kind and int(match.group(2)) == status, lines[0]


def main():
    binary = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        good = tmp / "good.yaml"
        good.write_text(GOOD.replace("{out}", str(tmp / "out")))

        proc = run(binary, "run", str(good))
        assert proc.returncode == 0, proc.stderr
        for name in ("metrics.csv", "ledger.csv", "model.txt", "manifest.yaml",
                     "timing.csv"):
            assert (tmp / "out" / name).exists(), name

        proc = run(binary, "noise-table", str(good), "--check",
                   str(tmp / "out" / "ledger.csv"))
        assert proc.returncode == 0, proc.stderr

        ledger = (tmp / "out" / "ledger.csv").read_text().splitlines()
        fields = ledger[2].split(",")
        fields[2] = str(float(fields[2]) * 2)
        ledger[2] = ",".join(fields)
        (tmp / "bad_ledger.csv").write_text("\n".join(ledger) + "\n")
        expect_failure(binary, 4, "invariant", "noise-table", str(good),
                       "--check", str(tmp / "bad_ledger.csv"))

        proc = run(binary, "noise-table", str(good))
        assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 5

        proc = run(binary, "partition-dump", str(good))
        assert proc.returncode == 0
        assert proc.stdout.startswith("client,sample_index\n")
        assert len(proc.stdout.splitlines()) == 81

        proc = run(binary, "sweep", str(good), "--axis", "epsilon",
                   "--values", "1,0.5", "--replicates", "2")
        assert proc.returncode == 0, proc.stderr
        assert (tmp / "out" / "sweep_epsilon.csv").exists()
        assert (tmp / "out" / "epsilon_0.5" / "summary.csv").exists()
        assert len(list((tmp / "out" / "epsilon_0.5").glob("seed_*"))) == 2

        typo = tmp / "typo.yaml"
        typo.write_text(GOOD.replace("{out}", "x") + "epsilom: 1\n")
        expect_failure(binary, 2, "config", "run", str(typo))
        expect_failure(binary, 2, "config", "sweep", str(good), "--axis",
                       "colour", "--values", "1")
        expect_failure(binary, 2, "config", "run", str(tmp / "missing.yaml"))
        expect_failure(binary, 2, "config", "frobnicate")

        mnist = tmp / "mnist.yaml"
        mnist.write_text(
            "dataset: mnist\npaths: {train_images: a, train_labels: b, "
            "test_images: c, test_labels: d}\n")
        expect_failure(binary, 3, "load", "run", str(mnist))

        short = tmp / "short.yaml"
        short.write_text(GOOD.replace("{out}", "x") +
                         "samples_per_client: 500\n")
        expect_failure(binary, 3, "partition", "run", str(short))
    print("cli contract ok")


if __name__ == "__main__":
    main()
