#!/usr/bin/env python3
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
"""Fetches MNIST into IDX files for the hdring loaders.

Tries the usual IDX mirrors first. When none is reachable it falls back to
the `mnist` npm package, which bundles 10,000 MNIST digits as JSON with
pixels stored as value/255 rounded to three decimals. Those are converted
back to bytes, shuffled with a fixed seed and split into an 8,000-sample
train file and a 2,000-sample test file.

Output: <out>/{train,t10k}-{images-idx3,labels-idx1}-ubyte
"""

import argparse
import gzip
import io
import json
import random
import struct
import sys
import tarfile
import urllib.request
from pathlib import Path

IDX_MIRRORS = [
    "https://ossci-datasets.s3.amazonaws.com/mnist/",
    "https://storage.googleapis.com/cvdf-datasets/mnist/",
]
IDX_FILES = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
]
NPM_TARBALL = "https://registry.npmjs.org/mnist/-/mnist-1.1.0.tgz"
NPM_TEST_COUNT = 2000
SHUFFLE_SEED = 20260101


def fetch(url, timeout):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def try_idx_mirrors(out, timeout):
    for base in IDX_MIRRORS:
        try:
            blobs = {name: gzip.decompress(fetch(base + name + ".gz", timeout))
                     for name in IDX_FILES}
        except Exception as exc:  # noqa: BLE001
            print(f"mirror {base} unavailable: {exc}", file=sys.stderr)
            continue
        for name, blob in blobs.items():
            (out / name).write_bytes(blob)
        print(f"wrote full MNIST from {base}")
        return True
    return False


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def from_npm(out, timeout, tarball=None):
    data = Path(tarball).read_bytes() if tarball else fetch(NPM_TARBALL, timeout)
    samples = []
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
        for digit in range(10):
            member = tar.extractfile(f"package/src/digits/{digit}.json")
            values = json.load(member)["data"]
            if len(values) % 784:
                raise SystemExit(f"digit {digit}: truncated pixel array")
            for start in range(0, len(values), 784):
                pixels = [min(255, max(0, round(v * 255)))
                          for v in values[start:start + 784]]
                samples.append((pixels, digit))
    random.Random(SHUFFLE_SEED).shuffle(samples)
    test, train = samples[:NPM_TEST_COUNT], samples[NPM_TEST_COUNT:]
    write_images(out / "train-images-idx3-ubyte", [s[0] for s in train])
    write_labels(out / "train-labels-idx1-ubyte", [s[1] for s in train])
    write_images(out / "t10k-images-idx3-ubyte", [s[0] for s in test])
    write_labels(out / "t10k-labels-idx1-ubyte", [s[1] for s in test])
    print(f"wrote {len(train)} train / {len(test)} test digits from the npm bundle")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/mnist")
    parser.add_argument("--timeout", type=float, default=20.0)
    parser.add_argument("--npm-only", action="store_true",
                        help="skip the IDX mirrors")
    parser.add_argument("--npm-tarball", help="use a local mnist-*.tgz")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not args.npm_only and not args.npm_tarball and try_idx_mirrors(out, args.timeout):
        return
    from_npm(out, args.timeout, args.npm_tarball)


if __name__ == "__main__":
    main()
