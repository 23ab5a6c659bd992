#!/usr/bin/env python3
"""Regenerate the committed golden fixtures.

Run only when the container format intentionally changes; the whole point
of the fixtures is that they do NOT change across builds and platforms.
"""

import json
from pathlib import Path

import numpy as np

from dmdt.codec import CodecConfig, compress

OUT = Path(__file__).resolve().parent.parent / "src" / "dmdt" / "fixtures"


def golden64_input() -> np.ndarray:
    # positive pulse-like 64-sample block exercising the mean rule
    m = np.arange(64)
    x = (900.0
         + 400.0 * np.sin(2 * np.pi * m / 32.0)
         + 150.0 * np.sin(2 * np.pi * m / 8.0 + 0.7)
         + 60.0 * np.cos(2 * np.pi * m / 5.0))
    return np.round(x)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = []
    cases = [
        ("golden64", golden64_input()),
        ("zeros64", np.zeros(64)),
    ]
    for name, x in cases:
        cfg = CodecConfig(d1=8, d2=4, theta=1.0, block_len=64,
                          subtract_mean="auto")
        container = compress(x, cfg).to_bytes()
        (OUT / f"{name}_input.bin").write_bytes(
            np.ascontiguousarray(x, dtype="<f8").tobytes())
        (OUT / f"{name}_container.bin").write_bytes(container)
        manifest.append({
            "name": name,
            "input": f"{name}_input.bin",
            "container": f"{name}_container.bin",
            "d1": 8, "d2": 4, "theta": 1.0, "block_len": 64,
            "subtract_mean": "auto",
        })
        print(f"{name}: {len(container)} container bytes")
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
