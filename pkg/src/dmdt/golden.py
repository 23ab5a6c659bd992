"""Golden-vector verification: committed inputs must recompress to
byte-identical containers and decode within the quantizer error bound."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .codec import CodecConfig, CompressedContainer, compress, decompress
from .errors import CodecError

_FIXTURE_PACKAGE = "dmdt.fixtures"


@dataclass
class FixtureResult:
    name: str
    passed: bool
    detail: str


def _fixture_root():
    return resources.files(_FIXTURE_PACKAGE)


def _load_manifest() -> list[dict]:
    with _fixture_root().joinpath("manifest.json").open("r") as fh:
        return json.load(fh)


def _read_bytes(name: str) -> bytes:
    return _fixture_root().joinpath(name).read_bytes()


def verify_golden() -> list[FixtureResult]:
    """Check every committed fixture; a failed byte comparison names the
    fixture and a corrupt container reports the decode diagnosis."""
    results = []
    for entry in _load_manifest():
        name = entry["name"]
        cfg = CodecConfig(d1=entry["d1"], d2=entry["d2"], theta=entry["theta"],
                          block_len=entry["block_len"],
                          subtract_mean=entry["subtract_mean"])
        x = np.frombuffer(_read_bytes(entry["input"]), dtype="<f8")
        expected = _read_bytes(entry["container"])

        produced = compress(x, cfg).to_bytes()
        if produced != expected:
            diff = next((i for i, (a, b) in enumerate(zip(produced, expected))
                         if a != b), min(len(produced), len(expected)))
            results.append(FixtureResult(
                name, False,
                f"container bytes differ at offset {diff} "
                f"(produced {len(produced)} bytes, expected {len(expected)})"))
            continue

        try:
            xhat = decompress(CompressedContainer.from_bytes(expected))
        except CodecError as exc:
            results.append(FixtureResult(
                name, False, f"committed container failed to decode: {exc}"))
            continue
        bound = (cfg.theta / 2.0) * math.sqrt(cfg.block_len)
        err = float(np.linalg.norm(x - xhat))
        if err > bound:
            results.append(FixtureResult(
                name, False,
                f"reconstruction error {err:.6g} exceeds bound {bound:.6g}"))
            continue
        results.append(FixtureResult(name, True, "byte-identical, within bound"))
    return results


def golden_input(name: str = "golden64") -> tuple[np.ndarray, CodecConfig]:
    """The committed input samples and codec configuration of one fixture."""
    for entry in _load_manifest():
        if entry["name"] == name:
            cfg = CodecConfig(d1=entry["d1"], d2=entry["d2"],
                              theta=entry["theta"],
                              block_len=entry["block_len"],
                              subtract_mean=entry["subtract_mean"])
            x = np.frombuffer(_read_bytes(entry["input"]), dtype="<f8")
            return x, cfg
    raise KeyError(f"no fixture named {name!r}")
