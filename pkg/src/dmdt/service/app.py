"""FastAPI service wrapping the codec, metrics and benchmark harness."""

from __future__ import annotations

import base64
import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, codec, harness, metrics, wtbaseline
from ..errors import CodecError, FormatError
from ..golden import verify_golden
from . import schemas

app = FastAPI(
    title="dmdt compression service",
    version=__version__,
    description="Lossy compression of 1-D sensor signals with divisor-radix "
                "cosine block transforms, plus a wavelet baseline and "
                "benchmarking endpoints.",
)


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _unb64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except Exception:
        raise HTTPException(status_code=400, detail="invalid base64 container")


def _bad_request(exc: Exception):
    return HTTPException(status_code=400, detail=str(exc))


def _unprocessable(exc: Exception):
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/v1/info", response_model=schemas.InfoResponse)
def info():
    return schemas.InfoResponse(
        name="dmdt-codec",
        version=__version__,
        container_magic=codec.MAGIC.decode("ascii"),
        baseline_magic=wtbaseline.MAGIC.decode("ascii"),
        default_settings=schemas.CodecSettings(),
        corpora=sorted(harness._CORPUS_BUILDERS),
    )


@app.post("/v1/compress", response_model=schemas.CompressResponse)
def compress(req: schemas.CompressRequest):
    x = np.asarray(req.samples, dtype=np.float64)
    s = req.settings
    try:
        if s.codec == "dmdt":
            cfg = codec.CodecConfig(d1=s.d1, d2=s.d2, theta=s.theta,
                                    block_len=s.block_len,
                                    subtract_mean=s.subtract_mean)
            blobs = [c.to_bytes() for c in codec.compress_stream(x, cfg)]
        else:
            cfg = wtbaseline.WtConfig(theta=s.theta, levels=s.levels,
                                      block_len=s.block_len)
            blobs = wtbaseline.wt_compress_stream(x, cfg)
    except (ValueError, CodecError) as exc:
        raise _bad_request(exc)
    return schemas.CompressResponse(
        codec=s.codec,
        n_samples=len(x),
        n_blocks=len(blobs),
        compressed_bytes=sum(len(b) for b in blobs),
        containers=[_b64(b) for b in blobs],
    )


def _decode_blob(blob: bytes, forced: str) -> np.ndarray:
    magic = blob[:4]
    if magic == codec.MAGIC:
        kind = "dmdt"
    elif magic == wtbaseline.MAGIC:
        kind = "wt"
    else:
        raise FormatError(f"unrecognized container magic {magic!r}")
    if forced != "auto" and forced != kind:
        raise FormatError(f"container is {kind!r}, not {forced!r}")
    if kind == "dmdt":
        return codec.decompress_stream(list(codec.iter_containers(blob)))
    return wtbaseline.wt_decompress_stream(wtbaseline.split_containers(blob))


@app.post("/v1/decompress", response_model=schemas.DecompressResponse)
def decompress(req: schemas.DecompressRequest):
    blobs = [_unb64(c) for c in req.containers]
    try:
        parts = [_decode_blob(b, req.codec) for b in blobs]
    except FormatError as exc:
        raise _bad_request(exc)
    except CodecError as exc:
        raise _unprocessable(exc)
    except ValueError as exc:
        raise _bad_request(exc)
    x = np.concatenate(parts) if parts else np.empty(0)
    return schemas.DecompressResponse(samples=x.tolist(), n_samples=len(x))


@app.post("/v1/metrics", response_model=schemas.MetricsResponse)
def compute_metrics(req: schemas.MetricsRequest):
    x = np.asarray(req.original, dtype=np.float64)
    xhat = np.asarray(req.reconstructed, dtype=np.float64)
    try:
        prd_value = metrics.prd(x, xhat)
        snr_value = metrics.snr(x, xhat)
        max_dev = metrics.max_deviation(x, xhat)
    except ValueError as exc:
        raise _bad_request(exc)
    cr_value = None
    qs_value = None
    if req.compressed_bytes is not None:
        cr_value = metrics.cr(len(x) * req.bit_depth, 8 * req.compressed_bytes)
        if prd_value > 0:
            qs_value = metrics.qs(cr_value, prd_value)
    return schemas.MetricsResponse(
        prd=prd_value,
        snr_db=None if math.isinf(snr_value) else snr_value,
        max_dev=max_dev,
        n=len(x),
        cr=cr_value,
        qs=qs_value,
    )


def _records_from(req_records: list[schemas.SweepRecord]) -> list[harness.Record]:
    return [
        harness.Record(name=r.name,
                       samples=np.asarray(r.samples, dtype=np.float64),
                       bit_depth=r.bit_depth)
        for r in req_records
    ]


@app.post("/v1/sweep", response_model=schemas.SweepResponse)
def sweep(req: schemas.SweepRequest):
    s = req.settings
    try:
        rows = harness.run_sweep(
            _records_from(req.records), codec=s.codec, thetas=req.thetas,
            block_len=s.block_len, d1=s.d1, d2=s.d2, levels=s.levels,
            subtract_mean=s.subtract_mean, dataset=req.dataset,
        )
    except (ValueError, CodecError) as exc:
        raise _bad_request(exc)
    return schemas.SweepResponse(rows=rows, summary=harness.summarize_rows(rows))


@app.post("/v1/compare", response_model=schemas.CompareResponse)
def compare(req: schemas.CompareRequest):
    s = req.settings
    try:
        result = harness.compare_codecs(
            _records_from(req.records), thetas=req.thetas,
            block_len=s.block_len, d1=s.d1, d2=s.d2, levels=s.levels,
            snr_window_db=req.snr_window_db, dataset=req.dataset,
        )
    except (ValueError, CodecError) as exc:
        raise _bad_request(exc)
    return schemas.CompareResponse(
        matched=result["matched"], wins=result["wins"],
        win_fraction=result["win_fraction"],
        mean_cr_gain=result["mean_cr_gain"],
        pairs=[schemas.ComparePair(**p) for p in result["pairs"]],
    )


@app.post("/v1/verify", response_model=schemas.VerifyResponse)
def verify():
    results = verify_golden()
    return schemas.VerifyResponse(
        passed=all(r.passed for r in results),
        fixtures=[schemas.FixtureStatus(name=r.name, passed=r.passed,
                                        detail=r.detail)
                  for r in results],
    )


@app.post("/v1/inspect", response_model=schemas.InspectResponse)
def inspect(req: schemas.InspectRequest):
    infos = []
    idx = 0
    try:
        for text in req.containers:
            blob = _unb64(text)
            if blob[:4] == wtbaseline.MAGIC:
                for frame in wtbaseline.split_containers(blob):
                    meta = wtbaseline.wt_container_info(frame)
                    infos.append(schemas.ContainerInfo(
                        index=idx, codec="wt", n=meta["n"],
                        theta=meta["theta"], levels=meta["levels"],
                        payload_bytes=meta["payload_bytes"]))
                    idx += 1
            else:
                for c in codec.iter_containers(blob):
                    infos.append(schemas.ContainerInfo(
                        index=idx, codec="dmdt", n=c.n, d1=c.d1, d2=c.d2,
                        theta=c.theta, mean_offset=c.mean_offset,
                        payload_bytes=len(c.payload)))
                    idx += 1
    except CodecError as exc:
        raise _unprocessable(exc)
    return schemas.InspectResponse(containers=infos)
