"""Command-line front end.

The CLI is a thin client of the compression service: file ingestion and
report writing happen locally, every codec operation goes through the HTTP
API.  Without --server an in-process instance of the service handles the
requests, so no daemon is needed for local work.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import base64
import sys
import wave
from pathlib import Path

import numpy as np

from .harness import REPORT_FIELDS, theta_grid
from .ingest import FORMATS, IngestSpec, Signal, ingest

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3

_SYNTH_PREFIX = "synth:"


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2 for
    # data errors, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _CliError(EXIT_DATA, f"cannot read config file: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _CliError(EXIT_USAGE,
                            f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, config: dict, name: str, default, cast):
    """Flag value if given, else config file value, else hard default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        try:
            return cast(config[name])
        except ValueError:
            raise _CliError(EXIT_USAGE,
                            f"config key {name}: bad value {config[name]!r}")
    return default


class _Client:
    """Minimal HTTP wrapper; embedded in-process service unless --server."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=300.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app, raise_server_exceptions=False)

    def call(self, method: str, path: str, payload=None) -> dict:
        try:
            if method == "GET":
                resp = self._client.get(path)
            else:
                resp = self._client.post(path, json=payload)
        except Exception as exc:
            raise _CliError(EXIT_DATA, f"service unreachable: {exc}")
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise _CliError(EXIT_DATA, f"service error ({resp.status_code}): {detail}")
        return resp.json()

    def close(self):
        self._client.close()


# -- ingestion helpers -----------------------------------------------------------


def _require_finite(samples: np.ndarray, path: str):
    if not np.all(np.isfinite(samples)):
        raise _CliError(EXIT_DATA, f"{path}: non-finite samples")


def _ingest_file(args, config) -> Signal:
    spec = IngestSpec(
        path=args.infile,
        format=_resolve(args, config, "format", None, str),
        channel=_resolve(args, config, "channel", 0, int),
        bit_depth=_resolve(args, config, "bit_depth", None, int),
    )
    try:
        sig = ingest(spec)
    except FileNotFoundError:
        raise _CliError(EXIT_DATA, f"no such file: {args.infile}")
    except ValueError as exc:
        raise _CliError(EXIT_DATA, str(exc))
    _require_finite(sig.samples, args.infile)
    return sig


def _collect_records(args, config) -> list[dict]:
    """Dataset records as /v1/sweep payload entries."""
    dataset = args.dataset
    if dataset.startswith(_SYNTH_PREFIX):
        from .harness import bundled_corpus

        kind = dataset[len(_SYNTH_PREFIX):]
        try:
            records = bundled_corpus(kind)
        except ValueError as exc:
            raise _CliError(EXIT_USAGE, str(exc))
        return [{"name": r.name, "samples": r.samples.tolist(),
                 "bit_depth": r.bit_depth} for r in records]

    root = Path(dataset)
    if root.is_file():
        paths = [root]
    elif root.is_dir():
        fmt = _resolve(args, config, "format", None, str)
        if fmt:
            paths = sorted(p for p in root.iterdir() if p.is_file())
        else:
            paths = sorted(p for p in root.iterdir()
                           if p.suffix.lower() in (".csv", ".wav", ".txt"))
    else:
        raise _CliError(EXIT_DATA, f"no such dataset: {dataset}")
    if not paths:
        raise _CliError(EXIT_DATA, f"no records found in {dataset}")

    entries = []
    for p in paths:
        spec = IngestSpec(
            path=str(p),
            format=_resolve(args, config, "format", None, str),
            channel=_resolve(args, config, "channel", 0, int),
            bit_depth=_resolve(args, config, "bit_depth", None, int),
        )
        try:
            sig = ingest(spec)
        except ValueError as exc:
            raise _CliError(EXIT_DATA, str(exc))
        _require_finite(sig.samples, str(p))
        entries.append({"name": p.stem, "samples": sig.samples.tolist(),
                        "bit_depth": sig.bit_depth})
    return entries


def _settings(args, config) -> dict:
    return {
        "codec": _resolve(args, config, "codec", "dmdt", str),
        "block_len": _resolve(args, config, "block_len", 512, int),
        "theta": _resolve(args, config, "theta", 5.0, float),
        "d1": _resolve(args, config, "d1", 32, int),
        "d2": _resolve(args, config, "d2", 16, int),
        "levels": _resolve(args, config, "levels", 4, int),
        "subtract_mean": _resolve(args, config, "subtract_mean", "auto", str),
    }


def _write_samples(path: str, samples: np.ndarray, fmt: str,
                   sample_rate: float | None):
    if fmt == "csv":
        np.savetxt(path, samples, fmt="%.17g")
    elif fmt == "raw-f32":
        samples.astype("<f4").tofile(path)
    elif fmt == "raw-i16":
        np.clip(np.round(samples), -32768, 32767).astype("<i2").tofile(path)
    elif fmt == "wav":
        if sample_rate is None:
            raise _CliError(EXIT_USAGE, "wav output requires --sample-rate")
        pcm = np.clip(np.round(samples), -32768, 32767).astype("<i2")
        with wave.open(path, "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(int(sample_rate))
            w.writeframes(pcm.tobytes())
    else:
        raise _CliError(EXIT_USAGE, f"unknown output format {fmt!r}")


# -- commands --------------------------------------------------------------------


def _cmd_compress(args, config, client: _Client) -> int:
    sig = _ingest_file(args, config)
    settings = _settings(args, config)
    result = client.call("POST", "/v1/compress",
                         {"samples": sig.samples.tolist(), "settings": settings})
    blob = b"".join(base64.b64decode(c) for c in result["containers"])
    Path(args.out).write_bytes(blob)
    original_bits = len(sig.samples) * sig.bit_depth
    ratio = original_bits / (8 * len(blob)) if blob else 0.0
    print(f"{args.infile}: {result['n_samples']} samples -> "
          f"{result['n_blocks']} blocks, {len(blob)} bytes "
          f"(CR {ratio:.2f} at {sig.bit_depth}-bit source) -> {args.out}")
    return EXIT_OK


def _cmd_decompress(args, config, client: _Client) -> int:
    try:
        blob = Path(args.infile).read_bytes()
    except OSError as exc:
        raise _CliError(EXIT_DATA, f"cannot read {args.infile}: {exc}")
    result = client.call("POST", "/v1/decompress",
                         {"containers": [base64.b64encode(blob).decode()]})
    samples = np.asarray(result["samples"], dtype=np.float64)
    fmt = _resolve(args, config, "format", "csv", str)
    rate = _resolve(args, config, "sample_rate", None, float)
    _write_samples(args.out, samples, fmt, rate)
    print(f"{args.infile}: {len(samples)} samples -> {args.out} ({fmt})")
    return EXIT_OK


def _sweep_thetas(args, config) -> list[float]:
    spec = _resolve(args, config, "sweep", None, str)
    if spec is None:
        return [_resolve(args, config, "theta", 5.0, float)]
    try:
        return theta_grid(spec)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc))


def _print_rows(rows: list[dict]):
    header = f"{'record':<16} {'codec':<5} {'theta':>7} {'cr':>8} " \
             f"{'prd':>9} {'snr_db':>8} {'max_dev':>10}"
    print(header)
    for row in rows:
        snr_txt = "inf" if row["snr_db"] is None else f"{row['snr_db']:8.2f}"
        print(f"{row['record']:<16} {row['codec']:<5} {row['theta']:7.2f} "
              f"{row['cr']:8.2f} {row['prd']:9.4f} {snr_txt:>8} "
              f"{row['max_dev']:10.4g}")


def _cmd_sweep(args, config, client: _Client) -> int:
    records = _collect_records(args, config)
    settings = _settings(args, config)
    thetas = _sweep_thetas(args, config)
    result = client.call("POST", "/v1/sweep", {
        "records": records, "thetas": thetas, "settings": settings,
        "dataset": args.dataset,
    })
    rows = result["rows"]
    _print_rows(rows)
    if len(rows) > len(result["summary"]):
        print("\ncorpus averages (QS per-record / from aggregate CR,PRD):")
        for s in result["summary"]:
            qs_rec = "n/a" if s["qs_per_record"] is None \
                else f"{s['qs_per_record']:.2f}"
            qs_agg = "n/a" if s["qs_aggregate"] is None \
                else f"{s['qs_aggregate']:.2f}"
            snr = "inf" if s["mean_snr_db"] is None \
                else f"{s['mean_snr_db']:.2f}"
            print(f"  {s['codec']} theta={s['theta']:g}: "
                  f"CR {s['mean_cr']:.2f} PRD {s['mean_prd']:.4f} "
                  f"SNR {snr} dB  QS {qs_rec} / {qs_agg}")
    if args.out:
        fmt = _resolve(args, config, "report", "csv", str)
        _write_rows(rows, args.out, fmt)
        print(f"report: {args.out} ({fmt})")
    if args.plot_data:
        _write_plot(rows, args.plot_data)
        print(f"plot data: {args.plot_data}")
    return EXIT_OK


def _cmd_bench(args, config, client: _Client) -> int:
    records = _collect_records(args, config)
    settings = _settings(args, config)
    thetas = _sweep_thetas(args, config)
    result = client.call("POST", "/v1/compare", {
        "records": records, "thetas": thetas, "settings": settings,
        "snr_window_db": args.snr_window, "dataset": args.dataset,
    })
    print(f"matched pairs: {result['matched']}")
    print(f"divisor-codec rate wins: {result['wins']} "
          f"({100 * result['win_fraction']:.1f}%)")
    print(f"mean CR gain at matched SNR: {100 * result['mean_cr_gain']:+.1f}%")
    if args.out:
        import json

        Path(args.out).write_text(json.dumps(result, indent=2) + "\n")
        print(f"comparison report: {args.out}")
    return EXIT_OK


def _cmd_verify(args, config, client: _Client) -> int:
    result = client.call("POST", "/v1/verify", {})
    for fixture in result["fixtures"]:
        status = "PASS" if fixture["passed"] else "FAIL"
        print(f"{status} {fixture['name']}: {fixture['detail']}")
    if not result["passed"]:
        return EXIT_VERIFY
    print("golden verification passed")
    return EXIT_OK


def _cmd_info(args, config, client: _Client) -> int:
    if args.infile:
        try:
            blob = Path(args.infile).read_bytes()
        except OSError as exc:
            raise _CliError(EXIT_DATA, f"cannot read {args.infile}: {exc}")
        result = client.call("POST", "/v1/inspect",
                             {"containers": [base64.b64encode(blob).decode()]})
        for c in result["containers"]:
            extra = (f"d1={c['d1']} d2={c['d2']} mean={c['mean_offset']}"
                     if c["codec"] == "dmdt" else f"levels={c['levels']}")
            print(f"#{c['index']}: {c['codec']} n={c['n']} theta={c['theta']} "
                  f"{extra} payload={c['payload_bytes']}B")
        return EXIT_OK
    result = client.call("GET", "/v1/info")
    print(f"{result['name']} {result['version']}")
    print(f"container magics: {result['container_magic']} (divisor codec), "
          f"{result['baseline_magic']} (wavelet baseline)")
    print(f"default settings: {result['default_settings']}")
    print(f"bundled synthetic corpora: {', '.join(result['corpora'])}")
    return EXIT_OK


def _cmd_serve(args, config) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _write_rows(rows: list[dict], path: str, fmt: str):
    import csv as _csv
    import json as _json

    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=REPORT_FIELDS,
                                     extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
    elif fmt == "json":
        with open(path, "w") as fh:
            _json.dump(rows, fh, indent=2)
            fh.write("\n")
    else:
        raise _CliError(EXIT_USAGE, f"unknown report format {fmt!r}")


def _write_plot(rows: list[dict], path: str):
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["record", "codec", "theta", "cr", "snr_db"])
        for row in rows:
            writer.writerow([row["record"], row["codec"], row["theta"],
                             row["cr"], row["snr_db"]])


# -- argument wiring -------------------------------------------------------------


def _add_codec_flags(p: argparse.ArgumentParser):
    p.add_argument("--codec", choices=["dmdt", "wt"], default=None)
    p.add_argument("--d1", type=int, default=None)
    p.add_argument("--d2", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--block-len", dest="block_len", type=int, default=None)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--subtract-mean", dest="subtract_mean",
                   choices=["auto", "on", "off"], default=None)


def _add_ingest_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=list(FORMATS), default=None)
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--bit-depth", dest="bit_depth", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dmdt",
                     description="Sensor-signal compression toolkit")
    parser.add_argument("--server", default=None,
                        help="service URL; defaults to an in-process instance")
    parser.add_argument("--config", default=None,
                        help="key=value defaults file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress one file to a container")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_ingest_flags(p)
    _add_codec_flags(p)

    p = sub.add_parser("decompress", help="decompress a container file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "raw-f32", "raw-i16", "wav"],
                   default=None)
    p.add_argument("--sample-rate", dest="sample_rate", type=float, default=None)

    p = sub.add_parser("sweep", help="theta sweep over a dataset")
    p.add_argument("--dataset", required=True,
                   help="directory, file, or synth:{ppg,accel,ecg}")
    p.add_argument("--sweep", default=None, help="theta grid a:b:step")
    p.add_argument("--out", default=None)
    p.add_argument("--report", choices=["csv", "json"], default=None)
    p.add_argument("--plot-data", dest="plot_data", default=None)
    _add_ingest_flags(p)
    _add_codec_flags(p)

    p = sub.add_parser("bench",
                       help="divisor codec vs wavelet baseline comparison")
    p.add_argument("--dataset", required=True)
    p.add_argument("--sweep", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--snr-window", dest="snr_window", type=float, default=1.0)
    _add_ingest_flags(p)
    _add_codec_flags(p)

    p = sub.add_parser("verify", help="recheck the committed golden fixtures")

    p = sub.add_parser("info", help="service info or container inspection")
    p.add_argument("--in", dest="infile", default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8800)

    return parser


_COMMANDS = {
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
    "verify": _cmd_verify,
    "info": _cmd_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args.config) if args.config else {}
        if args.command == "serve":
            return _cmd_serve(args, config)
        client = _Client(args.server)
        try:
            return _COMMANDS[args.command](args, config, client)
        finally:
            client.close()
    except _CliError as exc:
        print(f"dmdt: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
