import csv
import json
import wave

import numpy as np
import pytest

from dmdt.cli import main
from dmdt.codec import iter_containers
from dmdt.harness import synthetic_ppg


def write_csv_record(path, samples):
    path.write_text("\n".join(f"{v:.17g}" for v in samples) + "\n")


@pytest.fixture
def ppg_csv(tmp_path):
    path = tmp_path / "rec0.csv"
    write_csv_record(path, synthetic_ppg(1024, seed=21))
    return path


class TestCompressDecompress:
    def test_compress_writes_containers(self, tmp_path, ppg_csv, capsys):
        out = tmp_path / "rec0.dmdt"
        code = main(["compress", "--in", str(ppg_csv), "--out", str(out),
                     "--theta", "2.0", "--block-len", "512"])
        assert code == 0
        blob = out.read_bytes()
        containers = list(iter_containers(blob))
        assert len(containers) == 2
        assert all(c.theta == 2.0 for c in containers)
        assert "2 blocks" in capsys.readouterr().out

    def test_round_trip_through_files(self, tmp_path, ppg_csv):
        packed = tmp_path / "p.dmdt"
        restored = tmp_path / "r.csv"
        assert main(["compress", "--in", str(ppg_csv), "--out", str(packed),
                     "--theta", "1.0", "--block-len", "512"]) == 0
        assert main(["decompress", "--in", str(packed), "--out",
                     str(restored)]) == 0
        x = np.loadtxt(ppg_csv)
        xhat = np.loadtxt(restored)
        assert len(xhat) == 1024
        assert np.linalg.norm(x - xhat) <= 0.5 * np.sqrt(1024) + 1e-9

    def test_wt_codec_flag(self, tmp_path, ppg_csv):
        packed = tmp_path / "p.wtbl"
        assert main(["compress", "--in", str(ppg_csv), "--out", str(packed),
                     "--codec", "wt", "--theta", "1.0"]) == 0
        assert packed.read_bytes()[:4] == b"WTBL"
        restored = tmp_path / "r.csv"
        assert main(["decompress", "--in", str(packed), "--out",
                     str(restored)]) == 0
        assert len(np.loadtxt(restored)) == 1024

    def test_wav_round_trip(self, tmp_path):
        src = tmp_path / "s.wav"
        pcm = (3000 * np.sin(np.arange(2048) / 9.0)).astype("<i2")
        with wave.open(str(src), "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(4000)
            w.writeframes(pcm.tobytes())
        packed = tmp_path / "s.dmdt"
        back = tmp_path / "b.wav"
        assert main(["compress", "--in", str(src), "--out", str(packed),
                     "--theta", "0.5"]) == 0
        assert main(["decompress", "--in", str(packed), "--out", str(back),
                     "--format", "wav", "--sample-rate", "4000"]) == 0
        with wave.open(str(back), "rb") as w:
            assert w.getnframes() == 2048

    def test_missing_input_is_data_error(self, tmp_path):
        assert main(["compress", "--in", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "x")]) == 2

    def test_non_finite_samples_are_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.5\nnan\n2.0\n")
        assert main(["compress", "--in", str(bad),
                     "--out", str(tmp_path / "x")]) == 2
        assert "non-finite" in capsys.readouterr().err

    def test_bad_block_len_is_data_error(self, tmp_path, ppg_csv):
        assert main(["compress", "--in", str(ppg_csv),
                     "--out", str(tmp_path / "x"), "--block-len", "500"]) == 2

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["compress", "--in", "x"])  # missing --out
        assert exc.value.code == 1


class TestSweepAndBench:
    def test_sweep_synthetic_reports(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        plot = tmp_path / "plot.csv"
        code = main(["sweep", "--dataset", "synth:ppg", "--sweep", "5:9:2",
                     "--out", str(out), "--plot-data", str(plot)])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 15  # 5 records x 3 thetas
        assert {r["record"] for r in rows} == {f"ppg-0{i}" for i in range(5)}
        assert plot.exists()

    def test_sweep_directory_json_report(self, tmp_path):
        data = tmp_path / "data"
        data.mkdir()
        for i in range(2):
            write_csv_record(data / f"rec{i}.csv",
                             synthetic_ppg(600, seed=30 + i))
        out = tmp_path / "report.json"
        code = main(["sweep", "--dataset", str(data), "--theta", "3.0",
                     "--report", "json", "--out", str(out),
                     "--bit-depth", "16"])
        assert code == 0
        rows = json.loads(out.read_text())
        assert [r["record"] for r in rows] == ["rec0", "rec1"]
        assert all(r["n"] == 600 for r in rows)

    def test_empty_dataset_dir_is_data_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["sweep", "--dataset", str(empty)]) == 2
        assert "no records" in capsys.readouterr().err

    def test_bench_prints_comparison(self, tmp_path, capsys):
        out = tmp_path / "cmp.json"
        code = main(["bench", "--dataset", "synth:accel", "--sweep", "5:9:2",
                     "--out", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "rate wins" in text
        body = json.loads(out.read_text())
        assert body["matched"] > 0


class TestVerifyInfo:
    def test_verify_passes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "PASS golden64" in out and "PASS zeros64" in out

    def test_info_plain(self, capsys):
        assert main(["info"]) == 0
        assert "DMDT" in capsys.readouterr().out

    def test_info_inspects_file(self, tmp_path, ppg_csv, capsys):
        packed = tmp_path / "p.dmdt"
        main(["compress", "--in", str(ppg_csv), "--out", str(packed),
              "--theta", "2.5"])
        capsys.readouterr()
        assert main(["info", "--in", str(packed)]) == 0
        out = capsys.readouterr().out
        assert "theta=2.5" in out and "d1=32" in out


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path, ppg_csv):
        cfg = tmp_path / "dmdt.conf"
        cfg.write_text("theta = 4.0\nblock-len = 512\n# comment\n")
        out = tmp_path / "a.dmdt"
        assert main(["--config", str(cfg), "compress", "--in", str(ppg_csv),
                     "--out", str(out)]) == 0
        assert next(iter_containers(out.read_bytes())).theta == 4.0

        out2 = tmp_path / "b.dmdt"
        assert main(["--config", str(cfg), "compress", "--in", str(ppg_csv),
                     "--out", str(out2), "--theta", "9.0"]) == 0
        assert next(iter_containers(out2.read_bytes())).theta == 9.0

    def test_malformed_config_is_usage_error(self, tmp_path, ppg_csv):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("not a pair\n")
        assert main(["--config", str(cfg), "compress", "--in", str(ppg_csv),
                     "--out", "x"]) == 1
