import wave

import numpy as np
import pytest

from dmdt.ingest import IngestSpec, ingest


def write_wav(path, samples, rate=360, channels=1):
    pcm = np.asarray(samples, dtype="<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(pcm.tobytes())


class TestWav:
    def test_mono_16bit(self, tmp_path):
        path = tmp_path / "tone.wav"
        data = (1000 * np.sin(np.arange(1024) / 10.0)).astype(np.int16)
        write_wav(path, data, rate=8000)
        sig = ingest(IngestSpec(path=str(path)))
        assert sig.format == "wav" and sig.bit_depth == 16
        assert sig.sample_rate == 8000.0
        assert len(sig.samples) == 1024
        np.testing.assert_array_equal(sig.samples, data.astype(np.float64))

    def test_stereo_channel_select(self, tmp_path):
        path = tmp_path / "st.wav"
        left = np.arange(100, dtype=np.int16)
        right = -np.arange(100, dtype=np.int16)
        inter = np.empty(200, dtype=np.int16)
        inter[0::2] = left
        inter[1::2] = right
        write_wav(path, inter, channels=2)
        sig = ingest(IngestSpec(path=str(path), channel=1))
        np.testing.assert_array_equal(sig.samples, right.astype(np.float64))

    def test_channel_out_of_range(self, tmp_path):
        path = tmp_path / "m.wav"
        write_wav(path, np.zeros(10, dtype=np.int16))
        with pytest.raises(ValueError):
            ingest(IngestSpec(path=str(path), channel=3))

    def test_bit_depth_override(self, tmp_path):
        path = tmp_path / "m.wav"
        write_wav(path, np.zeros(10, dtype=np.int16))
        assert ingest(IngestSpec(path=str(path), bit_depth=12)).bit_depth == 12


class TestCsv:
    def test_two_columns_with_header(self, tmp_path):
        path = tmp_path / "rec.csv"
        path.write_text("time,mlii\n0,995\n1,1002\n2,1011\n")
        sig = ingest(IngestSpec(path=str(path), channel=1))
        assert sig.format == "csv" and sig.bit_depth == 11
        np.testing.assert_array_equal(sig.samples, [995.0, 1002.0, 1011.0])

    def test_headerless_single_column(self, tmp_path):
        path = tmp_path / "rec.csv"
        path.write_text("1.5\n-2.25\n3\n")
        np.testing.assert_array_equal(
            ingest(IngestSpec(path=str(path))).samples, [1.5, -2.25, 3.0])

    def test_missing_channel_column(self, tmp_path):
        path = tmp_path / "rec.csv"
        path.write_text("1,2\n3,4\n")
        with pytest.raises(ValueError):
            ingest(IngestSpec(path=str(path), channel=5))

    def test_non_numeric_body_rejected(self, tmp_path):
        path = tmp_path / "rec.csv"
        path.write_text("a\n1\nbogus\n")
        with pytest.raises(ValueError):
            ingest(IngestSpec(path=str(path)))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "rec.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            ingest(IngestSpec(path=str(path)))


class TestRaw:
    def test_raw_i16_known_bytes(self, tmp_path):
        path = tmp_path / "x.bin"
        # little-endian int16: 1, -2, 256, -32768
        path.write_bytes(bytes([0x01, 0x00, 0xFE, 0xFF, 0x00, 0x01, 0x00, 0x80]))
        sig = ingest(IngestSpec(path=str(path), format="raw-i16"))
        np.testing.assert_array_equal(sig.samples, [1.0, -2.0, 256.0, -32768.0])
        assert sig.bit_depth == 16

    def test_raw_f32(self, tmp_path):
        path = tmp_path / "x.f32"
        values = np.array([0.5, -1.25, 3e6], dtype="<f4")
        path.write_bytes(values.tobytes())
        sig = ingest(IngestSpec(path=str(path), format="raw-f32"))
        np.testing.assert_array_equal(sig.samples, values.astype(np.float64))
        assert sig.bit_depth == 32

    def test_raw_rejects_channel(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(bytes(4))
        with pytest.raises(ValueError):
            ingest(IngestSpec(path=str(path), format="raw-i16", channel=1))


class TestSpec:
    def test_unknown_format(self):
        with pytest.raises(ValueError):
            IngestSpec(path="x", format="mp3").resolved_format()

    def test_unknown_extension_needs_format(self):
        with pytest.raises(ValueError):
            IngestSpec(path="file.dat").resolved_format()

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            ingest(IngestSpec(path="/nonexistent/file.csv"))
