import numpy as np
import pytest

from dmdt.codec import CompressedContainer, compress, decompress
from dmdt.errors import IntegrityError
from dmdt.golden import golden_input, verify_golden, _read_bytes


class TestGolden:
    def test_all_fixtures_pass(self):
        results = verify_golden()
        assert len(results) >= 2
        for r in results:
            assert r.passed, f"{r.name}: {r.detail}"

    def test_fixture_uses_specified_config(self):
        x, cfg = golden_input("golden64")
        assert (cfg.d1, cfg.d2, cfg.theta, cfg.block_len) == (8, 4, 1.0, 64)
        assert len(x) == 64
        assert np.all(x >= 0)  # exercises the mean rule via auto

    def test_golden_container_is_byte_stable(self):
        x, cfg = golden_input("golden64")
        expected = _read_bytes("golden64_container.bin")
        assert compress(x, cfg).to_bytes() == expected

    def test_zero_fixture_decodes_to_zeros(self):
        blob = _read_bytes("zeros64_container.bin")
        out = decompress(CompressedContainer.from_bytes(blob))
        np.testing.assert_array_equal(out, np.zeros(64))

    def test_tampered_container_fails_with_crc_diagnosis(self):
        blob = bytearray(_read_bytes("golden64_container.bin"))
        blob[-2] ^= 0x10  # payload corruption
        with pytest.raises(IntegrityError):
            decompress(CompressedContainer.from_bytes(bytes(blob)))

    def test_unknown_fixture_name(self):
        with pytest.raises(KeyError):
            golden_input("nope")
