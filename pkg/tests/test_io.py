import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from tpctf import io as tio


class TestTen1:
    def test_layout(self, tmp_path):
        path = tmp_path / "a.ten1"
        tio.write_ten1(path, np.arange(6.0).reshape(2, 3))
        raw = path.read_bytes()
        assert raw[:4] == b"TEN1"
        assert raw[4] == 2
        assert struct.unpack("<2Q", raw[5:21]) == (2, 3)
        assert struct.unpack("<6d", raw[21:]) == (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)

    @settings(max_examples=30, deadline=None)
    @given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=1, max_dims=4, max_side=5),
                      elements=st.floats(allow_nan=True, allow_infinity=True)))
    def test_roundtrip_bit_exact(self, tmp_path_factory, arr):
        path = tmp_path_factory.mktemp("t") / "x.ten1"
        tio.write_ten1(path, arr)
        back = tio.read_ten1(path)
        assert back.shape == arr.shape
        assert back.tobytes() == arr.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad"
        path.write_bytes(b"TEN2" + bytes(20))
        with pytest.raises(tio.FormatError):
            tio.read_ten1(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "t.ten1"
        tio.write_ten1(path, np.zeros((3, 3)))
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(tio.FormatError):
            tio.read_ten1(path)


class TestPgm:
    def test_roundtrip(self, tmp_path, rng):
        img = rng.integers(0, 256, size=(17, 23)).astype(float)
        path = tmp_path / "a.pgm"
        tio.write_pgm(path, img)
        back = tio.read_pgm(path)
        np.testing.assert_array_equal(back, img)
        tio.write_pgm(tmp_path / "b.pgm", back)
        assert (tmp_path / "b.pgm").read_bytes() == path.read_bytes()

    def test_rounds_and_clamps(self, tmp_path):
        path = tmp_path / "c.pgm"
        tio.write_pgm(path, np.array([[-3.0, 12.6, 300.0]]))
        np.testing.assert_array_equal(tio.read_pgm(path), [[0, 13, 255]])

    def test_header_comments(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x05\xff")
        np.testing.assert_array_equal(tio.read_pgm(path), [[5, 255]])

    @pytest.mark.parametrize("data", [b"P2\n1 1\n255\n0", b"P5\n2 2\n255\n\x00", b"P5\n1 1\n65535\n\x00\x00"])
    def test_rejects(self, tmp_path, data):
        path = tmp_path / "e.pgm"
        path.write_bytes(data)
        with pytest.raises(tio.FormatError):
            tio.read_pgm(path)

    def test_detect(self, tmp_path):
        tio.write_array(tmp_path / "a.pgm", np.zeros((2, 2)))
        tio.write_array(tmp_path / "a.ten1", np.zeros((2, 2, 2)))
        assert tio.read_array(tmp_path / "a.pgm").shape == (2, 2)
        assert tio.read_array(tmp_path / "a.ten1").shape == (2, 2, 2)

    def test_frames(self, tmp_path):
        frames = tmp_path / "frames"
        frames.mkdir()
        for i in range(3):
            tio.write_pgm(frames / f"f{i:02d}.pgm", np.full((4, 5), 10.0 * i))
        assert tio.pgm_frames_to_ten1(frames, tmp_path / "v.ten1") == (3, 4, 5)
        vol = tio.read_ten1(tmp_path / "v.ten1")
        np.testing.assert_array_equal(vol[:, 0, 0], [0, 10, 20])
