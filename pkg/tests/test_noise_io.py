"""Tests for noise-matrix and report serialization."""

import json
import struct

import numpy as np
import pytest

from gradnoise.errors import DataFormatError
from gradnoise.noise_io import (
    NOISE_MAGIC,
    load_numeric_lines,
    read_noise,
    write_noise,
    write_reports_csv,
    write_reports_json,
)
from gradnoise.projection import NoiseMatrix, NoiseMeta, ProjectionReport


def small_noise():
    data = np.arange(16, dtype=np.float64).reshape(8, 2) - 5.0
    return NoiseMatrix(data, NoiseMeta(iteration=3, batch_size=4, seed=11))


def make_report(**overrides):
    fields = dict(
        sw_mean_p=0.5,
        ad_accept_frac=0.9375,
        baseline_sw_mean_p=0.51,
        baseline_ad_accept_frac=0.95,
        level=0.05,
        n_directions=16,
        n_degenerate=0,
        baseline_n_degenerate=0,
        sw_min_p=0.01,
        gaussian_plausible=True,
        iteration=0,
    )
    fields.update(overrides)
    return ProjectionReport(**fields)


class TestNoiseRoundTrip:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "n.bin"
        original = small_noise()
        write_noise(path, original)
        loaded = read_noise(path)
        assert np.array_equal(loaded.data, original.data)
        assert loaded.meta == original.meta

    def test_layout_is_the_documented_one(self, tmp_path):
        path = tmp_path / "n.bin"
        write_noise(path, small_noise())
        raw = path.read_bytes()
        assert raw[:8] == NOISE_MAGIC == b"SGNMAT01"
        m, p = struct.unpack("<QQ", raw[8:24])
        assert (m, p) == (8, 2)
        first_row = np.frombuffer(raw, dtype="<f8", count=2, offset=24)
        assert np.array_equal(first_row, [-5.0, -4.0])
        trailer = json.loads(raw[24 + 8 * 16 :].decode("utf-8"))
        assert trailer == {"iteration": 3, "batch_size": 4, "seed": 11}

    def test_hand_built_file_reads_back(self, tmp_path):
        # build a file from the format definition alone
        m, p = 8, 1
        values = np.linspace(-1.0, 1.0, m)
        raw = NOISE_MAGIC + struct.pack("<QQ", m, p) + values.astype("<f8").tobytes()
        path = tmp_path / "hand.bin"
        path.write_bytes(raw)
        loaded = read_noise(path)
        assert np.array_equal(loaded.data[:, 0], values)
        assert loaded.meta == NoiseMeta()  # missing trailer means empty metadata

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 32)
        with pytest.raises(DataFormatError):
            read_noise(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.bin"
        path.write_bytes(NOISE_MAGIC[:4])
        with pytest.raises(DataFormatError):
            read_noise(path)

    def test_truncated_body(self, tmp_path):
        path = tmp_path / "trunc.bin"
        write_noise(path, small_noise())
        raw = path.read_bytes()
        path.write_bytes(raw[: 24 + 8 * 5])  # cut inside the matrix
        with pytest.raises(DataFormatError):
            read_noise(path)

    def test_bad_trailer(self, tmp_path):
        path = tmp_path / "trail.bin"
        write_noise(path, small_noise())
        path.write_bytes(path.read_bytes()[: 24 + 8 * 16] + b"{not json")
        with pytest.raises(DataFormatError):
            read_noise(path)

    def test_non_finite_payload(self, tmp_path):
        m, p = 8, 1
        values = np.full(m, np.nan)
        raw = NOISE_MAGIC + struct.pack("<QQ", m, p) + values.astype("<f8").tobytes()
        path = tmp_path / "nan.bin"
        path.write_bytes(raw)
        with pytest.raises(DataFormatError):
            read_noise(path)


class TestReportSerialization:
    def test_csv_is_byte_stable(self, tmp_path):
        rows = [(0, make_report()), (100, make_report(sw_mean_p=0.25, iteration=100))]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_reports_csv(p1, rows)
        write_reports_csv(p2, rows)
        assert p1.read_bytes() == p2.read_bytes()
        text = p1.read_text()
        assert text.splitlines()[0] == (
            "iteration,sw_mean_p,ad_accept_frac,baseline_sw_mean_p,"
            "baseline_ad_accept_frac,n_degenerate"
        )
        assert text.splitlines()[1] == "0,0.5,0.9375,0.51,0.95,0"

    def test_csv_alpha_axis(self, tmp_path):
        path = tmp_path / "s.csv"
        write_reports_csv(path, [(0.2, make_report(iteration=None))], x_name="alpha")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("alpha,")
        assert lines[1].startswith("0.2,")

    def test_json_reports(self, tmp_path):
        path = tmp_path / "r.json"
        write_reports_json(path, [(0, make_report())])
        loaded = json.loads(path.read_text())
        assert loaded[0]["ad_accept_frac"] == 0.9375
        assert loaded[0]["gaussian_plausible"] is True
        assert loaded[0]["iteration"] == 0


class TestNumericLines:
    def test_loads_values_and_skips_blanks(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("1.5\n\n  -2e3  \n0\n")
        assert np.array_equal(load_numeric_lines(path), [1.5, -2000.0, 0.0])

    def test_junk_line(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("1.0\nhello\n")
        with pytest.raises(DataFormatError):
            load_numeric_lines(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("\n\n")
        with pytest.raises(DataFormatError):
            load_numeric_lines(path)
