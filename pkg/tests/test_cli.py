import logging
import random
import subprocess
import sys

import pytest

from cgap.cli import MEASURE_HEADER, main
from cgap.gapcore import SortedSet, measure_report
from cgap.simgen import table_csv


def write_text_set(path, u, elements):
    path.write_text(f"{u} {len(elements)}\n" + "".join(f"{e}\n" for e in elements))
    return str(path)


def write_bin_set(path, u, elements):
    blob = u.to_bytes(8, "little") + len(elements).to_bytes(8, "little")
    blob += b"".join(e.to_bytes(8, "little") for e in elements)
    path.write_bytes(blob)
    return str(path)


@pytest.fixture
def example_set(tmp_path):
    return write_text_set(tmp_path / "s.txt", 8, (0, 2, 5, 7))


@pytest.fixture
def built_index(tmp_path, example_set, capsys):
    idx = str(tmp_path / "s.idx")
    assert main(["build", "--input", example_set, "--output", idx]) == 0
    capsys.readouterr()
    return idx


class TestMeasure:
    def test_reports_the_known_row(self, example_set, capsys):
        assert main(["measure", "--input", example_set]) == 0
        header, row = capsys.readouterr().out.splitlines()
        assert header == MEASURE_HEADER
        cells = row.split(",")
        r = measure_report(SortedSet(8, (0, 2, 5, 7)))
        assert [int(c) for c in cells[:4]] == [8, 4, 3, 3]
        assert int(cells[4]) == r.gap_bits == 7
        assert float(cells[9]) == pytest.approx(r.n_h0_g_bits, abs=1e-5)
        assert len(cells) == len(MEASURE_HEADER.split(","))

    def test_output_file(self, example_set, tmp_path, capsys):
        out = tmp_path / "m.csv"
        assert main(["measure", "--input", example_set, "--output", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert out.read_text().startswith(MEASURE_HEADER)

    def test_empty_set_is_a_format_error(self, tmp_path, capsys):
        path = write_text_set(tmp_path / "e.txt", 8, ())
        assert main(["measure", "--input", path]) == 2
        assert "cannot measure an empty set" in capsys.readouterr().err


class TestTable:
    def test_matches_library_output(self, capsys):
        args = ["table", "--dist", "uniform", "--k-min", "1", "--k-max", "2",
                "--n", "500", "--seed", "9"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert first == table_csv("uniform", 1, 2, 500, 9)
        assert main(args) == 0
        assert capsys.readouterr().out == first

    def test_rejects_bad_range(self, capsys):
        assert main(["table", "--dist", "uniform", "--k-min", "5",
                     "--k-max", "2"]) == 1
        assert "usage error" in capsys.readouterr().err


class TestBuild:
    def test_writes_container_and_accounting(self, example_set, tmp_path, capsys):
        idx = tmp_path / "s.idx"
        assert main(["build", "--input", example_set, "--output", str(idx)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == f"wrote {idx}: {idx.stat().st_size} bytes"
        assert out[1].startswith("u=8 n=4 ")
        bits = dict(pair.split("=") for pair in out[2].removeprefix("bits: ").split())
        assert int(bits["total"]) == 8 * idx.stat().st_size
        assert int(bits["payload"]) + int(bits["framing"]) == int(bits["total"])

    def test_empty_set_is_a_format_error(self, tmp_path, capsys):
        path = write_text_set(tmp_path / "e.txt", 8, ())
        assert main(["build", "--input", path, "--output", str(tmp_path / "x")]) == 2
        assert "error" in capsys.readouterr().err


class TestQuery:
    def test_rank_and_select(self, built_index, capsys):
        assert main(["query", "--index", built_index, "rank", "--arg", "5"]) == 0
        assert capsys.readouterr().out == "3\n"
        assert main(["query", "--index", built_index, "select", "--arg", "2"]) == 0
        assert capsys.readouterr().out == "5\n"

    def test_oracle_agreement(self, built_index, example_set, capsys):
        assert main(["query", "--index", built_index, "rank", "--arg", "6",
                     "--oracle", example_set]) == 0
        assert capsys.readouterr().out == "3\n"

    def test_oracle_mismatch(self, built_index, tmp_path, capsys):
        other = write_text_set(tmp_path / "o.txt", 8, (0, 2, 6, 7))
        assert main(["query", "--index", built_index, "rank", "--arg", "5",
                     "--oracle", other]) == 3
        assert "verification failed" in capsys.readouterr().err

    def test_oracle_shape_mismatch(self, built_index, tmp_path, capsys):
        other = write_text_set(tmp_path / "o.txt", 9, (0, 2, 5, 7))
        assert main(["query", "--index", built_index, "rank", "--arg", "5",
                     "--oracle", other]) == 3
        capsys.readouterr()

    def test_out_of_range_is_usage_error(self, built_index, capsys):
        assert main(["query", "--index", built_index, "rank", "--arg", "8"]) == 1
        assert "out of range [0, 8)" in capsys.readouterr().err
        assert main(["query", "--index", built_index, "select", "--arg", "-1"]) == 1
        capsys.readouterr()


class TestBench:
    def test_deterministic_and_checked(self, tmp_path, capsys):
        rng = random.Random(5)
        elements = tuple(sorted(rng.sample(range(5000), 600)))
        path = write_text_set(tmp_path / "b.txt", 5000, elements)
        idx = str(tmp_path / "b.idx")
        assert main(["build", "--input", path, "--output", idx]) == 0
        capsys.readouterr()

        args = ["bench", "--index", idx, "--queries", "500", "--seed", "3"]
        assert main(args) == 0
        first = capsys.readouterr().out.splitlines()
        assert main(args) == 0
        second = capsys.readouterr().out.splitlines()
        # everything except the two timing lines must be reproducible
        assert first[:6] == second[:6]
        assert first[0] == "queries=500 mix=rank:1,select:1 seed=3"
        assert "baseline agreement: ok" in first
        decoded = first[3]
        assert decoded.startswith("decoded codewords/query:")
        assert int(decoded.rsplit("bound=", 1)[1]) == 13

    def test_mix_validation(self, built_index, capsys):
        assert main(["bench", "--index", built_index, "--mix", "a:b"]) == 1
        assert main(["bench", "--index", built_index, "--mix", "0:0"]) == 1
        assert main(["bench", "--index", built_index, "--queries", "0"]) == 1
        capsys.readouterr()

    def test_rank_only_mix(self, built_index, capsys):
        assert main(["bench", "--index", built_index, "--queries", "50",
                     "--mix", "1:0"]) == 0
        out = capsys.readouterr().out
        assert "rank: count=50" in out
        assert "select: count=0" in out


class TestVerify:
    def test_ok(self, built_index, example_set, capsys):
        assert main(["verify", "--index", built_index, "--input", example_set]) == 0
        assert "ok: index matches set (u=8, n=4)" in capsys.readouterr().out

    def test_mismatch(self, built_index, tmp_path, capsys):
        other = write_text_set(tmp_path / "o.txt", 8, (0, 2, 6, 7))
        assert main(["verify", "--index", built_index, "--input", other]) == 3
        assert "verification failed" in capsys.readouterr().err


class TestSetFileParsing:
    @pytest.mark.parametrize(
        "lines,fragment",
        [
            ("", ":1: missing"),
            ("8\n0\n", ":1: header must be 'u n'"),
            ("8 two\n0\n", ":1: header must be two integers"),
            ("8 2\n0\n", "header says n=2, found 1"),
            ("8 2\n0\nx\n", ":3: not an integer"),
            ("8 2\n3\n3\n", ":3: duplicate element 3"),
            ("8 2\n5\n2\n", ":3: out-of-order element 2"),
            ("8 2\n0\n9\n", ":3: element 9 outside [0, 8)"),
        ],
    )
    def test_text_errors_cite_the_line(self, tmp_path, capsys, lines, fragment):
        path = tmp_path / "bad.txt"
        path.write_text(lines)
        assert main(["measure", "--input", str(path)]) == 2
        assert fragment in capsys.readouterr().err

    def test_trailing_blank_lines_tolerated(self, tmp_path, capsys):
        path = tmp_path / "s.txt"
        path.write_text("8 2\n1\n4\n\n\n")
        assert main(["measure", "--input", str(path)]) == 0
        capsys.readouterr()

    def test_missing_file(self, tmp_path, capsys):
        assert main(["measure", "--input", str(tmp_path / "nope.txt")]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_binary_round_trip(self, tmp_path, capsys):
        rng = random.Random(11)
        elements = tuple(sorted(rng.sample(range(100_000), 750)))
        path = write_bin_set(tmp_path / "s.bin", 100_000, elements)
        idx = str(tmp_path / "s.idx")
        assert main(["build", "--format", "bin", "--input", path,
                     "--output", idx]) == 0
        capsys.readouterr()
        assert main(["verify", "--format", "bin", "--index", idx,
                     "--input", path]) == 0
        capsys.readouterr()
        assert main(["query", "--index", idx, "select", "--arg", "100",
                     "--oracle", path, "--format", "bin"]) == 0
        assert capsys.readouterr().out == f"{elements[100]}\n"

    def test_binary_truncation(self, tmp_path, capsys):
        path = tmp_path / "s.bin"
        path.write_bytes(b"\x01\x02\x03")
        assert main(["measure", "--format", "bin", "--input", str(path)]) == 2
        assert "truncated header" in capsys.readouterr().err

    def test_binary_length_mismatch(self, tmp_path, capsys):
        blob = (8).to_bytes(8, "little") + (3).to_bytes(8, "little")
        path = tmp_path / "s.bin"
        path.write_bytes(blob + (1).to_bytes(8, "little"))
        assert main(["measure", "--format", "bin", "--input", str(path)]) == 2
        assert "expected 40 bytes for n=3" in capsys.readouterr().err


class TestContainerErrors:
    def test_corrupt_magic(self, built_index, tmp_path, capsys):
        blob = bytearray(open(built_index, "rb").read())
        blob[:4] = b"XXXX"
        bad = tmp_path / "bad.idx"
        bad.write_bytes(bytes(blob))
        assert main(["query", "--index", str(bad), "rank", "--arg", "0"]) == 2
        assert "bad magic" in capsys.readouterr().err

    def test_truncated_container(self, built_index, tmp_path, capsys):
        blob = open(built_index, "rb").read()
        bad = tmp_path / "bad.idx"
        bad.write_bytes(blob[: len(blob) // 2])
        assert main(["query", "--index", str(bad), "rank", "--arg", "0"]) == 2
        assert "truncated" in capsys.readouterr().err


class TestHarness:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        assert main(["build", "--input", "x"]) == 1
        capsys.readouterr()

    def test_log_env_enables_diagnostics(self, built_index, capsys, monkeypatch):
        monkeypatch.setenv("CGAP_LOG", "debug")
        root = logging.getLogger()
        saved = root.handlers[:]
        root.handlers[:] = []
        try:
            assert main(["query", "--index", built_index, "rank", "--arg", "0"]) == 0
            assert "loaded index" in capsys.readouterr().err
        finally:
            root.handlers[:] = saved

    def test_module_entry_point(self, tmp_path):
        path = write_text_set(tmp_path / "s.txt", 8, (0, 2, 5, 7))
        proc = subprocess.run(
            [sys.executable, "-m", "cgap.cli", "measure", "--input", path],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith(MEASURE_HEADER)
