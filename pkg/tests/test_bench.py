import numpy as np
import pytest

from fastsearch.bench.cli import bench_main, index_main
from fastsearch.bench.harness import (
    SetupStatsRow,
    ThroughputRow,
    aligned_empty,
    run_setup_stats,
    run_throughput,
)
from fastsearch.bench.persist import load_index, save_index
from fastsearch.bench.report import emit_report
from fastsearch.direct import build, direct_search, direct_search_gap2
from fastsearch.errors import (
    BadMagic,
    ChecksumMismatch,
    TruncatedFile,
    VersionMismatch,
)
from fastsearch.partition import gen_uniform_gap_partition

from helpers import random_queries


def tiny_throughput(**overrides):
    kwargs = dict(
        sizes=[15],
        precisions=["double"],
        algorithms=["classic", "direct"],
        d_widths=[1, 4],
        queries=500,
        seed=42,
        repetitions=2,
        min_time=0.001,
    )
    kwargs.update(overrides)
    return run_throughput(**kwargs)


class TestReport:
    def rows(self):
        return [
            ThroughputRow("direct", "single", 4, 255, 120.5, 1000, 5),
            ThroughputRow("classic", "single", 1, 15, 48.25, 1000, 5),
            ThroughputRow("classic", "single", 1, 255, 20.0, 1000, 5),
        ]

    def test_csv_header_and_order(self):
        text = emit_report(self.rows(), "csv")
        lines = text.strip().split("\n")
        assert lines[0] == (
            "algorithm,precision,lane_width,size,throughput_msps,queries,repetitions"
        )
        assert lines[1].startswith("classic,single,1,15")
        assert lines[2].startswith("classic,single,1,255")
        assert lines[3].startswith("direct,single,4,255,120.50")

    def test_markdown_escapes_pipes(self):
        row = ThroughputRow("weird|name", "single", 1, 15, 1.0, 10, 1)
        text = emit_report([row], "md")
        assert r"weird\|name" in text
        assert text.startswith("| algorithm |")

    def test_empty_rows_emit_header_only(self):
        assert emit_report([], "csv").strip().count("\n") == 0
        md = emit_report([], "md", kind="setup")
        assert md.strip().split("\n")[0].startswith("| size |")

    def test_setup_rows(self):
        row = SetupStatsRow(255, 100, 0.01, 0.0, 1.0, 0.0995, 150.0, 120.0, 900.0, 40.0)
        text = emit_report([row], "csv", kind="setup")
        assert "0.0100,0.0000,1.0000,0.0995,150.00" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report([], "html")


class TestPersistence:
    def make_index(self, precision="double", q=1, size=100):
        p = gen_uniform_gap_partition(size, 1, 5, seed=31, precision=precision)
        idx, _ = build(p, q=q)
        return p, idx

    @pytest.mark.parametrize("precision", ["single", "double"])
    def test_round_trip_bit_exact(self, tmp_path, precision):
        p, idx = self.make_index(precision)
        path = tmp_path / "table.idx"
        written = save_index(idx, path)
        assert written == path.stat().st_size
        back = load_index(path)
        assert back.precision == idx.precision
        assert back.h == idx.h and back.h.dtype == idx.h.dtype
        assert back.x0 == idx.x0
        assert (back.r, back.n, back.q, back.qbits) == (idx.r, idx.n, idx.q, idx.qbits)
        assert np.array_equal(back.k, idx.k)

    def test_worked_index_round_trip(self, tmp_path):
        """The four-knot reference index survives a round trip exactly."""
        from fastsearch.partition import validate_partition

        p = validate_partition([0.0, 0.5, 0.7, 1.1])
        idx, _ = build(p)
        path = tmp_path / "worked.idx"
        save_index(idx, path)
        back = load_index(path)
        assert back.k.tolist() == [0, 1, 1, 2, 3, 3]
        assert back.h == idx.h
        assert back.r == 5

    def test_round_trip_search_identical(self, tmp_path):
        p, idx = self.make_index()
        path = tmp_path / "t.idx"
        save_index(idx, path)
        back = load_index(path)
        z = random_queries(p, 2000, seed=4)
        a = [direct_search(idx, p, v) for v in z.tolist()]
        b = [direct_search(back, p, v) for v in z.tolist()]
        assert a == b

    def test_gap2_round_trip(self, tmp_path):
        p, idx = self.make_index(q=2)
        path = tmp_path / "g2.idx"
        save_index(idx, path)
        back = load_index(path)
        assert back.q == 2 and len(back.left_pad) == 1
        z = random_queries(p, 500, seed=5)
        assert [direct_search_gap2(back, p, v) for v in z.tolist()] == [
            direct_search_gap2(idx, p, v) for v in z.tolist()
        ]

    def test_corrupt_payload_byte(self, tmp_path):
        p, idx = self.make_index()
        path = tmp_path / "c.idx"
        save_index(idx, path)
        raw = bytearray(path.read_bytes())
        raw[60] ^= 0xFF  # inside the K payload
        path.write_bytes(bytes(raw))
        with pytest.raises(ChecksumMismatch):
            load_index(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.idx"
        path.write_bytes(b"NOTANIDX" + b"\0" * 64)
        with pytest.raises(BadMagic):
            load_index(path)

    def test_truncated(self, tmp_path):
        p, idx = self.make_index()
        path = tmp_path / "t.idx"
        save_index(idx, path)
        raw = path.read_bytes()
        for cut in (4, 20, len(raw) - 3):
            path.write_bytes(raw[:cut])
            with pytest.raises(TruncatedFile):
                load_index(path)

    def test_version_mismatch(self, tmp_path):
        p, idx = self.make_index()
        path = tmp_path / "v.idx"
        save_index(idx, path)
        raw = bytearray(path.read_bytes())
        raw[8] = 99  # version field
        path.write_bytes(bytes(raw))
        with pytest.raises(VersionMismatch):
            load_index(path)


class TestHarness:
    def test_aligned_allocation(self):
        for dtype in (np.float32, np.float64):
            arr = aligned_empty(1000, dtype)
            assert arr.ctypes.data % 32 == 0
            assert len(arr) == 1000 and arr.dtype == dtype

    def test_throughput_rows_well_formed(self):
        rep = tiny_throughput()
        combos = {(r.algorithm, r.lane_width) for r in rep.rows}
        assert combos == {("classic", 1), ("classic", 4), ("direct", 1), ("direct", 4)}
        for r in rep.rows:
            assert r.throughput_msps > 0
            assert r.queries == 500 and r.repetitions == 2 and r.size == 15
        assert rep.skipped == []

    def test_zero_repetitions_rejected(self):
        with pytest.raises(ValueError):
            tiny_throughput(repetitions=0)

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ValueError):
            tiny_throughput(algorithms=["quantum"])

    def test_infeasible_configs_recorded_not_fatal(self):
        # 2**18 knots with gaps up to 1e9 push span/min-gap past 2**32, so
        # the gap-1 bucket count overflows; the comparison searches still run.
        rep = tiny_throughput(
            sizes=[262144],
            algorithms=["classic", "direct", "direct-cache"],
            d_widths=[1],
            gap_hi=1e9,
            queries=200,
        )
        assert {r.algorithm for r in rep.rows} == {"classic"}
        assert {s.algorithm for s in rep.skipped} == {"direct", "direct-cache"}
        assert all("Overflow" in s.cause for s in rep.skipped)

    def test_config_columns_deterministic(self):
        a = tiny_throughput()
        b = tiny_throughput()
        key = lambda rep: [
            (r.algorithm, r.precision, r.lane_width, r.size, r.queries, r.repetitions)
            for r in rep.rows
        ]
        assert key(a) == key(b)

    def test_setup_stats_shape(self):
        rep = run_setup_stats(sizes=[15, 255], precision="single", samples=40, seed=42)
        assert rep.infeasible == {}
        assert [r.size for r in rep.rows] == [15, 255]
        for r in rep.rows:
            assert r.samples == 40
            assert r.h_updates_min <= r.h_updates_mean <= r.h_updates_max
            assert r.h_updates_stdev >= 0
            assert 0 < r.setup_ns_per_elem_min <= r.setup_ns_per_elem_mean
            assert r.setup_ns_per_elem_mean <= r.setup_ns_per_elem_max

    def test_setup_stats_validation(self):
        with pytest.raises(ValueError):
            run_setup_stats(sizes=[15], precision="single", samples=0, seed=1)


class TestBenchCli:
    def test_throughput_csv(self, capsys):
        code = bench_main(
            [
                "throughput",
                "--sizes", "15",
                "--precision", "double",
                "--algos", "classic,direct",
                "--lanes", "1",
                "--queries", "300",
                "--reps", "2",
                "--min-time", "0.001",
                "--format", "csv",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        header, *body = out.strip().split("\n")
        assert header.startswith("algorithm,precision")
        assert len(body) == 2

    def test_setup_stats_md(self, capsys):
        code = bench_main(
            [
                "setup-stats",
                "--sizes", "15",
                "--samples", "5",
                "--precision", "double",
                "--format", "md",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("| size |")

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            bench_main(["throughput", "--format", "yaml"])
        assert exc.value.code == 1

    def test_infeasible_only_sweep_exit_code(self, capsys):
        code = bench_main(
            [
                "throughput",
                "--sizes", "262144",
                "--precision", "double",
                "--algos", "direct",
                "--lanes", "1",
                "--queries", "100",
                "--reps", "1",
                "--min-time", "0.001",
                "--gap-hi", "1e9",
            ]
        )
        captured = capsys.readouterr()
        assert code == 2
        assert "skipped direct" in captured.err
        assert captured.out.startswith("algorithm,")  # header-only report


class TestIndexCli:
    def write_partition(self, tmp_path, values):
        path = tmp_path / "knots.csv"
        path.write_text("\n".join(str(v) for v in values) + "\n")
        return path

    def test_save_then_load_with_verification(self, tmp_path, capsys):
        knots = self.write_partition(tmp_path, [0.0, 0.5, 0.7, 1.1])
        out = tmp_path / "t.idx"
        code = index_main(["save", "--path", str(out), "--partition", str(knots)])
        assert code == 0
        assert "wrote" in capsys.readouterr().out

        code = index_main(
            [
                "load",
                "--path", str(out),
                "--partition", str(knots),
                "--verify-queries", "500",
            ]
        )
        printed = capsys.readouterr().out
        assert code == 0
        assert "verified 500 queries" in printed
        assert "n=3 r=5" in printed

    def test_load_bad_file_is_io_error(self, tmp_path, capsys):
        path = tmp_path / "junk.idx"
        path.write_bytes(b"garbage!")
        assert index_main(["load", "--path", str(path)]) == 3

    def test_missing_file_is_io_error(self, tmp_path):
        assert index_main(["load", "--path", str(tmp_path / "absent.idx")]) == 3

    def test_invalid_partition_is_usage_error(self, tmp_path, capsys):
        knots = self.write_partition(tmp_path, [0.0, 1.0, 1.0, 2.0])
        out = tmp_path / "t.idx"
        code = index_main(["save", "--path", str(out), "--partition", str(knots)])
        assert code == 1
        assert "invalid partition" in capsys.readouterr().err

    def test_non_numeric_partition_line(self, tmp_path, capsys):
        path = tmp_path / "knots.csv"
        path.write_text("0.0\nbanana\n2.0\n")
        out = tmp_path / "t.idx"
        code = index_main(["save", "--path", str(out), "--partition", str(path)])
        assert code == 1
        assert "banana" in capsys.readouterr().err

    def test_mismatched_partition_rejected(self, tmp_path, capsys):
        knots = self.write_partition(tmp_path, [0.0, 0.5, 0.7, 1.1])
        other = tmp_path / "other.csv"
        other.write_text("0.0\n1.0\n2.0\n3.0\n4.0\n")
        out = tmp_path / "t.idx"
        assert index_main(["save", "--path", str(out), "--partition", str(knots)]) == 0
        capsys.readouterr()
        code = index_main(["load", "--path", str(out), "--partition", str(other)])
        assert code == 1
        assert "does not match" in capsys.readouterr().err

    def test_gap2_save(self, tmp_path, capsys):
        knots = self.write_partition(tmp_path, [0.0, 1.0, 2.0, 3.0, 4.0])
        out = tmp_path / "g2.idx"
        code = index_main(
            ["save", "--path", str(out), "--partition", str(knots), "--gap", "2"]
        )
        assert code == 0
        code = index_main(["load", "--path", str(out), "--partition", str(knots)])
        assert code == 0
        assert "gap=2" in capsys.readouterr().out
