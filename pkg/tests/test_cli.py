import json
import shutil
import subprocess

import pytest

import jsontape
from jsontape.cli import main
from jsontape.generate import PLANTED_PATH, generate
from jsontape.stats import CorpusStats, corpus_stats
from conftest import CORPUS_DIR, SAMPLE

SAMPLE_PATH = str(CORPUS_DIR / "photo.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        p = tmp_path / name
        p.write_bytes(data if isinstance(data, bytes) else data.encode())
        return p

    return _write


class TestValidate:
    def test_valid(self, capsys):
        code, out, _ = run(capsys, "validate", SAMPLE_PATH)
        assert code == 0 and "valid" in out

    def test_number_error(self, capsys, write):
        code, _, err = run(capsys, "validate", write("bad.json", "[0e+]"))
        assert code == 1 and "NUMBER_ERROR" in err and "at byte 1" in err

    def test_empty(self, capsys, write):
        code, _, err = run(capsys, "validate", write("empty.json", b""))
        assert code == 1 and "EMPTY" in err

    def test_missing_file_is_io_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "validate", tmp_path / "nope.json")
        assert code == 3 and "I/O" in err

    def test_utf8_error_name(self, capsys, write):
        code, _, err = run(capsys, "validate", write("u.json", b'["\xb1\x87"]'))
        assert code == 1 and "UTF8_ERROR" in err

    def test_oracle_mode(self, capsys, write):
        code, out, _ = run(capsys, "validate", "--oracle", SAMPLE_PATH)
        assert code == 0 and "oracle agrees" in out
        code, _, err = run(capsys, "validate", "--oracle", write("b.json", "[1,]"))
        assert code == 1 and "oracle agrees" in err

    @pytest.mark.parametrize("backend", jsontape.available_backends())
    def test_backend_flag(self, capsys, backend):
        assert run(capsys, "--backend", backend, "validate", SAMPLE_PATH)[0] == 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["generate", "nonsense"])
    assert exc.value.code == 2


def test_tape(capsys):
    code, out, _ = run(capsys, "tape", SAMPLE_PATH)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("0 : r") and "37" in lines[0]
    assert lines[-1].startswith("37 : r")
    assert "22 : integer 100" in lines


class TestMinify:
    @pytest.mark.parametrize(
        "src, expected",
        [("[1, 2]", "[1,2]"), ('{"a":"b c"}', '{"a":"b c"}'), ('{\n  "a" : [ true , null ]\n}', '{"a":[true,null]}')],
    )
    def test_examples(self, capsys, write, tmp_path, src, expected):
        out_path = tmp_path / "out.json"
        code, out, _ = run(capsys, "minify", write("in.json", src), "-o", out_path)
        assert code == 0
        assert out_path.read_text() == expected
        assert f"{len(src)} bytes -> {len(expected)} bytes" in out

    def test_already_minified(self, capsys, write, tmp_path):
        src = '{"a":[1,2]}'
        out_path = tmp_path / "o.json"
        code, out, _ = run(capsys, "minify", write("in.json", src), "-o", out_path)
        assert out_path.read_text() == src and "100.0% of original" in out

    def test_stdout(self, capsys):
        code, out, err = run(capsys, "minify", SAMPLE_PATH)
        assert code == 0 and out.startswith('{"Width":800') and "254 bytes -> 203 bytes" in err

    def test_parse_error_writes_nothing(self, capsys, write, tmp_path):
        out_path = tmp_path / "o.json"
        code, _, err = run(capsys, "minify", write("in.json", "[1, 2,]"), "-o", out_path)
        assert code == 1 and "TAPE_ERROR" in err
        assert not out_path.exists()

    def test_minify_properties(self, small_corpus, backend):
        from jsontape.minify import minify

        for data in small_corpus.values():
            if backend == "python" and len(data) > 20000:
                continue
            once = minify(data, backend=backend).data
            assert minify(once, backend=backend).data == once
            assert jsontape.parse(once, backend=backend) == jsontape.parse(data, backend=backend)


class TestStats:
    def test_sample(self, capsys):
        st = corpus_stats(SAMPLE)
        assert (st.integer, st.float, st.string, st.object, st.array, st.null, st.true, st.false) == (
            7, 0, 14, 2, 1, 1, 0, 1,
        )
        assert st.bytes == 254 and st.structural == len(jsontape.build_structural_index(SAMPLE))
        assert st.bytes_per_structural == pytest.approx(254 / st.structural)
        code, out, _ = run(capsys, "stats", SAMPLE_PATH)
        assert code == 0 and "object keys included" in out

    def test_empty_array(self):
        st = corpus_stats(b"[]")
        assert st == CorpusStats(array=1, structural=2, bytes=2)

    def test_counts_match_oracle_tree(self, small_corpus):
        from jsontape.oracle import OracleObject, oracle_parse

        for data in small_corpus.values():
            counts = dict.fromkeys(["integer", "float", "string", "object", "array", "null", "true", "false"], 0)

            def walk(v):
                if isinstance(v, OracleObject):
                    counts["object"] += 1
                    for k, x in v:
                        counts["string"] += 1
                        walk(x)
                elif isinstance(v, list):
                    counts["array"] += 1
                    for x in v:
                        walk(x)
                elif v is None:
                    counts["null"] += 1
                elif v is True or v is False:
                    counts[str(v).lower()] += 1
                else:
                    counts[{int: "integer", float: "float", str: "string"}[type(v)]] += 1

            walk(oracle_parse(data).value)
            st = corpus_stats(data).as_dict()
            assert {k: st[k] for k in counts} == counts
            assert st["non_ascii"] == sum(b >= 0x80 for b in data)

    def test_numbers_corpus(self, capsys, tmp_path):
        path = tmp_path / "numbers.json"
        assert run(capsys, "generate", "numbers", "--size", 10001, "--seed", 9, "-o", path)[0] == 0
        code, out, _ = run(capsys, "stats", "--format=tsv", path)
        header, row = out.strip().splitlines()
        fields = dict(zip(header.split("\t"), row.split("\t")))
        assert header.split("\t") == ["file", *CorpusStats.columns()]
        assert fields["float"] == "10001" and fields["integer"] == "0"


class TestGenerate:
    def test_size_zero(self, capsys):
        for kind in ("numbers", "random-mixed", "escaped-strings", "large"):
            code, out, _ = run(capsys, "generate", kind, "--size", 0)
            assert code == 0 and out == "[]"

    def test_escaped_is_ascii(self):
        for seed in range(3):
            data = generate("escaped-strings", 30, seed).data
            assert data.isascii() and jsontape.is_valid(data)
            assert b"\\u" in data
            assert any(ord(c) > 0x7F for c in json.dumps(json.loads(data), ensure_ascii=False))

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "generate", "random-mixed", "--size", 20, "--seed", 4, "-o", a)
        run(capsys, "generate", "random-mixed", "--size", 20, "--seed", 4, "-o", b)
        assert a.read_bytes() == b.read_bytes()
        assert generate("random-mixed", 20, 5).data != a.read_bytes()

    @pytest.mark.parametrize("kind", ["numbers", "random-mixed", "escaped-strings", "large"])
    def test_valid_output(self, kind):
        size = 20_000 if kind == "large" else 25
        for indent in (None, 2):
            data = generate(kind, size, 1, indent=indent).data
            assert jsontape.is_valid(data)
            if kind == "large":
                assert len(data) >= size

    def test_float_literals_are_floats(self):
        gen = generate("numbers", 500, 2)
        assert all(isinstance(v, float) for v in jsontape.loads(gen.data)) and gen.floats == 500

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            generate("tweets", 1)


class TestBench:
    def test_default_and_naive_extract(self, capsys):
        code, out, _ = run(capsys, "bench", "--reps", 2, "--format=tsv", "--naive-extract", SAMPLE_PATH)
        assert code == 0
        header, row = out.strip().splitlines()
        rec = dict(zip(header.split("\t"), row.split("\t")))
        assert rec["config"] == "naive-extract" and rec["bytes"] == "254"
        assert float(rec["median_s"]) >= float(rec["min_s"]) > 0
        assert float(rec["throughput_Bps"]) == pytest.approx(254 / float(rec["min_s"]), rel=1e-6)

    def test_ablations_table(self, capsys):
        code, out, _ = run(capsys, "bench", "--ablations", "--reps", 1, SAMPLE_PATH)
        assert code == 0
        for name in ("default", "no-clmul", "naive-extract", "naive-classify"):
            assert name in out

    @pytest.mark.parametrize("reps", [1, 10])
    def test_min_median(self, reps):
        from jsontape.bench import bench_bytes

        (rec,) = bench_bytes(SAMPLE, reps=reps)
        assert rec.median_s >= rec.min_s and rec.reps == reps
        assert rec.stage1_min_s is not None and rec.stage2_min_s is not None

    def test_stage_conflict(self, capsys):
        code, _, err = run(capsys, "bench", "--stage", "2", "--no-clmul", SAMPLE_PATH)
        assert code == 2 and "stage 2" in err
        code, _, err = run(capsys, "bench", "--ablations", "--no-clmul", SAMPLE_PATH)
        assert code == 2

    @pytest.mark.parametrize("stage", ["1", "2"])
    def test_single_stage(self, capsys, stage):
        code, out, _ = run(capsys, "bench", "--stage", stage, "--reps", 2, SAMPLE_PATH)
        assert code == 0 and "default" in out

    def test_invalid_file(self, capsys, write):
        code, _, _ = run(capsys, "bench", write("bad.json", "[1,"))
        assert code == 1


class TestQuery:
    def test_thumbnail_width(self, capsys):
        code, out, err = run(capsys, "query", SAMPLE_PATH, "Thumbnail.Width")
        assert code == 0 and out == "100\n"
        assert "parse" in err and "select" in err and "parse + select" in err

    def test_sorted(self, capsys):
        assert run(capsys, "query", SAMPLE_PATH, "Width")[1] == "100\n800\n"

    def test_missing_path(self, capsys):
        code, out, _ = run(capsys, "query", SAMPLE_PATH, "no.such.key")
        assert code == 0 and out == ""

    def test_planted(self, capsys, write):
        gen = generate("random-mixed", 40, 6)
        code, out, _ = run(capsys, "query", write("t.json", gen.data), PLANTED_PATH)
        assert sorted(int(v) for v in out.split()) == sorted(gen.planted)


class TestFuzz:
    def test_no_divergence(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fuzz", "--iterations", 500, "--out", tmp_path / "repro")
        assert code == 0 and "0 divergences" in out
        assert not (tmp_path / "repro").exists()

    def test_bad_oracle_detected(self, capsys, tmp_path):
        repro = tmp_path / "repro"
        code, _, err = run(capsys, "fuzz", "--iterations", 5, "--bad-oracle", "--out", repro)
        assert code == 4 and "DIVERGENCE" in err
        files = list(repro.iterdir())
        assert files and all(f.suffix == ".json" for f in files)

    def test_corpus_dir(self, capsys, tmp_path):
        seeds = tmp_path / "seeds"
        seeds.mkdir()
        shutil.copy(SAMPLE_PATH, seeds)
        code, out, _ = run(capsys, "fuzz", seeds, "--iterations", 200, "--out", tmp_path / "r")
        assert code == 0

    def test_missing_corpus(self, capsys, tmp_path):
        assert run(capsys, "fuzz", tmp_path / "nope")[0] == 3

    def test_truncations_agree(self, backend):
        from jsontape.fuzz import compare

        for cut in range(len(SAMPLE) + 1):
            agree, *_ = compare(SAMPLE[:cut], backend=backend)
            assert agree


def test_console_script():
    exe = shutil.which("jsontool")
    if exe is None:
        pytest.skip("package not installed")
    res = subprocess.run([exe, "validate", SAMPLE_PATH], capture_output=True, text=True)
    assert res.returncode == 0 and "valid" in res.stdout
