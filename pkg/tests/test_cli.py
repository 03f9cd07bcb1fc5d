import json

import pytest

from tristable.cli import main
from tristable.core import read_instance, read_solution
from tristable.generators import gen_gadget2


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_and_exact(tmp_path, capsys):
    inst_path = tmp_path / "g.inst"
    code, _, _ = run(capsys, "gen", "gadget2", "-o", str(inst_path))
    assert code == 0
    assert read_instance(inst_path) == gen_gadget2()

    code, out, _ = run(capsys, "exact", str(inst_path), "--mode", "msm",
                       "--format", "json")
    assert code == 0
    (record,) = json.loads(out)
    assert record["algorithm"] == "exact-msm"
    assert record["stab"] == 7 and record["ins"] == 1


def test_gen_list_and_stdout(capsys):
    code, out, _ = run(capsys, "gen", "--list")
    assert code == 0
    assert "gadget2" in out and "planted-dm" in out
    code, out, _ = run(capsys, "gen", "gadget2")
    assert code == 0
    assert out.startswith("3GSM 2\n")


def test_amsm_json_deterministic(capsys):
    args = ("amsm", "--family", "random", "--n", "4", "--seed", "1",
            "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    (record,) = json.loads(out1)
    assert record["family"] == "random" and record["n"] == 4
    assert record["stab"] + record["ins"] == 64
    assert "runtimeMs" not in record


def test_timings_flag_adds_runtime(capsys):
    code, out, _ = run(capsys, "amsm", "--family", "random", "--n", "3",
                       "--seed", "0", "--format", "json", "--timings")
    assert code == 0
    (record,) = json.loads(out)
    assert isinstance(record["runtimeMs"], float)


def test_asa_and_stab(tmp_path, capsys):
    inst = tmp_path / "p.inst"
    sol = tmp_path / "p.sol"
    code, _, _ = run(capsys, "gen", "random-psa", "--n", "2", "--seed", "0",
                     "-o", str(inst))
    assert code == 0
    code, out, _ = run(capsys, "asa", str(inst), "-o", str(sol),
                       "--format", "json")
    assert code == 0
    (record,) = json.loads(out)
    code, out, _ = run(capsys, "stab", str(inst), "--solution", str(sol),
                       "--format", "json")
    assert code == 0
    (stab_record,) = json.loads(out)
    assert stab_record["stab"] == record["stab"]


def test_exit_codes(capsys, tmp_path):
    # validation failure
    code, _, err = run(capsys, "gen", "adversarial", "--n", "3")
    assert code == 2 and "even" in err
    # size-limit refusal
    inst = tmp_path / "big.inst"
    run(capsys, "gen", "random", "--n", "7", "--seed", "0", "-o", str(inst))
    code, _, err = run(capsys, "exact", str(inst), "--mode", "msm")
    assert code == 3
    # bench refuses exact beyond limits without --force
    code, _, _ = run(capsys, "bench", "--family", "random", "--n", "7",
                     "--seeds", "1", "--algorithm", "exact-msm")
    assert code == 3
    # wrong instance kind
    psa = tmp_path / "p.inst"
    run(capsys, "gen", "random-psa", "--n", "2", "--seed", "0", "-o", str(psa))
    code, _, _ = run(capsys, "amsm", str(psa))
    assert code == 2


def test_reduce_pipeline(tmp_path, capsys):
    sat = tmp_path / "f.sat"
    sat.write_text("3SATB 2 2 2\n1 2\n-1 -2\n")
    dm_path = tmp_path / "r.inst"
    layout_path = tmp_path / "lay.json"
    code, _, _ = run(capsys, "reduce", "sat3dm", str(sat), "-o", str(dm_path),
                     "--layout", str(layout_path))
    assert code == 0
    sol = tmp_path / "m.sol"
    code, _, _ = run(capsys, "exact", str(dm_path), "-o", str(sol))
    assert code == 0
    code, out, _ = run(capsys, "reduce", "decode", str(sol),
                       "--layout", str(layout_path))
    assert code == 0
    assert out.strip() in ("x1=T x2=F", "x1=F x2=T", "x1=T x2=T",
                           "x1=F x2=F")

    small_dm = tmp_path / "small.inst"
    code, _, _ = run(capsys, "gen", "planted-dm", "--n", "2", "--seed", "0",
                     "-o", str(small_dm))
    assert code == 0
    gsm_path = tmp_path / "e.inst"
    code, _, _ = run(capsys, "reduce", "embed", str(small_dm), "-o",
                     str(gsm_path))
    assert code == 0
    assert read_instance(gsm_path).n == 12
    psa_path = tmp_path / "l.inst"
    code, _, _ = run(capsys, "reduce", "lift", str(gsm_path), "-o",
                     str(psa_path))
    assert code == 0
    assert read_instance(psa_path).num_players == 36

    # decoding requires the layout flag
    code, _, _ = run(capsys, "reduce", "decode", str(sol))
    assert code == 2


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--family", "random", "--n", "3",
                       "--seeds", "2", "--algorithm", "amsm", "exact-msm",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "family,n,seed,algorithm,stab,ins,bound"
    assert len(lines) == 5
    for line in lines[1:]:
        family, n, seed, algorithm, stab, ins, _ = line.split(",")
        assert family == "random" and n == "3"
        assert int(stab) + int(ins) == 27


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--family", "gadget2")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "verify", "--family", "adversarial", "--n", "2")
    assert code == 0 and "min ins" in out
    code, out, _ = run(capsys, "verify", "--family", "planted", "--n", "1")
    assert code == 0 and out.startswith("PASS")
    code, _, _ = run(capsys, "verify", "--family", "adversarial")
    assert code == 2


def test_threads_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("TRISTABLE_THREADS", "2")
    code, _, _ = run(capsys, "verify", "--family", "gadget2")
    assert code == 0
    monkeypatch.setenv("TRISTABLE_THREADS", "zero")
    code, _, _ = run(capsys, "verify", "--family", "gadget2")
    assert code == 2
