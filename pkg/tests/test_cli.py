import re
import shutil

import numpy as np
import pytest

from ldpguard import caseio
from ldpguard.cli import main
from ldpguard.regress import fixture_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_solve_case1(capsys):
    code, out, _ = run(capsys, "solve", fixture_path("case1"))
    assert code == 0
    assert "status: Solved" in out
    x1 = float(re.search(r"^x: (\S+) (\S+)$", out, re.M).group(1))
    assert x1 == pytest.approx(135.3410091, rel=1e-9)
    assert "kkt:" in out


def test_solve_case3_infeasible(capsys):
    code, out, _ = run(capsys, "solve", fixture_path("case3"))
    assert code == 0
    assert "status: Infeasible" in out


def test_solve_bad_files(capsys, tmp_path):
    text = fixture_path("case1").read_text()
    bad = tmp_path / "trunc.ldp"
    bad.write_text("\n".join(text.splitlines()[:-2]) + "\n")
    code, _, err = run(capsys, "solve", bad)
    assert code == 2
    assert "unexpected end of file" in err
    code, _, err = run(capsys, "solve", tmp_path / "missing.ldp")
    assert code == 2


def test_solve_guard_rejection_exit_code(capsys):
    code, out, _ = run(capsys, "solve", fixture_path("case1"), "--tau-div", "0.999")
    assert code == 1
    assert "status: VerificationFailed" in out
    assert "rejected:" in out


def test_usage_errors(capsys):
    assert run(capsys, "solve")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "solve", fixture_path("case1"), "--tau-feas", "2")[0] == 2
    assert run(capsys, "fuzz", "--cases", "1", "--mix", "bogus=1")[0] == 2


def test_verify_known_bad(capsys):
    code, out, _ = run(capsys, "verify", fixture_path("case1"), "--x=-0.375,0")
    assert code == 1
    assert re.search(r"^row 2: .*VIOLATED$", out, re.M)
    assert "FAIL: worst row 2" in out


def test_verify_good_candidate(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", fixture_path("case1"), "--x", "135.3410091 0")
    assert code == 0
    assert "PASS" in out
    xf = tmp_path / "x.txt"
    xf.write_text("0x1.0eae9d7c4d8c5p+7\n0\n")
    assert run(capsys, "verify", fixture_path("case1"), "--x-file", xf)[0] == 0
    assert run(capsys, "verify", fixture_path("case1"), "--x", "1 2 3")[0] == 2


def test_verify_witness(capsys, tmp_path):
    assert run(capsys, "gen", "--m", 5, "--n", 3, "--seed", 4, "--out-dir", tmp_path)[0] == 0
    (path,) = tmp_path.glob("*.ldp")
    code, out, _ = run(capsys, "verify", path, "--witness")
    assert code == 0 and "PASS" in out
    assert run(capsys, "verify", fixture_path("case1"), "--witness")[0] == 2


def test_gen_is_reproducible(capsys, tmp_path):
    for d in ("a", "b"):
        code, _, _ = run(capsys, "gen", "--m", 6, "--n", 3, "--kind", "interior", "--l", 4,
                         "--seed", 9, "--count", 5, "--out-dir", tmp_path / d)
        assert code == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == [f"case-s9-i{i:05d}.ldp" for i in range(5)]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    cf = caseio.load(tmp_path / "a" / names[0])
    assert cf.problem.m == 4 and cf.meta["kind"] == "ConsistentInterior"


def test_gen_zero_column(capsys, tmp_path):
    run(capsys, "gen", "--m", 4, "--n", 2, "--zero-cols", 1, "--count", 20, "--out-dir", tmp_path)
    for path in tmp_path.glob("*.ldp"):
        G = caseio.load(path).problem.G
        assert np.sum(np.all(G == 0.0, axis=0)) == 1


def test_gen_infeasible_kind(capsys, tmp_path):
    run(capsys, "gen", "--m", 6, "--n", 1, "--kind", "infeasible", "--count", 200, "--seed", 1, "--out-dir", tmp_path)
    verdicts = []
    for path in sorted(tmp_path.glob("*.ldp")):
        code, out, _ = run(capsys, "solve", path)
        verdicts.append("status: Infeasible" in out)
    assert len(verdicts) == 200
    assert np.mean(verdicts) >= 0.9


def test_gen_rejects_bad_combinations(capsys, tmp_path):
    assert run(capsys, "gen", "--m", 2, "--n", 2, "--margin", 3, "--out-dir", tmp_path)[0] == 2
    assert run(capsys, "gen", "--m", 2, "--n", 2, "--zero-cols", 2, "--out-dir", tmp_path)[0] == 2


def test_fuzz_consistent_only(capsys):
    code, out, _ = run(capsys, "fuzz", "--cases", 100, "--seed", 1, "--mix", "consistent=1")
    assert code == 0
    report = kv(out.split("--- report ---")[1])
    assert report["status.Solved"] == "100"
    assert report["silent_violations"] == "0"


def test_fuzz_serial_equals_parallel(capsys, tmp_path):
    code, _, _ = run(capsys, "fuzz", "--cases", 300, "--seed", 3, "--report", tmp_path / "s.txt")
    assert code == 0
    code, _, _ = run(capsys, "fuzz", "--cases", 300, "--seed", 3, "--workers", 2, "--report", tmp_path / "p.txt")
    assert code == 0

    def strip(p):
        return [l for l in p.read_text().splitlines() if not l.startswith("wall_time_s=")]

    assert strip(tmp_path / "s.txt") == strip(tmp_path / "p.txt")


def test_fuzz_dumps_replay(capsys, tmp_path):
    # an oversized division guard forces rejections, which are dumped
    dump = tmp_path / "dump"
    code, out, _ = run(capsys, "fuzz", "--cases", 20, "--seed", 2, "--tau-div", 0.9,
                       "--dump-dir", dump, "--strict")
    assert code == 1
    report = kv((dump / "campaign-report.txt").read_text())
    assert int(report["dumped"]) > 0
    assert int(report["status.VerificationFailed"]) == int(report["dumped"])
    for path in sorted(dump.glob("case-*.ldp")):
        meta = caseio.load(path).meta
        code, out, _ = run(capsys, "solve", path, "--tau-div", 0.9)
        assert f"status: {meta['status']}" in out
        assert code == 1


def test_regress_passes(capsys):
    code, out, _ = run(capsys, "regress")
    assert code == 0
    assert "PASS: 9/9 assertions" in out


def test_regress_corrupted_fixture(capsys, tmp_path):
    for name in ("case1", "case2", "case3"):
        shutil.copy(fixture_path(name), tmp_path / f"{name}.ldp")
    p = tmp_path / "case2.ldp"
    p.write_text(p.read_text().replace("0.", "1.", 1))
    code, out, _ = run(capsys, "regress", "--fixtures", tmp_path)
    assert code == 1
    failing = [l for l in out.splitlines() if l.startswith("FAIL") and "assertions" not in l]
    assert failing and all("case2" in l for l in failing)


def test_regress_tolerance_override_keeps_verdicts(capsys):
    _, base, _ = run(capsys, "regress")
    code, tight, _ = run(capsys, "regress", "--tau-feas", "1e-10")
    assert code == 0

    def verdicts(text):
        return [l.split()[0] for l in text.splitlines()]

    assert verdicts(base) == verdicts(tight)
