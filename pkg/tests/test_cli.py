import json

import pytest

from tmodules.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_info_carlitz(capsys, data_dir):
    code, out = run(capsys, "info", data_dir / "carlitz.tm")
    assert code == 0
    assert "d: 1" in out and "n: 1" in out
    assert "strictly pure: yes" in out and "nilpotence: no" in out


def test_validate_failure(capsys, data_dir):
    code, out = run(capsys, "validate", data_dir / "not_a_tmodule.tm")
    assert code == 1
    assert "residue" in out


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.tm"
    bad.write_text("p: 3\nd: 1\nn: 1\nM0: theta*I\nM1:\n  - [\"T +\"]\n")
    code, out = run(capsys, "validate", bad)
    assert code == 1 and "bad.tm:6" in out


def test_dual_both(capsys, data_dir):
    code, out = run(capsys, "dual", data_dir / "example_d2n3.tm", "--method", "both")
    assert code == 0
    assert "closed-form = reduction" in out


def test_dual_machine_format(capsys, data_dir):
    code, out = run(capsys, "--format", "machine", "dual", data_dir / "drinfeld_rank2.tm")
    doc = json.loads(out)
    assert code == 0 and doc["dual tau^1 coefficient"] == [["2*T"]]


def test_bidual_and_ext(capsys, data_dir):
    assert run(capsys, "bidual", data_dir / "example_d2n3.tm")[0] == 0
    assert run(capsys, "ext", data_dir / "example_d2n3.tm")[0] == 0
    code, out = run(capsys, "ext", "--of-dual", data_dir / "example_d2n3.tm")
    assert code == 0 and "dimension: 6" in out


def test_reduce_commands(capsys, data_dir):
    code, out = run(capsys, "reduce", data_dir / "drinfeld_rank2.tm", data_dir / "rank2_state.bd")
    assert code == 0 and "passes: 3" in out
    code, out = run(capsys, "reduce", "--strategy", "dual-special", "--shape", "zero",
                    data_dir / "example_d2n3.tm", data_dir / "dual_state.bd")
    assert code == 0 and "AHat[row 4]" in out


def test_dual_hom(capsys, data_dir):
    code, out = run(capsys, "dual-hom", data_dir / "conjugation.hom")
    assert code == 0 and "(1 / T^3 + 1)" in out


def test_no_forward_pivot_exit(capsys, tmp_path):
    # the 7-dimensional dual of the nilpotent example has a backward pivot in column 5
    from tmodules.duality import dual_via_reduction
    from tmodules.formats import dump_tmodule
    from tmodules.samples import nilpotent_example

    src = tmp_path / "dual.tm"
    src.write_text(dump_tmodule(dual_via_reduction(nilpotent_example(3, 1))))
    state = tmp_path / "s.bd"
    state.write_text('p: 3\nD: 7\nentries: ["(0)", "(0)", "(0)", "(0)", "(T)t#1", "(0)", "(0)"]\n')
    code, out = run(capsys, "reduce", "--strategy", "generic", "--shape", "zero", src, state)
    assert code == 3 and "no forward pivot" in out


def test_demo(capsys):
    code, out = run(capsys, "demo-counterexample", "--p", 3, "--a", 1)
    assert code == 0
    assert "is NOT a t-module" in out


@pytest.mark.parametrize("cmd", ["verify-bidual", "verify-inner-zero"])
def test_random_verification_is_deterministic(capsys, cmd):
    a = run(capsys, cmd, "--seed", 7, "--count", 5)
    b = run(capsys, cmd, "--seed", 7, "--count", 5)
    assert a == b and a[0] == 0
