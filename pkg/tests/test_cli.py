import json

import pytest

from conpat import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_phi_json(capsys):
    code, out, _ = run(capsys, "phi", "--perm", "1,4,3,2,5")
    assert code == 0
    assert json.loads(out)["phi"] == 9


def test_phi_profile_pairs(capsys):
    code, out, _ = run(capsys, "phi", "--perm", "1 2 3 4", "--pairs", "--kmin", "2")
    data = json.loads(out)
    assert data["x"] == [1, 1, 1, 1]
    assert data["z"][0] == 3 and data["y"][0] == 2


def test_phi_csv_per_length(capsys):
    code, out, _ = run(capsys, "phi", "--perm", "1,4,3,2,5", "--profile", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "perm,k,x" and len(lines) == 6


def test_perm_file(tmp_path, capsys):
    f = tmp_path / "perms.txt"
    f.write_text("1,4,3,2,5\n2,1\n\n")
    code, out, _ = run(capsys, "phi", "--perm-file", str(f))
    assert [r["phi"] for r in json.loads(out)["results"]] == [9, 2]
    code, out, _ = run(capsys, "psi", "--perm-file", str(f))
    assert json.loads(out)["results"][1]["psi"] == 3


def test_bad_permutation_exit_2(capsys):
    code, _, err = run(capsys, "phi", "--perm", "1,1,2")
    assert code == 2 and "not a permutation" in err


def test_overlap_exact(capsys):
    code, out, _ = run(capsys, "overlap", "--k", "3", "--l", "2", "--exact")
    data = json.loads(out)
    assert (data["numerator"], data["denominator"]) == (2, 24)
    assert data["probability"] == {"num": 1, "den": 12}


def test_overlap_budget_exit_2(capsys):
    code, _, err = run(capsys, "overlap", "--k", "7", "--l", "1")
    assert code == 2 and "budget" in err


def test_expect_zero_samples_exit_2(capsys):
    code, _, _ = run(capsys, "expect", "--n", "100", "--samples", "0")
    assert code == 2


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["phi", "--perm", "1,2", "--frobnicate"])
    assert exc.value.code == 2


def test_expect_exact_json(capsys):
    code, out, _ = run(capsys, "expect", "--n", "3", "--exact", "--per-length")
    data = json.loads(out)
    assert data["value"] == {"num": 11, "den": 3}
    assert len(data["per_length"]) == 3


def test_expect_csv_rows(capsys):
    code, out, _ = run(capsys, "expect", "--n", "4", "--exact", "--per-length", "--format", "csv")
    assert out.splitlines()[0] == "k,expected_x" and len(out.splitlines()) == 5


def test_mc_output_byte_identical(capsys):
    args = ("expect", "--n", "20", "--samples", "5000", "--seed", "9")
    _, a, _ = run(capsys, *args, "--threads", "1")
    _, b, _ = run(capsys, *args, "--threads", "1")
    _, c, _ = run(capsys, *args, "--threads", "3")
    assert a == b == c


def test_default_seed_is_zero(capsys):
    _, a, _ = run(capsys, "zexpect", "--n", "8", "--kmin", "3", "--samples", "100")
    _, b, _ = run(capsys, "zexpect", "--n", "8", "--kmin", "3", "--samples", "100", "--seed", "0")
    assert a == b and json.loads(a)["seed"] == 0


def test_exact_counts_never_floats(capsys):
    _, out, _ = run(capsys, "good", "--k", "4", "--l", "2")
    data = json.loads(out)
    assert data["count"] == 12 and all(isinstance(w, int) for w in data["witnesses"])
    _, out, _ = run(capsys, "overlap", "--k", "5", "--l", "0", "--exact")
    data = json.loads(out)
    assert isinstance(data["numerator"], int) and isinstance(data["denominator"], int)


def test_large_ints_become_strings():
    assert cli._jsonable(2**60) == str(2**60)
    assert cli._jsonable(12) == 12


@pytest.mark.parametrize(
    "argv",
    [
        ("bounds", "--n", "8", "--asymptotics"),
        ("attain", "--n", "6", "--budget-ms", "5000"),
        ("good", "--k", "3", "--l", "2"),
        ("probe", "--d", "1", "--kmax", "5"),
        ("bounddecomp", "--n", "10", "--k", "5"),
        ("zexpect", "--n", "8", "--kmin", "2", "--samples", "200", "--format", "csv"),
        ("psi", "--perm", "2,1"),
        ("psi-expect", "--n", "6", "--samples", "100"),
        ("psi-expect", "--n", "5", "--exact"),
    ],
)
def test_subcommands_succeed(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out


def test_bounds_values(capsys):
    for n, b in {3: 4, 4: 6, 5: 9, 6: 13, 7: 18, 8: 24}.items():
        _, out, _ = run(capsys, "bounds", "--n", str(n))
        assert json.loads(out)["total"] == b


def test_attain_verified(capsys):
    _, out, _ = run(capsys, "attain", "--n", "8", "--budget-ms", "60000")
    data = json.loads(out)
    assert data["found"] and data["phi"] == data["bound"] == 24


def test_reproduce_small(capsys):
    code, out, _ = run(capsys, "reproduce", "--max-n", "3")
    data = json.loads(out)
    assert code == 0 and data["agrees"] and len(data["rows"]) == 1


def test_reproduce_full_table():
    rows, diffs = cli.reproduce_table(8)
    assert diffs == []
    assert [r["bound"] for r in rows] == [4, 6, 9, 13, 18, 24]
    assert [r["expected_phi"] for r in rows] == ["3.67", "5.83", "8.70", "12.33", "16.78", "22.08"]


def test_reproduce_detects_corrupted_table(capsys, monkeypatch):
    bad = dict(cli.EXPECTED_TABLE)
    bad[5] = (9, True, "8.71")
    monkeypatch.setattr(cli, "EXPECTED_TABLE", bad)
    code, out, err = run(capsys, "reproduce", "--max-n", "6")
    assert code != 0
    assert "n=5 expected_phi" in err
    assert json.loads(out)["agrees"] is False


def test_reproduce_cap(capsys):
    code, _, _ = run(capsys, "reproduce", "--max-n", "11")
    assert code == 2
