import os

import pytest

from padic_lfun.cli import ConfigError, main, parse_curve, run
from padic_lfun.report import parse_report, format_report


def test_fe_example(capsys):
    assert main(["fe", "--curve", "11a-coeffs", "--prime", "3", "--moments", "10", "--chars", "first3:2"]) == 0
    out = capsys.readouterr().out
    block, _ = parse_report(out)
    d = dict(block)
    assert d["eps_fit"] == "1" and d["status"] == "PASS"


def test_taylor_example():
    assert main(["taylor", "--e", "2", "--sign", "+1", "--seeds", "10"]) == 0


@pytest.mark.parametrize("argv", [
    ["fe", "--curve", "1,2,3", "--prime", "3"],
    ["fe", "--curve", "banana", "--prime", "3"],
    ["tz", "--curve", "11a", "--prime", "4"],
    ["taylor", "--e", "2", "--sign", "3"],
    ["taylor", "--e", "3", "--degree", "4"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["fe", "--prime", "x"])
    assert exc.value.code == 2


def test_curve_aliases():
    assert parse_curve("11a") == (0, -1, 1, -10, -20)
    assert parse_curve("11A-coeffs") == parse_curve("[0,-1,1,-10,-20]")
    with pytest.raises(ConfigError):
        parse_curve("0,0,0")


def test_failing_check_exits_1():
    # asking for more digits than the moments can carry
    assert main(["interp", "--curve", "11a", "--prime", "3", "--moments", "6", "--min-digits", "20"]) == 1


def test_determinism_and_round_trip():
    argv = ["tz", "--curve", "11a", "--prime", "11", "--moments", "8"]
    code1, a = run(argv)
    code2, b = run(argv)
    assert code1 == code2 == 0 and a == b
    block, table = parse_report(a)
    assert format_report(block, *(table or (None, None))) == a
    assert dict(block)["config.moments"] == "8"


def test_table_format_round_trip():
    _, text = run(["taylor", "--e", "1", "--sign", "-1", "--seeds", "3", "--format", "table"])
    from padic_lfun.report import format_table, parse_table

    assert format_table(*parse_table(text)) == text


def test_snapshot_mode(tmp_path):
    argv = ["taylor", "--e", "2", "--seeds", "3", "--snapshot", str(tmp_path)]
    assert main(argv) == 0
    files = os.listdir(tmp_path)
    assert len(files) == 1
    assert main(argv) == 0
    path = tmp_path / files[0]
    path.write_text(path.read_text() + "tampered\n")
    assert main(argv) == 1


def test_plot_output(tmp_path):
    assert main(["taylor", "--e", "2", "--seeds", "3", "--plot-dir", str(tmp_path)]) == 0
    assert (tmp_path / "taylor.png").stat().st_size > 0


def test_mtt_command(capsys):
    assert main(["mtt", "--curve", "11a", "--prime", "11", "--moments", "10", "--min-digits", "3"]) == 0
    d = dict(parse_report(capsys.readouterr().out)[0])
    assert d["ord_q"] == "5"


def test_mtt_nonsplit_is_a_failure_not_a_crash(capsys):
    assert main(["mtt", "--curve", "15a", "--prime", "3"]) == 1
    assert "nonsplit" in capsys.readouterr().err


def test_cache_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("PADIC_LFUN_CACHE", str(tmp_path))
    assert main(["compute", "--curve", "11a", "--prime", "5", "--moments", "6"]) == 0
    assert (tmp_path / "moment_matrices.pkl").exists()
