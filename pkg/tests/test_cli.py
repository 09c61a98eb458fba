"""Command-line interface: grid parsing, run outputs, data merging."""

import argparse
import json

import pytest

from aesfec.cli import build_parser, main, parse_grid


class TestParseGrid:
    def test_colon_range_inclusive(self):
        assert parse_grid("6:0.5:8") == (6.0, 6.5, 7.0, 7.5, 8.0)
        assert parse_grid("0:1:3") == (0.0, 1.0, 2.0, 3.0)

    def test_colon_range_float_step(self):
        # accumulated float error must not drop the stop value
        assert parse_grid("6:0.1:6.3") == (6.0, 6.1, 6.2, 6.3)

    def test_comma_list_and_single(self):
        assert parse_grid("6,7.5,8") == (6.0, 7.5, 8.0)
        assert parse_grid("7.25") == (7.25,)

    @pytest.mark.parametrize(
        "bad",
        ["", "8:0.5:6", "6:0:8", "6:-1:8", "7,6", "5,5", "abc", "nan", "1:inf:2"],
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid(bad)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "aesfec" in capsys.readouterr().out


def test_run_writes_json_and_csv(tmp_path, capsys):
    out = tmp_path / "res.json"
    rc = main(
        [
            "run",
            "--code", "aes",
            "--decoder", "grand",
            "--ebn0", "8.0",
            "--min-block-errors", "3",
            "--max-blocks", "5000",
            "--seed", "7",
            "--out", str(out),
        ]
    )
    assert rc in (0, None)
    data = json.loads(out.read_text())
    assert data["config"]["code_kind"] == "aes"
    assert len(data["points"]) == 1
    csv_text = out.with_suffix(".csv").read_text()
    assert "ebn0_db" in csv_text
    table = capsys.readouterr().out
    assert "8.0" in table and "bler" in table.lower()


def test_run_rejects_bad_combo(tmp_path, capsys):
    rc = main(
        [
            "run",
            "--code", "aes",
            "--n", "64",
            "--k", "52",
            "--ebn0", "8.0",
            "--out", str(tmp_path / "x.json"),
        ]
    )
    assert rc == 2
    assert "128" in capsys.readouterr().err


def test_plot_data_merges_runs(tmp_path):
    paths = []
    for kind, decoder in (("aes", "grand"), ("rlc", "grand")):
        out = tmp_path / f"{kind}-{decoder}.json"
        main(
            [
                "run",
                "--code", kind,
                "--decoder", decoder,
                "--ebn0", "8.0",
                "--min-block-errors", "2",
                "--max-blocks", "3000",
                "--seed", "7",
                "--out", str(out),
                "--quiet",
            ]
        )
        paths.append(str(out))
    merged = tmp_path / "merged.csv"
    rc = main(["plot-data", *paths, "--out", str(merged)])
    assert rc in (0, None)
    lines = [l for l in merged.read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    assert {"code", "decoder", "ebn0_db", "bler"} <= set(header)
    assert len(lines) == 3
    kinds = {row.split(",")[header.index("code")] for row in lines[1:]}
    assert kinds == {"aes", "rlc"}


def test_selftest_passes(capsys):
    rc = main(["selftest"])
    out = capsys.readouterr().out
    assert rc in (0, None), out
    assert "[PASS]" in out
    assert "[FAIL]" not in out
