"""
Tests for the command-line entry point.
"""
import csv
import json

import pytest

from app.cli import build_parser, main, resolve_config


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_regime_command(capsys):
    """regime prints the report as JSON and exits 0."""
    assert main(["regime", "--model", "erw1", "--b", "2", "--p", "0.25"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["regime"] == "critical"
    assert report["threshold"] == pytest.approx(0.25)


def test_srs_regime_needs_alpha():
    """The SRS model without alpha is a parameter error."""
    assert main(["regime", "--model", "srs", "--b", "1", "--p", "0.5"]) == 2
    assert main(["regime", "--model", "srs", "--b", "1", "--p", "0.5", "--alpha", "2"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["regime", "--model", "erw1", "--p", "1.5"],
        ["regime", "--model", "erw1", "--b", "-1"],
        ["regime", "--model", "walrus"],
        ["simulate", "srs", "--b", "1", "--p", "0.5"],
        ["simulate", "erw", "--method", "clusters"],
        ["simulate", "erw", "--n-grid", "10,20"],
        ["simulate", "erw", "--t-grid", "0.5,1.5"],
        ["simulate", "nothing"],
    ],
)
def test_bad_arguments_exit_2(argv):
    """Out-of-domain parameters and invalid combinations exit with code 2."""
    assert main(argv) == 2


def test_unknown_check(capsys):
    """An unknown check name lists the valid ones on stderr."""
    assert main(["verify", "no-such-check"]) == 2
    err = capsys.readouterr().err
    assert "stable-sampler" in err


def test_list_checks(capsys):
    """list-checks prints one tab-separated line per check."""
    assert main(["list-checks"]) == 0
    lines = capsys.readouterr().out.splitlines()
    names = [line.split("\t")[0] for line in lines]
    assert "urn-walk-equivalence" in names
    assert names == sorted(names)


def test_simulate_erw_is_deterministic(tmp_path):
    """The same seed writes byte-identical trajectories."""
    outputs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        argv = ["simulate", "erw", "--model", "strong", "--b", "0.5", "--p", "0.3",
                "--n", "25", "--replicas", "3", "--seed", "42", "--output", str(path)]
        assert main(argv) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    rows = _read_csv(tmp_path / "a.csv")
    assert rows[0] == ["replica", "k", "S"]
    assert len(rows) == 1 + 3 * 26


def test_simulate_erw_t_grid(tmp_path):
    """--t-grid keeps the positions at floor(t n)."""
    path = tmp_path / "grid.csv"
    argv = ["simulate", "erw", "--method", "urn", "--n", "20", "--t-grid", "0.5,1",
            "--replicas", "2", "--output", str(path)]
    assert main(argv) == 0
    rows = _read_csv(path)
    assert [row[1] for row in rows[1:]] == ["10", "20", "10", "20"]
    assert all(int(float(row[2])) % 2 == 0 for row in rows[1:])


def test_simulate_tree_dump(tmp_path):
    """The tree dump has one row per node and clusters rooted at cut nodes."""
    path = tmp_path / "tree.csv"
    argv = ["simulate", "tree", "--n", "40", "--b", "1", "--p", "0.5", "--dump",
            "--output", str(path)]
    assert main(argv) == 0
    rows = _read_csv(path)
    assert rows[0] == ["node", "parent", "cut", "cluster"]
    body = rows[1:]
    assert len(body) == 40
    assert body[0][:3] == ["1", "0", "0"]
    cuts = sum(int(row[2]) for row in body)
    assert max(int(row[3]) for row in body) == 1 + cuts


def test_simulate_srs_clusters_grid(tmp_path):
    """SRS paths on an n grid come from the cluster representation."""
    path = tmp_path / "srs.json"
    argv = ["simulate", "srs", "--alpha", "1.5", "--b", "1", "--p", "0.5", "--dim", "2",
            "--method", "clusters", "--n-grid", "5,10", "--replicas", "2",
            "--format", "json", "--output", str(path)]
    assert main(argv) == 0
    records = json.loads(path.read_text())
    assert len(records) == 4
    assert set(records[0]) == {"replica", "k", "S_1", "S_2"}


def test_simulate_urn(tmp_path, capsys):
    """Urn paths report the regime on stderr and masses on the output."""
    path = tmp_path / "urn.csv"
    assert main(["simulate", "urn", "--model", "strong", "--n", "5", "--output", str(path)]) == 0
    err_lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    assert json.loads(err_lines[0])["model"] == "erw2"
    rows = _read_csv(path)
    assert rows[0] == ["replica", "k", "black", "green", "red"]
    assert len(rows) == 6


def test_config_precedence(tmp_path, monkeypatch):
    """Flags beat the config file, which beats the environment seed."""
    monkeypatch.setenv("REINFORCE_WALK_SEED", "99")
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"seed": 5, "n": 77, "p": 0.3}))
    parser = build_parser()

    cfg = resolve_config(parser.parse_args(["simulate", "erw", "--config", str(config), "--n", "12"]))
    assert (cfg.seed, cfg.n, cfg.p) == (5, 12, 0.3)

    cfg = resolve_config(parser.parse_args(["simulate", "erw"]))
    assert cfg.seed == 99
    assert cfg.n == 1000


def test_missing_config_file(tmp_path):
    """An unreadable config file is an I/O failure."""
    assert main(["regime", "--model", "erw1", "--config", str(tmp_path / "missing.json")]) == 1


def test_unknown_config_keys_are_rejected(tmp_path):
    """A misspelt key in the config file is a bad argument, not a silent default."""
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"replica": 5}))
    assert main(["simulate", "erw", "--n", "5", "--config", str(config)]) == 2


def test_simulate_regime_matches_the_simulated_model(tmp_path, capsys):
    """Urns report their own model, trees report no regime and SRS urns are refused."""
    path = tmp_path / "out.csv"
    assert main(["simulate", "urn", "--model", "erw1", "--b", "1", "--p", "0.2", "--n", "5",
                 "--output", str(path)]) == 0
    err_lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    assert json.loads(err_lines[0])["model"] == "erw1"

    assert main(["simulate", "tree", "--n", "20", "--output", str(path)]) == 0
    assert not [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]

    assert main(["simulate", "urn", "--model", "srs", "--n", "5", "--output", str(path)]) == 2
    assert main(["simulate", "erw", "--model", "srs", "--n", "5", "--output", str(path)]) == 2
