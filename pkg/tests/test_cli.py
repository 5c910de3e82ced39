import json

from rainbowpack.cli import main
from rainbowpack.graph import load_colored, load_graph


def test_sample_and_verify(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["sample", "--model", "kout", "--complete", "15", "--k", "3", "--seed", "2", "--out", str(out)]) == 0
    g = load_graph(out)
    assert g.n == 15
    capsys.readouterr()
    assert main(["verify", "--graph", str(out), "--property", "connected"]) == 0
    assert "connected: true" in capsys.readouterr().out


def test_sample_bipartite_and_matching(tmp_path, capsys):
    out = tmp_path / "b.txt"
    assert main(["sample", "--model", "kout-bipartite", "--n", "10", "--k", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["verify", "--graph", str(out), "--property", "perfect-matching"]) == 0
    text = capsys.readouterr().out
    assert "perfect-matching: true" in text and "witness" in text


def test_colored_sample_and_rainbow(tmp_path, capsys):
    out = tmp_path / "c.txt"
    assert main(["sample", "--model", "colored", "--complete", "5", "--p", "1", "--c", "100", "--out", str(out)]) == 0
    assert load_colored(out).palette_size == 100
    capsys.readouterr()
    main(["verify", "--graph", str(out), "--property", "rainbow"])
    assert "rainbow:" in capsys.readouterr().out


def test_decompose_writes_files(tmp_path):
    out = tmp_path / "d"
    assert main(["decompose", "--complete", "10", "--p", "0.9", "--k", "2", "--eps", "0.5", "--out", str(out)]) == 0
    diag = json.loads((out / "diagnostics.json").read_text())
    assert {"s", "r0", "d", "s_r", "t_achieved", "failure_reason"} <= set(diag)
    assert all(diag["checks"].values())
    h = load_colored(out / "h.txt")
    rest = load_colored(out / "H0.txt")
    assert rest.base.edges <= h.base.edges


def test_bounds_table(capsys):
    assert main(["bounds", "--k", "2", "--n", "10", "--alpha", "0.5", "--eps", "0.5"]) == 0
    text = capsys.readouterr().out
    assert "4.07253" in text and "r0=" in text


def test_experiment_from_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(dict(experiment="walkup-pm", n=8, k=2, trials=4)))
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o"), "--workers", "2"]) == 0
    assert len((tmp_path / "o" / "trials.csv").read_text().splitlines()) == 5


def test_experiment_preset_override(tmp_path):
    assert main(["experiment", "--preset", "fenner-ham", "--trials", "3", "--out", str(tmp_path / "o")]) == 0
    assert json.loads((tmp_path / "o" / "report.json").read_text())["trials"] == 3


def test_errors_give_nonzero_exit(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 9\n")
    assert main(["verify", "--graph", str(bad), "--property", "connected"]) == 2
    assert "bad.txt:2" in capsys.readouterr().err
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(dict(experiment="nope", n=8, trials=4)))
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
