import pytest

from neighborwalk.cli import main


def test_verify_passes(capsys):
    assert main(["verify", "--random", "3"]) == 0
    assert capsys.readouterr().out.strip() == "all identities pass"


def test_verify_verbose_lists_checks(capsys):
    assert main(["-v", "verify", "--random", "1", "--alpha", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "G3" in out and "PASS" in out


def test_missing_config(capsys, tmp_path):
    assert main(["experiment", str(tmp_path / "nope.cfg")]) != 0
    err = capsys.readouterr().err
    assert err.startswith("usage:")


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0
    assert "usage:" in capsys.readouterr().err


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert main(["generate", "--nodes", "1000", "--edges-per-node", "10", "--seed", "7", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len([l for l in a.read_text().splitlines() if not l.startswith("#")]) == 990 * 10 + 10


def test_label_sample_estimate_flow(tmp_path, capsys):
    graph, labels, samples = tmp_path / "g.txt", tmp_path / "labels.txt", tmp_path / "s.csv"
    assert main(["generate", "--nodes", "400", "--edges-per-node", "3", "-o", str(graph)]) == 0
    assert main(["label", "--graph", str(graph), "--mode", "random", "--fraction", "0.1", "-o", str(labels)]) == 0
    assert sum(float(l.split()[1]) for l in labels.read_text().splitlines()) == 40
    args = ["sample", "--graph", str(graph), "--budget", "30", "--property", f"random={labels}", "--seed", "3"]
    assert main([*args, "-o", str(samples)]) == 0
    header = samples.read_text().splitlines()[0]
    assert header == "step,kind,node,d_out,d_in,random"
    capsys.readouterr()
    assert main(["estimate", "--samples", str(samples), "--feature", "out_degree", "--feature", "label:random"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l.split("\t")[0] for l in lines] == ["out_degree", "label:random"]
    assert 0 <= float(lines[1].split("\t")[1]) <= 1


def test_estimate_unknown_feature(tmp_path, capsys):
    graph, samples = tmp_path / "g.txt", tmp_path / "s.csv"
    main(["generate", "--nodes", "100", "--edges-per-node", "2", "-o", str(graph)])
    main(["sample", "--graph", str(graph), "--walker", "srw", "--budget", "5", "-o", str(samples)])
    assert main(["estimate", "--samples", str(samples), "--feature", "label:nothing"]) == 2
    assert "nothing" in capsys.readouterr().err


def test_sample_start_node(tmp_path):
    graph, samples = tmp_path / "g.txt", tmp_path / "s.csv"
    graph.write_text("10 20\n20 30\n30 10\n")
    assert main(["sample", "--graph", str(graph), "--budget", "2", "--start", "20", "-o", str(samples)]) == 0
    first = samples.read_text().splitlines()[1].split(",")
    assert first[:3] == ["0", "transition", "1"]


def test_experiment_writes_outputs(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "dba_nodes = 200\ndba_edges_per_node = 3\nsamplers = proposed, srw\n"
        "alphas = 0.5\nbudget_ratios = 0.02, 0.05\nruns = 5\n"
    )
    csv_path, svg_path = tmp_path / "r.csv", tmp_path / "r.svg"
    assert main(["experiment", str(cfg), "--csv", str(csv_path), "--svg", str(svg_path)]) == 0
    assert len(csv_path.read_text().splitlines()) == 1 + 2 * 2
    assert svg_path.read_text().lstrip().startswith("<?xml")


def test_experiment_bad_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("runs = 0\n")
    assert main(["experiment", str(cfg)]) == 2
    assert "runs" in capsys.readouterr().err
