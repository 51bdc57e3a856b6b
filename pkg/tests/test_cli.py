import math

import pytest

from qergodic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_relations_q(capsys):
    code, out, _ = run(capsys, "relations", "--engine", "q", "--q", "0.5", "--window", "0:2", "--depth", "3")
    assert code == 0
    assert out.splitlines()[0] == "check,engine,params,max_defect,tolerance,pass"
    assert all(line.endswith("true") for line in out.splitlines()[1:])


@pytest.mark.parametrize("engine", ["monotone", "boolean"])
def test_relations_other_engines(capsys, engine):
    code, out, _ = run(capsys, "relations", "--engine", engine, "--window", "0:4")
    assert code == 0 and "false" not in out


def test_coo_export(capsys, tmp_path):
    target = tmp_path / "m.coo"
    code, _, _ = run(capsys, "relations", "--engine", "boolean", "--window", "0:1",
                     "--export", "ad(0) a(1)", "--export-out", str(target))
    assert code == 0
    assert target.read_text().split() == ["1", "2", "1.0", "0.0"]


def test_haagerup_counterexample(capsys):
    code, out, _ = run(capsys, "haagerup", "--lambda", "1", "--check", "block-singleton",
                       "--u", "g1", "--v", "g2", "--w", "g1^-1")
    assert code == 0
    assert repr(math.exp(-3)) in out and repr(math.exp(-1)) in out
    assert "verdict: NOT-EQUAL" in out


def test_boolean_mixing_csv(capsys):
    code, out, _ = run(capsys, "ergodic", "--engine", "boolean", "--probe", "mixing",
                       "--word", "ad(0) a(0)", "--vector", "e5", "--n", "12")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "scale,deviation,engine,q_or_lambda,seed"
    devs = [float(r.split(",")[1]) for r in rows[1:]]
    assert devs[5] == 1.0 and all(d == 0.0 for d in devs[6:])


def test_ergodic_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.csv"
        code, _, _ = run(capsys, "ergodic", "--engine", "q", "--q", "0.3", "--probe", "cesaro",
                         "--scales", "4,8,16", "--seed", "5", "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_normalform(capsys):
    code, out, _ = run(capsys, "normalform", "--word", "ad(0) a(3) ad(3) a(1)")
    assert code == 0
    assert out.splitlines()[0] == "1.0 * ad(0) a(1) - 1.0 * ad(0) ad(2) a(2) a(1) - 1.0 * ad(0) ad(3) a(3) a(1)"


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--engine", "monotone", "--check", "symsh")
    assert code == 0 and "hypothesis not met" in out
    code, out, _ = run(capsys, "moments", "--engine", "haagerup", "--lambda", "0.5")
    assert code == 0 and "symsh: holds" in out


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# grid point\nengine = q\nq = 0.9\nwindow = 0:1\ndepth = 2\n")
    code, out, _ = run(capsys, "relations", "--config", str(cfg), "--q", "0.3")
    assert code == 0 and "q=0.3 window=0:1 depth=2" in out


@pytest.mark.parametrize(
    "argv,field",
    [
        (["relations", "--engine", "q", "--q", "1.5"], "q"),
        (["moments", "--engine", "boolean", "--gamma", "2"], "gamma"),
        (["ergodic", "--engine", "q", "--q", "0.3", "--scales", "8,4"], "scales"),
        (["haagerup", "--lambda", "0"], "lambda"),
    ],
)
def test_config_errors_exit_2(capsys, argv, field):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith(f"error: {field}")


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "relations", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["relations", "--engine", "bosonic"])
    assert exc.value.code == 2
