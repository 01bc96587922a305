import json

import pytest

from multical import (
    DatasetError,
    DomainViolation,
    PredictionSpace,
    RunConfig,
    audit_class,
    build_lower_bound_fixture,
    export_distribution,
    load_dataset,
)
from multical.cli import main, run_command
from multical.dataset import parse_config_text
from multical.synthetic import random_setup

THREE_ROWS = """id,y,pred:h,pred:g,group:A,group:B
a,1,0.5,0.9,1,0
b,0,0.5,0.1,1,1
c,1,0.25,0.9,0,1
"""


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_three_rows(tmp_path):
    ds = load_dataset(write(tmp_path, THREE_ROWS))
    assert ds.domain == ("a", "b", "c")
    assert [h.name for h in ds.predictors] == ["h", "g"]
    assert ds.groups["B"].members == frozenset({"b", "c"})
    assert ds.labels == (1, 0, 1)
    assert sum(o.prob for o in ds.distribution().support) == 1


def test_label_two_is_domain_violation(tmp_path):
    bad = THREE_ROWS.replace("a,1,0.5", "a,2,0.5")
    with pytest.raises(DomainViolation) as e:
        load_dataset(write(tmp_path, bad))
    assert (e.value.row, e.value.column) == (2, "y")


def test_prediction_out_of_range(tmp_path):
    with pytest.raises(DomainViolation) as e:
        load_dataset(write(tmp_path, THREE_ROWS.replace("c,1,0.25", "c,1,1.25")))
    assert (e.value.row, e.value.column) == (4, "pred:h")


def test_duplicate_id(tmp_path):
    with pytest.raises(DatasetError, match="'b'"):
        load_dataset(write(tmp_path, THREE_ROWS.replace("c,1,0.25", "b,1,0.25")))


@pytest.mark.parametrize("text", ["", "id,y\na,1\n", "id,y,pred:h,extra\na,1,0.5,1\n", "id,y,pred:h\na,1\n",
                                  "id,y,pred:h,group:G\na,1,0.5,0\n", "id,y,pred:h\na,1,abc\n"])
def test_malformed(tmp_path, text):
    with pytest.raises(DatasetError):
        load_dataset(write(tmp_path, text))


def test_no_groups_means_everyone(tmp_path):
    ds = load_dataset(write(tmp_path, "id,y,pred:h\na,1,0.5\nb,0,0.5\n"))
    assert [g.name for g in ds.groups] == ["all"]


def test_config_parsing(tmp_path):
    vals = parse_config_text("# comment\nalpha = 0.2\nlambda=0.5  # inline\nseed=7\nmode=finite-Y\n")
    assert vals == {"alpha": 0.2, "lam": 0.5, "seed": 7, "mode": "finite-Y"}
    with pytest.raises(ValueError):
        parse_config_text("nope=1")
    with pytest.raises(ValueError):
        RunConfig(lam=0.3)
    assert list(RunConfig().as_dict())[5] == "lambda"


def fixture_dataset(tmp_path, which="D2"):
    f = build_lower_bound_fixture(0.1, 0.5, 0.5)
    path = tmp_path / f"{which}.csv"
    export_distribution(getattr(f, which), f.H, f.groups, path, resolution=1000)
    return path


def run_json(capsys, argv):
    code = run_command(argv)
    return code, json.loads(capsys.readouterr().out)


def test_audit_fixture_d2_fails(tmp_path, capsys):
    path = fixture_dataset(tmp_path)
    code, rep = run_json(capsys, ["audit", "--data", str(path), "--mode", "finite-Y", "--alpha", "0.1",
                                  "--gamma", "0.5", "--psi", "0.5"])
    assert code == 1 and rep["results"]["verdict"] is False
    [bad] = [e for e in rep["results"]["predictors"][0]["entries"] if e["violation"]]
    assert bad["group"] == "U" and bad["interval"] == "{0.6}"
    assert bad["calibration_error"] == pytest.approx(-0.2, abs=1e-12)


def test_audit_fixture_d1_passes(tmp_path, capsys):
    # the file stores the float 0.6 against a label rate of exactly 3/5, so
    # alpha = 0 would be a knife edge; any positive alpha passes
    path = fixture_dataset(tmp_path, "D1")
    code, rep = run_json(capsys, ["audit", "--data", str(path), "--mode", "finite-Y", "--alpha", "1e-9",
                                  "--gamma", "0.5", "--psi", "0.5", "--source", "exact"])
    assert code == 0 and rep["results"]["verdict"] is True


def test_sample_size_example(capsys):
    code, rep = run_json(capsys, ["sample-size", "--epsilon", "0.1", "--delta", "0.1", "--gamma", "0.2",
                                  "--psi", "0.2", "--lambda", "0.25", "--card-gamma", "4", "--card-h", "16"])
    assert code == 0
    assert rep["results"]["finite_class_bound"] == 198545


def test_unknown_flag_exits_2(capsys):
    assert main(["audit", "--bogus"]) == 2
    assert main(["nonsense"]) == 2
    assert main([]) == 2


def test_bad_data_exits_2(tmp_path, capsys):
    assert run_command(["audit", "--data", str(tmp_path / "missing.csv")]) == 2
    assert run_command(["audit", "--data", str(write(tmp_path, THREE_ROWS.replace("a,1", "a,2")))]) == 2
    assert run_command(["sample-size", "--gamma", "1.5"]) == 2


def test_dims_limit_exits_3(tmp_path, capsys):
    rows = "".join(f"p{i},{i % 2},{(i % 3) / 4}\n" for i in range(13))
    assert run_command(["dims", "--data", str(write(tmp_path, "id,y,pred:h\n" + rows))]) == 3


def test_dims_small(tmp_path, capsys):
    code, rep = run_json(capsys, ["dims", "--data", str(write(tmp_path, THREE_ROWS))])
    assert code == 0 and rep["results"]["lemma_graph_holds"] and rep["results"]["lemma_phi_holds"]


def test_verify_and_lower_bound_demo(tmp_path, capsys):
    path = fixture_dataset(tmp_path, "D1")
    code, rep = run_json(capsys, ["verify", "--data", str(path), "--mode", "finite-Y", "--gamma", "0.5",
                                  "--psi", "0.5", "--trials", "20", "--m", "2000", "--epsilon", "0.1"])
    assert code == 0 and len(rep["results"]["trials"]) == 20
    code, rep = run_json(capsys, ["lower-bound-demo", "--epsilon", "0.1", "--gamma", "0.5", "--psi", "0.5",
                                  "--trials", "50", "--factors", "0.25,4"])
    assert code == 0 and [r["factor"] for r in rep["results"]["grid"]] == [0.25, 4.0]


@pytest.mark.parametrize("seed", range(5))
def test_export_round_trip_verdicts(tmp_path, seed):
    setup = random_setup(seed, n_points=8, n_predictors=4, n_groups=3, resolution=400)
    path = tmp_path / "rt.csv"
    export_distribution(setup.D, setup.H, setup.groups, path, resolution=400)
    ds = load_dataset(path)
    space = PredictionSpace.finite(setup.space.values)
    for alpha in (0.0, 0.05, 0.2):
        before = [r.verdict for r in audit_class(setup.H, setup.groups, space.partition(), alpha, 0.1, 0.1, setup.D)]
        after = [r.verdict for r in audit_class(ds.predictors, ds.groups, space.partition(), alpha, 0.1, 0.1,
                                                ds.distribution())]
        assert before == after


def test_reports_are_deterministic_and_carry_config(tmp_path):
    path = fixture_dataset(tmp_path, "D1")
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        run_command(["verify", "--data", str(path), "--mode", "finite-Y", "--trials", "10", "--m", "500",
                     "--seed", "5", "--output", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    cfg = json.loads(outs[0])["config"]
    assert cfg == {**RunConfig().as_dict(), "mode": "finite-Y", "trials": 10, "seed": 5}


def test_flags_override_config(tmp_path, capsys):
    conf = write(tmp_path, "alpha=0.3\ngamma=0.4\n", "run.conf")
    code, rep = run_json(capsys, ["sample-size", "--config", str(conf), "--gamma", "0.2"])
    assert rep["config"]["alpha"] == 0.3 and rep["config"]["gamma"] == 0.2


def test_csv_output(tmp_path, capsys):
    path = fixture_dataset(tmp_path)
    out = tmp_path / "entries.csv"
    run_command(["audit", "--data", str(path), "--mode", "finite-Y", "--csv", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0].startswith("predictor,group,interval")
    assert len(lines) == 1 + 2 * 2
