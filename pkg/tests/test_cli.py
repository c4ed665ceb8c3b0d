import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.cli import main
from sumprod.exact import ExactSet
from sumprod.field import FpSet
from sumprod.generate import SIZE_CAP, ConfigError, ExperimentConfig, generate
from sumprod.report import ASSERTIONS
from sumprod.runner import run


def lines(text):
    return [json.loads(x) for x in text.splitlines()]


def test_generate_examples():
    assert generate({"kind": "geometric", "n": 4}) == ExactSet([2, 4, 8, 16])
    assert generate({"kind": "convex-squares", "n": 5}) == ExactSet([1, 4, 9, 16, 25])
    assert generate({"kind": "ap", "n": 3, "start": "1/2", "step": 2}) == ExactSet([Fraction(1, 2), Fraction(5, 2), Fraction(9, 2)])
    spec = {"kind": "random", "size": 10}
    first = generate(spec, seed=42)
    assert len(first) == 10
    assert all(generate(spec, seed=42) == first for _ in range(3))
    assert generate(spec, seed=43) != first
    frac = generate({"kind": "random", "size": 20, "max_den": 4, "seed": 1})
    assert len(frac) == 20 and generate({"kind": "random", "size": 20, "max_den": 4, "seed": 1}) == frac


def test_generate_field_and_literal(tmp_path):
    F = generate({"kind": "random", "size": 6, "p": 13}, seed=1)
    assert isinstance(F, FpSet) and len(F) == 6
    assert generate({"kind": "literal", "elements": [1, 14], "p": 13}).elements == [1]
    assert generate([1, "1/2", {"n": 3, "d": 4}]) == ExactSet([1, Fraction(1, 2), Fraction(3, 4)])
    path = tmp_path / "set.json"
    path.write_text("[3, 1, 2]")
    assert generate({"kind": "file", "path": str(path)}) == ExactSet([1, 2, 3])


def test_generate_rejects_bad_specs():
    with pytest.raises(ConfigError):
        generate({"kind": "ap", "n": SIZE_CAP + 1})
    with pytest.raises(ConfigError):
        generate({"kind": "random", "size": 300, "lo": 0, "hi": 10})
    with pytest.raises(ConfigError):
        generate({"kind": "spiral", "n": 3})
    with pytest.raises(ConfigError):
        generate({"kind": "geometric"})
    with pytest.raises(ConfigError):
        generate({"kind": "ap", "n": 2, "step": "1/2", "p": 13})


json_scalars = st.one_of(st.integers(-100, 100), st.text(max_size=5), st.booleans())
configs = st.builds(
    ExperimentConfig,
    command=st.sampled_from(["sets", "ratio", "sweep"]),
    sets=st.dictionaries(st.sampled_from(["A", "B", "C"]), st.lists(st.integers(-9, 9), max_size=5)),
    params=st.dictionaries(st.text(min_size=1, max_size=4), json_scalars, max_size=4),
    seed=st.integers(0, 10**6),
    out=st.one_of(st.none(), st.text(min_size=1, max_size=8)),
)


@given(configs)
def test_config_round_trip(cfg):
    again = ExperimentConfig.from_json(json.loads(cfg.dumps()))
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"sets": {}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"command": "sets", "colour": 1})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(bad)
    with pytest.raises(ConfigError):
        run(ExperimentConfig("draw"))


def test_reports_are_byte_identical():
    cfg = ExperimentConfig("ratio", {"A": {"kind": "random", "size": 9}}, {"explore": True}, seed=5)
    a, b = run(cfg).to_jsonl(), run(ExperimentConfig.from_json(cfg.to_json())).to_jsonl()
    assert a == b
    rows = lines(a)
    assert rows[0]["header"]["seed"] == 5
    assert rows[-1]["summary"] is True


def test_every_verdict_cites_a_known_assertion():
    cfgs = [
        ExperimentConfig("sets", {"A": [1, 2, 3], "B": [0, 5], "C": [7, 9]}),
        ExperimentConfig("energy", {"A": [1, 2, 4, 8]}),
        ExperimentConfig("triples", {"A": [0, 1, 3]}),
        ExperimentConfig("triples", {"A": {"kind": "literal", "elements": [0, 1, 3], "p": 13}}),
        ExperimentConfig("ratio", {"A": [0, 1, 2, 5]}),
        ExperimentConfig("ratio", {"A": {"kind": "literal", "elements": [0, 1, 2], "p": 13}}),
        ExperimentConfig("szt", {"A": {"kind": "convex-squares", "n": 5}}, {"convex": True, "samples": 20}),
        ExperimentConfig("subgroup", params={"p": 13, "d": 6, "k": [1, 2]}),
        ExperimentConfig("clique", params={"p": 13, "d": 6}),
        ExperimentConfig("extremal", params={"n": [3, 4]}),
    ]
    for cfg in cfgs:
        rep = run(cfg)
        assert rep.verdicts, cfg.command
        for v in rep.verdicts:
            assert v.assertion in ASSERTIONS


def test_ratio_rows_are_labeled():
    rep = run(ExperimentConfig("ratio", {"A": [0, 1, 2, 5]}))
    ratio_rows = [r for r in rep.rows if isinstance(r, dict) and r.get("ratio") is not None]
    assert ratio_rows
    assert all(r["assert"].startswith("no-assert") for r in ratio_rows)


def test_extremal_n3_row(capsys):
    assert main(["extremal", "--n", "3"]) == 0
    out = lines(capsys.readouterr().out)
    rows = {r["row"]["quantity"]: r["row"]["value"] for r in out if "row" in r}
    assert rows == {"|D|": 7, "|DD|": 13, "|D/D|": 15}


def test_empty_inputs_do_not_crash(capsys):
    for cmd in ("sets", "energy", "ratio", "triples", "szt"):
        code = main([cmd, "--A", "[]"])
        assert code == 0, cmd
        out = lines(capsys.readouterr().out)
        assert out[-1]["ok"] is True


def test_exit_codes(capsys, tmp_path):
    assert main(["clique", "--p", "15", "--d", "2"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValueError"
    # the literal sandwich fails for {0, 1}: exit code 1
    assert main(["ratio", "--A", "[0, 1]"]) == 1
    assert main(["ratio", "--A", "[0, 1, 2]"]) == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "sets", "sets": {"A": [1, 2]}, "seed": 3}))
    out = tmp_path / "report.jsonl"
    assert main(["sets", "--config", str(cfg), "--out", str(out)]) == 0
    assert lines(out.read_text())[0]["header"]["seed"] == 3


def test_sweep_writes_csv(tmp_path, capsys):
    csv_path = tmp_path / "sweep.csv"
    assert main(["sweep", "--p-min", "3", "--p-max", "13", "--csv", str(csv_path)]) == 0
    text = csv_path.read_text().splitlines()
    assert text[0].startswith("p,d,xi,gamma_size,max_A,optimal")
    assert any(line.startswith("13,6,1,6,3,True") for line in text)


def test_budget_flag_reports_incumbent(capsys):
    assert main(["clique", "--p", "97", "--d", "48", "--budget", "1"]) == 0
    out = lines(capsys.readouterr().out)
    assert out[1]["row"]["optimal"] is False
    assert any("budget" in n for n in out[-1]["notes"])


def test_verify_identities_seed_7(capsys):
    code = main(["verify-identities", "--seed", "7"])
    out = lines(capsys.readouterr().out)
    counts = next(r["row"]["value"] for r in out if "row" in r)["verdicts"]
    # every identity passes except the literal sandwich, which fails exactly at -1
    failing = {k for k, c in counts.items() if c.get("fail")}
    assert failing <= {"ratio.sandwich", "fp.sandwich"}
    assert code == (1 if failing else 0)
    side = next(r["row"]["value"] for r in out if "row" in r)["D/D in R[A]R[A] | {-1} (side check)"]
    assert side["ratio.sandwich-minus-one"].get("fail", 0) == 0


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sumprod.cli", "extremal", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert lines(proc.stdout)[-1]["ok"] is True
