import json
from fractions import Fraction

import pytest

from fbasis.chain import ChainError, ChainSpec
from fbasis.cli import main, parse_list, parse_seeds, run, run_batch
from fbasis.fixtures import Bounds, RunConfig, fixture_gen


def invoke(capsys, *argv):
    status = main(list(argv))
    lines = capsys.readouterr().out.strip().splitlines()
    return status, [json.loads(x) for x in lines]


def only(capsys, *argv):
    status, reports = invoke(capsys, *argv)
    assert len(reports) == 1
    return status, reports[0]


# ---------------------------------------------------------------- commands

def test_sp_all_methods_off_shell(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2", "--method", "all",
                       "--lambda", "4", "--t", "5")
    assert status == 0 and rep["pass"]
    vals = rep["values"]
    for route in ("direct", "subset-sum", "fbasis"):
        assert vals[route] == "19/24"
    assert vals["slavnov"].startswith("skipped")
    assert rep["schema"] == "1" and rep["field"] == "exact"
    assert rep["seed"] == 0 and "wall_time" in rep


def test_sp_all_methods_on_shell(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2", "--lambda", "4",
                       "--t", "3/2")
    assert status == 0
    assert {rep["values"][k] for k in ("direct", "subset-sum", "fbasis",
                                       "slavnov", "jacobian")} == {"-2/3"}
    assert rep["values"]["onshell_residuals"] == ["0"]


def test_sp_single_method(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2", "--lambda", "4",
                       "--t", "3/2", "--method", "slavnov")
    assert status == 0 and rep["values"]["slavnov"] == "-2/3"
    assert rep["inputs"]["method"] == "slavnov"


def test_slavnov_off_shell_is_an_error(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2", "--lambda", "4",
                       "--t", "5", "--method", "slavnov")
    assert status == 1 and rep["error"]["type"] == "OffShellError"


def test_norm(capsys):
    status, rep = only(capsys, "norm", "--xi", "0,2", "--t", "3/2")
    assert status == 0
    assert rep["values"] == {"gaudin": "8/3", "direct": "8/3"}


def test_verify_factorization_n4(capsys):
    status, rep = only(capsys, "verify-factorization", "--n", "4",
                       "--xi", "1/3,5/2,-7/4,9/5", "--eta", "2/3")
    assert status == 0 and rep["pass"] and len(rep["checks"]) >= 4


def test_chain_validate(capsys):
    status, rep = only(capsys, "chain", "validate", "--xi", "0,2,7")
    assert status == 0 and rep["command"] == "validate"


def test_phi(capsys):
    status, rep = only(capsys, "phi", "--xi", "0,2", "--t", "0,4")
    assert status == 0 and rep["values"]["det"] == "1/3"


def test_solve_bae(capsys):
    status, rep = only(capsys, "solve-bae", "--xi", "0,2", "--m", "1",
                       "--seeds", "1.2")
    assert status == 0
    (roots,) = rep["values"]["root_sets"]
    assert roots["roots"] == ["3/2"] and roots["certified"]


def test_solve_bae_float_seeds(capsys):
    status, rep = only(capsys, "solve-bae", "--xi", "1/3,5/2,-7/4,9/5",
                       "--m", "2", "--seeds=-0.2,2.6;1.2-0.3j,1.2+0.3j")
    assert status == 0 and len(rep["values"]["root_sets"]) == 2


def test_identities_report_expected_failure(capsys):
    status, rep = only(capsys, "identities", "--count", "6")
    assert status == 0
    checks = {c["name"]: c for c in rep["checks"]}
    assert checks["phi_vanishing"]["expected_failure"]
    assert checks["phi_vanishing"]["passed_fixtures"] == 0
    assert all(c["pass"] for n, c in checks.items() if n != "phi_vanishing")
    assert len(rep["values"]["reports"]) == 6 * len(checks)


def test_all(capsys):
    status, rep = only(capsys, "all", "--xi", "0,2,7", "--count", "3")
    assert status == 0 and rep["pass"]


def test_decimal_input_forces_float(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2.0", "--lambda", "4",
                       "--t", "5", "--method", "direct")
    assert status == 0 and rep["field"] == "float"


def test_out_file_appends(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    for _ in range(2):
        assert main(["norm", "--xi", "0,2", "--t", "3/2", "--out",
                     str(out)]) == 0
    assert capsys.readouterr().out == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and json.loads(lines[1])["values"]["gaudin"] == "8/3"


# ---------------------------------------------------------------- errors

@pytest.mark.parametrize("argv,word", [
    (["chain", "validate", "--xi", "0,1"], "eta"),
    (["chain", "validate", "--xi", "0,0"], "coincide"),
    (["chain", "validate", "--n", "3", "--xi", "0,2"], "--n"),
    (["sp", "--xi", "0,2", "--t", "three", "--lambda", "4"], ""),
])
def test_config_errors_exit_2(capsys, argv, word):
    status, rep = only(capsys, *argv)
    assert status == 2 and not rep["pass"]
    assert word in rep["error"]["message"]


def test_pole_collision_reported(capsys):
    status, rep = only(capsys, "sp", "--xi", "0,2", "--lambda", "1",
                       "--t", "5", "--method", "direct")
    assert status == 1 and rep["error"]["type"] == "PoleError"


def test_missing_chain():
    status, rep = run(RunConfig(None, "sp", t=(1,), lam=(2,)))
    assert status == 1 and "chain" in rep["error"]["message"]


def test_bad_method():
    with pytest.raises(ValueError):
        RunConfig(None, "sp", method="guess")


def test_parsers():
    assert parse_list("3/2, 4") == (Fraction(3, 2), Fraction(4))
    assert parse_list(None) == () and parse_seeds(None) == ()
    assert parse_seeds("1,2;3,4") == ((1, 2), (3, 4))


# ---------------------------------------------------------------- fixtures

def test_fixture_gen_is_byte_identical():
    a = fixture_gen(1, 1, Bounds(n=(2, 2)))
    b = fixture_gen(1, 1, Bounds(n=(2, 2)))
    dump = [json.dumps(c.chain.to_json(), sort_keys=True) for c in (*a, *b)]
    assert dump[0] == dump[1] and a[0].chain.n == 2


def test_fixture_gen_fifty_valid():
    configs = fixture_gen(7, 50)
    assert len(configs) == 50
    for c in configs:
        assert 2 <= c.chain.n <= 6
        ChainSpec.from_json(c.chain.to_json()).validate()
    assert len({c.seed for c in configs}) == 50


def test_fixture_gen_tight_bounds():
    # only integers 0 and 1 with eta = 1: every pair differs by 0 or eta
    bounds = Bounds(n=(3, 3), numerator=(0, 1), denominator=(1, 1),
                    max_attempts=50)
    with pytest.raises(ChainError):
        fixture_gen(0, 1, bounds)


@pytest.mark.parametrize("kw", [dict(denominator=(0, 3)),
                                dict(numerator=(3, 1)), dict(n=(0, 2))])
def test_bounds_validation(kw):
    with pytest.raises(ValueError):
        Bounds(**kw)


# ---------------------------------------------------------------- batch

def test_batch_is_deterministic_across_workers(tmp_path):
    configs = [RunConfig(c.chain, "verify-factorization", seed=c.seed)
               for c in fixture_gen(5, 4, Bounds(n=(2, 4)))]
    serial, pooled = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_batch(configs, 1, str(serial)) == 0
    assert run_batch(configs, 2, str(pooled)) == 0

    def strip(path):
        rows = [json.loads(x) for x in path.read_text().splitlines()]
        for r in rows:
            r.pop("wall_time")
        return rows

    assert strip(serial) == strip(pooled)


def test_batch_cli(capsys):
    status, reports = invoke(capsys, "verify-factorization", "--batch", "3",
                             "--max-n", "4", "--seed", "2")
    assert status == 0 and len(reports) == 3
    assert len({r["seed"] for r in reports}) == 3


def test_batch_rejects_xi(capsys):
    status, _ = invoke(capsys, "verify-factorization", "--batch", "3",
                       "--xi", "0,2")
    assert status == 2
