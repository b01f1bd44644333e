import io
import json

import pytest

from dilators.cli import run

OMEGA = '{"op":"omega"}'


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue().strip(), err.getvalue().strip()


def test_predil_compare_example():
    code, out, _ = call("predil", "compare", "--predilator", "two-power", "--carrier", OMEGA,
                        '{"sigma":1,"support":[5]}', '{"sigma":3,"support":[2,5]}')
    assert (code, out) == (0, "Less")


def test_predil_compare_json():
    code, out, _ = call("predil", "compare", "--carrier", OMEGA, "--json",
                        '{"sigma":3,"support":[2,5]}', '{"sigma":1,"support":[5]}')
    assert code == 0 and json.loads(out) == {"result": "Greater"}


def test_validate_dl_omega():
    code, out, _ = call("predil", "validate", "--predilator", "dl:omega", "--levels", "4")
    assert code == 0 and out.startswith("pass")


def test_validate_json_report():
    code, out, _ = call("predil", "validate", "--predilator", "E", "--levels", "2", "--json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_order_compare_and_enum():
    assert call("order", "compare", "--carrier", OMEGA, "3", "7")[:2] == (0, "Less")
    code, out, _ = call("order", "enum", "--carrier", '{"op":"nat","k":3}', "--count", "5", "--json")
    assert code == 0 and json.loads(out) == [0, 1, 2]


@pytest.mark.parametrize("argv", [
    ("order", "compare", "--carrier", OMEGA, "[1", "2"),
    ("order", "compare", "--carrier", OMEGA, '"x"', "2"),
    ("order", "compare", "--carrier", '{"op":"bogus"}', "1", "2"),
    ("predil", "validate", "--predilator", "nope"),
    ("predil", "compare", "--carrier", OMEGA, '{"sigma":1,"support":[5,6]}', '{"sigma":1,"support":[5]}'),
    ("order", "enum", "--carrier", "@/nonexistent/file.json"),
    ("lab", "probe", "--depth", "-1", "--carrier", OMEGA),
    ("no-such-group",),
])
def test_input_errors_exit_2(argv):
    code, _, err = call(*argv)
    assert code == 2


def test_diagnostic_names_document():
    _, _, err = call("order", "compare", "--carrier", OMEGA, "[1", "2")
    assert "<x>" in err
    _, _, err = call("order", "enum", "--carrier", "@/nonexistent/file.json")
    assert "/nonexistent/file.json" in err


def test_documents_from_files(tmp_path):
    f = tmp_path / "carrier.json"
    f.write_text(OMEGA)
    assert call("order", "compare", "--carrier", f"@{f}", "9", "2")[:2] == (0, "Greater")


def test_calculus_profile():
    code, out, _ = call("calculus", "profile", "--json", '{"sigma":1,"level":1}', '{"sigma":3,"level":2}')
    prof = json.loads(out)
    assert code == 0 and set(prof) == {"P", "p", "eps", "piLeft", "piRight"}
    code, rev, _ = call("calculus", "profile", "--json", '{"sigma":3,"level":2}', '{"sigma":1,"level":1}')
    assert json.loads(rev)["eps"] == -prof["eps"] and json.loads(rev)["p"] == prof["p"]
    assert call("calculus", "profile", '{"sigma":1,"level":1}', '{"sigma":1,"level":1}')[0] == 2
    assert call("calculus", "profile", '{"sigma":1,"level":2}', '{"sigma":1,"level":1}')[0] == 2


def test_trace():
    code, out, _ = call("predil", "trace", "--level", "2", "--json")
    assert code == 0 and json.loads(out) == [{"level": 2, "sigma": 3}]


def test_descent_and_extract(tmp_path):
    code, out, _ = call("lab", "descent", "--L", "rev-omega", "--count", "3", "--embed")
    doc = json.loads(out)
    assert code == 0 and len(doc["terms"]) == 4 and "embedding" in doc
    del doc["embedding"]
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(doc))
    code, out, _ = call("lab", "extract", f"@{path}")
    assert code == 0 and "status" in json.loads(out)


def test_eta_commands():
    code, out, _ = call("lab", "eta-power", "--gamma", '{"op":"nat","k":2}', "--carrier", OMEGA,
                        "--L", "rev-omega", '{"terms":[[1,5],[0,7]]}')
    assert code == 0 and len(json.loads(out)["support"]) == 2
    data = '{"r":1,"h":[[0],[1],[2]],"N":[0,1,2]}'
    code, out, _ = call("lab", "eta-scattered", "--data", data, "--carrier", '{"op":"nat","k":3}', '{"exps":[2,0]}')
    assert code == 0 and len(json.loads(out)["support"]) == 2


def test_probe_exit_codes():
    rev = '{"op":"rev-omega"}'
    code, out, _ = call("lab", "probe", "--carrier", rev, "--depth", "3")
    assert code == 0 and json.loads(out)["status"] == "certificate"
    assert call("lab", "probe", "--carrier", rev, "--depth", "3", "--expect-exhausted")[0] == 1
    code, out, _ = call("lab", "probe", "--carrier", '{"op":"nat","k":3}', "--expect-exhausted")
    assert code == 0 and json.loads(out)["status"] == "exhausted"


def test_limit_tree_command():
    code, out, _ = call("lab", "limit-tree", '{"l":3,"d":[[0,0,0],[1,0,0],[1,1,0]]}')
    assert code == 0 and json.loads(out)["check"]["passed"]


def test_output_is_deterministic():
    argv = ("lab", "descent", "--L", "zigzag", "--count", "5", "--embed")
    assert call(*argv) == call(*argv)


def test_selftest_subset():
    code, out, _ = call("selftest", "--only", "3", "4")
    assert code == 0 and out.splitlines()[-1] == "2/2 criteria passed"
