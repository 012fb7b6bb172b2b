import json

import pytest
from hypothesis import given

from ckscope.cli import run
from ckscope.corpus import resolve, verify_corpus
from ckscope.hilbert import BUILTINS, builtin_proof, check_proof
from ckscope.io import (
    FormatError,
    frame_from_dict,
    frame_to_dict,
    load_model,
    model_from_dict,
    model_to_dict,
    proof_from_dict,
    proof_to_dict,
    to_dot,
)
from ckscope.kripke import FrameError, ValuationError
from ckscope.search import enumerate_frames

from .conftest import frames, models


# JSON formats ------------------------------------------------------------------


@given(models(4))
def test_model_json_round_trip(m):
    data = json.loads(json.dumps(model_to_dict(m)))
    assert model_from_dict(data) == m


@given(frames(4))
def test_frame_json_round_trip(fr):
    assert frame_from_dict(frame_to_dict(fr)) == fr


@pytest.mark.parametrize("name", list(BUILTINS))
def test_proof_json_round_trip(name):
    proof, axioms = builtin_proof(name)
    again, ax2 = proof_from_dict(json.loads(json.dumps(proof_to_dict(proof, axioms))))
    assert again == proof and ax2 == axioms
    assert check_proof(again, ax2)


def test_worlds_by_index_and_closure_flag():
    fr = frame_from_dict({"worlds": ["a", "b", "c"], "bomb": 2, "leq": [[0, 1], [1, 2]], "r": [[2, 2]], "auto_close_leq": True})
    assert fr.leq[0] == 0b111
    with pytest.raises(FrameError):
        frame_from_dict({"worlds": ["a", "b", "c"], "bomb": 2, "leq": [[0, 1], [1, 2]], "r": [[2, 2]]})


@pytest.mark.parametrize(
    "data, error",
    [
        ([], FormatError),
        ({"worlds": [], "bomb": 0}, FormatError),
        ({"worlds": ["a", "a"], "bomb": "a"}, FormatError),
        ({"worlds": ["a"], "r": [["a", "a"]]}, FormatError),
        ({"worlds": ["a"], "bomb": "z", "r": [["a", "a"]]}, FormatError),
        ({"worlds": ["a"], "bomb": "a", "r": [["a"]]}, FormatError),
        ({"worlds": ["a"], "bomb": "a", "r": "aa"}, FormatError),
        ({"worlds": ["a"], "bomb": "a", "r": [["a", "a"]], "auto_close_leq": "yes"}, FormatError),
        ({"worlds": ["a", "b"], "bomb": "a", "leq": [["a", "b"]], "r": [["a", "a"]], "auto_close_leq": True}, FrameError),
        ({"worlds": ["a", "b"], "bomb": "b", "r": [["b", "b"]], "auto_close_leq": True, "valuation": {"p": ["a"]}}, ValuationError),
        ({"worlds": ["a", "b"], "bomb": "b", "r": [["b", "b"]], "auto_close_leq": True, "valuation": {"p": "b"}}, FormatError),
    ],
)
def test_malformed_models_are_rejected(data, error):
    with pytest.raises(error):
        model_from_dict(data)


def test_malformed_proofs_are_rejected():
    for data in (
        {"lines": "x"},
        {"axioms": ["Zz"], "lines": []},
        {"lines": [{"formula": "p ->", "rule": "El"}]},
        {"lines": [{"formula": "p", "rule": "MP", "refs": ["0"]}]},
        {"lines": [{"formula": "p"}]},
        {"lines": [{"formula": "p", "rule": "Ax", "subst": ["p"]}]},
    ):
        with pytest.raises(FormatError):
            proof_from_dict(data)


# DOT -----------------------------------------------------------------------------


def dot_edges(text):
    solid = [ln for ln in text.splitlines() if "->" in ln and "dashed" not in ln]
    dashed = [ln for ln in text.splitlines() if "->" in ln and "dashed" in ln]
    return solid, dashed


def test_dot_single_world():
    text = to_dot(next(enumerate_frames(1)))
    assert text.count("doublecircle") == 1
    solid, dashed = dot_edges(text)
    assert solid == [] and len(dashed) == 1 and '"bomb" -> "bomb"' in dashed[0]


def test_dot_fig2a_structure(corpus_file):
    text = to_dot(load_model(corpus_file("fig2a.json")))
    nodes = [ln for ln in text.splitlines() if "label=" in ln and "->" not in ln]
    solid, dashed = dot_edges(text)
    assert len(nodes) == 3 and len(solid) == 1 and len(dashed) == 2
    assert all('label="R"' in ln for ln in dashed)


def test_dot_lists_valuation_and_is_deterministic(corpus_file):
    m = load_model(corpus_file("fig5b_wcdb.json"))
    text = to_dot(m)
    assert 'label="z\\np"' in text and 'label="bomb\\np,q"' in text
    assert text == to_dot(load_model(corpus_file("fig5b_wcdb.json")))


@given(models(4))
def test_dot_parses_with_graphviz_grammar(m):
    pydot = pytest.importorskip("pydot")
    graphs = pydot.graph_from_dot_data(to_dot(m))
    assert graphs and len(graphs[0].get_nodes()) >= m.frame.n
    n_edges = sum(1 for x, y in m.frame.leq_pairs() if x != y) + len(m.frame.r_pairs())
    assert len(graphs[0].get_edges()) == n_edges


def test_dot_escapes_awkward_names():
    pydot = pytest.importorskip("pydot")
    fr = frame_from_dict({"worlds": ['a"b', "c\\d", "bomb"], "bomb": "bomb", "leq": [[0, 1]], "r": [[2, 2]]} | {"auto_close_leq": True})
    graphs = pydot.graph_from_dot_data(to_dot(fr))
    assert graphs


# corpus --------------------------------------------------------------------------


def test_corpus_reproduces_every_verdict():
    results = verify_corpus()
    assert len(results) >= 20
    assert all(r.ok for r in results), [r for r in results if not r.ok]


def test_corpus_path_fallback(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert resolve("corpus/fig2a.json").exists()
    assert str(resolve("elsewhere.json")) == "elsewhere.json"


# CLI -----------------------------------------------------------------------------


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_check_frame_reports_false_and_exits_zero(capsys):
    code, out, _ = cli(capsys, "check-frame", "corpus/fig2a.json", "--conditions", "NdSuff")
    assert code == 0 and out.strip() == "NdSuff: false"


def test_cli_check_frame_explain_and_json(capsys):
    code, out, _ = cli(capsys, "check-frame", "corpus/fig2b.json", "--explain")
    assert code == 0 and "IdbWeak: false  (violated at x, u, v)" in out
    code, out, _ = cli(capsys, "check-frame", "corpus/fig2b.json", "--json")
    data = json.loads(out)
    assert data["IdbCorr"]["holds"] and data["IdbSuff"]["witness"] == ["x", "u", "v"]
    code, _, err = cli(capsys, "check-frame", "corpus/fig2b.json", "--conditions", "Bogus")
    assert code == 2 and "unknown condition" in err


def test_cli_parse_and_print(capsys):
    code, out, _ = cli(capsys, "parse", "<>bot -> bot")
    assert code == 0 and out.startswith("Imp\n  Dia")
    code, out, _ = cli(capsys, "print", "(p -> (q -> r))")
    assert code == 0 and out.strip() == "p -> q -> r"
    code, out, _ = cli(capsys, "parse", "~p", "--json")
    assert json.loads(out)["formula"] == "p -> bot"
    code, _, err = cli(capsys, "parse", "(p")
    assert code == 2 and "unbalanced parenthesis" in err


def test_cli_usage_errors(capsys):
    assert cli(capsys, "frobnicate")[0] == 2
    assert cli(capsys)[0] == 2
    assert cli(capsys, "decide")[0] == 2
    code, _, err = cli(capsys, "model-check", "missing.json", "p")
    assert code == 2 and "cannot read" in err


def test_cli_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = cli(capsys, "dot", str(bad))
    assert code == 2 and "malformed JSON" in err
    bad.write_text(json.dumps({"worlds": ["a", "b"], "bomb": "a", "leq": [["a", "b"]], "r": [["a", "a"]], "auto_close_leq": True}))
    code, _, err = cli(capsys, "check-frame", str(bad))
    assert code == 2 and "bomb not maximal" in err


def test_cli_model_check(capsys):
    code, out, _ = cli(capsys, "model-check", "corpus/fig5a.json", "~~[]p -> []~~p", "--at", "x")
    assert code == 1 and "does not force" in out
    code, out, _ = cli(capsys, "model-check", "corpus/fig5a.json", "~~[]p", "--at", "x")
    assert code == 0
    code, out, _ = cli(capsys, "model-check", "corpus/fig5a.json", "p -> p", "--json")
    assert code == 0 and json.loads(out)["true_at"] == ["x", "y", "z", "bomb"]
    code, _, err = cli(capsys, "model-check", "corpus/fig5a.json", "p", "--at", "nowhere")
    assert code == 2


def test_cli_frame_valid(capsys):
    assert cli(capsys, "frame-valid", "corpus/fig2a.json", "<>bot -> bot")[0] == 0
    code, out, _ = cli(capsys, "frame-valid", "corpus/fig2b.json", "(<>p -> []q) -> [](p -> q)")
    assert code == 0
    code, out, _ = cli(capsys, "frame-valid", "corpus/fig2a.json", "p \\/ ~p", "--json")
    assert code == 1 and json.loads(out)["countermodel"]["world"] in ("x", "y")


def test_cli_decide_emits_reloadable_model(capsys, tmp_path):
    out_json, out_dot = tmp_path / "m.json", tmp_path / "m.dot"
    code, out, _ = cli(capsys, "decide", "~~[]bot -> []bot", "--max-worlds", "4",
                       "--emit-model", str(out_json), "--dot", str(out_dot))
    assert code == 1 and "countermodel" in out
    m = load_model(out_json)
    w = m.frame.index(out.split("fails at ")[1].split()[0])
    from ckscope.kripke import forces
    from ckscope.syntax import NN_BOX_BOT

    assert not forces(m, w, NN_BOX_BOT)
    assert out_dot.read_text().startswith("digraph")


def test_cli_decide_json_and_exhausted(capsys):
    code, out, _ = cli(capsys, "decide", "p -> p", "--max-worlds", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["outcome"] == "exhausted" and data["stats"]["frames_examined"] == 777
    code, out, _ = cli(capsys, "decide", "~~[]p -> []~~p", "--axioms", "Ndb,Cd,Idb", "--mode", "suff",
                       "--max-worlds", "4", "--json")
    data = json.loads(out)
    assert code == 1 and data["outcome"] == "countermodel"
    assert model_from_dict(data["model"]).frame.n == len(data["model"]["worlds"])


def test_cli_decide_cap(capsys, monkeypatch):
    monkeypatch.setenv("CKSCOPE_MAX_FRAMES", "50")
    code, _, err = cli(capsys, "decide", "p", "--max-worlds", "3")
    assert code == 2 and "cap exceeded" in err


def test_cli_decide_unknown_axiom(capsys):
    code, _, err = cli(capsys, "decide", "p", "--axioms", "Nope")
    assert code == 2 and "unknown axiom" in err


def test_cli_audit(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = cli(capsys, "audit", "--axiom", "Idb", "--max-worlds", "2", "--spot", "corpus/fig2b.json",
                       "--report", str(report))
    assert code == 0 and "PASS" in out
    data = json.loads(report.read_text())
    assert data["passed"] and data["spot_checks"][0]["valid"] and not data["spot_checks"][0]["suff"]


def test_cli_transform(capsys, tmp_path):
    out_json = tmp_path / "t.json"
    code, out, _ = cli(capsys, "transform", "corpus/fig5b_eq7.json", "--op", "plus-duplicate",
                       "--check-preservation", "--depth", "3", "--emit", str(out_json))
    assert code == 0 and "preservation: pass" in out and "NdCorr: true" in out
    assert load_model(out_json).frame.n == 9
    code, out, _ = cli(capsys, "transform", "corpus/fig5b_eq7.json", "--op", "bomb-saturate", "--json")
    assert code == 0 and json.loads(out)["conditions"] == {"CdStrong": True, "IdbCorr": True}


def test_cli_builtin_and_check_proof(capsys, tmp_path):
    code, out, _ = cli(capsys, "builtin")
    assert code == 0 and out.split() == list(BUILTINS)
    pf = tmp_path / "p.json"
    code, out, _ = cli(capsys, "builtin", "grefe_consequence_nd_idb", "--emit", str(pf))
    assert code == 0 and "accepted" in out
    assert cli(capsys, "check-proof", str(pf))[0] == 0
    code, out, _ = cli(capsys, "check-proof", str(pf), "--axioms", "Nd")
    assert code == 1 and "schema not in axiom set: Idb" in out
    code, out, _ = cli(capsys, "check-proof", "corpus/proofs/wcd_from_idb.json", "--json")
    assert code == 0 and json.loads(out)["accepted"]


def test_cli_dot(capsys, tmp_path):
    code, out, _ = cli(capsys, "dot", "corpus/fig2a.json")
    assert code == 0 and out.startswith("digraph")
    target = tmp_path / "g.dot"
    code, out, _ = cli(capsys, "dot", "corpus/fig2a.json", "-o", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("digraph")


def test_cli_corpus_verify(capsys):
    code, out, _ = cli(capsys, "corpus", "verify")
    assert code == 0 and "corpus checks reproduced" in out
    code, out, _ = cli(capsys, "corpus", "verify", "--entry", "fig2a", "--json")
    assert code == 0 and all(r["ok"] for r in json.loads(out))
    code, _, _ = cli(capsys, "corpus", "verify", "--entry", "nope")
    assert code == 2
