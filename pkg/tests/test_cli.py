"""Exit codes and output of every CLI subcommand, run in-process."""

import contextlib
import io
import json
from pathlib import Path

import pytest

from proofmill.cli import run
from proofmill.hilbert import (
    assumption,
    axiom_leaf,
    deduction_to_json,
    modus_ponens,
)
from proofmill.semantics import model_from_json, model_to_json, random_model
from proofmill.syntax import parse_formula, parse_system

CORPUS_DIR = str(Path(__file__).resolve().parent.parent / "corpus")
MILL = parse_system("MILL")


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestProve:
    def test_proved_exits_zero(self):
        code, out, _ = cli("prove", "MILL", "p, p -o q |- q")
        assert code == 0
        assert out.splitlines()[0] == "Proved"
        assert "explored" in out

    def test_agents_inferred_from_sequent(self):
        code, out, _ = cli(
            "prove", "RSBIAT", "S, E[i]F, E[s]((S*F) -o T) |- T")
        assert code == 0
        assert out.splitlines()[0] == "Proved"

    def test_unprovable_exits_one_with_hint(self):
        code, out, _ = cli("prove", "MILL", "p |- q")
        assert code == 1
        assert out.splitlines()[0] == "Exhausted (unprovable)"
        assert "countermodel hint" in out

    def test_tree_verdict_word(self):
        code, out, _ = cli("prove", "PCMILL", "p @ q |- q @ p")
        assert code == 1
        assert out.splitlines()[0] == "not proved (bounded)"

    def test_depth_flag_bounds_search(self):
        code, out, _ = cli("prove", "MILL", "p * (q * r) |- (p * q) * r",
                           "--depth", "1")
        assert code == 1
        assert out.splitlines()[0] == "budget exceeded"

    def test_emit_proof_round_trips(self, tmp_path):
        path = tmp_path / "p.json"
        code, out, _ = cli("prove", "MILL", "p * q |- q * p",
                           "--emit-proof", str(path))
        assert code == 0
        assert f"proof written to {path}" in out
        data = json.loads(path.read_text())
        assert data["system"] == "MILL"

    def test_bad_system_is_usage_error(self):
        code, _, err = cli("prove", "NOPE", "p |- p")
        assert code == 2
        assert "unknown system" in err

    def test_bad_sequent_is_usage_error(self):
        code, _, err = cli("prove", "MILL", "p |-")
        assert code == 2
        assert "position" in err

    def test_agentless_agent_system_without_modalities(self):
        code, _, err = cli("prove", "RSBIAT", "p |- p")
        assert code == 2
        assert "agents" in err


class TestProofFiles:
    @pytest.fixture()
    def proof_path(self, tmp_path):
        path = tmp_path / "p.json"
        code, _, _ = cli("prove", "MILL", "p, p -o (q & r) |- r",
                         "--emit-proof", str(path))
        assert code == 0
        return path

    def test_check_proof_ok(self, proof_path):
        code, out, _ = cli("check-proof", str(proof_path))
        assert code == 0
        assert out.startswith("ok: ")
        assert "0 cuts" in out

    def test_check_proof_rejects_tampering(self, proof_path, tmp_path):
        data = json.loads(proof_path.read_text())
        data["proof"]["sequent"] = "p, p -o (q & r) |- q"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        code, out, _ = cli("check-proof", str(bad))
        assert code == 1
        assert "at node" in out

    def test_check_proof_missing_file(self, tmp_path):
        code, _, err = cli("check-proof", str(tmp_path / "nope.json"))
        assert code == 2
        assert "cannot read" in err

    def test_check_proof_bad_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{not json")
        code, _, err = cli("check-proof", str(path))
        assert code == 2
        assert "not valid JSON" in err

    def test_cut_eliminate_already_cut_free(self, proof_path):
        code, out, _ = cli("cut-eliminate", str(proof_path))
        assert code == 0
        assert "in 0 steps" in out

    def test_cut_eliminate_with_trace_and_emit(self, tmp_path):
        tree = modus_ponens(
            assumption(parse_formula("p", MILL)),
            axiom_leaf(parse_formula("p -o p", MILL), MILL),
        )
        ded = tmp_path / "d.json"
        ded.write_text(json.dumps(deduction_to_json(tree, MILL)))
        withcuts = tmp_path / "cuts.json"
        code, out, _ = cli("hilbert-to-sequent", str(ded),
                           "--emit-proof", str(withcuts))
        assert code == 0 and "cuts" in out
        cutfree = tmp_path / "nocuts.json"
        code, out, _ = cli("cut-eliminate", str(withcuts),
                           "--trace", "--emit-proof", str(cutfree))
        assert code == 0
        assert "cut-free proof of p |- p" in out
        code, out, _ = cli("check-proof", str(cutfree))
        assert code == 0
        assert "0 cuts" in out


class TestHilbert:
    @pytest.fixture()
    def deduction_path(self, tmp_path):
        tree = modus_ponens(
            assumption(parse_formula("p & q", MILL)),
            axiom_leaf(parse_formula("(p & q) -o p", MILL), MILL),
        )
        path = tmp_path / "d.json"
        path.write_text(json.dumps(deduction_to_json(tree, MILL)))
        return path

    def test_hilbert_check_ok(self, deduction_path):
        code, out, _ = cli("hilbert-check", str(deduction_path))
        assert code == 0
        assert out.startswith("ok: (p & q) |- p")

    def test_hilbert_check_rejects_wrong_claim(self, tmp_path,
                                               deduction_path):
        data = json.loads(deduction_path.read_text())
        data["tree"]["formula"] = "q"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        code, out, _ = cli("hilbert-check", str(bad))
        assert code == 1
        assert "at node" in out

    def test_hilbert_to_sequent_rechecks(self, deduction_path, tmp_path):
        out_path = tmp_path / "seq.json"
        code, out, _ = cli("hilbert-to-sequent", str(deduction_path),
                           "--emit-proof", str(out_path))
        assert code == 0
        assert "sequent proof of (p & q) |- p" in out
        code, _, _ = cli("check-proof", str(out_path))
        assert code == 0


class TestModels:
    @pytest.fixture()
    def model_path(self, tmp_path):
        m = random_model(seed=7, size=3, system=MILL)
        path = tmp_path / "m.json"
        path.write_text(json.dumps(model_to_json(m)))
        return path

    def test_model_check_valid(self, model_path):
        code, out, _ = cli("model-check", str(model_path), "MILL")
        assert code == 0
        assert out.startswith("valid MILL model")

    def test_model_check_reports_failures(self, model_path, tmp_path):
        data = json.loads(model_path.read_text())
        w = data["worlds"]
        # w[-1] above w[0] in the order, but w[0] alone satisfies p
        data["order"] = [[w[-1], w[0]]]
        data["valuation"]["p"] = [w[0]]
        path = tmp_path / "m2.json"
        path.write_text(json.dumps(data))
        code, out, _ = cli("model-check", str(path), "MILL")
        assert code == 1
        assert "upward closed" in out

    def test_model_check_missing_serial_op(self, tmp_path):
        m = random_model(seed=1, size=2, system=MILL)
        path = tmp_path / "m.json"
        path.write_text(json.dumps(model_to_json(m)))
        code, out, _ = cli("model-check", str(path), "PCMILL")
        assert code == 1
        assert "serial" in out.lower()

    def test_model_check_malformed_model(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"worlds": ["a"]}))
        code, _, err = cli("model-check", str(path), "MILL")
        assert code == 2

    def test_model_eval_valid_and_invalid(self, model_path):
        code, out, _ = cli("model-eval", str(model_path), "p |- p")
        assert code == 0
        assert "valid in the model" in out
        code, out, _ = cli("model-eval", str(model_path), "p |- p * p")
        if code == 1:
            assert "falsified at world" in out

    def test_model_eval_infers_tree_system(self, tmp_path):
        m = random_model(seed=3, size=3, system=parse_system("PCMILL"))
        path = tmp_path / "m.json"
        path.write_text(json.dumps(model_to_json(m)))
        code, out, _ = cli("model-eval", str(path), "p ; q |- p @ q")
        assert code == 0
        assert "[PCMILL]" in out


class TestCountermodel:
    def test_found(self):
        code, out, _ = cli("countermodel", "MILL", "p |- q",
                           "--max-size", "2")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("countermodel with")
        model = model_from_json(json.loads("\n".join(lines[1:])))
        assert len(model.worlds) <= 2

    def test_emitted_model_passes_model_check(self, tmp_path):
        code, out, _ = cli("countermodel", "SRSBIAT:a", "p @ q |- q @ p",
                           "--max-size", "4", "--seed", "0")
        assert code == 0
        path = tmp_path / "m.json"
        path.write_text("\n".join(out.splitlines()[1:]))
        code, out, _ = cli("model-check", str(path), "SRSBIAT")
        assert code == 0
        code, out, _ = cli("model-eval", str(path), "p @ q |- q @ p")
        assert code == 1

    def test_not_found_for_theorem(self):
        code, out, _ = cli("countermodel", "MILL", "p |- p",
                           "--max-size", "3")
        assert code == 1
        assert "not a provability claim" in out


class TestCorpus:
    def test_shipped_corpus_all_match(self):
        code, out, _ = cli("corpus", CORPUS_DIR)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[-1] == "35/35 entries matched"
        assert all(line.startswith("PASS") for line in lines[:-1])

    def test_mismatch_exits_one(self, tmp_path):
        (tmp_path / "t.corpus").write_text(
            "bad | MILL | p |- q | provable | s\n")
        code, out, _ = cli("corpus", str(tmp_path))
        assert code == 1
        assert "FAIL" in out
        assert "0/1 entries matched" in out

    def test_missing_dir_is_usage_error(self, tmp_path):
        code, _, err = cli("corpus", str(tmp_path / "void"))
        assert code == 2


class TestUsage:
    def test_no_arguments(self):
        code, _, _ = cli()
        assert code == 2

    def test_unknown_subcommand(self):
        code, _, _ = cli("transmogrify")
        assert code == 2

    def test_help_exits_zero(self):
        code, _, _ = cli("--help")
        assert code == 0
