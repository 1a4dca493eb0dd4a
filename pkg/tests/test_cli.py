import json

import pytest

from cnot_aqs.cli import emit_transcript, main
from cnot_aqs.protocol import Comparator, ProtocolTranscript


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc, out


def test_honest_run(tmp_path):
    code, doc, _ = run(["honest-run", "--n", "3", "--seed", "7"], tmp_path)
    assert code == 0
    assert doc["verdict"]["accepted"] is True
    assert doc["schema_version"] == 1 and doc["kind"] == "honest-run"


def test_honest_run_explicit_message(tmp_path):
    msg = "0.6,0,0,0.8;1,0,0,0"
    code, doc, _ = run(["honest-run", "--n", "2", "--seed", "1", "--message", msg], tmp_path)
    assert code == 0 and doc["verdict"]["final_fidelity"] >= 1 - 1e-9


@pytest.mark.parametrize("mode", ["exact", "swap"])
def test_forge_exit_code(tmp_path, mode):
    code, doc, _ = run(["forge", "--n", "4", "--trials", "100", "--seed", "1", "--mode", mode], tmp_path)
    assert code == 3
    assert doc["verdict"]["acceptance_rate"] == 1.0
    assert all(t["fidelity_st_se"] >= 1 - 1e-12 for t in doc["trials"])


def test_cipher_check_exhaustive(tmp_path):
    code, doc, _ = run(["cipher-check", "--n", "5", "--exhaustive-keys"], tmp_path)
    assert code == 0
    assert doc["keys_checked"] == 120 and doc["verdict"]["passed"]


def test_arbitrate_valid_and_rejected(tmp_path):
    code, doc, _ = run(["arbitrate", "--n", "3", "--k-a", "3,1,2", "--k-r", "2,3,1"], tmp_path)
    assert code == 0 and doc["verdict"]["ruling"] == "Valid"
    claim = "0,0,1,0;1,0,0,0;1,0,0,0"
    code, doc, _ = run(["arbitrate", "--n", "3", "--claim", claim], tmp_path, "b.json")
    assert code == 2 and doc["verdict"]["ruling"] == "Forged-rejected"


def test_honest_run_rejected_exit_code(monkeypatch, tmp_path):
    from cnot_aqs import cli

    def rejecting(n, msg, comparator, seed):
        t = ProtocolTranscript("honest-run", n, seed, comparator)
        t.verdict = {"v_bit": 0, "accepted": False, "reason": "VZero", "final_fidelity": None}
        return t

    monkeypatch.setattr(cli, "run_honest", rejecting)
    code, doc, _ = run(["honest-run", "--n", "2"], tmp_path)
    assert code == 2 and doc["verdict"]["reason"] == "VZero"


@pytest.mark.parametrize(
    "argv",
    [
        ["forge", "--n", "x"],
        ["bogus"],
        [],
        ["honest-run", "--n", "0"],
        ["forge", "--trials", "0"],
        ["honest-run", "--mode", "fuzzy"],
        ["honest-run", "--n", "2", "--message", "1,0,0"],
        ["honest-run", "--n", "3", "--message", "1,0,0,0"],
        ["arbitrate", "--n", "3", "--k-r", "1,1,2"],
        ["honest-run", "--seed", "-1"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 4
    assert capsys.readouterr().err


def test_unwritable_destination(capsys):
    assert main(["honest-run", "--n", "1", "--out", "/nonexistent/dir/x.json"]) == 4
    assert "cannot write" in capsys.readouterr().err


def test_stdout_document_when_no_out(capsys):
    assert main(["honest-run", "--n", "1", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["honest-run", "--n", "3", "--seed", "11"],
        ["honest-run", "--n", "2", "--seed", "11", "--mode", "swap"],
        ["forge", "--n", "3", "--trials", "20", "--seed", "11", "--mode", "swap"],
        ["cipher-check", "--n", "4", "--seed", "11"],
        ["arbitrate", "--n", "2", "--seed", "11"],
    ],
)
def test_byte_identical_documents(tmp_path, argv):
    _, _, a = run(argv, tmp_path, "a.json")
    _, _, b = run(argv, tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_replay_from_document(tmp_path):
    _, doc, _ = run(["honest-run", "--n", "2", "--seed", "5", "--mode", "swap"], tmp_path)
    code, again, _ = run(
        ["honest-run", "--n", str(doc["n"]), "--seed", str(doc["seed"]), "--mode", doc["mode"]["mode"]],
        tmp_path,
        "r.json",
    )
    assert again["verdict"] == doc["verdict"]


def test_emit_empty_transcript(tmp_path):
    t = ProtocolTranscript("honest-run", 1, 0, Comparator())
    text = emit_transcript(t, tmp_path / "e.json")
    doc = json.loads(text)
    assert doc["schema_version"] == 1 and doc["events"] == []
    assert list(doc) == ["schema_version", "kind", "n", "seed", "mode", "events", "verdict"]
