import json

import pytest
from fastapi.testclient import TestClient

from misusekit.corpus import save_corpus
from misusekit.loop import load_session, save_session, start_session
from misusekit.service import create_app

from synthetic import planted_corpus


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    corpus, truth, annot = planted_corpus(200, seed=1)
    root = tmp_path_factory.mktemp("svc")
    cpath = str(root / "corpus.jsonl")
    save_corpus(corpus, cpath)
    return cpath, corpus, annot


@pytest.fixture()
def fresh(world, tmp_path):
    cpath, corpus, annot = world
    spath = str(tmp_path / "session.json")
    sess, _ = start_session(corpus, cpath, seed=1)
    save_session(sess, spath)
    client = TestClient(create_app(spath, cpath))
    return client, spath, cpath, annot


def submit_pending(client, spath, annot, token):
    sess = load_session(spath)
    labels = [{"id": gid, "label": annot[gid]} for gid in sess.pending_batch]
    return client.post("/api/labels", json={"labels": labels, "token": token})


def test_session_view_fields(fresh):
    client, *_ = fresh
    r = client.get("/api/session")
    assert r.status_code == 200
    body = r.json()
    assert body["pending"] == 30
    assert body["iteration"] == 0
    assert body["stopped"] is None
    assert 0.0 <= body["coverage"] <= 1.0
    assert body["n_features"] == 0


def test_queries_return_cards_for_pending_batch(fresh):
    client, spath, *_ = fresh
    sess = load_session(spath)
    r = client.get("/api/queries")
    assert r.status_code == 200
    cards = r.json()["queries"]
    assert [c["id"] for c in cards] == sess.pending_batch
    for c in cards:
        assert c["source_text"]
        assert c["method_name"]
        assert isinstance(c["highlight_nodes"], list)


def test_full_batch_submission_triggers_step(fresh):
    client, spath, _, annot = fresh
    r = submit_pending(client, spath, annot, "tok-1")
    assert r.status_code == 200
    body = r.json()
    assert body["iteration"] == 1
    assert body["labeled"] == 30
    # next batch issued or stopped
    assert body["pending"] > 0 or body["stopped"] is not None


def test_partial_submission_does_not_step(fresh):
    client, spath, _, annot = fresh
    sess = load_session(spath)
    gid = sess.pending_batch[0]
    r = client.post(
        "/api/labels",
        json={"labels": [{"id": gid, "label": annot[gid]}], "token": "tok-p"},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["iteration"] == 0
    assert body["pending"] == 29


def test_duplicate_token_rejected_and_has_no_effect(fresh):
    client, spath, _, annot = fresh
    sess = load_session(spath)
    gid = sess.pending_batch[0]
    payload = {"labels": [{"id": gid, "label": annot[gid]}], "token": "tok-dup"}
    assert client.post("/api/labels", json=payload).status_code == 200
    r = client.post("/api/labels", json=payload)
    assert r.status_code == 409
    assert client.get("/api/session").json()["labeled"] == 1


def test_label_for_non_pending_id_rejected(fresh):
    client, *_ = fresh
    r = client.post(
        "/api/labels",
        json={"labels": [{"id": "not-pending", "label": "C"}], "token": "tok-x"},
    )
    assert r.status_code == 409


def test_malformed_label_rejected(fresh):
    client, spath, _, _ = fresh
    sess = load_session(spath)
    gid = sess.pending_batch[0]
    r = client.post(
        "/api/labels", json={"labels": [{"id": gid, "label": "Z"}], "token": "tok-z"}
    )
    assert r.status_code == 400
    r = client.post("/api/labels", json={"nope": 1})
    assert r.status_code == 422


def test_restart_preserves_consumed_tokens_and_state(fresh):
    client, spath, cpath, annot = fresh
    submit_pending(client, spath, annot, "tok-restart")
    before = client.get("/api/session").json()
    # simulate a crash: rebuild the app from the files on disk
    client2 = TestClient(create_app(spath, cpath))
    after = client2.get("/api/session").json()
    assert after == before
    r = client2.post("/api/labels", json={"labels": [], "token": "tok-restart"})
    assert r.status_code == 409


def run_to_stop(client, spath, annot):
    i = 0
    while client.get("/api/session").json()["stopped"] is None:
        i += 1
        r = submit_pending(client, spath, annot, f"tok-{i}")
        assert r.status_code == 200
    return client.get("/api/session").json()


def test_features_endpoint_exposes_stats(fresh):
    client, spath, _, annot = fresh
    submit_pending(client, spath, annot, "tok-f")
    feats = client.get("/api/features").json()["features"]
    for f in feats:
        assert set(f["stats"]) == {"c_hit", "c_miss", "m_hit", "m_miss"}
        assert f["chi2"] >= 0
        assert f["rendering"]


def test_train_then_classify_then_fetch_report(fresh, tmp_path):
    client, spath, cpath, annot = fresh
    # training before the session stops is rejected
    assert client.post("/api/train", json={}).status_code == 409
    run_to_stop(client, spath, annot)
    r = client.post("/api/train", json={"model_out": str(tmp_path / "m.json")})
    assert r.status_code == 200
    assert (tmp_path / "m.json").exists()
    assert r.json()["n_features"] >= 1

    # classify without a model only fails before train; now it works
    r = client.post("/api/classify", json={"corpus_path": cpath, "top_n": 3})
    assert r.status_code == 200
    rid = r.json()["report_id"]
    rep = client.get(f"/api/reports/{rid}")
    assert rep.status_code == 200
    assert sum(rep.json()["summary"].values()) == 200
    assert client.get("/api/reports/999").status_code == 404


def test_classify_before_train_rejected(fresh):
    client, _, cpath, _ = fresh
    r = client.post("/api/classify", json={"corpus_path": cpath})
    assert r.status_code == 409
