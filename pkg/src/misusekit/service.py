"""Local labeling service: HTTP surface for the annotator UI."""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .classify import DegenerateTrainingSet, save_model
from .config import ToolConfig
from .corpus import load_corpus
from .isomorphism import find_embedding
from .dfscode import graph_of
from .loop import (
    SessionError,
    load_session,
    save_session,
    step_session,
    submit_labels,
)
from .reporting import build_report, train_from_session
from .selection import batch_budget, coverage


class LabelItem(BaseModel):
    id: str
    label: str


class LabelsBody(BaseModel):
    labels: list[LabelItem]
    token: str


class TrainBody(BaseModel):
    model_out: Optional[str] = None
    seed: Optional[int] = None


class ClassifyBody(BaseModel):
    corpus_path: str
    top_n: Optional[int] = None
    seed: int = 0


def create_app(session_path: str, corpus_path: str, cfg: Optional[ToolConfig] = None) -> FastAPI:
    app = FastAPI(title="misusekit labeling service")
    cfg = cfg or ToolConfig.default()
    state = {
        "corpus": load_corpus(corpus_path),
        "session": load_session(session_path),
        "model": None,
        "reports": {},
        "lock": threading.Lock(),
    }
    # Replay for crash safety: tokens already consumed stay rejected.
    state["tokens"] = {
        ev["payload"]["token"]
        for ev in state["session"].events
        if ev["kind"] == "labels_received" and "token" in ev["payload"]
    }

    def session_view() -> dict:
        sess = state["session"]
        corpus = state["corpus"]
        return {
            "iteration": sess.iteration,
            "labeled": len(sess.labeled_ids),
            "label_budget": int(sess.config.label_budget_fraction * len(corpus)),
            "batch_budget": batch_budget(sess.config, len(corpus)),
            "coverage": coverage(sess.selected_features, corpus),
            "coverage_target": sess.config.coverage_target,
            "pending": len(sess.pending_batch),
            "stopped": sess.stopped,
            "n_features": len(sess.selected_features),
        }

    @app.get("/api/session")
    def get_session():
        return session_view()

    @app.get("/api/queries")
    def get_queries():
        sess = state["session"]
        corpus = state["corpus"]
        cards = []
        for ex_id in sess.pending_batch:
            ex = corpus.by_id(ex_id)
            highlights: set[str] = set()
            for code, carriers in sess.candidate_patterns[:50]:
                if ex_id not in carriers:
                    continue
                emb = find_embedding(graph_of(code), ex.graph)
                if emb:
                    highlights.update(emb.values())
            cards.append(
                {
                    "id": ex.id,
                    "project": ex.project,
                    "method_name": ex.method_name,
                    "source_text": ex.source_text,
                    "highlight_nodes": sorted(highlights),
                }
            )
        return {"queries": cards, "stopped": sess.stopped}

    @app.post("/api/labels")
    def post_labels(body: LabelsBody):
        with state["lock"]:
            sess = state["session"]
            if body.token in state["tokens"]:
                raise HTTPException(status_code=409, detail="duplicate submission token")
            for item in body.labels:
                if item.label not in ("C", "M"):
                    raise HTTPException(status_code=400, detail=f"bad label {item.label!r}")
            labels = {item.id: item.label for item in body.labels}
            try:
                event = submit_labels(sess, labels)
            except SessionError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            event["payload"]["token"] = body.token
            state["tokens"].add(body.token)
            if not sess.pending_batch:
                step_session(sess, state["corpus"])
            save_session(sess, session_path)
            return session_view()

    @app.get("/api/features")
    def get_features():
        sess = state["session"]
        feats = []
        for f in sess.selected_features:
            c_h, c_m, m_h, m_m = f.stats.as_tuple()
            pattern = f.pattern
            rendering = [
                f"{pattern.node(e.src).render()} -{e.kind.value}-> {pattern.node(e.dst).render()}"
                for e in pattern.edges
            ] or [n.render() for n in pattern.nodes]
            feats.append(
                {
                    "stats": {"c_hit": c_h, "c_miss": c_m, "m_hit": m_h, "m_miss": m_m},
                    "chi2": f.chi2,
                    "n_hits": len(f.graph_ids),
                    "rendering": rendering,
                }
            )
        return {"features": feats}

    @app.post("/api/train")
    def post_train(body: TrainBody):
        with state["lock"]:
            try:
                model = train_from_session(
                    state["session"], state["corpus"], cfg, seed=body.seed
                )
            except DegenerateTrainingSet as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except SessionError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            state["model"] = model
            if body.model_out:
                save_model(model, body.model_out)
            _append_trained_event(state["session"], model)
            save_session(state["session"], session_path)
            return {
                "family": model.classifier["family"],
                "cv_f1": model.classifier["mean_f1"],
                "n_features": len(model.features),
            }

    @app.post("/api/classify")
    def post_classify(body: ClassifyBody):
        with state["lock"]:
            if state["model"] is None:
                raise HTTPException(status_code=409, detail="no trained model; POST /api/train first")
            corpus = load_corpus(body.corpus_path)
            report = build_report(state["model"], corpus, top_n=body.top_n, seed=body.seed)
            report_id = str(len(state["reports"]) + 1)
            state["reports"][report_id] = report
            return {"report_id": report_id}

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str):
        if report_id not in state["reports"]:
            raise HTTPException(status_code=404, detail="no such report")
        return state["reports"][report_id]

    return app


def _append_trained_event(session, model) -> None:
    from .loop import _append_event

    _append_event(
        session,
        "model_trained",
        {"family": model.classifier["family"], "cv_f1": model.classifier["mean_f1"]},
    )
