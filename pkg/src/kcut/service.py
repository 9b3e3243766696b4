"""Local HTTP session service for live audits.

Sessions persist as per-session JSON-lines event logs under the data
directory: one "created" event holding the full configuration, then one
event per recorded draw or extension estimate. All derived state is a
pure replay of that log, so restarting the service (or re-reading the
log anywhere else) reproduces the session exactly. Writes are
serialized per session; k and the adjusted risk limit are fixed at
creation.
"""

from __future__ import annotations

import datetime
import json
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from . import analysis as analysis_mod
from . import audit as audit_mod
from . import distributions, plan as plan_mod, risk as risk_mod
from .audit import AuditState, AuditStatus, BallotInterpretation, ContestDefinition
from .errors import (
    AdjustmentExhaustsRiskLimit,
    BudgetUnreachable,
    MalformedManifest,
    SessionFinalized,
)
from .plan import BallotManifest, SamplingPlan
from .risk import AuditParameters, RiskAdjustment

API_PREFIX = "/api/v1"


def _now_rfc3339() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class SessionRecord:
    """Immutable snapshot of one session; the store swaps whole records."""

    session_id: str
    contest: ContestDefinition
    params: AuditParameters
    risk: RiskAdjustment
    manifest: BallotManifest
    plan: SamplingPlan
    state: AuditState
    version: int  # event count; strictly increasing per mutation

    def status(self) -> AuditStatus:
        return self.state.status


class SessionStore:
    """Event-sourced session registry; one JSONL file per session."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, SessionRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.data_dir.glob("*.jsonl")):
            record = self._replay_file(path)
            self._sessions[record.session_id] = record
            self._locks[record.session_id] = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, event: dict) -> None:
        with self._path(session_id).open("a") as f:
            f.write(json.dumps(event) + "\n")

    # -- event folding --------------------------------------------------

    @staticmethod
    def _record_from_created(event: dict) -> SessionRecord:
        contest = ContestDefinition(
            candidates=tuple(event["contest"]["candidates"]),
            reported_winner=event["contest"]["reported_winner"],
            reported_tallies={
                k: int(v) for k, v in event["contest"]["reported_tallies"].items()
            },
            n_total=int(event["contest"]["n_total"]),
        )
        adj = RiskAdjustment(**event["risk_adjustment"])
        params = AuditParameters(
            alpha=event["alpha"],
            adjusted_alpha=event["adjusted_alpha"],
            k=int(event["k"]),
            s_star=int(event["s_star"]),
        )
        manifest = BallotManifest(
            tuple((s["stack_id"], int(s["count"])) for s in event["manifest"])
        )
        plan = SamplingPlan.from_json(json.dumps(event["plan"]))
        state = audit_mod.fresh_state(contest, params)
        return SessionRecord(
            session_id=event["session_id"],
            contest=contest,
            params=params,
            risk=adj,
            manifest=manifest,
            plan=plan,
            state=state,
            version=1,
        )

    def _replay_file(self, path: Path) -> SessionRecord:
        record: SessionRecord | None = None
        with path.open() as f:
            for line in f:
                if not line.strip():
                    continue
                event = json.loads(line)
                record = self._fold(record, event)
        if record is None:
            raise ValueError(f"empty session log {path}")
        return record

    def _fold(self, record: SessionRecord | None, event: dict) -> SessionRecord:
        kind = event["type"]
        if kind == "created":
            return self._record_from_created(event)
        assert record is not None, "event before creation"
        if kind == "draw":
            interp = BallotInterpretation(
                draw_index=int(event["draw_index"]),
                stack_id=event["stack_id"],
                choice=event["choice"],
                recorded_at=event.get("recorded_at"),
            )
            return replace(
                record,
                state=audit_mod.bravo_update(record.state, interp),
                version=record.version + 1,
            )
        if kind == "extension":
            new_params = replace(record.params, s_star=int(event["s_star"]))
            return replace(
                record,
                params=new_params,
                state=replace(record.state, params=new_params),
                version=record.version + 1,
            )
        raise ValueError(f"unknown event type {kind!r}")

    # -- public operations ----------------------------------------------

    def create(
        self,
        contest: ContestDefinition,
        alpha: float,
        manifest: BallotManifest,
        s_star: int,
        seed: int,
        model: distributions.CutSizeDistribution,
        k: int | None,
        budget: float | None,
        eps1_target: float,
    ) -> SessionRecord:
        if k is None:
            if budget is None:
                raise ValueError("provide either k or budget")
            k, adj = risk_mod.choose_k(model, s_star, eps1_target, budget)
        else:
            adj = risk_mod.evaluate_k(model, k, s_star, eps1_target)
        adjusted = risk_mod.adjusted_risk_limit(alpha, adj.bound)
        params = AuditParameters(alpha=alpha, adjusted_alpha=adjusted, k=k, s_star=s_star)
        sample_plan = plan_mod.build_plan(manifest, s_star, k, seed, s_star=s_star)
        session_id = uuid.uuid4().hex
        event = {
            "type": "created",
            "session_id": session_id,
            "contest": {
                "candidates": list(contest.candidates),
                "reported_winner": contest.reported_winner,
                "reported_tallies": contest.reported_tallies,
                "n_total": contest.n_total,
            },
            "alpha": alpha,
            "adjusted_alpha": adjusted,
            "k": k,
            "s_star": s_star,
            "seed": seed,
            "manifest": [
                {"stack_id": sid, "count": count} for sid, count in manifest.stacks
            ],
            "risk_adjustment": {
                "s": adj.s,
                "delta": adj.delta,
                "eps1": adj.eps1,
                "s_prime": adj.s_prime,
                "eps2": adj.eps2,
                "bound": adj.bound,
            },
            "plan": json.loads(sample_plan.to_json()),
            "created_at": _now_rfc3339(),
        }
        with self._registry_lock:
            record = self._record_from_created(event)
            self._sessions[session_id] = record
            self._locks[session_id] = threading.Lock()
            self._append(session_id, event)
        return record

    def get(self, session_id: str) -> SessionRecord:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise KeyError(session_id) from None

    def record_draw(self, session_id: str, stack_id: str, choice: str) -> SessionRecord:
        lock = self._lock_for(session_id)
        with lock:
            record = self._sessions[session_id]
            if record.state.status is not AuditStatus.CONTINUE:
                raise SessionFinalized(record.state.status.value)
            if stack_id not in {sid for sid, _ in record.manifest.stacks}:
                raise LookupError(f"unknown stack_id {stack_id!r}")
            event = {
                "type": "draw",
                "draw_index": record.state.draws + 1,
                "stack_id": stack_id,
                "choice": choice,
                "recorded_at": _now_rfc3339(),
            }
            updated = self._fold(record, event)
            self._append(session_id, event)
            self._sessions[session_id] = updated
            return updated

    def record_extension(
        self, session_id: str, method: str, multiplier: int, trials: int, seed: int
    ) -> tuple[SessionRecord, audit_mod.ExtensionEstimate]:
        lock = self._lock_for(session_id)
        with lock:
            record = self._sessions[session_id]
            estimate = audit_mod.estimate_extension(record.state, method, trials, seed)
            new_s_star = audit_mod.sample_size_cap(
                record.state.draws, estimate.d, multiplier
            )
            event = {
                "type": "extension",
                "method": method,
                "multiplier": multiplier,
                "trials": trials,
                "seed": seed,
                "d": estimate.d,
                "s_star": new_s_star,
                "unlikely_to_complete": estimate.unlikely_to_complete,
                "recorded_at": _now_rfc3339(),
            }
            updated = self._fold(record, event)
            self._append(session_id, event)
            self._sessions[session_id] = updated
            return updated, estimate

    def _lock_for(self, session_id: str) -> threading.Lock:
        try:
            return self._locks[session_id]
        except KeyError:
            raise KeyError(session_id) from None


def _next_instruction(record: SessionRecord) -> dict | None:
    """What the auditor should do for the next draw, per the plan."""
    drawn_per_stack: dict[str, int] = {}
    for b in record.state.interpretations:
        drawn_per_stack[b.stack_id] = drawn_per_stack.get(b.stack_id, 0) + 1
    done = record.state.draws
    kcut_total = sum(d for _, d in record.plan.allocations)
    if done < kcut_total:
        for sid, allocated in record.plan.allocations:
            remaining = allocated - drawn_per_stack.get(sid, 0)
            if remaining > 0:
                return {
                    "method": "kcut",
                    "k": record.plan.k,
                    "stack_id": sid,
                    "remaining_in_stack": remaining,
                }
    overflow_index = done - kcut_total
    if 0 <= overflow_index < len(record.plan.overflow_positions):
        sid, pos = record.plan.overflow_positions[overflow_index]
        return {"method": "position", "stack_id": sid, "position": pos}
    return None


def _session_view(record: SessionRecord) -> dict:
    state = record.state
    drawn_per_stack: dict[str, int] = {}
    for b in state.interpretations:
        drawn_per_stack[b.stack_id] = drawn_per_stack.get(b.stack_id, 0) + 1
    remaining_alloc = [
        {"stack_id": sid, "draws": max(d - drawn_per_stack.get(sid, 0), 0)}
        for sid, d in record.plan.allocations
    ]
    thr = state.threshold()
    pairs = [
        {
            "winner": w,
            "loser": loser,
            "log_likelihood_ratio": state.test_statistics[(w, loser)],
            "threshold": thr,
        }
        for (w, loser) in record.contest.pairs()
    ]
    return {
        "session_id": record.session_id,
        "version": record.version,
        "status": state.status.value,
        "contest": {
            "candidates": list(record.contest.candidates),
            "reported_winner": record.contest.reported_winner,
            "reported_tallies": record.contest.reported_tallies,
            "n_total": record.contest.n_total,
        },
        "alpha": record.params.alpha,
        "adjusted_alpha": record.params.adjusted_alpha,
        "k": record.params.k,
        "s_star": record.params.s_star,
        "s": state.draws,
        "delta": record.risk.delta,
        "eps2": record.risk.eps2,
        "risk_adjustment": {
            "s": record.risk.s,
            "delta": record.risk.delta,
            "eps1": record.risk.eps1,
            "s_prime": record.risk.s_prime,
            "eps2": record.risk.eps2,
            "bound": record.risk.bound,
        },
        "pairs": pairs,
        "plan": json.loads(record.plan.to_json()),
        "remaining_plan": {
            "allocations": remaining_alloc,
            "overflow_positions": [
                {"stack_id": sid, "position": p}
                for sid, p in record.plan.overflow_positions[
                    max(state.draws - sum(d for _, d in record.plan.allocations), 0) :
                ]
            ],
        },
        "next_instruction": _next_instruction(record),
    }


def _bad_request(detail: str) -> HTTPException:
    return HTTPException(status_code=400, detail=detail)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise _bad_request("request body is not valid JSON")
    if not isinstance(body, dict):
        raise _bad_request("request body must be a JSON object")
    return body


def create_app(data_dir: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="kcut audit service")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.post(API_PREFIX + "/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        try:
            contest = ContestDefinition(
                candidates=tuple(body["contest"]["candidates"]),
                reported_winner=body["contest"]["reported_winner"],
                reported_tallies={
                    k: int(v)
                    for k, v in body["contest"]["reported_tallies"].items()
                },
                n_total=int(body["contest"]["n_total"]),
            )
            manifest_rows = body["manifest"]
            manifest = BallotManifest(
                tuple((str(r["stack_id"]), int(r["count"])) for r in manifest_rows)
            )
            alpha = float(body["alpha"])
            s_star = int(body["s_star"])
            seed = int(body.get("seed", 0))
            k = body.get("k")
            budget = body.get("budget")
            eps1_target = float(body.get("eps1_target", risk_mod.DEFAULT_EPS1_TARGET))
            model_name = body.get("model", "empirical")
            cut_records = body.get("cut_records")
        except (KeyError, TypeError, ValueError) as exc:
            raise _bad_request(f"invalid request body: {exc}")
        try:
            if cut_records is not None:
                # operator-measured cut-size data (same CSV as /analysis/fit)
                model = distributions.empirical_pmf(
                    distributions.load_cut_records(str(cut_records))
                )
            else:
                model = _resolve_service_model(model_name)
        except ValueError as exc:
            raise _bad_request(str(exc))
        try:
            record = store.create(
                contest=contest,
                alpha=alpha,
                manifest=manifest,
                s_star=s_star,
                seed=seed,
                model=model,
                k=int(k) if k is not None else None,
                budget=float(budget) if budget is not None else None,
                eps1_target=eps1_target,
            )
        except (MalformedManifest, BudgetUnreachable, AdjustmentExhaustsRiskLimit, ValueError) as exc:
            raise _bad_request(f"{type(exc).__name__}: {exc}")
        return JSONResponse(_session_view(record), status_code=201)

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            record = store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        return _session_view(record)

    @app.post(API_PREFIX + "/sessions/{session_id}/draws")
    async def record_draw(session_id: str, request: Request):
        body = await _json_body(request)
        try:
            stack_id = str(body["stack_id"])
            choice = str(body["choice"])
        except (KeyError, TypeError) as exc:
            raise _bad_request(f"invalid request body: {exc}")
        try:
            record = store.record_draw(session_id, stack_id, choice)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionFinalized as exc:
            raise HTTPException(status_code=409, detail=f"session finalized: {exc}")
        except LookupError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _session_view(record)

    @app.post(API_PREFIX + "/sessions/{session_id}/extension")
    async def record_extension(session_id: str, request: Request):
        body = await _json_body(request)
        try:
            method = str(body["method"])
            multiplier = int(body["multiplier"])
            trials = int(body["trials"])
            seed = int(body["seed"])
        except (KeyError, TypeError, ValueError) as exc:
            raise _bad_request(f"invalid request body: {exc}")
        try:
            record, estimate = store.record_extension(
                session_id, method, multiplier, trials, seed
            )
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except ValueError as exc:
            raise _bad_request(str(exc))
        view = _session_view(record)
        view["extension"] = {
            "d": estimate.d,
            "unlikely_to_complete": estimate.unlikely_to_complete,
            "s_star": record.params.s_star,
        }
        return view

    @app.get(API_PREFIX + "/analysis/convergence")
    def analysis_convergence(model: str = "empirical", kmax: int = 16, n: int = 150):
        try:
            source = _resolve_service_model(model, n)
        except ValueError as exc:
            raise _bad_request(str(exc))
        if kmax < 1 or kmax > 64:
            raise _bad_request("kmax must lie in 1..64")
        table = analysis_mod.convergence_table([source], kmax, labels=[model])
        return {
            "model": model,
            "n": n,
            "rows": [
                {"k": r.k, "model": model, "vd": r.vd, "eps": r.eps}
                for r in table.rows[0]
            ],
        }

    @app.post(API_PREFIX + "/analysis/fit")
    async def analysis_fit(request: Request):
        text = (await request.body()).decode("utf-8")
        try:
            records = distributions.load_cut_records(text)
            emp = distributions.empirical_pmf(records)
            tu = distributions.fit_truncated_uniform(emp)
            tu_mae, tu_mse = distributions.model_error(tu, emp)
            ec = distributions.fit_exponential_cubic(emp)
            ec_mae, ec_mse = distributions.model_error(ec, emp)
        except Exception as exc:  # malformed CSV or degenerate data
            raise _bad_request(f"{type(exc).__name__}: {exc}")
        return {
            "n": records.n,
            "total": records.total,
            "truncated_uniform": {"w": tu.w, "b": tu.b, "mae": tu_mae, "mse": tu_mse},
            "exponential_cubic": {
                "c0": ec.c0, "c1": ec.c1, "c2": ec.c2, "c3": ec.c3,
                "mae": ec_mae, "mse": ec_mse,
            },
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app


def _resolve_service_model(name: str, n: int = 150) -> distributions.CutSizeDistribution:
    if name == "empirical":
        if n != 150:
            raise ValueError("the bundled empirical model is defined at n=150")
        return distributions.table1_pmf()
    if name == "truncu":
        return distributions.discretize(distributions.TABLE1_TRUNCATED_UNIFORM, n)
    if name == "expcubic":
        return distributions.discretize(distributions.TABLE1_EXPONENTIAL_CUBIC, n)
    raise ValueError(f"unknown model {name!r}")
