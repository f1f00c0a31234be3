"""HTTP/JSON facade over the engine and diagnostics.

Runs execute on a small worker pool; submissions beyond the concurrent-run
limit are rejected with 429 rather than queued. Completed results are
immutable, so every view is a pure projection and repeated queries return
identical bodies. Endpoint paths and field names are frozen in
docs/api.md (API version v1).
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request

from .config import ScenarioConfig, ScenarioError, config_from_dict, config_to_dict
from .diagnostics import (
    UnknownAgentError,
    agent_trajectory,
    histogram_edges,
    negative_counts_series,
    path_matrix,
    strategy_comparison,
    summarize_deltas,
)
from .domain import SKILLS
from .engine import CAUSE_CODES, RunResult, run_simulation
from .runio import RunFormatError, load_run, save_run

API_PREFIX = "/api/v1"


class RunStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


class CapacityError(RuntimeError):
    pass


@dataclass
class RunEntry:
    run_id: str
    config: ScenarioConfig
    status: RunStatus = RunStatus.PENDING
    result: Optional[RunResult] = None
    error: Optional[str] = None


@dataclass
class RunRegistry:
    """In-memory run store with an optional snapshot directory.

    Registry access is serialized behind one lock; simulations run on the
    executor. Snapshots written on completion are reloaded at startup, so a
    restarted server still serves finished runs.
    """

    max_concurrent: int = 2
    snapshot_dir: Optional[Path] = None
    _entries: dict[str, RunEntry] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self) -> None:
        self._executor = ThreadPoolExecutor(max_workers=max(1, self.max_concurrent))
        if self.snapshot_dir is not None:
            self.snapshot_dir = Path(self.snapshot_dir)
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)
            self._restore_snapshots()

    def _restore_snapshots(self) -> None:
        assert self.snapshot_dir is not None
        for path in sorted(self.snapshot_dir.glob("*.tar.gz")):
            try:
                result = load_run(path)
            except RunFormatError:
                continue
            run_id = path.name[: -len(".tar.gz")]
            self._entries[run_id] = RunEntry(
                run_id=run_id, config=result.config, status=RunStatus.DONE, result=result
            )

    def submit(self, config: ScenarioConfig) -> str:
        with self._lock:
            active = sum(
                1
                for e in self._entries.values()
                if e.status in (RunStatus.PENDING, RunStatus.RUNNING)
            )
            if active >= self.max_concurrent:
                raise CapacityError(
                    f"concurrent-run limit of {self.max_concurrent} reached; retry later"
                )
            run_id = uuid.uuid4().hex
            self._entries[run_id] = RunEntry(run_id=run_id, config=config)
        self._executor.submit(self._execute, run_id)
        return run_id

    def _execute(self, run_id: str) -> None:
        with self._lock:
            entry = self._entries[run_id]
            entry.status = RunStatus.RUNNING
        try:
            result = run_simulation(entry.config)
            if self.snapshot_dir is not None:
                save_run(result, self.snapshot_dir / f"{run_id}.tar.gz")
        except Exception as exc:  # surfaced through the status view
            with self._lock:
                entry.status = RunStatus.FAILED
                entry.error = str(exc)
            return
        with self._lock:
            entry.result = result
            entry.status = RunStatus.DONE

    def get(self, run_id: str) -> RunEntry:
        with self._lock:
            entry = self._entries.get(run_id)
        if entry is None:
            raise KeyError(run_id)
        return entry

    def entries(self) -> list[RunEntry]:
        with self._lock:
            return list(self._entries.values())

    def join(self, run_id: str, timeout: float = 60.0) -> RunEntry:
        """Block until the run finishes (testing convenience)."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            entry = self.get(run_id)
            if entry.status in (RunStatus.DONE, RunStatus.FAILED):
                return entry
            time.sleep(0.01)
        raise TimeoutError(f"run {run_id} did not finish within {timeout}s")


def _completed_result(registry: RunRegistry, run_id: str) -> RunResult:
    try:
        entry = registry.get(run_id)
    except KeyError:
        raise HTTPException(404, detail=f"unknown run id {run_id!r}") from None
    if entry.status is not RunStatus.DONE or entry.result is None:
        raise HTTPException(
            409, detail=f"run {run_id} is {entry.status.value}; view needs a completed run"
        )
    return entry.result


def create_app(
    max_concurrent: int = 2,
    snapshot_dir: Optional[Path] = None,
    dashboard_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="orgsim", version="1")
    registry = RunRegistry(max_concurrent=max_concurrent, snapshot_dir=snapshot_dir)
    app.state.registry = registry

    @app.post(f"{API_PREFIX}/runs", status_code=202)
    async def create_run(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, detail={"field": "", "message": "body must be a JSON object"})
        if body is None:
            body = {}
        if not isinstance(body, dict):
            raise HTTPException(400, detail={"field": "", "message": "body must be a JSON object"})
        try:
            config = config_from_dict(body)
        except ScenarioError as exc:
            raise HTTPException(400, detail={"field": exc.field, "message": str(exc)}) from None
        try:
            run_id = registry.submit(config)
        except CapacityError as exc:
            raise HTTPException(429, detail=str(exc)) from None
        return {"run_id": run_id, "status": RunStatus.PENDING.value}

    @app.get(f"{API_PREFIX}/runs")
    def list_runs():
        rows = []
        for entry in registry.entries():
            rows.append(
                {
                    "run_id": entry.run_id,
                    "status": entry.status.value,
                    "strategy": entry.config.strategy.kind.value,
                    "regime": entry.config.regime.name,
                    "n_agents": entry.config.n_agents,
                    "steps": entry.config.steps,
                    "seed": entry.config.seed,
                }
            )
        return {"runs": rows}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/status")
    def run_status(run_id: str):
        try:
            entry = registry.get(run_id)
        except KeyError:
            raise HTTPException(404, detail=f"unknown run id {run_id!r}") from None
        payload = {"run_id": run_id, "status": entry.status.value}
        if entry.error is not None:
            payload["error"] = entry.error
        return payload

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/config")
    def run_config(run_id: str):
        try:
            entry = registry.get(run_id)
        except KeyError:
            raise HTTPException(404, detail=f"unknown run id {run_id!r}") from None
        return {"run_id": run_id, "config": config_to_dict(entry.config)}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/efficiency")
    def run_efficiency(run_id: str):
        result = _completed_result(registry, run_id)
        return {"run_id": run_id, "efficiency": result.efficiency.tolist()}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/delta_summary")
    def run_delta_summary(run_id: str):
        result = _completed_result(registry, run_id)
        summary = summarize_deltas(result.effective_promotions)
        return {
            "run_id": run_id,
            "count": summary.count,
            "mean": summary.mean,
            "median": summary.median,
            "share_negative": summary.share_negative,
            "share_large_negative": summary.share_large_negative,
            "min": summary.min,
            "max": summary.max,
            "p01": summary.p01,
            "p99": summary.p99,
            "histogram": {
                "edges": histogram_edges().tolist(),
                "counts": summary.histogram.tolist(),
            },
        }

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/path_matrix")
    def run_path_matrix(run_id: str):
        result = _completed_result(registry, run_id)
        matrix = path_matrix(result.effective_promotions)
        cells = [
            {
                "from_level": src,
                "to_level": dst,
                "count": cell.count,
                "mean_delta": cell.mean_delta,
                "positive": cell.positive,
                "negative": cell.negative,
            }
            for (src, dst), cell in sorted(matrix.cells.items())
        ]
        return {"run_id": run_id, "cells": cells}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/negatives")
    def run_negatives(run_id: str):
        result = _completed_result(registry, run_id)
        counts = negative_counts_series(result.effective_promotions, result.n_steps)
        return {"run_id": run_id, "counts": counts.tolist()}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/events")
    def run_events(
        run_id: str,
        from_step: Optional[int] = Query(default=None, alias="from"),
        to_step: Optional[int] = Query(default=None, alias="to"),
        level: Optional[int] = Query(default=None),
    ):
        result = _completed_result(registry, run_id)
        log = result.effective_promotions
        mask = np.ones(len(log), dtype=bool)
        if from_step is not None:
            mask &= log.step >= from_step
        if to_step is not None:
            mask &= log.step <= to_step
        if level is not None:
            mask &= log.to_level == level
        idx = np.flatnonzero(mask)
        events = [
            {
                "agent_id": int(log.agent_id[i]),
                "step": int(log.step[i]),
                "from_level": int(log.from_level[i]),
                "to_level": int(log.to_level[i]),
                "perf_pre": float(log.perf_pre[i]),
                "perf_post": float(log.perf_post[i]),
                "delta_p": float(log.delta_p[i]),
                "cause": CAUSE_CODES[int(log.cause[i])].value,
            }
            for i in idx
        ]
        return {"run_id": run_id, "events": events}

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/agent/{{agent_id}}")
    def run_agent(run_id: str, agent_id: int):
        result = _completed_result(registry, run_id)
        try:
            trajectory = agent_trajectory(result, agent_id)
        except UnknownAgentError as exc:
            raise HTTPException(404, detail=str(exc)) from None
        return {
            "run_id": run_id,
            "agent_id": trajectory.agent_id,
            "joined_at": trajectory.joined_at,
            "exited_at": trajectory.exited_at,
            "blacklisted": bool(result.blacklisted[agent_id]),
            "points": [
                {"step": p.step, "level": p.level, "performance": p.performance}
                for p in trajectory.points
            ],
            "competence_snapshots": [
                {"step": step, "skills": dict(zip(SKILLS, values))}
                for step, values in trajectory.competence_snapshots
            ],
        }

    @app.get(f"{API_PREFIX}/comparison")
    def comparison(ids: str):
        run_ids = [i for i in ids.split(",") if i]
        results = [_completed_result(registry, run_id) for run_id in run_ids]
        try:
            rows = strategy_comparison(results)
        except ValueError as exc:
            raise HTTPException(400, detail={"field": "ids", "message": str(exc)}) from None
        return {
            "rows": [
                {
                    "run_id": run_id,
                    "strategy": row.strategy,
                    "mean_delta_p": row.mean_delta_p,
                    "median_delta_p": row.median_delta_p,
                    "share_negative": row.share_negative,
                    "promotions": row.promotions,
                    "final_efficiency": row.final_efficiency,
                }
                for run_id, row in zip(run_ids, rows)
            ]
        }

    if dashboard_dir is not None and Path(dashboard_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(dashboard_dir), html=True), name="dashboard")

    return app
