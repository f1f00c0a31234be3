"""Scenario loading, tabular export and run snapshot persistence.

Scenarios are YAML documents; an empty document means "all defaults".
Exports are plain comma-separated tables plus a YAML metadata document, all
byte-stable for a given run (floats use shortest round-trip repr; volatile
fields like wall time are excluded). Snapshots are gzip'd tars of .npy
arrays with a JSON manifest, written with pinned timestamps so identical
runs produce identical bytes.
"""

from __future__ import annotations

import gzip
import io
import json
import os
import tarfile
from pathlib import Path
from typing import Union

import numpy as np
import yaml

from .config import ScenarioConfig, ScenarioError, config_from_dict, config_to_dict
from .engine import (
    AttritionLog,
    CompetenceUpdates,
    DemotionLog,
    HireLog,
    PromotionLog,
    RunMeta,
    RunResult,
    CAUSE_CODES,
)

FORMAT_VERSION = "1"

EXPORT_FILES = (
    "efficiency.csv",
    "promotions.csv",
    "demotions.csv",
    "flows.csv",
    "agents.csv",
    "metadata.yaml",
)


class RunFormatError(ValueError):
    """Unreadable or incompatible run snapshot."""


def load_scenario(source: Union[str, Path]) -> ScenarioConfig:
    """Read a scenario from a YAML file path or a YAML text block.

    A str that names an existing file is read from disk; any other str is
    parsed as YAML text (so the empty string yields the default config).
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif os.path.exists(source):
        text = Path(source).read_text()
    else:
        text = source
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError("", f"invalid YAML: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ScenarioError("", "scenario document must be a mapping")
    return config_from_dict(data)


def _fmt(value: float) -> str:
    return repr(float(value))


def export_run(run: RunResult, directory: Union[str, Path]) -> list[Path]:
    """Write the six delimited/metadata files for one run; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []

    path = directory / "efficiency.csv"
    with path.open("w", newline="\n") as f:
        f.write("step,efficiency\n")
        for t, value in enumerate(run.efficiency):
            f.write(f"{t},{_fmt(value)}\n")
    paths.append(path)

    path = directory / "promotions.csv"
    p = run.effective_promotions
    with path.open("w", newline="\n") as f:
        f.write("agent_id,step,from_level,to_level,perf_pre,perf_post,delta_p,cause\n")
        for i in range(len(p)):
            f.write(
                f"{p.agent_id[i]},{p.step[i]},{p.from_level[i]},{p.to_level[i]},"
                f"{_fmt(p.perf_pre[i])},{_fmt(p.perf_post[i])},{_fmt(p.delta_p[i])},"
                f"{CAUSE_CODES[int(p.cause[i])].value}\n"
            )
    paths.append(path)

    path = directory / "demotions.csv"
    d = run.demotions
    with path.open("w", newline="\n") as f:
        f.write("agent_id,step,from_level,to_level,drop\n")
        for i in range(len(d)):
            f.write(
                f"{d.agent_id[i]},{d.step[i]},{d.from_level[i]},{d.to_level[i]},{_fmt(d.drop[i])}\n"
            )
    paths.append(path)

    path = directory / "flows.csv"
    n_steps = run.n_steps
    exits = np.zeros((n_steps + 1, 6), dtype=np.int64)
    np.add.at(exits, (run.attrition.step, run.attrition.level), 1)
    hires = np.zeros(n_steps + 1, dtype=np.int64)
    np.add.at(hires, run.hires.step, 1)
    with path.open("w", newline="\n") as f:
        f.write("step,level,exits,hires\n")
        for t in range(1, n_steps + 1):
            for lvl in range(1, 6):
                hired = hires[t] if lvl == 1 else 0
                f.write(f"{t},{lvl},{exits[t, lvl]},{hired}\n")
    paths.append(path)

    path = directory / "agents.csv"
    with path.open("w", newline="\n") as f:
        f.write("agent_id,joined_at,exited_at,level,tenure,tech,mgmt,comp,soft,performance\n")
        comp = run.competence_at(n_steps)
        for aid in range(run.n_agents_total):
            exited = int(run.exited_at[aid])
            exited_text = "" if exited < 0 else str(exited)
            c = comp[aid]
            f.write(
                f"{aid},{run.joined_at[aid]},{exited_text},{run.final_level[aid]},"
                f"{run.final_tenure[aid]},{_fmt(c[0])},{_fmt(c[1])},{_fmt(c[2])},{_fmt(c[3])},"
                f"{_fmt(run.final_performance[aid])}\n"
            )
    paths.append(path)

    path = directory / "metadata.yaml"
    metadata = {
        "format_version": FORMAT_VERSION,
        "generator_version": run.meta.version,
        "seed": run.meta.seed,
        "config": config_to_dict(run.config),
        "totals": {
            "agents": run.n_agents_total,
            "promotions": len(run.effective_promotions),
            "demotions": len(run.demotions),
            "exits": len(run.attrition),
            "hires": len(run.hires),
        },
        "initial_efficiency": float(run.efficiency[0]),
        "final_efficiency": float(run.efficiency[-1]),
    }
    with path.open("w", newline="\n") as f:
        yaml.safe_dump(metadata, f, sort_keys=True, default_flow_style=False)
    paths.append(path)
    return paths


# -- snapshot persistence -----------------------------------------------------

_RUN_ARRAYS = {
    "efficiency": ("efficiency",),
    "level_history": ("level_history",),
    "base_competence": ("base_competence",),
    "joined_at": ("joined_at",),
    "exited_at": ("exited_at",),
    "final_level": ("final_level",),
    "final_tenure": ("final_tenure",),
    "final_performance": ("final_performance",),
    "blacklisted": ("blacklisted",),
    "promotions_agent_id": ("promotions", "agent_id"),
    "promotions_step": ("promotions", "step"),
    "promotions_from_level": ("promotions", "from_level"),
    "promotions_to_level": ("promotions", "to_level"),
    "promotions_perf_pre": ("promotions", "perf_pre"),
    "promotions_perf_post": ("promotions", "perf_post"),
    "promotions_delta_p": ("promotions", "delta_p"),
    "promotions_cause": ("promotions", "cause"),
    "promotions_reversed": ("promotions", "reversed"),
    "demotions_agent_id": ("demotions", "agent_id"),
    "demotions_step": ("demotions", "step"),
    "demotions_from_level": ("demotions", "from_level"),
    "demotions_to_level": ("demotions", "to_level"),
    "demotions_drop": ("demotions", "drop"),
    "attrition_step": ("attrition", "step"),
    "attrition_level": ("attrition", "level"),
    "attrition_agent_id": ("attrition", "agent_id"),
    "hires_step": ("hires", "step"),
    "hires_agent_id": ("hires", "agent_id"),
    "updates_step": ("competence_updates", "step"),
    "updates_agent_id": ("competence_updates", "agent_id"),
    "updates_values": ("competence_updates", "values"),
}


def _lookup(run: RunResult, path: tuple[str, ...]) -> np.ndarray:
    obj = run
    for part in path:
        obj = getattr(obj, part)
    return obj


def save_run(run: RunResult, path: Union[str, Path]) -> Path:
    """Persist a full RunResult; bytes depend only on the run's contents.

    Wall time is volatile and stored as 0.0 so identical runs always produce
    identical snapshot bytes (the empty gzip filename and zeroed mtimes pin
    the rest of the container).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(run.config),
        "meta": {
            "seed": run.meta.seed,
            "version": run.meta.version,
            "wall_time_s": 0.0,
            "n_agents_total": run.meta.n_agents_total,
        },
    }
    with path.open("wb") as raw:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="") as gz:
            with tarfile.open(fileobj=gz, mode="w", format=tarfile.USTAR_FORMAT) as tar:
                _add_member(tar, "manifest.json", json.dumps(manifest, sort_keys=True).encode())
                for name, attr_path in _RUN_ARRAYS.items():
                    buf = io.BytesIO()
                    np.save(buf, _lookup(run, attr_path), allow_pickle=False)
                    _add_member(tar, f"arrays/{name}.npy", buf.getvalue())
    return path


def _add_member(tar: tarfile.TarFile, name: str, payload: bytes) -> None:
    info = tarfile.TarInfo(name)
    info.size = len(payload)
    info.mtime = 0
    info.uid = info.gid = 0
    info.uname = info.gname = ""
    info.mode = 0o644
    tar.addfile(info, io.BytesIO(payload))


def load_run(path: Union[str, Path]) -> RunResult:
    """Reload a snapshot; round-trips equal on every field.

    Rejects snapshots whose format version differs, naming both versions.
    Truncated or malformed files raise RunFormatError without partial state.
    """
    path = Path(path)
    try:
        with tarfile.open(path, mode="r:gz") as tar:
            manifest_member = tar.extractfile("manifest.json")
            if manifest_member is None:
                raise RunFormatError(f"{path}: missing manifest")
            manifest = json.loads(manifest_member.read().decode())
            version = str(manifest.get("format_version"))
            if version != FORMAT_VERSION:
                raise RunFormatError(
                    f"{path}: snapshot format version {version!r} is not "
                    f"supported by this build (expected {FORMAT_VERSION!r})"
                )
            arrays = {}
            for name in _RUN_ARRAYS:
                member = tar.extractfile(f"arrays/{name}.npy")
                if member is None:
                    raise RunFormatError(f"{path}: missing array {name!r}")
                arrays[name] = np.load(io.BytesIO(member.read()), allow_pickle=False)
    except RunFormatError:
        raise
    except (tarfile.TarError, gzip.BadGzipFile, EOFError, OSError, ValueError, KeyError) as exc:
        raise RunFormatError(f"{path}: unreadable run snapshot ({exc})") from None

    try:
        config = config_from_dict(manifest["config"])
        meta_dict = manifest["meta"]
        meta = RunMeta(
            seed=int(meta_dict["seed"]),
            version=str(meta_dict["version"]),
            wall_time_s=float(meta_dict["wall_time_s"]),
            n_agents_total=int(meta_dict["n_agents_total"]),
        )
    except (ScenarioError, KeyError, TypeError, ValueError) as exc:
        raise RunFormatError(f"{path}: malformed manifest ({exc})") from None

    return RunResult(
        config=config,
        efficiency=arrays["efficiency"],
        promotions=PromotionLog(
            agent_id=arrays["promotions_agent_id"],
            step=arrays["promotions_step"],
            from_level=arrays["promotions_from_level"],
            to_level=arrays["promotions_to_level"],
            perf_pre=arrays["promotions_perf_pre"],
            perf_post=arrays["promotions_perf_post"],
            delta_p=arrays["promotions_delta_p"],
            cause=arrays["promotions_cause"],
            reversed=arrays["promotions_reversed"],
        ),
        demotions=DemotionLog(
            agent_id=arrays["demotions_agent_id"],
            step=arrays["demotions_step"],
            from_level=arrays["demotions_from_level"],
            to_level=arrays["demotions_to_level"],
            drop=arrays["demotions_drop"],
        ),
        attrition=AttritionLog(
            step=arrays["attrition_step"],
            level=arrays["attrition_level"],
            agent_id=arrays["attrition_agent_id"],
        ),
        hires=HireLog(step=arrays["hires_step"], agent_id=arrays["hires_agent_id"]),
        level_history=arrays["level_history"],
        base_competence=arrays["base_competence"],
        competence_updates=CompetenceUpdates(
            step=arrays["updates_step"],
            agent_id=arrays["updates_agent_id"],
            values=arrays["updates_values"],
        ),
        joined_at=arrays["joined_at"],
        exited_at=arrays["exited_at"],
        final_level=arrays["final_level"],
        final_tenure=arrays["final_tenure"],
        final_performance=arrays["final_performance"],
        blacklisted=arrays["blacklisted"],
        meta=meta,
    )
