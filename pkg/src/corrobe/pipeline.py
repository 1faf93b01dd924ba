"""Stage orchestration: session wiring, stage runners, and cached artifacts.

A session directory holds everything one dataset needs:

    session.json          paths + pipeline parameters (see Session.load)
    manifest.jsonl        the dataset manifest
    embeddings/*.emb/.idx image, caption, GT, and probe embedding tables
    corrupted/<key>/*.png corrupted images (corrupt stage)
    cache/                computed stage results, keyed by config hash
    exports/              augmentation manifests

Heavy computation happens in the CLI stages below; the HTTP service only
reads the cache and slices it per request.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import PipelineConfig
from .corruption.batch import CorruptionRunReport, corrupt_dataset
from .corruption.specs import CLEAN_KEY, CorruptionSpec, ParamTable, enumerate_corruptions, load_params
from .errors import ConfigError, FormatError, InputError, StageError
from .judgment import JudgedMatchResult, judge, probe_sentence
from .metrics.evaluate import METRIC_NAMES, MetricReport, assemble_curve, evaluate_corpus
from .patterns.distance import EmbeddingTriple
from .patterns.model import PatternModel, build_pattern_model, export_selection
from .sg import (
    ALL_TASKS,
    SceneGraph,
    Source,
    SynonymLexicon,
    TaskCategory,
    TaskVocab,
    categorize,
    match,
    parse_template_caption,
)
from .store.cache import ResultsCache
from .store.embeddings import EmbeddingTable
from .store.manifest import DatasetManifest, InstanceRecord, load_manifest
from .store.scene_graphs import load_scene_graphs
from .task_metrics import (
    DatasetTaskSummary,
    TaskMetricsRecord,
    dataset_summary,
    instance_task_metrics,
    metric_density,
)

logger = logging.getLogger(__name__)

SESSION_MAGIC = "corrobe-session"
SESSION_VERSION = 1
SESSION_FILE = "session.json"

STAGE_METRICS = "metrics"
STAGE_TASKS = "tasks"
STAGE_PATTERNS = "patterns"


def gt_embedding_id(image_id: str, j: int) -> str:
    return f"{image_id}#g{j}"


def caption_embedding_id(image_id: str, key: str) -> str:
    return f"{image_id}@{key}"


@dataclass(eq=False)
class Session:
    """One loaded dataset plus its configuration and caches."""

    root: Path
    config: PipelineConfig
    manifest: DatasetManifest
    lex: SynonymLexicon
    vocab: TaskVocab
    cache: ResultsCache
    images_emb_path: Path | None = None
    captions_emb_path: Path | None = None
    gts_emb_path: Path | None = None
    probes_emb_path: Path | None = None
    scene_graphs_path: Path | None = None
    external_coords_path: Path | None = None

    @classmethod
    def load(cls, root: Path) -> "Session":
        root = Path(root)
        cfg_path = root / SESSION_FILE
        if not cfg_path.exists():
            raise ConfigError(f"no {SESSION_FILE} in {root}")
        data = json.loads(cfg_path.read_text())
        if data.get("magic") != SESSION_MAGIC or data.get("version") != SESSION_VERSION:
            raise ConfigError(f"{cfg_path} is not a corrobe session file")
        config = PipelineConfig.from_dict(data.get("config", {}))
        manifest = load_manifest(root / data["manifest"])
        lex = SynonymLexicon.from_file(Path(config.synonyms_path))
        vocab = TaskVocab.from_files(Path(config.colors_path), Path(config.sizes_path))

        def opt_path(name: str) -> Path | None:
            rel = data.get(name)
            return root / rel if rel else None

        return cls(
            root=root,
            config=config,
            manifest=manifest,
            lex=lex,
            vocab=vocab,
            cache=ResultsCache(root / data.get("cache_dir", "cache")),
            images_emb_path=opt_path("images_emb"),
            captions_emb_path=opt_path("captions_emb"),
            gts_emb_path=opt_path("gts_emb"),
            probes_emb_path=opt_path("probes_emb"),
            scene_graphs_path=opt_path("scene_graphs"),
            external_coords_path=opt_path("external_coords"),
        )

    # -- lazily loaded artifacts ------------------------------------------

    @lru_cache(maxsize=None)
    def _table(self, which: str) -> EmbeddingTable:
        path = getattr(self, f"{which}_emb_path")
        if path is None:
            raise ConfigError(f"session declares no {which} embedding table")
        return EmbeddingTable.load(path)

    def images(self) -> EmbeddingTable:
        return self._table("images")

    def captions(self) -> EmbeddingTable:
        return self._table("captions")

    def gts(self) -> EmbeddingTable:
        return self._table("gts")

    def probes(self) -> EmbeddingTable:
        return self._table("probes")

    @lru_cache(maxsize=None)
    def _external_graphs(self) -> dict:
        if self.scene_graphs_path is None:
            raise ConfigError("sg_source is 'files' but session declares no scene_graphs file")
        return load_scene_graphs(self.scene_graphs_path)

    def candidate_sg(self, image_id: str, key: str) -> SceneGraph:
        rec = self.manifest.by_id(image_id)
        if rec is None:
            raise InputError(f"unknown instance id {image_id!r}")
        if key not in rec.captions:
            raise InputError(f"instance {image_id!r} has no caption for key {key!r}")
        if self.config.sg_source == "template":
            return parse_template_caption(rec.captions[key])
        graphs = self._external_graphs()
        if (image_id, key) not in graphs:
            raise InputError(f"scene-graph file lacks entry for ({image_id!r}, {key!r})")
        return graphs[(image_id, key)]

    def gt_sgs(self, rec: InstanceRecord) -> list[SceneGraph]:
        if self.config.sg_source == "template":
            graphs = [parse_template_caption(gt) for gt in rec.ground_truths]
        else:
            stored = self._external_graphs()
            graphs = []
            for j in range(len(rec.ground_truths)):
                k = (rec.image_id, f"gt{j}")
                if k not in stored:
                    raise InputError(f"scene-graph file lacks GT entry for {k}")
                graphs.append(stored[k])
        return [SceneGraph(g.tuples, Source.REFERENCE) for g in graphs]

    def probe_map(self) -> dict[str, np.ndarray]:
        table = self.probes()
        return {pid: table.get(pid) for pid in table}

    def external_coords(self) -> dict[str, tuple[float, float]] | None:
        if self.external_coords_path is None or not self.external_coords_path.exists():
            return None
        out = {}
        for ln, raw in enumerate(self.external_coords_path.read_text().splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                out[str(rec["id"])] = (float(rec["x"]), float(rec["y"]))
            except Exception as e:
                raise FormatError(f"bad coordinate record: {e}",
                                  path=str(self.external_coords_path), line=ln) from e
        return out

    def instances_with_key(self, key: str) -> list[InstanceRecord]:
        missing = [r.image_id for r in self.manifest if key not in r.captions]
        if missing:
            raise InputError(
                f"no captions for corruption key {key!r} on {len(missing)} instances "
                f"(e.g. {missing[:3]})"
            )
        return list(self.manifest)

    def corruption_params(self) -> ParamTable:
        return load_params(self.config.corruption_params_path)


def write_session_file(
    root: Path,
    config: PipelineConfig,
    manifest_rel: str = "manifest.jsonl",
    **artifact_rel_paths: str | None,
) -> Path:
    root = Path(root)
    data = {
        "magic": SESSION_MAGIC,
        "version": SESSION_VERSION,
        "manifest": manifest_rel,
        "cache_dir": "cache",
        "config": config.to_dict(),
    }
    for name, rel in artifact_rel_paths.items():
        if rel is not None:
            data[name] = rel
    path = root / SESSION_FILE
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# stage: corrupt


def run_corrupt(
    session: Session,
    specs: Sequence[CorruptionSpec] | None = None,
    seed: int = 0,
    workers: int = 4,
) -> CorruptionRunReport:
    params = session.corruption_params()
    if specs is None:
        specs = enumerate_corruptions(params)
    return corrupt_dataset(
        session.manifest, specs, seed, session.root / "corrupted", params=params, workers=workers
    )


# ---------------------------------------------------------------------------
# stage: evaluate


def run_evaluate(session: Session, key: str) -> tuple[MetricReport, list[MetricReport]]:
    """Compute and cache corpus + per-instance metric reports for one key."""
    records = session.instances_with_key(key)
    ids = [r.image_id for r in records]
    candidates = [r.captions[key] for r in records]
    reference_sets = [list(r.ground_truths) for r in records]
    candidate_sgs = [session.candidate_sg(r.image_id, key) for r in records]
    reference_sg_sets = [session.gt_sgs(r) for r in records]

    corpus, instances = evaluate_corpus(
        candidates, reference_sets, candidate_sgs, reference_sg_sets,
        session.lex, session.vocab, key, instance_ids=ids,
    )

    rows = [{"scope": "corpus", **corpus.values(), "meteor_variant": corpus.meteor_variant}]
    rows += [
        {"scope": "instance", "instance_id": r.instance_id, **r.values()}
        for r in instances
    ]
    session.cache.put(STAGE_METRICS, key, session.config.config_hash(), rows)
    return corpus, instances


def load_metrics(session: Session, key: str) -> tuple[dict, list[dict]]:
    got = session.cache.get(STAGE_METRICS, key, session.config.config_hash())
    if got is None:
        raise StageError("evaluate", f"no cached metrics for key {key!r}")
    _, rows = got
    corpus = [r for r in rows if r["scope"] == "corpus"]
    instances = [r for r in rows if r["scope"] == "instance"]
    if len(corpus) != 1:
        raise StageError("evaluate", f"cached metrics for {key!r} are malformed")
    return corpus[0], instances


def curve_for_kind(session: Session, kind: str) -> dict:
    """Assemble the 6x6 performance curve for one corruption kind from cache."""
    reports = {}
    for severity in range(0, 6):
        key = CLEAN_KEY if severity == 0 else f"{kind}_{severity}"
        corpus, _ = load_metrics(session, key)
        reports[severity] = MetricReport(
            scope="corpus", corruption_key=key,
            **{name: corpus[name] for name in METRIC_NAMES},
        )
    curve = assemble_curve(kind, reports)
    return {"kind": curve.kind, "metrics": curve.metrics}


# ---------------------------------------------------------------------------
# stage: analyze-tasks


def _judged_for_instance(
    session: Session, rec: InstanceRecord, key: str
) -> tuple[SceneGraph, list[JudgedMatchResult]]:
    cand = session.candidate_sg(rec.image_id, key)
    image_vec = session.images().get(rec.image_id)
    probes = session.probe_map()
    judged = []
    for gt_sg in session.gt_sgs(rec):
        m = match(cand, gt_sg, session.lex, session.vocab)
        judged.append(
            judge(
                m,
                image_vec,
                probes,
                threshold=session.config.judgment_threshold,
                missing_policy=session.config.missing_probe_policy,
            )
        )
    return cand, judged


def run_tasks(session: Session, key: str) -> tuple[list[TaskMetricsRecord], list[DatasetTaskSummary]]:
    """Compute and cache per-instance task metrics and dataset summaries."""
    records = session.instances_with_key(key)
    all_records: list[TaskMetricsRecord] = []
    for rec in records:
        cand, judged = _judged_for_instance(session, rec, key)
        per_task = instance_task_metrics(rec.image_id, judged, cand, session.vocab, session.lex)
        all_records.extend(per_task.values())

    summaries = [
        dataset_summary(all_records, task, key, total_instances=len(records))
        for task in ALL_TASKS
    ]

    rows: list[dict] = []
    for r in all_records:
        rows.append(
            {
                "type": "instance",
                "instance_id": r.instance_id,
                "task": r.task.value,
                "attempted": r.attempted,
                "error_rate": r.error_rate,
                "shift_rate": r.shift_rate,
                "sensitivity": r.sensitivity,
                "per_gt": r.per_gt,
            }
        )
    for s in summaries:
        attempting = [r for r in all_records if r.task == s.task and r.attempted]
        rows.append(
            {
                "type": "summary",
                "task": s.task.value,
                "attempt_count": s.attempt_count,
                "error_rate": s.error_rate,
                "shift_rate": s.shift_rate,
                "sensitivity": s.sensitivity,
                "total_instances": s.total_instances,
                "densities": {
                    "err": metric_density([r.error_rate for r in attempting]),
                    "sf": metric_density([r.shift_rate for r in attempting]),
                    "sen": metric_density([r.sensitivity for r in attempting]),
                },
            }
        )
    session.cache.put(STAGE_TASKS, key, session.config.config_hash(), rows)
    return all_records, summaries


def load_tasks(session: Session, key: str) -> tuple[list[dict], list[dict]]:
    got = session.cache.get(STAGE_TASKS, key, session.config.config_hash())
    if got is None:
        raise StageError("analyze-tasks", f"no cached task metrics for key {key!r}")
    _, rows = got
    return (
        [r for r in rows if r["type"] == "instance"],
        [r for r in rows if r["type"] == "summary"],
    )


# ---------------------------------------------------------------------------
# stage: discover


def run_discovery(session: Session, key: str, task: TaskCategory) -> PatternModel:
    """Cluster attempting instances of one task and cache the pattern payload."""
    instance_rows, _ = load_tasks(session, key)
    attempting = sorted(
        row["instance_id"]
        for row in instance_rows
        if row["task"] == task.value and row["attempted"] == 1
    )

    images = session.images()
    captions = session.captions()
    gts = session.gts()
    triples = []
    for iid in attempting:
        rec = session.manifest.by_id(iid)
        e_gts = tuple(
            gts.get(gt_embedding_id(iid, j)) for j in range(len(rec.ground_truths))
        )
        triples.append(
            EmbeddingTriple(
                instance_id=iid,
                e_img=images.get(iid),
                e_cap=captions.get(caption_embedding_id(iid, key)),
                e_gts=e_gts,
            )
        )

    candidate_sgs = {iid: session.candidate_sg(iid, key) for iid in attempting}
    model = build_pattern_model(
        triples,
        candidate_sgs,
        task,
        key,
        session.vocab,
        alpha=session.config.alpha,
        min_cluster_size=session.config.min_cluster_size,
        min_samples=session.config.min_samples,
        external_coords=session.external_coords(),
    )

    metrics_by_id = {
        row["instance_id"]: row
        for row in instance_rows
        if row["task"] == task.value and row["attempted"] == 1
    }
    rows: list[dict] = [
        {
            "type": "meta",
            "task": task.value,
            "corruption_key": key,
            "alpha": model.alpha,
            "n": model.n,
            "clusters": model.cluster_ids(),
        }
    ]
    for i, iid in enumerate(model.instance_ids):
        tm = metrics_by_id[iid]
        rows.append(
            {
                "type": "point",
                "id": iid,
                "x": float(model.coords[i, 0]),
                "y": float(model.coords[i, 1]),
                "label": int(model.labels[i]),
                "error_rate": tm["error_rate"],
                "shift_rate": tm["shift_rate"],
                "sensitivity": tm["sensitivity"],
            }
        )
    for c in model.cluster_ids():
        rows.append(
            {
                "type": "cluster",
                "label": c,
                "centroid_label": model.centroid_labels.get(c, ""),
                "density": model.density_grids[c],
            }
        )
    session.cache.put(STAGE_PATTERNS, f"{key}@{task.value}", session.config.config_hash(), rows)
    return model


def load_patterns(session: Session, key: str, task: TaskCategory) -> tuple[dict, list[dict], list[dict]]:
    got = session.cache.get(STAGE_PATTERNS, f"{key}@{task.value}", session.config.config_hash())
    if got is None:
        raise StageError("discover", f"no cached pattern model for ({key!r}, {task.value!r})")
    _, rows = got
    meta = next(r for r in rows if r["type"] == "meta")
    points = [r for r in rows if r["type"] == "point"]
    clusters = [r for r in rows if r["type"] == "cluster"]
    return meta, points, clusters


def export_from_cache(
    session: Session, ids: Sequence[str], key: str, task: TaskCategory, out_path: Path | None = None
) -> tuple[Path, dict]:
    """Export an augmentation manifest for a selection over cached patterns."""
    meta, points, _ = load_patterns(session, key, task)
    known = {p["id"] for p in points}
    unknown = sorted(set(ids) - known)
    if not ids:
        raise InputError("selection is empty; nothing to export")
    if unknown:
        raise InputError(f"unknown instance ids in selection: {unknown}")
    label_of = {p["id"]: p["label"] for p in points}

    deduped = list(dict.fromkeys(ids))
    if out_path is None:
        exports = session.root / "exports"
        exports.mkdir(parents=True, exist_ok=True)
        out_path = exports / f"selection_{key}_{task.value}_{len(deduped)}.jsonl"

    # Reuse the manifest writer; build a minimal model-like view from cache.
    shim = PatternModel(
        task=task,
        corruption_key=key,
        instance_ids=tuple(p["id"] for p in points),
        condensed_distances=np.zeros(0),
        alpha=float(meta["alpha"]),
        labels=np.array([label_of[p["id"]] for p in points], dtype=int),
        coords=np.zeros((len(points), 2)),
    )
    header = export_selection(ids, shim, out_path, config_hash=session.config.config_hash())
    return Path(out_path), header


# ---------------------------------------------------------------------------
# probe requests


def probe_requests(session: Session, keys: Sequence[str] | None = None) -> list[str]:
    """All probe sentences an external encoder must produce for this dataset."""
    if keys is None:
        keys = session.manifest.caption_keys()
    sentences: set[str] = set()
    for rec in session.manifest:
        gt_graphs = session.gt_sgs(rec)
        for key in keys:
            if key not in rec.captions:
                continue
            cand = session.candidate_sg(rec.image_id, key)
            for gt_sg in gt_graphs:
                m = match(cand, gt_sg, session.lex, session.vocab)
                for cat in ALL_TASKS:
                    for t in m.fp_raw[cat]:
                        sentences.add(probe_sentence(t))
    return sorted(sentences)


def instance_detail(session: Session, image_id: str, key: str) -> dict:
    """Payload for the instance inspection view."""
    rec = session.manifest.by_id(image_id)
    if rec is None:
        raise InputError(f"unknown instance id {image_id!r}")
    if key not in rec.captions:
        raise InputError(f"instance {image_id!r} has no caption for key {key!r}")

    from .sg.matching import canonicalize, canonicalize_tuple

    gt_graphs = session.gt_sgs(rec)
    gt_freq: dict = {}
    for g in gt_graphs:
        canon = canonicalize(g, session.lex)
        for t in canon.tuples:
            gt_freq[t] = gt_freq.get(t, 0) + 1

    def layer(caption_key: str) -> list[dict]:
        sg = session.candidate_sg(image_id, caption_key)
        out = []
        for t in sorted(sg.tuples):
            canon = canonicalize_tuple(t, session.lex)
            cats = sorted(c.value for c in categorize(t, session.vocab))
            out.append(
                {
                    "element": " ".join(t.lexemes()),
                    "tuple": t.to_list(),
                    "categories": cats,
                    "matched": canon in gt_freq,
                    "gt_frequency": gt_freq.get(canon, 0),
                }
            )
        return out

    gt_cards = [
        {"element": " ".join(t.lexemes()), "tuple": t.to_list(), "frequency": c}
        for t, c in sorted(gt_freq.items())
    ]

    corrupted_metrics = {r["instance_id"]: r for r in load_metrics(session, key)[1]}
    clean_metrics = {r["instance_id"]: r for r in load_metrics(session, CLEAN_KEY)[1]}
    task_rows, _ = load_tasks(session, key)
    my_tasks = {
        r["task"]: {
            "attempted": r["attempted"],
            "error_rate": r["error_rate"],
            "shift_rate": r["shift_rate"],
            "sensitivity": r["sensitivity"],
        }
        for r in task_rows
        if r["instance_id"] == image_id
    }

    def radar(row: dict | None) -> dict | None:
        if row is None:
            return None
        return {name: row[name] for name in METRIC_NAMES}

    return {
        "id": image_id,
        "image": {"clean": rec.image_path, "corrupted": f"corrupted/{key}/{image_id}.png"},
        "corrupted_key": key,
        "layers": {
            "corrupted": layer(key),
            "gt_cards": gt_cards,
            "clean": layer(CLEAN_KEY),
        },
        "task_metrics": my_tasks,
        "radar": {
            "corrupted": radar(corrupted_metrics.get(image_id)),
            "clean": radar(clean_metrics.get(image_id)),
        },
        "ground_truths": list(rec.ground_truths),
        "captions": {"clean": rec.captions.get(CLEAN_KEY), key: rec.captions[key]},
    }
