import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from corrobe.cli import main
from corrobe.corruption import RgbImage
from corrobe.errors import InputError
from corrobe.pipeline import Session, load_metrics, probe_requests, run_discovery, run_evaluate, run_tasks
from corrobe.sg import SceneGraph, SgTuple, TaskCategory
from corrobe.store import save_scene_graphs


@pytest.fixture()
def small_manifest(tmp_path):
    from corrobe.store import DatasetManifest, InstanceRecord, save_manifest

    records = []
    for i in range(3):
        img = RgbImage(np.full((24, 24, 3), 60 + 40 * i, dtype=np.uint8))
        p = tmp_path / f"img-{i}.png"
        img.save_png(p)
        records.append(
            InstanceRecord(
                image_id=f"img-{i}",
                image_path=str(p),
                ground_truths=("a gray box", "a box"),
                captions={"clean": "a gray box"},
            )
        )
    path = tmp_path / "manifest.jsonl"
    save_manifest(DatasetManifest(instances=tuple(records)), path)
    return path


class TestStandaloneCorrupt:
    def test_selected_specs(self, small_manifest, tmp_path):
        out = tmp_path / "corrupted"
        r = CliRunner().invoke(
            main,
            ["corrupt", "--manifest", str(small_manifest), "--out", str(out),
             "--specs", "snow_1,pixelate_3", "--seed", "7"],
        )
        assert r.exit_code == 0, r.output
        report = json.loads(r.output)
        assert report["files_written"] == 6
        assert (out / "snow_1" / "img-0.png").exists()
        assert (out / "pixelate_3" / "img-2.png").exists()

    def test_bad_spec_key(self, small_manifest, tmp_path):
        r = CliRunner().invoke(
            main,
            ["corrupt", "--manifest", str(small_manifest), "--out", str(tmp_path / "x"),
             "--specs", "sharknado_9"],
        )
        assert r.exit_code == 1
        assert "error:" in r.output


class TestEvaluateCli:
    def test_report_file(self, fixture_session, tmp_path):
        session, _ = fixture_session
        out = tmp_path / "report.jsonl"
        r = CliRunner().invoke(
            main,
            ["evaluate", "--data-dir", str(session.root), "--key", "snow_2", "--out", str(out)],
        )
        assert r.exit_code == 0, r.output
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert lines[0]["scope"] == "corpus"
        assert len([l for l in lines if l["scope"] == "instance"]) == 20

    def test_missing_key_names_it(self, fixture_session):
        session, _ = fixture_session
        r = CliRunner().invoke(
            main, ["evaluate", "--data-dir", str(session.root), "--key", "frost_5"]
        )
        assert r.exit_code == 1
        assert "frost_5" in r.output


class TestProbeRequests:
    def test_emits_sorted_sentences(self, fixture_session, tmp_path):
        session, _ = fixture_session
        out = tmp_path / "probes.txt"
        r = CliRunner().invoke(
            main, ["probe-requests", "--data-dir", str(session.root), "--out", str(out)]
        )
        assert r.exit_code == 0, r.output
        lines = out.read_text().splitlines()
        assert lines == sorted(lines)
        assert all(line.startswith("a photo of a ") for line in lines)
        # the injected wrong relation must need a probe
        assert any("under" in line for line in lines)

    def test_matches_library_call(self, fixture_session):
        session, _ = fixture_session
        sentences = probe_requests(session)
        table = session.probes()
        missing = [s for s in sentences if s not in table]
        assert missing == []


class TestExternalCoords:
    def test_passthrough_in_discovery(self, fixture_session, tmp_path):
        session, info = fixture_session
        coords_path = session.root / "external_coords.jsonl"
        rows = [
            {"id": iid, "x": float(i), "y": float(2 * i)}
            for i, iid in enumerate(r.image_id for r in session.manifest)
        ]
        coords_path.write_text("".join(json.dumps(r) + "\n" for r in rows))
        session.external_coords_path = coords_path
        model = run_discovery(session, "snow_4", TaskCategory.RELATION)
        by_id = {r["id"]: (r["x"], r["y"]) for r in rows}
        for iid, (x, y) in zip(model.instance_ids, model.coords):
            assert (x, y) == by_id[iid]
        # restore cache for other tests
        session.external_coords_path = None
        run_discovery(session, "snow_4", TaskCategory.RELATION)


class TestSceneGraphFileSource:
    def test_files_source_used(self, fixture_session, tmp_path):
        session, _ = fixture_session
        # hand-written graphs for every (instance, key) the evaluate stage needs
        graphs = {}
        for rec in session.manifest:
            graphs[(rec.image_id, "clean")] = SceneGraph.of([SgTuple("box"), SgTuple("box", "gray")])
            for j in range(len(rec.ground_truths)):
                graphs[(rec.image_id, f"gt{j}")] = SceneGraph.of([SgTuple("box")])
        sg_path = session.root / "graphs.jsonl"
        save_scene_graphs(graphs, sg_path)

        files_session = Session.load(session.root)
        files_session.config = files_session.config.with_overrides(sg_source="files")
        files_session.scene_graphs_path = sg_path
        sg = files_session.candidate_sg(session.manifest.instances[0].image_id, "clean")
        assert {t.lexemes() for t in sg} == {("box",), ("box", "gray")}
        with pytest.raises(InputError):
            files_session.candidate_sg(session.manifest.instances[0].image_id, "snow_4")

    def test_template_source_parses(self, fixture_session):
        session, _ = fixture_session
        sg = session.candidate_sg("street-000", "clean")
        assert ("car", "on", "street") in {t.lexemes() for t in sg}
