"""Procedural fixtures: synthetic images, captions, and toy embeddings.

Everything here exists so the full pipeline, the test suite, and the demo
dashboard run with zero model dependencies. The toy encoders stand in for
external image/text encoders: they are deterministic and produce a geometry
that behaves like a joint embedding space (items sharing content get high
cosine similarity), which is all the downstream math needs.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import ndimage

from .corruption.engine import RgbImage

IMAGE_SIZE = 64
EMBED_DIM = 64


def _blob_image(rng: np.random.Generator, size: int) -> np.ndarray:
    f = rng.normal(size=(size, size, 3))
    f = ndimage.gaussian_filter(f, (6, 6, 0))
    f = (f - f.min()) / (f.max() - f.min())
    return f * 255


def monotonicity_test_images(size: int = IMAGE_SIZE) -> list[RgbImage]:
    """The 10 fixed synthetic images used for severity-monotonicity checks.

    Smooth gradients, shapes, stripes, and textures; deliberately free of
    power-of-two grid structure that resonates with block-based codecs.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array([42, 0], dtype=np.uint64)))
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    imgs: list[np.ndarray] = []

    imgs.append(np.stack([xx, yy, (xx + yy) / 2], axis=-1) / (size - 1) * 255)

    rad = np.sqrt((xx - size / 2) ** 2 + (yy - size / 2) ** 2)
    imgs.append(np.stack([255 - rad * 4, rad * 4, np.full_like(rad, 96)], axis=-1))

    for r, color in [(20, (255, 80, 40)), (14, (60, 200, 120))]:
        img = np.zeros((size, size, 3)) + 40
        mask = (xx - size / 2) ** 2 + (yy - size / 2) ** 2 <= r * r
        for c in range(3):
            img[..., c][mask] = color[c]
        imgs.append(img)

    imgs.append(
        np.stack(
            [((xx // 6) % 2) * 220 + 20, ((yy // 5) % 2) * 220 + 20, ((xx // 3) % 2) * 120 + 60],
            axis=-1,
        )
    )

    diag = (xx + yy < size).astype(np.float64)
    imgs.append(np.stack([diag * 200 + 30, (1 - diag) * 200 + 30, np.full_like(diag, 140)], axis=-1))

    imgs.append(_blob_image(rng, size))
    imgs.append(_blob_image(rng, size))
    imgs.append(rng.integers(0, 256, (size, size, 3)).astype(np.float64))
    imgs.append(np.full((size, size, 3), 128.0))

    return [RgbImage(np.clip(a, 0, 255).astype(np.uint8)) for a in imgs]


# ---------------------------------------------------------------------------
# toy joint embedding space


def token_direction(token: str, dim: int) -> np.ndarray:
    """Stable pseudo-random unit-ish direction for one token."""
    digest = hashlib.blake2b(token.encode(), digest_size=16).digest()
    key = np.frombuffer(digest, dtype="<u8")
    rng = np.random.Generator(np.random.Philox(key=key))
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def encode_text(text: str, dim: int = 32) -> np.ndarray:
    """Bag-of-token-directions text encoder."""
    from .metrics.tokenizer import tokenize

    tokens = tokenize(text)
    if not tokens:
        return np.zeros(dim)
    return np.sum([token_direction(t, dim) for t in tokens], axis=0)


class TupleSpace:
    """Exactly orthogonal joint space for images and probe sentences.

    Every distinct canonical tuple in the fixture gets its own basis axis;
    objects and relations carry twice the weight of attributes so their probes
    sit comfortably above the judgment threshold when present in a scene.
    A few reserved trailing axes hold per-image jitter.
    """

    JITTER_AXES = 8
    ARITY_WEIGHT = {1: 2.0, 2: 1.0, 3: 2.0}

    def __init__(self, all_tuples):
        self.index = {t: i for i, t in enumerate(sorted(set(all_tuples)))}
        self.dim = len(self.index) + self.JITTER_AXES

    def probe_vec(self, t) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.index[t]] = self.ARITY_WEIGHT[t.arity]
        return v

    def scene_vec(self, truth_tuples, jitter_key: str = "", jitter: float = 0.1) -> np.ndarray:
        v = np.zeros(self.dim)
        for t in truth_tuples:
            v[self.index[t]] = self.ARITY_WEIGHT[t.arity]
        if jitter_key:
            digest = hashlib.blake2b(jitter_key.encode(), digest_size=16).digest()
            rng = np.random.Generator(np.random.Philox(key=np.frombuffer(digest, dtype="<u8")))
            v[-self.JITTER_AXES :] = jitter * np.linalg.norm(v) * rng.normal(size=self.JITTER_AXES) / np.sqrt(self.JITTER_AXES)
        return v


# ---------------------------------------------------------------------------
# synthetic dataset: 20 scenes in three families


_STREET_COLORS = ["gray", "red", "blue", "white", "black", "green", "silver", "brown"]
_ROOM_ANIMALS = ["cat", "dog"]
_ROOM_COLORS = ["black", "white", "brown", "orange", "gray", "tan"]
_ROOM_FURNITURE = ["table", "bench", "desk"]
_FOOD_DISHES = ["pizza", "pasta", "salad"]
_FOOD_COLORS = ["white", "blue", "green", "yellow", "red", "black"]

SEEDED_TASK = "relation"
SEEDED_KEY = "snow_4"


def _wrong_color(color: str) -> str:
    palette = ["purple", "pink", "teal", "maroon", "navy", "olive", "cyan", "crimson"]
    return palette[sum(map(ord, color)) % len(palette)]


def _street_scene(i: int) -> dict:
    color = _STREET_COLORS[i % len(_STREET_COLORS)]
    count = "two" if i % 2 == 0 else "three"
    wrong = _wrong_color(color)
    gt1 = f"{count} {color} cars on a winding street near small buildings"
    gt2 = f"{color} cars on a long street"
    clean = gt1
    return {
        "id": f"street-{i:03d}",
        "family": "street",
        "ground_truths": [gt1, gt2],
        "captions": {
            "clean": clean,
            "snow_1": f"{count} {color} cars on a winding street near buildings",
            "snow_2": f"{count} {color} cars on a street near buildings",
            "snow_3": f"{count} {wrong} cars on a street near buildings",
            # seeded relation error: "under" replaces the true "on"
            "snow_4": f"{count} {wrong} cars under a street near buildings",
            "snow_5": f"a {wrong} car under a street near a fence",
        },
    }


def _room_scene(i: int) -> dict:
    animal = _ROOM_ANIMALS[i % len(_ROOM_ANIMALS)]
    color = _ROOM_COLORS[i % len(_ROOM_COLORS)]
    furniture = _ROOM_FURNITURE[i % len(_ROOM_FURNITURE)]
    wrong = _wrong_color(color)
    gt1 = f"a {color} {animal} sitting on a small {furniture}"
    gt2 = f"a {color} {animal} on a {furniture} in a room"
    clean = f"a {color} {animal} sitting on a small {furniture} near a window"
    return {
        "id": f"room-{i:03d}",
        "family": "room",
        "ground_truths": [gt1, gt2],
        "captions": {
            "clean": clean,
            "snow_1": f"a {color} {animal} sitting on a {furniture} near a window",
            "snow_2": f"a {color} {animal} sitting on a {furniture}",
            "snow_3": f"a {wrong} {animal} sitting on a {furniture}",
            "snow_4": f"a {wrong} {animal} sitting on a {furniture}",
            "snow_5": f"a {wrong} {animal} behind a {furniture}",
        },
    }


def _food_scene(i: int) -> dict:
    dish = _FOOD_DISHES[i % len(_FOOD_DISHES)]
    color = _FOOD_COLORS[i % len(_FOOD_COLORS)]
    wrong = _wrong_color(color)
    gt1 = f"a {color} plate with hot {dish} on a wooden table"
    gt2 = f"a {color} plate with {dish} on a table"
    return {
        "id": f"food-{i:03d}",
        "family": "food",
        "ground_truths": [gt1, gt2],
        "captions": {
            "clean": gt1,
            "snow_1": f"a {color} plate with {dish} on a wooden table",
            "snow_2": f"a {color} plate with {dish} on a table",
            "snow_3": f"a {wrong} plate with {dish} on a table",
            "snow_4": f"a {wrong} plate with {dish} on a table",
            "snow_5": f"a plate with {dish} on a table",
        },
    }


def fixture_scenes(n_street: int = 8, n_room: int = 6, n_food: int = 6) -> list[dict]:
    scenes = [_street_scene(i) for i in range(n_street)]
    scenes += [_room_scene(i) for i in range(n_room)]
    scenes += [_food_scene(i) for i in range(n_food)]
    return scenes


def seeded_instance_ids(scenes: list[dict]) -> list[str]:
    """Instances whose corrupted captions carry the injected relation error."""
    return [s["id"] for s in scenes if s["family"] == "street"]


# ---------------------------------------------------------------------------
# procedural scene rendering


_FAMILY_BG = {"street": (185, 185, 190), "room": (222, 210, 190), "food": (235, 225, 205)}
_LEXEME_COLORS = {
    "gray": (128, 128, 128), "red": (200, 40, 40), "blue": (40, 70, 200),
    "white": (240, 240, 240), "black": (25, 25, 25), "green": (40, 160, 60),
    "silver": (192, 196, 200), "brown": (140, 90, 50), "orange": (230, 140, 30),
    "tan": (210, 180, 140), "yellow": (230, 210, 50), "purple": (130, 60, 170),
}


def render_scene(scene: dict, size: int = IMAGE_SIZE) -> RgbImage:
    """Deterministic toy rendering: background plus colored shapes per object."""
    rng = np.random.Generator(
        np.random.Philox(key=np.frombuffer(
            hashlib.blake2b(scene["id"].encode(), digest_size=16).digest(), dtype="<u8"
        ))
    )
    img = np.zeros((size, size, 3), dtype=np.float64)
    img[:] = _FAMILY_BG[scene["family"]]

    tokens = " ".join(scene["ground_truths"]).split()
    accents = [c for t in tokens if (c := _LEXEME_COLORS.get(t))]
    if not accents:
        accents = [(90, 90, 90)]
    n_shapes = 3 + len(accents)
    yy, xx = np.mgrid[0:size, 0:size]
    for k in range(n_shapes):
        color = accents[k % len(accents)]
        cx, cy = rng.integers(8, size - 8, size=2)
        r = int(rng.integers(5, 14))
        if k % 2 == 0:
            mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        else:
            mask = (np.abs(xx - cx) <= r) & (np.abs(yy - cy) <= r // 2 + 2)
        img[mask] = color
    return RgbImage(np.clip(img, 0, 255).astype(np.uint8))


# ---------------------------------------------------------------------------
# session assembly


def build_fixture(out_dir: Path, dim: int = EMBED_DIM) -> dict:
    """Build a complete session directory for the synthetic dataset.

    Writes images, the manifest, all four embedding tables, the probe-request
    list, the display-fixture file, and session.json. Returns a summary.
    """
    from .config import PipelineConfig
    from .judgment import probe_sentence
    from .pipeline import Session, caption_embedding_id, gt_embedding_id, write_session_file
    from .sg import SynonymLexicon, parse_template_caption
    from .sg.matching import canonicalize_tuple
    from .store.manifest import DatasetManifest, InstanceRecord, save_manifest
    from .store.embeddings import write_embeddings

    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "embeddings").mkdir(parents=True, exist_ok=True)
    scenes = fixture_scenes()
    lex = SynonymLexicon.default()

    def canon_tuples(text: str) -> set:
        return {canonicalize_tuple(t, lex) for t in parse_template_caption(text).tuples}

    # The joint image/probe space covers every canonical tuple any caption or
    # ground truth can produce.
    all_tuples: set = set()
    truths: dict[str, set] = {}
    for scene in scenes:
        truth = set()
        for text in [*scene["ground_truths"], scene["captions"]["clean"]]:
            truth |= canon_tuples(text)
        truths[scene["id"]] = truth
        all_tuples |= truth
        for caption in scene["captions"].values():
            all_tuples |= canon_tuples(caption)
    space = TupleSpace(all_tuples)

    records = []
    image_ids, image_vecs = [], []
    cap_ids, cap_vecs = [], []
    gt_ids, gt_vecs = [], []
    probe_map: dict[str, np.ndarray] = {}

    for scene in scenes:
        iid = scene["id"]
        img = render_scene(scene)
        img_path = out_dir / "images" / f"{iid}.png"
        img.save_png(img_path)
        records.append(
            InstanceRecord(
                image_id=iid,
                image_path=str(img_path),
                ground_truths=tuple(scene["ground_truths"]),
                captions=dict(scene["captions"]),
            )
        )

        image_ids.append(iid)
        image_vecs.append(space.scene_vec(truths[iid], jitter_key=iid))

        for j, gt in enumerate(scene["ground_truths"]):
            gt_ids.append(gt_embedding_id(iid, j))
            gt_vecs.append(encode_text(gt, dim))
        for key, caption in scene["captions"].items():
            cap_ids.append(caption_embedding_id(iid, key))
            cap_vecs.append(encode_text(caption, dim))
            for t in canon_tuples(caption):
                probe_map.setdefault(probe_sentence(t), space.probe_vec(t))

    manifest_path = out_dir / "manifest.jsonl"
    save_manifest(DatasetManifest(instances=tuple(records)), manifest_path)
    write_embeddings(out_dir / "embeddings" / "images.emb", image_ids, np.array(image_vecs))
    write_embeddings(out_dir / "embeddings" / "captions.emb", cap_ids, np.array(cap_vecs))
    write_embeddings(out_dir / "embeddings" / "gts.emb", gt_ids, np.array(gt_vecs))
    probe_ids = sorted(probe_map)
    write_embeddings(
        out_dir / "embeddings" / "probes.emb", probe_ids, np.array([probe_map[p] for p in probe_ids])
    )
    (out_dir / "probe_requests.txt").write_text("".join(p + "\n" for p in probe_ids))

    display_src = Path(resources.files("corrobe").joinpath("data", "display_fixture.json"))  # type: ignore[arg-type]
    shutil.copyfile(display_src, out_dir / "display_fixture.json")

    # Small clusters: the fixture families have 6-8 members each.
    config = PipelineConfig(min_cluster_size=4, min_samples=2)
    write_session_file(
        out_dir,
        config,
        manifest_rel="manifest.jsonl",
        images_emb="embeddings/images.emb",
        captions_emb="embeddings/captions.emb",
        gts_emb="embeddings/gts.emb",
        probes_emb="embeddings/probes.emb",
    )

    return {
        "root": str(out_dir),
        "instances": len(records),
        "caption_keys": sorted({k for r in records for k in r.captions}),
        "seeded_ids": seeded_instance_ids(scenes),
        "seeded_key": SEEDED_KEY,
        "seeded_task": SEEDED_TASK,
        "probes": len(probe_ids),
    }
