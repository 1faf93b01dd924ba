"""The corruption transforms.

All pixel arithmetic runs in float64 on [0, 1] and is clamped and rounded to
8 bits once, at the very end, with round-half-to-even: a fixed rounding rule
is what makes repeated runs bit-identical.

Stochastic kinds draw every random number from a counter-based generator
(Philox) keyed by (seed, image id, spec key), so batch order and parallelism
cannot change any output byte. Deterministic kinds draw no per-call
randomness at all; fog and elastic build their procedural patterns from fixed
seeds recorded in the parameter file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from io import BytesIO
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from ..errors import ConfigError, InputError
from .specs import CorruptionSpec, ParamTable, load_params

# ---------------------------------------------------------------------------
# image container


@dataclass(frozen=True)
class RgbImage:
    """8-bit RGB raster image, row-major HxWx3."""

    array: np.ndarray

    def __post_init__(self):
        a = self.array
        if not isinstance(a, np.ndarray) or a.ndim != 3 or a.shape[2] != 3 or a.dtype != np.uint8:
            raise InputError(f"RgbImage needs a HxWx3 uint8 array, got {getattr(a, 'shape', None)} {getattr(a, 'dtype', None)}")
        if a.shape[0] == 0 or a.shape[1] == 0:
            raise InputError("zero-sized image")

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @classmethod
    def from_file(cls, path: Path) -> "RgbImage":
        with Image.open(path) as im:
            return cls(np.asarray(im.convert("RGB"), dtype=np.uint8))

    def save_png(self, path: Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(self.array, mode="RGB").save(path, format="PNG")

    def copy(self) -> "RgbImage":
        return RgbImage(self.array.copy())


def psnr(a: RgbImage | np.ndarray, b: RgbImage | np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; inf for identical images."""
    xa = a.array if isinstance(a, RgbImage) else np.asarray(a)
    xb = b.array if isinstance(b, RgbImage) else np.asarray(b)
    if xa.shape != xb.shape:
        raise InputError(f"shape mismatch: {xa.shape} vs {xb.shape}")
    mse = float(np.mean((xa.astype(np.float64) - xb.astype(np.float64)) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(255.0**2 / mse)


# ---------------------------------------------------------------------------
# deterministic randomness


def rng_for(seed: int, image_id: str, spec_key: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, image id, spec key)."""
    digest = hashlib.blake2b(
        f"{seed}|{image_id}|{spec_key}".encode(), digest_size=16
    ).digest()
    key = np.frombuffer(digest, dtype="<u8")
    return np.random.Generator(np.random.Philox(key=key))


def _pattern_rng(pattern_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([pattern_seed, 0], dtype=np.uint64)))


# ---------------------------------------------------------------------------
# helpers


def _to_float(img: RgbImage) -> np.ndarray:
    return img.array.astype(np.float64) / 255.0


def _to_image(x: np.ndarray) -> RgbImage:
    # round-half-to-even, the one rounding step of the whole pipeline
    return RgbImage(np.rint(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8))


def _rgb_to_hsv(x: np.ndarray) -> np.ndarray:
    r, g, b = x[..., 0], x[..., 1], x[..., 2]
    maxc = x.max(axis=-1)
    minc = x.min(axis=-1)
    v = maxc
    delta = maxc - minc
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        dd = np.where(delta > 0, delta, 1.0)
        rc = (maxc - r) / dd
        gc = (maxc - g) / dd
        bc = (maxc - b) / dd
    h = np.zeros_like(v)
    h = np.where(maxc == r, bc - gc, h)
    h = np.where(maxc == g, 2.0 + rc - bc, h)
    h = np.where(maxc == b, 4.0 + gc - rc, h)
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, v], axis=-1)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.select([i == 0, i == 1, i == 2, i == 3, i == 4, i == 5], [v, q, p, p, t, v])
    g = np.select([i == 0, i == 1, i == 2, i == 3, i == 4, i == 5], [t, v, v, q, p, p])
    b = np.select([i == 0, i == 1, i == 2, i == 3, i == 4, i == 5], [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def _blur_channels(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    for c in range(3):
        out[..., c] = ndimage.convolve(x[..., c], kernel, mode="reflect")
    return out


def _line_kernel(radius: int, sigma: float, angle_deg: float) -> np.ndarray:
    """Gaussian-weighted line kernel for motion blur."""
    size = 2 * int(radius) + 1
    kernel = np.zeros((size, size))
    offsets = np.arange(size) - radius
    kernel[radius, :] = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel = ndimage.rotate(kernel, angle_deg, reshape=False, order=1, mode="constant")
    total = kernel.sum()
    if total <= 0:
        raise ConfigError("degenerate motion blur kernel")
    return kernel / total


def _clipped_zoom(x: np.ndarray, factor: float) -> np.ndarray:
    """Zoom into the center by `factor`, keeping the original shape."""
    h, w = x.shape[:2]
    ch = int(np.ceil(h / factor))
    cw = int(np.ceil(w / factor))
    top = (h - ch) // 2
    left = (w - cw) // 2
    crop = x[top : top + ch, left : left + cw]
    zoom_factors = (h / ch, w / cw) + (1,) * (x.ndim - 2)
    zoomed = ndimage.zoom(crop, zoom_factors, order=1, mode="reflect")
    zh, zw = zoomed.shape[:2]
    ty = max((zh - h) // 2, 0)
    tx = max((zw - w) // 2, 0)
    return zoomed[ty : ty + h, tx : tx + w]


def _plasma_fractal(h: int, w: int, wibbledecay: float, rng: np.random.Generator) -> np.ndarray:
    """Diamond-square heightmap in [0, 1], generated at the next power of two."""
    mapsize = 1
    while mapsize < max(h, w):
        mapsize *= 2
    mapsize = max(mapsize, 2)
    maparray = np.zeros((mapsize, mapsize), dtype=np.float64)
    stepsize = mapsize
    wibble = 100.0

    def wibbled_mean(array: np.ndarray) -> np.ndarray:
        return array / 4.0 + wibble * rng.uniform(-wibble, wibble, array.shape)

    while stepsize >= 2:
        half = stepsize // 2
        corners = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        square_sum = corners + np.roll(corners, -1, axis=0)
        square_sum = square_sum + np.roll(square_sum, -1, axis=1)
        maparray[half:mapsize:stepsize, half:mapsize:stepsize] = wibbled_mean(square_sum)

        inner = maparray[half:mapsize:stepsize, half:mapsize:stepsize]
        outer = maparray[0:mapsize:stepsize, 0:mapsize:stepsize]
        ld = inner + np.roll(inner, 1, axis=0)
        lu = outer + np.roll(outer, -1, axis=1)
        maparray[0:mapsize:stepsize, half:mapsize:stepsize] = wibbled_mean(ld + lu)
        td = inner + np.roll(inner, 1, axis=1)
        tu = outer + np.roll(outer, -1, axis=0)
        maparray[half:mapsize:stepsize, 0:mapsize:stepsize] = wibbled_mean(td + tu)

        stepsize //= 2
        wibble /= wibbledecay

    maparray -= maparray.min()
    peak = maparray.max()
    if peak > 0:
        maparray /= peak
    return maparray[:h, :w]


# ---------------------------------------------------------------------------
# the sixteen transforms (float [0,1] in, float out)


def _gaussian_noise(x, p, rng):
    return x + rng.normal(size=x.shape, scale=p["sigma"])


def _shot_noise(x, p, rng):
    lam = float(p["photons"])
    return rng.poisson(x * lam) / lam


def _impulse_noise(x, p, rng):
    h, w = x.shape[:2]
    hit = rng.random((h, w)) < p["amount"]
    salt = rng.random((h, w)) < 0.5
    out = x.copy()
    out[hit & salt] = 1.0
    out[hit & ~salt] = 0.0
    return out


def _speckle_noise(x, p, rng):
    return x + x * rng.normal(size=x.shape, scale=p["sigma"])


def _defocus_blur(x, p, rng):
    radius = int(p["radius"])
    grid = np.arange(-radius, radius + 1)
    xx, yy = np.meshgrid(grid, grid)
    disk = ((xx**2 + yy**2) <= radius**2).astype(np.float64)
    disk = ndimage.gaussian_filter(disk, sigma=p["alias_blur"], mode="constant")
    disk /= disk.sum()
    return _blur_channels(x, disk)


def _glass_blur(x, p, rng):
    sigma = float(p["sigma"])
    delta = int(p["max_delta"])
    out = ndimage.gaussian_filter(x, sigma=(sigma, sigma, 0), mode="reflect")
    h, w = x.shape[:2]
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    for _ in range(int(p["iterations"])):
        dy = rng.integers(-delta, delta + 1, size=(h, w))
        dx = rng.integers(-delta, delta + 1, size=(h, w))
        ys = np.clip(rows + dy, 0, h - 1)
        xs = np.clip(cols + dx, 0, w - 1)
        out = out[ys, xs]
    return ndimage.gaussian_filter(out, sigma=(sigma, sigma, 0), mode="reflect")


def _motion_blur(x, p, rng, angle: float):
    kernel = _line_kernel(int(p["radius"]), float(p["sigma"]), angle)
    return _blur_channels(x, kernel)


def _zoom_blur(x, p, rng):
    zooms = np.arange(1.0, float(p["max_zoom"]), float(p["step"]))
    out = np.zeros_like(x)
    for z in zooms:
        out += x if z == 1.0 else _clipped_zoom(x, float(z))
    return (x + out) / (len(zooms) + 1)


def _snow(x, p, rng):
    h, w = x.shape[:2]
    layer = rng.normal(loc=p["layer_loc"], scale=p["layer_scale"], size=(h, w))
    layer = _clipped_zoom(layer, float(p["zoom"]))
    layer[layer < p["threshold"]] = 0.0
    layer = np.clip(layer, 0.0, 1.0)
    angle = rng.uniform(-135.0, -45.0)
    kernel = _line_kernel(int(p["blur_radius"]), float(p["blur_sigma"]), angle)
    layer = ndimage.convolve(layer, kernel, mode="reflect")
    gray = x @ np.array([0.299, 0.587, 0.114])
    blend = float(p["blend"])
    whitened = np.maximum(x, (gray * 1.5 + 0.5)[..., None])
    base = blend * x + (1.0 - blend) * whitened
    return base + layer[..., None] + np.rot90(layer, k=2)[..., None]


def _frost(x, p, rng, settings):
    h, w = x.shape[:2]
    tex = ndimage.gaussian_filter(rng.normal(size=(h, w)), sigma=settings["texture_sigma"], mode="reflect")
    tex -= tex.min()
    peak = tex.max()
    if peak > 0:
        tex /= peak
    cut = np.quantile(tex, 1.0 - settings["texture_keep"])
    crystals = np.where(tex > cut, 0.6 + 0.4 * tex, 0.0)
    frost_rgb = crystals[..., None] * np.array([0.90, 0.95, 1.0])
    return p["image_coef"] * x + p["frost_coef"] * frost_rgb


def _fog(x, p, rng, pattern):
    top = x.max()
    fogged = x + float(p["density"]) * pattern[..., None]
    return fogged * top / (top + float(p["density"])) if top > 0 else fogged


def _brightness(x, p, rng):
    hsv = _rgb_to_hsv(x)
    hsv[..., 2] = np.clip(hsv[..., 2] + p["value_add"], 0.0, 1.0)
    return _hsv_to_rgb(hsv)


def _contrast(x, p, rng):
    means = x.mean(axis=(0, 1), keepdims=True)
    return (x - means) * float(p["factor"]) + means


def _elastic(x, p, rng, pattern_rng):
    h, w = x.shape[:2]
    sigma = float(p["sigma"])
    alpha = float(p["alpha"])
    fields = []
    for _ in range(2):
        raw = pattern_rng.uniform(-1.0, 1.0, size=(h, w))
        smooth = ndimage.gaussian_filter(raw, sigma=sigma, mode="reflect")
        peak = np.abs(smooth).max()
        fields.append(smooth / peak * alpha if peak > 0 else smooth)
    dy, dx = fields
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    coords = [rows + dy, cols + dx]
    out = np.empty_like(x)
    for c in range(3):
        out[..., c] = ndimage.map_coordinates(x[..., c], coords, order=1, mode="reflect")
    return out


def _pixelate(x, p, rng):
    b = int(p["block"])
    h, w = x.shape[:2]
    ys = np.arange(0, h, b)
    xs = np.arange(0, w, b)
    sums = np.add.reduceat(np.add.reduceat(x, ys, axis=0), xs, axis=1)
    heights = np.diff(np.append(ys, h))
    widths = np.diff(np.append(xs, w))
    counts = np.outer(heights, widths).astype(np.float64)
    means = sums / counts[..., None]
    return np.repeat(np.repeat(means, heights, axis=0), widths, axis=1)


def _jpeg_compression(x, p, rng):
    buf = BytesIO()
    as_uint8 = np.rint(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(as_uint8, mode="RGB").save(buf, format="JPEG", quality=int(p["quality"]))
    buf.seek(0)
    with Image.open(buf) as im:
        return np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0


# ---------------------------------------------------------------------------
# dispatch


def corrupt(
    image: RgbImage,
    spec: CorruptionSpec,
    seed: int,
    image_id: str = "",
    params: ParamTable | None = None,
) -> RgbImage:
    """Apply one corruption spec to one image, deterministically.

    Severity 0 returns a byte-identical copy. Stochastic kinds consume
    randomness only from the stream keyed by (seed, image_id, spec.key).
    """
    if params is None:
        params = load_params()
    if spec.severity == 0:
        return image.copy()
    p = spec.params or params.params_for(spec.kind, spec.severity)
    rng = rng_for(seed, image_id, spec.key) if params.is_stochastic(spec.kind) else None
    x = _to_float(image)

    kind = spec.kind
    if kind == "gaussian_noise":
        y = _gaussian_noise(x, p, rng)
    elif kind == "shot_noise":
        y = _shot_noise(x, p, rng)
    elif kind == "impulse_noise":
        y = _impulse_noise(x, p, rng)
    elif kind == "speckle_noise":
        y = _speckle_noise(x, p, rng)
    elif kind == "defocus_blur":
        y = _defocus_blur(x, p, rng)
    elif kind == "glass_blur":
        y = _glass_blur(x, p, rng)
    elif kind == "motion_blur":
        y = _motion_blur(x, p, rng, float(params.kind_setting("motion_blur", "angle", -30)))
    elif kind == "zoom_blur":
        y = _zoom_blur(x, p, rng)
    elif kind == "snow":
        y = _snow(x, p, rng)
    elif kind == "frost":
        settings = {
            "texture_sigma": float(params.kind_setting("frost", "texture_sigma", 2.0)),
            "texture_keep": float(params.kind_setting("frost", "texture_keep", 0.35)),
        }
        y = _frost(x, p, rng, settings)
    elif kind == "fog":
        pattern_rng = _pattern_rng(int(params.kind_setting("fog", "pattern_seed", 0)))
        pattern = _plasma_fractal(image.height, image.width, float(p["wibbledecay"]), pattern_rng)
        y = _fog(x, p, rng, pattern)
    elif kind == "brightness":
        y = _brightness(x, p, rng)
    elif kind == "contrast":
        y = _contrast(x, p, rng)
    elif kind == "elastic":
        y = _elastic(x, p, rng, _pattern_rng(int(params.kind_setting("elastic", "pattern_seed", 0))))
    elif kind == "pixelate":
        y = _pixelate(x, p, rng)
    elif kind == "jpeg_compression":
        y = _jpeg_compression(x, p, rng)
    else:  # unreachable: CorruptionSpec validates the kind
        raise ConfigError(f"unknown corruption kind {kind!r}")

    return _to_image(y)
