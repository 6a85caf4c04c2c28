"""Silhouette loading, cropping, binarization and stacking into a voxel image."""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

FRAME_SUFFIXES = (".pbm", ".pgm", ".png")
ORDERS = ("numeric-suffix", "lexicographic")


class IngestError(ValueError):
    pass


class EmptyFrameWarning(UserWarning):
    pass


@dataclass(frozen=True)
class IngestConfig:
    crop_fraction: float = 0.25
    threshold: int = 128
    frame_glob_order: str = "numeric-suffix"

    def __post_init__(self):
        if not 0 < self.crop_fraction <= 1:
            raise ValueError(f"crop_fraction must lie in (0, 1], got {self.crop_fraction}")
        if not 0 <= self.threshold <= 255:
            raise ValueError(f"threshold must lie in 0..255, got {self.threshold}")
        if self.frame_glob_order not in ORDERS:
            raise ValueError(f"unknown frame order {self.frame_glob_order!r}")


@dataclass(frozen=True)
class SilhouetteFrame:
    """A binary mask in image orientation: row 0 is the top of the frame."""

    mask: np.ndarray
    source: str = ""

    def __post_init__(self):
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
            raise IngestError(f"frame mask must be a non-empty 2D grid, got shape {mask.shape}")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    def crop_bottom(self, fraction: float) -> "SilhouetteFrame":
        if fraction >= 1:
            return self
        keep = max(1, math.ceil(fraction * self.height))
        return SilhouetteFrame(self.mask[self.height - keep:], self.source)


@dataclass(frozen=True)
class BinaryImage3D:
    """Voxel stack indexed ``voxels[x, y, z]`` with ``y = 0`` at the bottom of the frame.

    ``scale`` maps voxel indices to normalized coordinates; x and y share
    one factor so the frame aspect ratio is preserved.
    """

    voxels: np.ndarray
    scale: tuple = field(default=None)
    crop_fraction: float = 1.0

    def __post_init__(self):
        vox = np.ascontiguousarray(self.voxels, dtype=bool)
        if vox.ndim != 3 or min(vox.shape) < 1:
            raise IngestError(f"voxel array must be a non-empty 3D grid, got shape {vox.shape}")
        vox.setflags(write=False)
        object.__setattr__(self, "voxels", vox)
        if self.scale is None:
            _, Y, Z = vox.shape
            sxy = 1.0 / max(Y - 1, 1)
            object.__setattr__(self, "scale", (sxy, sxy, 1.0 / max(Z - 1, 1)))

    @property
    def dims(self) -> tuple:
        return self.voxels.shape

    @property
    def xy_denominator(self) -> int:
        """Integer N with normalized x = i/N and y = j/N."""
        return max(self.voxels.shape[1] - 1, 1)

    def count(self) -> int:
        return int(self.voxels.sum())

    def slice(self, z: int) -> np.ndarray:
        return self.voxels[:, :, z]


def _frame_from_gray(gray: np.ndarray, threshold: int, source: str = "") -> SilhouetteFrame:
    return SilhouetteFrame(gray > threshold, source)


def load_frame(path, cfg: IngestConfig | None = None) -> SilhouetteFrame:
    """Read one silhouette image and binarize it; crops to the bottom of the frame."""
    cfg = cfg or IngestConfig()
    path = Path(path)
    if path.suffix.lower() not in FRAME_SUFFIXES:
        raise IngestError(f"unsupported frame format: {path}")
    try:
        with Image.open(path) as im:
            gray = np.asarray(im.convert("L"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as exc:
        raise IngestError(f"cannot decode frame {path}: {exc}") from exc
    frame = _frame_from_gray(gray, cfg.threshold, str(path)).crop_bottom(cfg.crop_fraction)
    if not frame.mask.any():
        warnings.warn(f"frame {path} has no foreground pixels", EmptyFrameWarning, stacklevel=2)
    return frame


_TRAILING_INT = re.compile(r"(\d+)$")


def _numeric_key(path: Path):
    m = _TRAILING_INT.search(path.stem)
    return (0, int(m.group(1)), path.name) if m else (1, 0, path.name)


def list_frames(directory, order: str = "numeric-suffix") -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise IngestError(f"not a directory: {directory}")
    paths = [p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in FRAME_SUFFIXES]
    if order == "numeric-suffix":
        paths.sort(key=_numeric_key)
    elif order == "lexicographic":
        paths.sort(key=lambda p: p.name)
    else:
        raise ValueError(f"unknown frame order {order!r}")
    if not paths:
        raise IngestError(f"no frames ({', '.join(FRAME_SUFFIXES)}) in {directory}")
    return paths


def stack_frames(frames: Sequence[SilhouetteFrame], crop_fraction: float = 1.0) -> BinaryImage3D:
    """Stack frames along z; frame ``z`` becomes the slice ``voxels[:, :, z]``.

    ``crop_fraction`` is recorded as provenance only; crop frames before stacking.
    """
    if len(frames) == 0:
        raise IngestError("cannot stack an empty list of frames")
    shape = frames[0].mask.shape
    for i, fr in enumerate(frames):
        if fr.mask.shape != shape:
            raise IngestError(
                f"frame {i} has shape {fr.mask.shape[::-1]} (w, h), expected {shape[::-1]}")
    # (rows, cols, z) -> (x, y, z) with y pointing up
    stack = np.stack([fr.mask for fr in frames], axis=-1)
    voxels = np.transpose(stack[::-1], (1, 0, 2))
    return BinaryImage3D(voxels, crop_fraction=crop_fraction)


def load_sequence(directory, cfg: IngestConfig | None = None) -> BinaryImage3D:
    cfg = cfg or IngestConfig()
    frames = [load_frame(p, cfg) for p in list_frames(directory, cfg.frame_glob_order)]
    return stack_frames(frames, crop_fraction=cfg.crop_fraction)


def image_from_masks(masks: Iterable[np.ndarray]) -> BinaryImage3D:
    """Convenience wrapper: stack 2D boolean masks given in image orientation."""
    return stack_frames([SilhouetteFrame(m) for m in masks])


def write_frames(masks: Iterable[np.ndarray], directory, prefix: str = "frame", fmt: str = "png"):
    """Write masks as 8-bit images (foreground 255) named ``<prefix>_<i>.<fmt>``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, m in enumerate(masks):
        p = directory / f"{prefix}_{i:04d}.{fmt}"
        Image.fromarray(np.where(np.asarray(m, bool), 255, 0).astype(np.uint8)).save(p)
        paths.append(p)
    return paths


def voxel_runs(img: BinaryImage3D) -> list[tuple[int, int, int, int]]:
    """Runs of set voxels along x as ``(z, y, x0, x1)`` with ``x1`` inclusive."""
    runs = []
    X, Y, Z = img.dims
    for z in range(Z):
        sl = img.voxels[:, :, z]
        for y in range(Y):
            row = sl[:, y].astype(np.int8)
            edges = np.diff(np.concatenate(([0], row, [0])))
            starts = np.flatnonzero(edges == 1)
            stops = np.flatnonzero(edges == -1) - 1
            runs.extend((z, y, int(a), int(b)) for a, b in zip(starts, stops))
    return runs


def dump_voxels(img: BinaryImage3D, path) -> None:
    X, Y, Z = img.dims
    with open(path, "w") as fh:
        fh.write(f"# dims {X} {Y} {Z}\n")
        for run in voxel_runs(img):
            fh.write("%d %d %d %d\n" % run)


def read_voxels(path) -> BinaryImage3D:
    with open(path) as fh:
        header = fh.readline().split()
        if header[:2] != ["#", "dims"]:
            raise IngestError(f"{path}: missing '# dims X Y Z' header")
        X, Y, Z = map(int, header[2:5])
        vox = np.zeros((X, Y, Z), bool)
        for line in fh:
            if line.strip():
                z, y, x0, x1 = map(int, line.split())
                vox[x0:x1 + 1, y, z] = True
    return BinaryImage3D(vox)
