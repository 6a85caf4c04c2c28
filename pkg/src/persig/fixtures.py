"""Synthetic periodic silhouette sequences and voxel-level transforms.

Masks are returned in image orientation (row 0 at the top), one 2D boolean
array per frame, so they can be written to disk or stacked directly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ingest import BinaryImage3D, write_frames

FIXTURE_CLASSES = ("box", "annulus", "bars")


def _blank(height: int, width: int) -> np.ndarray:
    return np.zeros((height, width), bool)


def box_sequence(rng: np.random.Generator, frames: int = 12, height: int = 24,
                 width: int = 32) -> list[np.ndarray]:
    """A solid rectangle breathing in width: one component, no tunnels."""
    w0 = int(rng.integers(8, 12))
    h0 = int(rng.integers(8, 12))
    cx = width // 2 + int(rng.integers(-2, 3))
    amp = rng.uniform(1.0, 3.0)
    phase = rng.uniform(0, 2 * np.pi)
    period = frames / rng.choice([1, 2])
    out = []
    for t in range(frames):
        w = int(round(w0 + amp * np.sin(2 * np.pi * t / period + phase)))
        m = _blank(height, width)
        m[height - 2 - h0:height - 2, cx - w // 2:cx - w // 2 + w] = True
        out.append(m)
    return out


def annulus_sequence(rng: np.random.Generator, frames: int = 12, height: int = 24,
                     width: int = 32) -> list[np.ndarray]:
    """A square ring whose hole drifts sideways: the stack bounds a solid torus."""
    outer = int(rng.integers(14, 18))
    thick = int(rng.integers(3, 5))
    x0 = (width - outer) // 2 + int(rng.integers(-2, 3))
    y0 = height - 2 - outer
    amp = rng.uniform(0.0, 1.4)  # ring sides stay >= 2 voxels thick
    phase = rng.uniform(0, 2 * np.pi)
    out = []
    for t in range(frames):
        m = _blank(height, width)
        m[y0:y0 + outer, x0:x0 + outer] = True
        dx = int(round(amp * np.sin(2 * np.pi * t / frames + phase)))
        m[y0 + thick:y0 + outer - thick, x0 + thick + dx:x0 + outer - thick + dx] = False
        out.append(m)
    return out


def bars_sequence(rng: np.random.Generator, frames: int = 12, height: int = 24,
                  width: int = 32) -> list[np.ndarray]:
    """Two separate vertical bars swinging in antiphase: two components."""
    bw = int(rng.integers(4, 6))
    bh = int(rng.integers(12, 18))
    amp = rng.uniform(1.5, 2.5)
    phase = rng.uniform(0, 2 * np.pi)
    centre = width // 2
    sep = bw + 4
    out = []
    for t in range(frames):
        m = _blank(height, width)
        off = int(round(amp * np.sin(2 * np.pi * t / frames + phase)))
        left = centre - sep - bw // 2 + off
        right = centre + sep - bw // 2 - off
        # keep at least one background column between the bars
        right = max(right, left + bw + 1)
        top = height - 1 - bh
        m[top:height - 1, left:left + bw] = True
        m[top:height - 1, right:right + bw] = True
        out.append(m)
    return out


GENERATORS = {"box": box_sequence, "annulus": annulus_sequence, "bars": bars_sequence}


def gait_like_sequence(rng: np.random.Generator, frames: int | None = None, height: int = 24,
                       width: int = 32) -> list[np.ndarray]:
    """Random leg-like motion: a hip block with two swinging legs and optional feet.

    Sizes scale with ``height``. Legs may touch in some frames, which changes
    the topology over time.
    """
    u = height / 24
    frames = frames or int(rng.integers(8, 17))
    hip_h = max(2, int(round(u * rng.uniform(3, 5))))
    leg_w = max(3, int(round(u * rng.uniform(3, 5))))
    amp = u * rng.uniform(2.0, 6.0)
    gap = u * 3
    period = frames / rng.choice([1, 2])
    phase = rng.uniform(0, 2 * np.pi)
    foot = bool(rng.integers(0, 2))
    cx = width // 2
    hip_w = int(round(u * rng.uniform(10, 15)))
    top = max(1, int(u))
    bottom = height - max(1, int(u))
    out = []
    for t in range(frames):
        m = _blank(height, width)
        m[top:top + hip_h, cx - hip_w // 2:cx + (hip_w + 1) // 2] = True
        swing = amp * np.sin(2 * np.pi * t / period + phase)
        for sign in (-1, 1):
            for r in range(top + hip_h, bottom):
                frac = (r - top - hip_h) / max(bottom - 1 - top - hip_h, 1)
                c = int(round(cx + sign * (gap + frac * swing)))
                lo = min(max(c - leg_w // 2, 0), width - leg_w)
                m[r, lo:lo + leg_w] = True
            if foot:
                c = int(round(cx + sign * (gap + swing)))
                fh = max(2, int(round(2 * u)))
                m[bottom - fh:bottom, max(c - leg_w, 0):min(c + leg_w, width)] = True
        out.append(m)
    return out


def double_period(img: BinaryImage3D, gap: int = 1) -> BinaryImage3D:
    """Two copies of ``img`` along z separated by ``gap`` empty slices."""
    X, Y, _ = img.dims
    pad = np.zeros((X, Y, gap), bool)
    return BinaryImage3D(np.concatenate([img.voxels, pad, img.voxels], axis=2),
                         crop_fraction=img.crop_fraction)


def boundary_voxels(img: BinaryImage3D) -> np.ndarray:
    """Mask of voxels with a 6-neighbour of the opposite value."""
    v = img.voxels
    out = np.zeros_like(v)
    for axis in range(3):
        for shift in (1, -1):
            nb = np.roll(v, shift, axis=axis)
            edge = [slice(None)] * 3
            edge[axis] = 0 if shift == 1 else -1
            nb[tuple(edge)] = False
            out |= nb != v
    return out


def perturb_boundary(img: BinaryImage3D, fraction: float, rng: np.random.Generator) -> BinaryImage3D:
    """Flip a random ``fraction`` (at least one) of the boundary-adjacent voxels."""
    cand = np.flatnonzero(boundary_voxels(img))
    count = max(1, int(round(fraction * len(cand))))
    flip = rng.choice(cand, size=min(count, len(cand)), replace=False)
    v = img.voxels.copy().ravel()
    v[flip] = ~v[flip]
    return BinaryImage3D(v.reshape(img.dims), img.scale, img.crop_fraction)


def fixture_samples(samples_per_class: int = 6, seed: int = 0, frames: int = 12):
    """``[(label, sample_name, masks)]`` for the three-class synthetic fixture."""
    rng = np.random.default_rng(seed)
    out = []
    for label in FIXTURE_CLASSES:
        for i in range(samples_per_class):
            out.append((label, f"{label}-{i:02d}", GENERATORS[label](rng, frames=frames)))
    return out


def write_fixture_dataset(root, samples_per_class: int = 6, seed: int = 0, train_per_subject: int = 4,
                          n: int = 24) -> Path:
    """Write the three-class fixture as PNG frames plus a cross-validation manifest."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    lines = [
        "# synthetic three-class fixture",
        "[eval]",
        f"n = {n}",
        "crop_fraction = 1.0",
        "",
        "[cv]",
        f"train_per_subject = {train_per_subject}",
        "",
    ]
    for label, name, masks in fixture_samples(samples_per_class, seed):
        write_frames(masks, root / label / name)
        lines += ["[[sample]]", f'label = "{label}"', f'path = "{label}/{name}"', ""]
    manifest = root / "manifest.toml"
    manifest.write_text("\n".join(lines))
    return manifest
