import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from persig.ingest import (BinaryImage3D, EmptyFrameWarning, IngestConfig, IngestError,
                           SilhouetteFrame, dump_voxels, image_from_masks, list_frames,
                           load_frame, load_sequence, read_voxels, stack_frames, write_frames)


def _save_gray(path, arr):
    Image.fromarray(np.asarray(arr, np.uint8)).save(path)
    return path


def test_all_white_pgm(tmp_path):
    p = _save_gray(tmp_path / "f.pgm", np.full((4, 4), 255))
    fr = load_frame(p, IngestConfig(crop_fraction=1.0))
    assert fr.mask.sum() == 16


def test_crop_keeps_bottom_rows():
    mask = np.zeros((8, 4), bool)
    mask[-1] = True
    fr = SilhouetteFrame(mask).crop_bottom(0.25)
    assert (fr.width, fr.height) == (4, 2)
    assert fr.mask[-1].all() and not fr.mask[0].any()


def test_ramp_threshold(tmp_path):
    ramp = np.arange(256, dtype=np.uint8)[None, :]
    fr = load_frame(_save_gray(tmp_path / "r.png", ramp), IngestConfig(1.0, 128))
    expected = ramp[0] > 128
    assert np.array_equal(fr.mask[0], expected)
    assert np.flatnonzero(fr.mask[0]).tolist() == list(range(129, 256))


def test_pbm_roundtrip(tmp_path):
    mask = np.zeros((5, 6), bool)
    mask[1:4, 2:5] = True
    p = tmp_path / "a.pbm"
    Image.fromarray(mask).convert("1").save(p)
    assert np.array_equal(load_frame(p, IngestConfig(1.0)).mask, mask)


def test_empty_frame_warns(tmp_path):
    p = _save_gray(tmp_path / "e.png", np.zeros((3, 3)))
    with pytest.warns(EmptyFrameWarning):
        load_frame(p, IngestConfig(1.0))


def test_bad_files(tmp_path):
    (tmp_path / "x.png").write_bytes(b"not an image")
    with pytest.raises(IngestError):
        load_frame(tmp_path / "x.png")
    (tmp_path / "x.bmp").write_bytes(b"")
    with pytest.raises(IngestError):
        load_frame(tmp_path / "x.bmp")
    with pytest.raises(IngestError):
        list_frames(tmp_path / "missing")


def test_config_validation():
    for kw in ({"crop_fraction": 0}, {"crop_fraction": 1.5}, {"threshold": 300},
               {"frame_glob_order": "random"}):
        with pytest.raises(ValueError):
            IngestConfig(**kw)


def test_single_frame_stack():
    img = image_from_masks([np.ones((2, 2), bool)])
    assert img.dims == (2, 2, 1)
    assert img.count() == 4


def test_identical_frames_stack():
    rng = np.random.default_rng(3)
    m = rng.random((5, 7)) < 0.5
    img = image_from_masks([m] * 4)
    assert img.dims[2] == 4
    for z in range(4):
        assert np.array_equal(img.slice(z), img.slice(0))


def test_disjoint_frames_count():
    a = np.zeros((4, 4), bool)
    b = np.zeros((4, 4), bool)
    a[:2] = True
    b[3, 1:3] = True
    assert image_from_masks([a, b]).count() == a.sum() + b.sum()


def test_orientation_y_up():
    m = np.zeros((3, 2), bool)
    m[2, 0] = True  # bottom-left pixel
    img = image_from_masks([m])
    assert img.voxels[0, 0, 0] and img.count() == 1


def test_normalization():
    img = image_from_masks([np.ones((5, 9), bool)] * 3)
    assert img.scale == (0.25, 0.25, 0.5)
    assert img.xy_denominator == 4


def test_stack_errors():
    with pytest.raises(IngestError):
        stack_frames([])
    with pytest.raises(IngestError):
        stack_frames([SilhouetteFrame(np.ones((2, 2))), SilhouetteFrame(np.ones((3, 2)))])
    with pytest.raises(IngestError):
        BinaryImage3D(np.ones((2, 2)))


def test_sequence_numeric_order(tmp_path):
    masks = [np.zeros((4, 4), bool) for _ in range(11)]
    for i, m in enumerate(masks):
        m.flat[i] = True
    write_frames(masks, tmp_path)
    # rename so that lexicographic order differs from numeric order
    for p in sorted(tmp_path.iterdir()):
        i = int(p.stem.split("_")[1])
        p.rename(tmp_path / f"f{i}.png")
    img = load_sequence(tmp_path, IngestConfig(crop_fraction=1.0))
    assert img.dims == (4, 4, 11)
    for z in range(11):
        assert np.array_equal(img.slice(z), image_from_masks([masks[z]]).slice(0))
    lex = load_sequence(tmp_path, IngestConfig(1.0, 128, "lexicographic"))
    assert np.array_equal(lex.slice(2), img.slice(10))


@settings(max_examples=40, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 4))))
def test_voxel_dump_roundtrip(tmp_path_factory, vox):
    img = BinaryImage3D(vox)
    p = tmp_path_factory.mktemp("v") / "v.txt"
    dump_voxels(img, p)
    assert np.array_equal(read_voxels(p).voxels, vox)
