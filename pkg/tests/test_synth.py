import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseg.descriptors import merge_all
from fuzzyseg.model import CLASS_IDS, polygon_descriptor
from fuzzyseg.synth import (
    BenchSettings,
    clip_halfplane,
    fragment_polygon,
    generate_scene,
    rasterize_polygon,
    scene_mask,
    split_polygon,
)

SQUARE = np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]])


def test_clip_halfplane():
    left = clip_halfplane(SQUARE, 0, 1.0, True)
    assert polygon_descriptor(left).area == pytest.approx(4.0)
    right = clip_halfplane(SQUARE, 0, 1.0, False)
    assert polygon_descriptor(right).area == pytest.approx(12.0)


@given(st.sampled_from(CLASS_IDS), st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_fragments_reassemble_the_face(class_models, c, seed, pieces):
    cm = class_models[c]
    rng = np.random.default_rng(seed)
    j = int(rng.integers(cm.n))
    parts = fragment_polygon(cm.polygons[j], pieces, rng)
    assert len(parts) == pieces
    whole = merge_all([polygon_descriptor(p) for p in parts])
    assert np.allclose(whole.as_tuple(), cm.segments[j].as_tuple(), rtol=1e-9, atol=1e-6)


def test_split_halves():
    a, b = split_polygon(SQUARE, 1, 0.5)
    assert polygon_descriptor(a).area == polygon_descriptor(b).area == pytest.approx(8.0)
    assert polygon_descriptor(a).y_max == pytest.approx(2.0)


def test_rasterize_matches_analytic():
    poly = np.array([[3.2, 2.1], [20.7, 4.0], [17.5, 15.3], [5.0, 11.9]])
    cover = rasterize_polygon(poly, (20, 25), supersample=16)
    d = polygon_descriptor(poly)
    assert cover.sum() / 256 == pytest.approx(d.area, rel=0.01)


def test_scene_is_reproducible_and_consistent(class_models):
    cm = class_models["truck"]
    a = generate_scene(cm, np.random.default_rng(5), k=3, sigma=0.02, drop=0.3)
    b = generate_scene(cm, np.random.default_rng(5), k=3, sigma=0.02, drop=0.3)
    assert a.fragments == b.fragments and a.dropped == b.dropped
    assert len(a.fragments) == len(a.sources) == len(a.polygons)
    assert not set(a.sources) & set(a.dropped)
    for frag, poly in zip(a.fragments, a.polygons):
        assert np.allclose(frag.as_tuple(), polygon_descriptor(poly).as_tuple())


def test_noise_free_scene_reassembles_model(class_models):
    cm = class_models["van"]
    s = generate_scene(cm, np.random.default_rng(0), k=3, sigma=0.0, drop=0.0)
    assert s.dropped == ()
    for j in range(cm.n):
        parts = [f for f, src in zip(s.fragments, s.sources) if src == j]
        assert 1 <= len(parts) <= 3
        assert np.allclose(merge_all(parts).as_tuple(), cm.segments[j].as_tuple(), atol=1e-6)


def test_scene_mask_labels(class_models):
    cm = class_models["bus"]
    s = generate_scene(cm, np.random.default_rng(1), k=1, sigma=0.0, drop=0.0)
    labels = scene_mask(s, (720, 1280))
    assert set(np.unique(labels)) == set(range(len(s.fragments) + 1))


def test_bench_settings_validation():
    with pytest.raises(ValueError):
        BenchSettings(("van",), n_per_class=0)
    with pytest.raises(ValueError):
        BenchSettings(("van",), k=0)
    with pytest.raises(ValueError):
        BenchSettings(("van",), drop=1.5)
