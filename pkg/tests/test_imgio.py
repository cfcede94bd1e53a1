import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from volrad.imgio import (
    BadMagicError,
    DatasetError,
    GrayImage,
    MaxvalError,
    PgmError,
    TruncatedError,
    ZeroDimensionError,
    ingest_dataset,
    read_pgm,
    save_pgm,
    tile_image,
    write_pgm,
)


def test_read_ascii():
    img = read_pgm(b"P2\n2 2\n255\n0 64 128 255")
    assert (img.width, img.height) == (2, 2)
    assert img.flat() == [0, 64, 128, 255]


def test_read_binary_single_pixel():
    img = read_pgm(b"P5\n1 1\n255\n" + bytes([0x7F]))
    assert img.flat() == [127]


def test_comments_between_tokens():
    img = read_pgm(b"P2 # magic\n# a whole line\n3 # w\n1\n# max\n15\n1 2 # px\n3\n")
    assert img.flat() == [1, 2, 3]


def test_small_maxval_is_not_rescaled():
    img = read_pgm(b"P5\n2 1\n15\n" + bytes([3, 15]))
    assert img.flat() == [3, 15]


@pytest.mark.parametrize(
    "data, exc, offset",
    [
        (b"P3\n1 1\n255\n0 0 0", BadMagicError, 0),
        (b"P6\n1 1\n255\n", BadMagicError, 0),
        (b"P2\n1 1\n65535\n0", MaxvalError, 7),
        (b"P5\n2 2\n255\n" + bytes(3), TruncatedError, 14),
        (b"P2\n2 1\n255\n7", TruncatedError, 12),
        (b"P2\n0 4\n255\n", ZeroDimensionError, 3),
        (b"P2\n4 0\n255\n", ZeroDimensionError, 5),
    ],
)
def test_parse_errors_name_offset(data, exc, offset):
    with pytest.raises(exc) as info:
        read_pgm(data)
    assert info.value.offset == offset
    assert f"byte offset {offset}" in str(info.value)


def test_error_classes_are_distinct():
    kinds = {BadMagicError, MaxvalError, TruncatedError, ZeroDimensionError}
    assert len(kinds) == 4
    assert all(issubclass(k, PgmError) for k in kinds)


def test_write_minimal():
    assert write_pgm(GrayImage([[0]])) == b"P5\n1 1\n255\n\x00"


def test_write_payload_bytes():
    assert write_pgm(GrayImage([[255, 0]])).endswith(b"\xff\x00")


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16))))
def test_round_trip(pixels):
    img = GrayImage(pixels)
    back = read_pgm(write_pgm(img))
    assert back == img
    assert back.pixels.tobytes() == img.pixels.tobytes()


def test_round_trip_random_16x16(rng):
    img = GrayImage(rng.integers(0, 256, (16, 16)))
    assert read_pgm(write_pgm(img)).pixels.tobytes() == img.pixels.tobytes()


def test_gray_image_validation():
    with pytest.raises(ValueError):
        GrayImage([[256]])
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        GrayImage.from_sequence(2, 2, [1, 2, 3])


def test_tiles_row_major_drop_partial():
    a = np.arange(7 * 5).reshape(5, 7)
    tiles = tile_image(GrayImage(a), (3, 2))
    assert len(tiles) == 2 * 2
    assert tiles[1].pixels.tolist() == a[0:2, 3:6].tolist()
    assert tiles[2].pixels.tolist() == a[2:4, 0:3].tolist()


def _write_tree(root, layout):
    for cname, images in layout.items():
        (root / cname).mkdir(parents=True)
        for fname, img in images.items():
            save_pgm(img, root / cname / fname)


def test_ingest_tiled(tmp_path):
    big = GrayImage(np.zeros((640, 640), dtype=np.uint8))
    _write_tree(tmp_path, {f"c{i:02d}": {"a.pgm": big} for i in range(40)})
    ds = ingest_dataset(tmp_path, tile=(200, 200))
    assert len(ds.class_names) == 40
    assert len(ds) == 360
    assert np.all(ds.class_counts() == 9)
    assert ds.samples[1].name == "c00/a.pgm#1"


def test_ingest_untiled_order_and_labels(tmp_path):
    img = GrayImage(np.full((4, 4), 9))
    _write_tree(tmp_path, {"zeta": {"b.pgm": img, "a.pgm": img}, "alpha": {"x.pgm": img}})
    (tmp_path / "zeta" / "notes.txt").write_text("ignored")
    ds = ingest_dataset(tmp_path)
    assert ds.class_names == ["alpha", "zeta"]
    assert [(s.name, s.class_id) for s in ds.samples] == [
        ("alpha/x.pgm", 0),
        ("zeta/a.pgm", 1),
        ("zeta/b.pgm", 1),
    ]
    again = ingest_dataset(tmp_path)
    assert [s.name for s in again.samples] == [s.name for s in ds.samples]


def test_ingest_protocol_shape(tmp_path):
    img = GrayImage(np.zeros((200, 200), dtype=np.uint8))
    _write_tree(tmp_path, {f"class{c}": {f"{j}.pgm": img for j in range(10)} for c in range(40)})
    ds = ingest_dataset(tmp_path)
    assert len(ds) == 400
    assert np.all(ds.class_counts() == 10)


def test_ingest_empty_class(tmp_path):
    (tmp_path / "a").mkdir()
    with pytest.raises(DatasetError, match="no .pgm"):
        ingest_dataset(tmp_path)


def test_ingest_unreadable(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "a" / "bad.pgm").write_bytes(b"P9 junk")
    with pytest.raises(DatasetError, match="bad.pgm"):
        ingest_dataset(tmp_path)


def test_ingest_tile_too_large_warns(tmp_path):
    _write_tree(
        tmp_path,
        {"a": {"small.pgm": GrayImage(np.zeros((10, 10))), "big.pgm": GrayImage(np.zeros((20, 40)))}},
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ds = ingest_dataset(tmp_path, tile=(20, 20))
    assert len(ds) == 2
    assert any("small.pgm" in str(w.message) for w in caught)


def test_check_loo_names_class(tmp_path):
    img = GrayImage(np.zeros((4, 4)))
    _write_tree(tmp_path, {"many": {f"{i}.pgm": img for i in range(3)}, "lonely": {"x.pgm": img}})
    with pytest.raises(DatasetError, match="lonely"):
        ingest_dataset(tmp_path).check_loo()
