import random

import pytest

import oracles
import treegen
from imgseg.dom import TreeBuilder, ancestors, child_index_path
from imgseg.images import FilterPolicy, collect_images, collect_valid_images
from imgseg.ingest import parse_html
from imgseg.segmenter import (
    SKIP_FILTERED,
    SKIP_NO_TEXT,
    ImageClass,
    SkippedImage,
    find_segment,
    segment_page,
)


def load(data_dir, name):
    return parse_html((data_dir / name).read_bytes(), source_identifier=name)


def test_listed_grid_segments(data_dir):
    tree = load(data_dir, "listed_grid.html")
    page = segment_page(tree)
    assert len(page.segments) == 9
    classes = [segment.image_class for segment in page.segments]
    assert classes.count(ImageClass.LISTED) == 8
    assert classes.count(ImageClass.UNLISTED) == 1
    # each listed segment keeps only its own cell's caption
    first = page.segments[0]
    assert first.context_texts == ("Casement window, oak frame",)
    assert [image.src for image in first.images] == ["img/casement.jpg"]
    # the standalone image takes the wider boundary with both texts
    unlisted = page.segments[-1]
    assert unlisted.image_class is ImageClass.UNLISTED
    assert unlisted.context_texts == (
        "Our Helsinki showroom.",
        "Open weekdays nine to five.",
    )
    assert page.skipped == [SkippedImage(src="img/spacer.gif", reason=SKIP_FILTERED)]


def test_listed_root_is_the_tight_boundary(data_dir):
    tree = load(data_dir, "listed_grid.html")
    page = segment_page(tree)
    for segment in page.segments:
        if segment.image_class is ImageClass.LISTED:
            assert tree.node(segment.root).tag == "td"


def test_four_cells_one_parent_give_four_segments():
    builder = TreeBuilder()
    root = builder.element("html")
    row = builder.element("tr", parent=root)
    for i in range(4):
        cell = builder.element("td", parent=row)
        builder.image(cell, src=f"{i}.png")
        builder.text(f"caption {i}", cell)
    tree = builder.build()
    page = segment_page(tree)
    assert len(page.segments) == 4
    assert {segment.image_class for segment in page.segments} == {ImageClass.LISTED}
    assert len({segment.root for segment in page.segments}) == 4


def test_unlisted_takes_higher_ancestor_on_second_change(data_dir):
    tree = load(data_dir, "unlisted_profile.html")
    page = segment_page(tree)
    (segment,) = page.segments
    assert segment.image_class is ImageClass.UNLISTED
    assert tree.node(segment.root).tag == "body"
    assert segment.context_texts == (
        "Portrait of Alice Quine, compiler engineer.",
        "Alice maintains the Quine toolchain and writes about parser design.",
        "Contact: alice at example dot org.",
    )
    assert segment.page_title == "Alice Quine"


def test_semi_listed_catalog_two_sections(data_dir):
    tree = load(data_dir, "semi_listed_catalog.html")
    page = segment_page(tree)
    assert [segment.image_class for segment in page.segments] == [
        ImageClass.SEMI_LISTED,
        ImageClass.SEMI_LISTED,
    ]
    first, second = page.segments
    assert first.root == second.root
    assert first.child_range == (0, 4)
    assert second.child_range == (4, 8)
    assert first.context_texts == (
        "Alpine tent, two-person, four-season.",
        "Weight: 2.1 kg",
    )
    assert second.context_texts == (
        "Trail stove, titanium burner.",
        "Weight: 0.3 kg",
    )


def test_image_with_no_text_anywhere_has_no_segment():
    tree = parse_html("<body><div><img src='a.png'></div></body>")
    (descriptor,) = collect_valid_images(tree)
    assert find_segment(tree, descriptor) is None
    page = segment_page(tree)
    assert page.segments == []
    assert [(skip.src, skip.reason) for skip in page.skipped] == [("a.png", SKIP_NO_TEXT)]


def test_root_exhaustion_falls_back_to_first_change():
    # all of the page's text lives beside the image: only one change ever fires
    tree = parse_html("<body><div><img src='a.png'><p>only caption</p></div></body>")
    (descriptor,) = collect_valid_images(tree)
    segment = find_segment(tree, descriptor)
    assert segment is not None
    assert segment.image_class is ImageClass.UNLISTED
    assert tree.node(segment.root).tag == "div"
    assert segment.context_texts == ("only caption",)


def test_collage_images_merge_into_one_segment():
    tree = parse_html(
        "<body><div><img src='a.png'><img src='b.png'>shared caption</div></body>"
    )
    page = segment_page(tree)
    (segment,) = page.segments
    assert [image.src for image in segment.images] == ["a.png", "b.png"]
    assert segment.context_texts == ("shared caption",)


def test_find_segment_rejects_non_image_node():
    tree = parse_html("<body><img src='a.png'><p>t</p></body>")
    descriptor = collect_valid_images(tree)[0]
    bogus = type(descriptor)(
        node_id=tree.root_id, src="", filename="", alt="", width_px=None, height_px=None
    )
    with pytest.raises(ValueError):
        find_segment(tree, bogus)


def test_segment_page_is_deterministic(data_dir):
    tree = load(data_dir, "listed_grid.html")
    first = segment_page(tree)
    second = segment_page(tree)
    assert first.segments == second.segments
    assert first.skipped == second.skipped


def test_segments_ordered_by_root_then_range(data_dir):
    for name in ["listed_grid.html", "semi_listed_catalog.html"]:
        page = segment_page(load(data_dir, name))
        keys = [
            (segment.root, segment.child_range[0] if segment.child_range else -1)
            for segment in page.segments
        ]
        assert keys == sorted(keys)


def test_every_segment_has_image_and_text_and_valid_root(data_dir):
    for name in ["listed_grid.html", "unlisted_profile.html", "semi_listed_catalog.html"]:
        tree = load(data_dir, name)
        page = segment_page(tree)
        for segment in page.segments:
            assert segment.images and segment.context_texts
            for image in segment.images:
                chain = ancestors(tree, image.node_id)
                assert segment.root in chain


def test_filter_policy_flows_through():
    tree = parse_html(
        "<body><div><img src='a.png' width='30' height='30'><p>text</p></div></body>"
    )
    page = segment_page(tree)
    assert page.segments == [] and page.skipped[0].reason == SKIP_FILTERED
    page_loose = segment_page(
        tree, policy=FilterPolicy(small_min_px=10, large_min_px=20)
    )
    assert len(page_loose.segments) == 1


def test_matches_brute_force_oracle_on_small_corpus():
    rng = random.Random(99)
    compared = 0
    for _ in range(40):
        tree = treegen.random_tree(rng, max_nodes=80)
        for descriptor in collect_images(tree):
            expected = oracles.oracle_find_segment(tree, descriptor.node_id, 0.2)
            segment = find_segment(tree, descriptor, 0.2)
            if expected is None:
                assert segment is None
            else:
                assert segment is not None
                assert (segment.root, segment.child_range, segment.image_class.value) == expected
            compared += 1
    assert compared > 50


def test_root_paths_stable(data_dir):
    tree = load(data_dir, "semi_listed_catalog.html")
    page = segment_page(tree)
    assert {child_index_path(tree, segment.root) for segment in page.segments} == {"0/0"}
