import json

import pytest

from imgseg.evaluation import (
    GroundTruthPage,
    GroundTruthSegment,
    MatchMode,
    MatchPolicy,
    evaluate_corpus,
    format_report_table,
    load_ground_truth,
    match_segments,
    precision_recall,
)
from imgseg.ingest import parse_html
from imgseg.segmenter import segment_page


def seg(srcs, text):
    """Minimal stand-in for an extracted segment."""

    class _Image:
        def __init__(self, src):
            self.src = src

    class _Segment:
        def __init__(self):
            self.images = [_Image(s) for s in srcs]
            self.context_texts = (text,)

    return _Segment()


def truth(*pairs):
    return GroundTruthPage(
        source_identifier="page",
        segments=tuple(GroundTruthSegment(image_srcs=(s,), context_text=t) for s, t in pairs),
    )


def test_identity_match():
    extracted = [seg(["a"], "one two"), seg(["b"], "three")]
    expected = truth(("a", "one two"), ("b", "three"))
    assert match_segments(extracted, expected) == 2


def test_exact_mode_rejects_superset_text():
    extracted = [seg(["a"], "one two three extra")]
    expected = truth(("a", "one two three"))
    assert match_segments(extracted, expected) == 0


def test_exact_mode_ignores_case_and_whitespace():
    extracted = [seg(["a"], "One   Two\nThree")]
    expected = truth(("a", "one two three"))
    assert match_segments(extracted, expected) == 1


def test_match_requires_src_intersection():
    extracted = [seg(["other.png"], "one two")]
    expected = truth(("a.png", "one two"))
    assert match_segments(extracted, expected) == 0


def test_jaccard_thresholds():
    extracted = [seg(["a"], "red chair with oak legs")]
    expected = truth(("a", "red chair with oak arms"))
    # 4 shared words of 6 distinct: 0.666...
    assert match_segments(extracted, expected, MatchPolicy(MatchMode.JACCARD, 0.8)) == 0
    assert match_segments(extracted, expected, MatchPolicy(MatchMode.JACCARD, 0.6)) == 1


def test_matching_is_one_to_one():
    extracted = [seg(["a"], "same words"), seg(["a"], "same words")]
    expected = truth(("a", "same words"))
    assert match_segments(extracted, expected) == 1


def test_precision_recall_reference_counts():
    precision, recall = precision_recall(628, 864, 869)
    assert round(precision, 2) == 0.73
    assert round(recall, 2) == 0.72
    assert precision == pytest.approx(628 / 864)
    assert recall == pytest.approx(628 / 869)


def test_precision_recall_second_reference_counts():
    precision, recall = precision_recall(748, 1012, 1019)
    assert precision == pytest.approx(748 / 1012)
    assert recall == pytest.approx(748 / 1019)
    # both sit at 73 whole percent
    assert int(precision * 100) == 73
    assert int(recall * 100) == 73


def test_precision_recall_zero_denominators():
    assert precision_recall(0, 0, 10) == (0.0, 0.0)
    assert precision_recall(0, 10, 0) == (0.0, 0.0)
    assert precision_recall(0, 0, 0) == (0.0, 0.0)


def corpus_pairs(data_dir, truth_by_source):
    pairs = []
    for name in sorted(truth_by_source):
        tree = parse_html((data_dir / name).read_bytes(), source_identifier=name)
        pairs.append((tree, truth_by_source[name]))
    return pairs


def test_empty_corpus():
    report = evaluate_corpus([])
    assert (report.actual, report.extracted, report.correct) == (0, 0, 0)
    assert report.precision == 0.0 and report.recall == 0.0


def test_perfect_fixture_corpus(data_dir):
    truth_by_source = load_ground_truth(data_dir / "ground_truth.json")
    report = evaluate_corpus(corpus_pairs(data_dir, truth_by_source))
    assert report.actual == 12 and report.extracted == 12 and report.correct == 12
    assert report.precision == 1.0 and report.recall == 1.0
    assert report.actual == sum(page.actual for page in report.per_page)
    assert report.correct == sum(page.correct for page in report.per_page)
    assert report.mean_seconds_per_page >= 0.0


def test_overgrown_truth_segment_is_exactly_one_miss(data_dir):
    truth_by_source = load_ground_truth(data_dir / "ground_truth.json")
    page = truth_by_source["unlisted_profile.html"]
    grown = GroundTruthSegment(
        image_srcs=page.segments[0].image_srcs,
        context_text=page.segments[0].context_text + " plus words never on the page",
        label=page.segments[0].label,
    )
    truth_by_source["unlisted_profile.html"] = GroundTruthPage(
        source_identifier=page.source_identifier, segments=(grown,)
    )
    report = evaluate_corpus(corpus_pairs(data_dir, truth_by_source))
    assert report.actual == 12 and report.extracted == 12 and report.correct == 11
    assert report.precision == pytest.approx(11 / 12)
    assert report.recall == pytest.approx(11 / 12)


def test_identifier_mismatch_raises(data_dir):
    tree = parse_html((data_dir / "unlisted_profile.html").read_bytes(), "wrong-name")
    page = load_ground_truth(data_dir / "ground_truth.json")["unlisted_profile.html"]
    with pytest.raises(ValueError, match="wrong-name"):
        evaluate_corpus([(tree, page)])


def test_config_echo_present(data_dir):
    truth_by_source = load_ground_truth(data_dir / "ground_truth.json")
    report = evaluate_corpus(
        corpus_pairs(data_dir, truth_by_source),
        tolerance=0.3,
        match=MatchPolicy(MatchMode.JACCARD, 0.7),
    )
    assert report.config_echo["tolerance"] == 0.3
    assert report.config_echo["match_mode"] == "jaccard"
    assert report.config_echo["jaccard_threshold"] == 0.7


def test_ground_truth_validation():
    with pytest.raises(ValueError):
        GroundTruthSegment(image_srcs=(), context_text="x")
    with pytest.raises(ValueError):
        GroundTruthSegment(image_srcs=("a", "a"), context_text="x")
    with pytest.raises(ValueError):
        load_ground_truth(json.dumps({"source": "not-a-list"}))
    duplicated = json.dumps(
        [
            {"source": "p", "segments": [{"images": ["a"], "text": "t"}]},
            {"source": "p", "segments": [{"images": ["b"], "text": "u"}]},
        ]
    )
    with pytest.raises(ValueError, match="duplicate"):
        load_ground_truth(duplicated)


def test_match_policy_threshold_bounds():
    with pytest.raises(ValueError):
        MatchPolicy(jaccard_threshold=0.0)
    with pytest.raises(ValueError):
        MatchPolicy(jaccard_threshold=1.2)


def test_report_table_shape():
    from imgseg.evaluation import EvalReport

    report = EvalReport(
        actual=869, extracted=864, correct=628,
        precision=628 / 864, recall=628 / 869,
    )
    table = format_report_table(report)
    lines = table.splitlines()
    assert [line.split()[0] for line in lines[1:]] == [
        "Actual", "Extracted", "Correct", "Recall", "Precision",
    ]
    assert lines[1].endswith("869")
    assert lines[4].endswith("0.72")
    assert lines[5].endswith("0.73")


def test_ambiguous_candidates_flagged(data_dir):
    html = "<body><div><img src='same.png'><img src='same.png'>caption</div></body>"
    tree = parse_html(html, source_identifier="page")
    extracted = segment_page(tree).segments
    expected = GroundTruthPage(
        source_identifier="page",
        segments=(
            GroundTruthSegment(image_srcs=("same.png",), context_text="caption"),
            GroundTruthSegment(image_srcs=("same.png", "other.png"), context_text="caption"),
        ),
    )
    report = evaluate_corpus([(tree, expected)])
    assert report.per_page[0].ambiguous is True
    assert report.per_page[0].correct == 1
