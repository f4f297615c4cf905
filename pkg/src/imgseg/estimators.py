"""Scikit-learn style transformer facade over the segmentation pipeline.

Both estimators are stateless (``fit`` only validates parameters), follow
the get_params/set_params contract, and therefore clone and compose with
``sklearn.pipeline.Pipeline`` without this package depending on
scikit-learn itself. ``transform`` maps a sequence of HTML documents to a
list of per-page results.
"""

from __future__ import annotations

import inspect
from pathlib import Path

from .baseline import DEFAULT_WINDOW_WORDS, fixed_window_context
from .images import FilterPolicy, collect_valid_images
from .ingest import DEFAULT_STRIP_TAGS, IngestOptions, parse_html
from .segmenter import PageSegmentation, segment_page
from .structure import DEFAULT_TOLERANCE
from .validation import check_choice, check_fraction, check_int_at_least

__all__ = ["ImageSegmenter", "FixedWindowBaseline"]


class _ParamsMixin:
    """get_params/set_params exactly as scikit-learn expects: every
    constructor argument is a public parameter, stored verbatim."""

    @classmethod
    def _param_names(cls) -> list[str]:
        signature = inspect.signature(cls.__init__)
        return [name for name in signature.parameters if name != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def _read_document(item, index: int, input_mode: str) -> tuple[bytes | str, str]:
    if input_mode == "filename":
        path = Path(item)
        return path.read_bytes(), str(path)
    return item, f"doc-{index}"


class ImageSegmenter(_ParamsMixin):
    """Extract image segments from HTML documents.

    Parameters mirror the CLI flags: the similarity ``tolerance``, the
    valid-image size thresholds, and the ingest knobs. ``input`` selects
    whether ``transform`` receives raw HTML (``"content"``) or paths to
    HTML files (``"filename"``).
    """

    def __init__(
        self,
        tolerance: float = DEFAULT_TOLERANCE,
        large_min_px: int = 60,
        small_min_px: int = 45,
        unknown_dims_valid: bool = True,
        min_text_chars: int = 1,
        treat_alt_as_text: bool = False,
        strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS,
        input: str = "content",
    ):
        self.tolerance = tolerance
        self.large_min_px = large_min_px
        self.small_min_px = small_min_px
        self.unknown_dims_valid = unknown_dims_valid
        self.min_text_chars = min_text_chars
        self.treat_alt_as_text = treat_alt_as_text
        self.strip_tags = strip_tags
        self.input = input

    def _check_params(self) -> tuple[float, FilterPolicy, IngestOptions]:
        tolerance = check_fraction("tolerance", self.tolerance)
        check_int_at_least("small_min_px", self.small_min_px, 1)
        check_int_at_least("large_min_px", self.large_min_px, self.small_min_px + 1)
        check_int_at_least("min_text_chars", self.min_text_chars, 1)
        check_choice("input", self.input, {"content", "filename"})
        policy = FilterPolicy(
            large_min_px=self.large_min_px,
            small_min_px=self.small_min_px,
            unknown_dims_valid=bool(self.unknown_dims_valid),
        )
        options = IngestOptions(
            min_text_chars=self.min_text_chars,
            strip_tags=frozenset(self.strip_tags),
            treat_alt_as_text=bool(self.treat_alt_as_text),
        )
        return tolerance, policy, options

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def transform(self, X) -> list[PageSegmentation]:
        tolerance, policy, options = self._check_params()
        results = []
        for index, item in enumerate(X):
            payload, source = _read_document(item, index, self.input)
            tree = parse_html(payload, source_identifier=source, options=options)
            results.append(segment_page(tree, policy=policy, tolerance=tolerance))
        return results

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class FixedWindowBaseline(_ParamsMixin):
    """Fixed-window contexts (n words before/after each valid image).

    ``n == 0`` takes the whole page on both sides.
    """

    def __init__(self, n: int = DEFAULT_WINDOW_WORDS, input: str = "content"):
        self.n = n
        self.input = input

    def _check_params(self) -> int:
        check_int_at_least("n", self.n, 0)
        check_choice("input", self.input, {"content", "filename"})
        return self.n

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def transform(self, X) -> list[list]:
        n = self._check_params()
        results = []
        for index, item in enumerate(X):
            payload, source = _read_document(item, index, self.input)
            tree = parse_html(payload, source_identifier=source)
            windows = [
                fixed_window_context(tree, descriptor, n)
                for descriptor in collect_valid_images(tree)
            ]
            results.append(windows)
        return results

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)
