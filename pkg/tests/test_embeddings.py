import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lexnet.embeddings import EmbeddingFormatError, EmbeddingTable, load_text_embeddings, lookup


def load(text, dim=None):
    return load_text_embeddings(io.StringIO(text), dim)


class TestLoad:
    def test_two_lines(self):
        t = load("cat 1 2 3\ndog 4 5 6\n")
        assert (t.dim, len(t)) == (3, 2)
        np.testing.assert_array_equal(t.vector("dog"), [4, 5, 6])

    def test_short_line_is_error_at_that_line(self):
        with pytest.raises(EmbeddingFormatError, match="line 2"):
            load("cat 1 2 3\ndog 4 5\n")

    def test_unk_is_mean(self):
        t = load("a 1 1 1\nb 3 3 3\n")
        np.testing.assert_array_equal(t.unk, [2, 2, 2])

    def test_header_skipped(self):
        t = load("2 3\na 1 1 1\nb 3 3 3\n")
        assert len(t) == 2

    def test_header_dim_mismatch(self):
        with pytest.raises(EmbeddingFormatError, match="line 1"):
            load("2 3\na 1 1 1\n", dim=4)

    def test_expected_dim(self):
        with pytest.raises(EmbeddingFormatError, match="line 1"):
            load("a 1 1 1\n", dim=2)

    def test_non_numeric(self):
        with pytest.raises(EmbeddingFormatError, match="line 1"):
            load("a 1 x 1\n")

    def test_duplicate_keeps_first(self):
        t = load("a 1 1\nA 2 2\n")
        assert len(t) == 1
        np.testing.assert_array_equal(t.vector("a"), [1, 1])

    def test_empty(self):
        with pytest.raises(EmbeddingFormatError):
            load("")


class TestLookup:
    t = load("olive 1 0\noil 3 2\nbird 5 5\n")

    def test_present(self):
        vec, oov = lookup(self.t, "bird")
        np.testing.assert_array_equal(vec, [5, 5])
        assert not oov

    def test_absent(self):
        vec, oov = lookup(self.t, "zebra")
        np.testing.assert_array_equal(vec, self.t.unk)
        assert oov

    def test_multiword_mean(self):
        vec, oov = lookup(self.t, "olive oil")
        np.testing.assert_array_equal(vec, [2, 1])
        assert not oov

    def test_multiword_partly_missing(self):
        vec, oov = lookup(self.t, "olive press")
        np.testing.assert_array_equal(vec, (np.array([1, 0]) + self.t.unk) / 2)
        assert oov

    def test_returned_vector_is_a_copy(self):
        vec, _ = lookup(self.t, "bird")
        vec[0] = 99
        assert self.t.vector("bird")[0] == 5

    @settings(max_examples=100, deadline=None)
    @given(st.text(min_size=0, max_size=20))
    def test_total_and_right_length(self, term):
        vec, _ = lookup(self.t, term)
        assert vec.shape == (self.t.dim,)
        assert np.all(np.isfinite(vec))


def test_table_shape_checks():
    with pytest.raises(ValueError):
        EmbeddingTable(["a"], np.zeros((2, 3)))
