import numpy as np
import pytest

from src.components.data.batching import encode_split, iterate_batches, make_batch
from src.components.data.datasets import Example
from src.components.data.embeddings import load_glove_subset, random_embeddings
from src.components.data.vocab import PAD_INDEX, UNK_INDEX, Vocab
from src.core.errors import DataError


@pytest.fixture
def vocab():
    return Vocab.build([["Who", "is", "Lincoln", "?"], ["New", "chip", "?"]])


class TestVocab:
    def test_reserved_indices(self, vocab):
        assert vocab.word(PAD_INDEX) == "<pad>"
        assert vocab.word(UNK_INDEX) == "<unk>"
        assert len(vocab) == 8

    def test_insertion_order(self, vocab):
        assert vocab.words[2:] == ["Who", "is", "Lincoln", "?", "New", "chip"]

    def test_unknown_words_map_to_unk(self, vocab):
        np.testing.assert_array_equal(vocab.encode(["Who", "zebra"]), [2, UNK_INDEX])

    def test_decode_drops_padding(self, vocab):
        assert vocab.decode([2, 3, 0, 0]) == ["Who", "is"]

    def test_fingerprint_depends_on_order(self, vocab):
        same = Vocab.build([["Who", "is", "Lincoln", "?"], ["New", "chip", "?"]])
        swapped = Vocab.build([["is", "Who", "Lincoln", "?"], ["New", "chip", "?"]])
        assert vocab.fingerprint() == same.fingerprint()
        assert vocab.fingerprint() != swapped.fingerprint()


class TestEmbeddings:
    def test_random_rows_in_range_with_zero_padding(self, vocab):
        weights = random_embeddings(vocab, dim=4).weights
        assert weights.shape == (8, 4)
        np.testing.assert_array_equal(weights[PAD_INDEX], 0.0)
        assert np.all(np.abs(weights) <= 0.25)

    def test_glove_rows_are_copied(self, vocab, glove_file):
        matrix = load_glove_subset(glove_file, vocab, dim=4)
        np.testing.assert_array_equal(matrix.weights[vocab.index("is")], [1, 2, 3, 4])
        np.testing.assert_array_equal(matrix.weights[vocab.index("?")], [-0.5, 0.5, -0.5, 0.5])
        assert matrix.hits == 3
        assert matrix.coverage == pytest.approx(0.5)

    def test_words_with_spaces_are_skipped(self, vocab, glove_file):
        matrix = load_glove_subset(glove_file, vocab, dim=4)
        assert np.all(np.abs(matrix.weights[vocab.index("New")]) <= 0.25)

    def test_missing_words_keep_random_rows(self, vocab, glove_file):
        matrix = load_glove_subset(glove_file, vocab, dim=4, seed=0)
        baseline = random_embeddings(vocab, dim=4, seed=0).weights
        np.testing.assert_array_equal(matrix.weights[vocab.index("chip")], baseline[vocab.index("chip")])
        np.testing.assert_array_equal(matrix.weights[PAD_INDEX], 0.0)

    def test_short_vector(self, vocab, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("Who 1 2\n", encoding="utf-8")
        with pytest.raises(DataError, match=r"bad\.txt:1"):
            load_glove_subset(path, vocab, dim=4)

    def test_long_vector(self, vocab, tmp_path):
        path = tmp_path / "wide.txt"
        path.write_text("chip 0.5 0.5 0.5 0.5 0.5\n", encoding="utf-8")
        with pytest.raises(DataError, match=r"'chip' has 5 values, expected 4"):
            load_glove_subset(path, vocab, dim=4)

    def test_wider_file_than_expected(self, vocab, glove_file):
        with pytest.raises(DataError, match="expected 3"):
            load_glove_subset(glove_file, vocab, dim=3)

    def test_phrase_entries_do_not_match_their_first_word(self, vocab, tmp_path):
        path = tmp_path / "phrases.txt"
        path.write_text("New York 1 2 3 4\nis 1 1 1 1\n", encoding="utf-8")
        matrix = load_glove_subset(path, vocab, dim=4)
        assert matrix.hits == 1
        assert np.all(np.abs(matrix.weights[vocab.index("New")]) <= 0.25)

    def test_missing_file(self, vocab, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_glove_subset(tmp_path / "absent.txt", vocab, dim=4)


class TestBatching:
    def test_padding_and_lengths(self):
        batch = make_batch([np.array([4, 5, 6]), np.array([7])], labels=np.array([1, 0]))
        np.testing.assert_array_equal(batch.ids, [[4, 5, 6], [7, 0, 0]])
        np.testing.assert_array_equal(batch.lengths, [3, 1])
        assert batch.size == 2

    def test_empty_text_is_rejected(self):
        with pytest.raises(ValueError):
            make_batch([np.array([3]), np.array([], dtype=np.int64)])

    def test_batches_follow_the_order(self, vocab):
        examples = [Example(tokens=["Who"] * (i + 1), label=i % 2, raw="") for i in range(5)]
        split = encode_split(examples, vocab)
        batches = list(iterate_batches(split, 2, order=np.array([4, 0, 2, 1, 3])))
        assert [b.size for b in batches] == [2, 2, 1]
        np.testing.assert_array_equal(batches[0].lengths, [5, 1])
        np.testing.assert_array_equal(batches[0].labels, [0, 0])
        np.testing.assert_array_equal(batches[2].labels, [1])
