from hypothesis import given
from hypothesis import strategies as st

from scholarqa.text import (
    author_overlap,
    levenshtein,
    normalize_title,
    sentences,
    title_similarity,
    tokenize,
    word_count,
    words,
)


def test_tokenize_splits_on_non_alphanumerics():
    assert tokenize("Low-income, third-world!") == ["low", "income", "third", "world"]


def test_words_keep_internal_hyphens():
    assert words("over-the-counter pain meds") == ["over-the-counter", "pain", "meds"]


def test_word_count_treats_url_as_one_token():
    assert word_count("see https://x.org/a?b=1 for details") == 4


def test_sentences_split_on_terminal_punctuation():
    text = "First claim. Second claim! Third claim? Trailing fragment"
    assert sentences(text) == [
        "First claim.",
        "Second claim!",
        "Third claim?",
        "Trailing fragment",
    ]


def test_normalize_title_strips_case_and_punctuation():
    assert normalize_title("Rural: Literacy; Programs!") == "rural literacy programs"


def test_levenshtein_known_distances():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3
    assert levenshtein("same", "same") == 0


@given(st.text(max_size=30), st.text(max_size=30))
def test_levenshtein_symmetry(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


def test_title_similarity_bounds():
    assert title_similarity("A Study", "A Study") == 1.0
    assert title_similarity("a study!", "A STUDY") == 1.0
    assert title_similarity("", "") == 1.0
    assert title_similarity("something", "") == 0.0


def test_author_overlap_uses_surnames():
    assert author_overlap(["J. Smith", "A. Jones"], ["Smith, John", "Jones, A."]) == 1.0
    assert author_overlap(["J. Smith"], ["A. Jones"]) == 0.0
    assert author_overlap([], ["A. Jones"]) == 0.0
    # one shared surname, three distinct in the union
    assert author_overlap(["J. Smith", "B. Wu"], ["C. Smith", "D. Klein"]) == 1 / 3
