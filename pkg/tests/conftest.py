import pytest

# The eight-line wonderland passage used as a tiny real-text fixture.
ALICE_TEXTS = [
    "Alice was beginning to get very tired of sitting",
    "by her sister on the bank ,",
    "and of having nothing to do :",
    "once or twice she had peeped into the book her sister was reading",
    "but it had no pictures or conversations in it",
    "' and what is the use of a book , '",
    "thought Alice",
    "' without pictures or conversations ? '",
]

ALICE_KEYWORDS = ["book", "pictures", "conversations"]


@pytest.fixture
def alice_texts():
    return list(ALICE_TEXTS)


@pytest.fixture
def alice_corpus():
    from priorlda.corpus import build_corpus

    return build_corpus(ALICE_TEXTS)


@pytest.fixture
def alice_stats(alice_corpus):
    from priorlda.corpus import compute_stats

    return compute_stats(alice_corpus)
