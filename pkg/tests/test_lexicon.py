import pytest

from gencanvas.lexicon import CANONICAL_TYPES, fnv1a64, load_lexicon, tokenize


def test_canonical_type_order(lexicon):
    assert tuple(lexicon.types) == CANONICAL_TYPES


def test_value_tables_are_disjoint(lexicon):
    seen = {}
    for ftype, values in lexicon.values.items():
        for v in values:
            assert v not in seen, f"{v} in both {seen.get(v)} and {ftype}"
            seen[v] = ftype


def test_tokenize_strips_punctuation_keeps_hyphens():
    assert tokenize("A Close-up, of the CASTLE!") == ["a", "close-up", "of", "the", "castle"]


def test_phrases_match_multiword_values(lexicon):
    assert lexicon.phrases("an oil painting of a castle") == ["oil painting", "castle"]


def test_phrases_drop_stopwords_keep_unknowns(lexicon):
    assert lexicon.phrases("a shiny castle") == ["shiny", "castle"]


def test_successors_cycle_after_value(lexicon):
    # Frozen from the shipped style table order.
    assert lexicon.successors("style", "illustration", 3) == [
        "watercolor",
        "oil painting",
        "pixel art",
    ]


def test_successors_exclude_value_and_wrap(lexicon):
    last = lexicon.values["style"][-1]
    succ = lexicon.successors("style", last, 3)
    assert succ == lexicon.values["style"][:3]
    assert last not in succ


def test_successors_for_unknown_value_deterministic(lexicon):
    a = lexicon.successors("style", "nonexistent", 4)
    b = lexicon.successors("style", "nonexistent", 4)
    assert a == b and len(a) == 4 and "nonexistent" not in a


def test_content_variations_prefer_synonym_table(lexicon):
    assert lexicon.content_variations("castle", 2) == ["fortress", "palace"]


def test_content_variations_fallback_for_unlisted(lexicon):
    out = lexicon.content_variations("lighthouse", 3)
    assert len(out) == 3 and "lighthouse" not in out
    assert all(v in lexicon.values["content"] for v in out)


def test_mentioned_types_singular_and_plural(lexicon):
    assert lexicon.mentioned_types("different art styles") == ["style"]
    assert lexicon.mentioned_types("color moods") == ["color"]
    assert lexicon.mentioned_types("different types of bird") == []


def test_fnv1a64_known_vectors():
    # Standard FNV-1a test vectors.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_load_lexicon_from_path(tmp_path, lexicon):
    copy = tmp_path / "lex.txt"
    copy.write_text("[content]\ncastle\n[stopwords]\na\n[synonyms]\ncastle: fortress\n")
    custom = load_lexicon(copy)
    assert custom.values["content"] == ["castle"]
    assert custom.synonyms["castle"] == ["fortress"]
