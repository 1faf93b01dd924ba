import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrobe.errors import InputError
from corrobe.sg import (
    ALL_TASKS,
    SceneGraph,
    SgTuple,
    SynonymLexicon,
    TaskCategory,
    TaskVocab,
    canonicalize,
    categorize,
    match,
    parse_template_caption,
    singularize,
)
from corrobe.sg.matching import by_category


class TestSgTuple:
    def test_arity(self):
        assert SgTuple("car").arity == 1
        assert SgTuple("car", "gray").arity == 2
        assert SgTuple("car", "on", "street").arity == 3

    def test_lexemes_normalized(self):
        t = SgTuple("  Car ", "GRAY")
        assert t.head == "car" and t.slot2 == "gray"

    def test_empty_lexeme_rejected(self):
        with pytest.raises(InputError):
            SgTuple("")
        with pytest.raises(InputError):
            SgTuple("car", "  ")

    def test_arity3_requires_slot2(self):
        with pytest.raises(InputError):
            SgTuple("car", None, "street")

    def test_ordering_mixed_arities(self):
        ts = [SgTuple("b", "x", "y"), SgTuple("a"), SgTuple("a", "z")]
        assert sorted(ts) == [SgTuple("a"), SgTuple("a", "z"), SgTuple("b", "x", "y")]


class TestTemplateParser:
    def test_worked_example(self):
        sg = parse_template_caption("two gray cars on a winding street near small buildings")
        expected = {
            ("car",), ("street",), ("building",),
            ("street", "winding"), ("car", "two"), ("car", "gray"), ("building", "small"),
            ("car", "on", "street"), ("car", "near", "building"),
        }
        assert {t.lexemes() for t in sg} == expected

    def test_empty_text(self):
        assert len(parse_template_caption("")) == 0

    def test_single_object(self):
        assert {t.lexemes() for t in parse_template_caption("a cat")} == {("cat",)}

    def test_dangling_relation_skipped(self):
        sg = parse_template_caption("a cat on")
        assert {t.lexemes() for t in sg} == {("cat",)}

    def test_leading_relation_skipped(self):
        sg = parse_template_caption("on a street")
        assert {t.lexemes() for t in sg} == {("street",)}

    def test_multiword_relation(self):
        sg = parse_template_caption("a cat sitting on a table")
        assert ("cat", "sitting on", "table") in {t.lexemes() for t in sg}

    def test_relations_root_at_first_np(self):
        sg = parse_template_caption("a dog on a rug near a door")
        rels = {t.lexemes() for t in sg if t.arity == 3}
        assert rels == {("dog", "on", "rug"), ("dog", "near", "door")}

    def test_plural_heads_singularized(self):
        assert singularize("cars") == "car"
        assert singularize("buses") == "bus"
        assert singularize("benches") == "bench"
        assert singularize("people") == "person"
        assert singularize("grass") == "grass"


class TestCategorize:
    def test_paper_examples(self, vocab):
        assert categorize(SgTuple("car", "gray"), vocab) == {TaskCategory.ATTRIBUTE, TaskCategory.COLOR}
        assert categorize(SgTuple("car", "two"), vocab) == {TaskCategory.ATTRIBUTE, TaskCategory.COUNT}
        assert categorize(SgTuple("building", "on either side of", "street"), vocab) == {TaskCategory.RELATION}

    def test_object_and_size(self, vocab):
        assert categorize(SgTuple("car"), vocab) == {TaskCategory.OBJECT}
        assert categorize(SgTuple("building", "small"), vocab) == {TaskCategory.ATTRIBUTE, TaskCategory.SIZE}

    def test_digit_counts(self, vocab):
        assert TaskCategory.COUNT in categorize(SgTuple("car", "3"), vocab)
        assert TaskCategory.COUNT in categorize(SgTuple("car", "twelve"), vocab)

    def test_never_empty(self, vocab):
        for t in [SgTuple("x"), SgTuple("x", "weird"), SgTuple("x", "rel", "y")]:
            assert categorize(t, vocab)


class TestCanonicalize:
    def test_canonical_is_smallest_member(self):
        lex = SynonymLexicon([["auto", "car"]])
        sg = SceneGraph.of([SgTuple("auto")])
        assert {t.head for t in canonicalize(sg, lex)} == {"auto"}

    def test_dedup_after_canonicalization(self):
        lex = SynonymLexicon([["auto", "car"]])
        sg = SceneGraph.of([SgTuple("car"), SgTuple("auto")])
        assert len(canonicalize(sg, lex)) == 1

    def test_empty_lexicon_is_identity(self, empty_lex):
        sg = parse_template_caption("two gray cars on a street")
        assert canonicalize(sg, empty_lex).tuples == sg.tuples

    def test_idempotent(self, lex):
        sg = parse_template_caption("two big grey autos on a long road near homes")
        once = canonicalize(sg, lex)
        assert canonicalize(once, lex).tuples == once.tuples

    def test_disjointness_enforced(self):
        with pytest.raises(InputError):
            SynonymLexicon([["a", "b"], ["b", "c"]])


def _random_graph(rng, nouns, mods, rels, max_tuples=8):
    tuples = []
    for _ in range(rng.randrange(max_tuples + 1)):
        arity = rng.choice([1, 2, 3])
        if arity == 1:
            tuples.append(SgTuple(rng.choice(nouns)))
        elif arity == 2:
            tuples.append(SgTuple(rng.choice(nouns), rng.choice(mods)))
        else:
            tuples.append(SgTuple(rng.choice(nouns), rng.choice(rels), rng.choice(nouns)))
    return SceneGraph.of(tuples)


class TestMatch:
    def test_identity(self, lex, vocab):
        sg = parse_template_caption("two gray cars on a winding street")
        res = match(sg, sg, lex, vocab)
        canon = by_category(canonicalize(sg, lex), vocab)
        for cat in ALL_TASKS:
            assert res.fp_raw[cat] == frozenset() and res.fn[cat] == frozenset()
            assert res.tp[cat] == canon[cat]

    def test_disjoint_objects(self, empty_lex, vocab):
        res = match(SceneGraph.of([SgTuple("car")]), SceneGraph.of([SgTuple("truck")]), empty_lex, vocab)
        assert res.tp[TaskCategory.OBJECT] == frozenset()
        assert res.fp_raw[TaskCategory.OBJECT] == frozenset({SgTuple("car")})
        assert res.fn[TaskCategory.OBJECT] == frozenset({SgTuple("truck")})

    def test_omitted_object_becomes_fp(self, lex, vocab):
        candidate = parse_template_caption("two gray cars on a winding street near small buildings")
        reference = parse_template_caption("a building lined street with three lanes and light traffic")
        res = match(candidate, reference, lex, vocab)
        car = canonicalize(SceneGraph.of([SgTuple("car")]), lex)
        assert next(iter(car.tuples)) in res.fp_raw[TaskCategory.OBJECT]

    def test_conservation_fuzz(self, lex, vocab):
        import random

        rng = random.Random(1234)
        nouns = ["car", "auto", "street", "dog", "cat", "tree", "house", "home"]
        mods = ["gray", "grey", "red", "two", "small", "big", "wooden"]
        rels = ["on", "near", "under", "in"]
        for _ in range(300):
            c = _random_graph(rng, nouns, mods, rels)
            r = _random_graph(rng, nouns, mods, rels)
            res = match(c, r, lex, vocab)
            cc = by_category(canonicalize(c, lex), vocab)
            rc = by_category(canonicalize(r, lex), vocab)
            for cat in ALL_TASKS:
                assert len(res.tp[cat]) + len(res.fp_raw[cat]) == len(cc[cat])
                assert len(res.tp[cat]) + len(res.fn[cat]) == len(rc[cat])

    def test_swap_symmetry(self, lex, vocab):
        c = parse_template_caption("two gray cars on a street")
        r = parse_template_caption("a red car near a tree")
        ab = match(c, r, lex, vocab)
        ba = match(r, c, lex, vocab)
        for cat in ALL_TASKS:
            assert ab.tp[cat] == ba.tp[cat]
            assert ab.fp_raw[cat] == ba.fn[cat]
            assert ab.fn[cat] == ba.fp_raw[cat]


_lexeme = st.sampled_from(["car", "auto", "street", "road", "dog", "gray", "grey", "two", "on", "near"])
_tuples = st.builds(
    lambda h, s2, s3: SgTuple(h, s2 if (s2 or s3) else None, s3)
    if not (s3 and not s2)
    else SgTuple(h, s2 or "on", s3),
    _lexeme,
    st.one_of(st.none(), _lexeme),
    st.one_of(st.none(), _lexeme),
)


@settings(max_examples=200, deadline=None)
@given(st.frozensets(_tuples, max_size=10), st.frozensets(_tuples, max_size=10))
def test_match_conservation_property(cand_tuples, ref_tuples):
    lex = SynonymLexicon.default()
    vocab = TaskVocab.default()
    c = SceneGraph(cand_tuples)
    r = SceneGraph(ref_tuples)
    res = match(c, r, lex, vocab)
    cc = by_category(canonicalize(c, lex), vocab)
    rc = by_category(canonicalize(r, lex), vocab)
    for cat in ALL_TASKS:
        assert res.tp[cat] | res.fp_raw[cat] == cc[cat]
        assert res.tp[cat] | res.fn[cat] == rc[cat]
        assert not res.tp[cat] & res.fp_raw[cat]
        assert not res.tp[cat] & res.fn[cat]
