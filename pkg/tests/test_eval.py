"""Dataset ingestion, sentence extraction, eligibility, sampling, the
single-prompt baseline, and rating aggregation."""
import csv
import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import DATA_DIR, GOLDEN_TOPIC
from witforge.backend import scripted_mock
from witforge.evaluation import (
    CRITERION_DUPLICATE,
    CRITERION_LENGTH,
    CRITERION_NOUNS,
    AggregateResult,
    EligibilityVerdict,
    EmptySource,
    FormatError,
    InsufficientEligible,
    RatingRecord,
    UnknownPair,
    aggregate,
    eligibility_check,
    emit_report,
    format_mean,
    format_pct,
    gpt_lol_respond,
    ingest_dataset,
    last_complete_sentence,
    load_pair_map,
    load_ratings,
    randomize_presentation,
    sample_inputs,
    standardize,
)


# --- ingestion -----------------------------------------------------------------

def test_ingest_csv_with_turn_index(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "conversation_id,turn_index,message\n"
        "c1,0,Hello there.\n"
        "c1,1,The pigs got loose.\n"
    )
    comments = ingest_dataset(path)
    assert [(c.conversation_id, c.turn_index) for c in comments] == [("c1", 0), ("c1", 1)]
    assert comments[1].text == "The pigs got loose."


def test_ingest_csv_without_turn_index_counts_per_conversation(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "conversation_id,message\n"
        "c1,First.\nc2,Other conversation.\nc1,Second.\n"
    )
    comments = ingest_dataset(path)
    assert [(c.conversation_id, c.turn_index) for c in comments] == [
        ("c1", 0), ("c2", 0), ("c1", 1),
    ]


def test_ingest_jsonl(tmp_path):
    path = tmp_path / "d.jsonl"
    rows = [
        {"conversation_id": "c1", "turn_index": 3, "message": "Hi."},
        {"conversation_id": "c1", "message": "Then what happened?"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    comments = ingest_dataset(path)
    assert comments[0].turn_index == 3
    assert comments[1].turn_index == 4  # continues after the explicit index


def test_ingest_jsonl_bad_json_names_line(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text('{"conversation_id": "c1", "message": "ok."}\n{broken\n')
    with pytest.raises(FormatError, match="line 2"):
        ingest_dataset(path)


def test_ingest_csv_missing_field_names_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("conversation_id,message\nc1,\n")
    with pytest.raises(FormatError, match="row 2"):
        ingest_dataset(path)


def test_ingest_csv_requires_message_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("conversation_id,text\nc1,hello\n")
    with pytest.raises(FormatError, match="header"):
        ingest_dataset(path)


def test_ingest_packaged_sample():
    comments = ingest_dataset(DATA_DIR / "dialogue_sample.csv")
    assert len(comments) == 45


# --- sentence extraction ----------------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    ("Wow. That is awesome.", "That is awesome."),
    ("no terminator here", None),
    (
        "I heard about that! I think they started that in 2002.",
        "I think they started that in 2002.",
    ),
    ("The team won the game. What a", "The team won the game."),
    ("I saw Dr. Smith at the market.", "I saw Dr. Smith at the market."),
    (
        "We visited the museum at 9 a.m. before the crowd arrived.",
        "We visited the museum at 9 a.m. before the crowd arrived.",
    ),
    ('He said "Go home!" Then we left.', "Then we left."),
    ("One sentence only.", "One sentence only."),
    ("", None),
    ("   ", None),
])
def test_last_complete_sentence(text, expected):
    assert last_complete_sentence(text) == expected


def test_ellipsis_counts_once():
    assert last_complete_sentence("Well... That settles it.") == "That settles it."


# --- standardization ----------------------------------------------------------------

def test_standardize_capitalizes_and_terminates():
    got = standardize("germany has given animals legal rights in their constitution")
    assert got == "Germany has given animals legal rights in their constitution."


def test_standardize_collapses_whitespace():
    assert standardize("hello   world.") == "Hello world."


def test_standardize_keeps_existing_terminator():
    assert standardize("Really?") == "Really?"


@given(st.text(max_size=80))
def test_standardize_is_idempotent(text):
    once = standardize(text)
    assert standardize(once) == once


# --- eligibility -------------------------------------------------------------------

def test_topic_exemplar_is_eligible():
    verdict = eligibility_check(GOLDEN_TOPIC)
    assert verdict.passed
    assert verdict.failed_criteria == frozenset()


def test_twenty_one_words_fail_length():
    sentence = "The " + "very " * 17 + "old dog barked."  # 21 words
    assert len(sentence.split()) == 21
    verdict = eligibility_check(sentence)
    assert not verdict.passed
    assert CRITERION_LENGTH in verdict.failed_criteria


def test_exactly_twenty_words_pass_length():
    sentence = "The " + "very " * 15 + "old dog barked loudly."  # 20 words
    assert len(sentence.split()) == 20
    assert CRITERION_LENGTH not in eligibility_check(sentence).failed_criteria


def test_few_nouns_fail():
    verdict = eligibility_check("That is so cool.")
    assert CRITERION_NOUNS in verdict.failed_criteria


def test_duplicate_detected_despite_case_and_punctuation():
    prior = ["The pigs escaped the farm."]
    verdict = eligibility_check("the pigs escaped the farm", prior=prior)
    assert CRITERION_DUPLICATE in verdict.failed_criteria


def test_pronoun_only_flags_for_review():
    verdict = eligibility_check("They took the pigs to the market.")
    assert verdict.passed
    assert verdict.requires_review


def test_verdict_consistency_enforced():
    with pytest.raises(ValueError):
        EligibilityVerdict(passed=True, failed_criteria=frozenset({CRITERION_LENGTH}))


# --- sampling ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def sample_comments():
    return ingest_dataset(DATA_DIR / "dialogue_sample.csv")


def test_sampling_is_deterministic(sample_comments):
    a = sample_inputs(sample_comments, n=13, seed=7)
    b = sample_inputs(sample_comments, n=13, seed=7)
    assert a == b
    assert len(a) == 13


def test_sampling_seed_changes_selection(sample_comments):
    assert sample_inputs(sample_comments, 13, 7) != sample_inputs(sample_comments, 13, 8)


def test_samples_are_standardized_and_unique(sample_comments):
    picked = sample_inputs(sample_comments, 13, 7)
    for sentence in picked:
        assert sentence == standardize(sentence)
        assert sentence[-1] in ".!?"
    assert len(set(picked)) == 13


def test_sampling_exhaustion(sample_comments):
    with pytest.raises(InsufficientEligible):
        sample_inputs(sample_comments, n=40, seed=7)


def test_sampling_rejects_zero(sample_comments):
    with pytest.raises(ValueError):
        sample_inputs(sample_comments, n=0, seed=7)


# --- baseline ------------------------------------------------------------------------

def test_gpt_lol_prompt_and_decoding():
    backend = scripted_mock({"gpt_lol": ["Why did the pig cross the road?"]})
    sentence = "Germany has given animals legal rights in their constitution."
    got = gpt_lol_respond(sentence, backend)
    assert got == "Why did the pig cross the road?"
    call = backend.calls[0]
    assert call.prompt == "You want to be funny. Respond to this: " + sentence
    assert call.decoding.temperature == 0.7
    assert call.decoding.top_p == 1.0


# --- presentation order ----------------------------------------------------------------

def test_randomize_presentation_permutes_deterministically():
    pairs = [f"p{i}" for i in range(20)]
    a = randomize_presentation(pairs, 5)
    assert sorted(a) == sorted(pairs)
    assert a == randomize_presentation(pairs, 5)
    assert a != pairs  # 20 items make an identity shuffle vanishingly unlikely
    assert pairs == [f"p{i}" for i in range(20)]  # input untouched


# --- aggregation -------------------------------------------------------------------------

def _records(by_pair):
    out = []
    for pair_id, scores in by_pair.items():
        out.extend(
            RatingRecord(pair_id=pair_id, rater_id=f"r{i}", score=s)
            for i, s in enumerate(scores)
        )
    return out


def test_aggregate_small_example():
    records = _records({"p1": [1, 2, 3], "p2": [4, 4]})
    result = aggregate(records, {"p1": "x", "p2": "y"})
    assert result.per_pair == {"p1": 2.0, "p2": 4.0}
    by_source = {s.source: s for s in result.summaries}
    assert by_source["x"].mean_rating == pytest.approx(2.0)
    assert by_source["x"].pct_jokes == pytest.approx(100.0 / 3.0)
    assert by_source["y"].pct_jokes == 100.0


def test_aggregate_source_order_follows_map():
    records = _records({"p1": [2], "p2": [3]})
    result = aggregate(records, {"p2": "later", "p1": "sooner"})
    assert [s.source for s in result.summaries] == ["later", "sooner"]


def test_aggregate_unknown_pair():
    with pytest.raises(UnknownPair):
        aggregate(_records({"mystery": [3]}), {"p1": "x"})


def test_aggregate_empty_source():
    with pytest.raises(EmptySource):
        aggregate(_records({"p1": [3]}), {"p1": "x", "p2": "y"})


def test_aggregate_is_order_invariant():
    records = _records({"p1": [1, 4, 2], "p2": [3, 3, 1], "p3": [2]})
    mapping = {"p1": "x", "p2": "x", "p3": "y"}
    forward = aggregate(records, mapping)
    backward = aggregate(list(reversed(records)), mapping)
    assert forward.per_pair == backward.per_pair
    assert forward.summaries == backward.summaries


@settings(max_examples=60, deadline=None)
@given(st.lists(
    st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=6),
    min_size=1, max_size=5,
))
def test_source_mean_equals_pair_mean_under_equal_counts(score_lists):
    # with the same number of ratings per pair, the source mean must match
    # the plain average of its per-pair means
    width = min(len(lst) for lst in score_lists)
    trimmed = [lst[:width] for lst in score_lists]
    records = _records({f"p{i}": lst for i, lst in enumerate(trimmed)})
    mapping = {f"p{i}": "only" for i in range(len(trimmed))}
    result = aggregate(records, mapping)
    pair_means = [result.per_pair[f"p{i}"] for i in range(len(trimmed))]
    assert result.summaries[0].mean_rating == pytest.approx(
        sum(pair_means) / len(pair_means), abs=1e-9,
    )


# --- fixture reproduction -------------------------------------------------------------

@pytest.fixture(scope="module")
def fixture_result():
    records = load_ratings(DATA_DIR / "table1_ratings.csv")
    mapping = load_pair_map(DATA_DIR / "table1_pairs.csv")
    return aggregate(records, mapping), mapping


def test_fixture_reproduces_summary_means(fixture_result, table1):
    result, _ = fixture_result
    by_source = {s.source: s for s in result.summaries}
    for source, expected in table1["sources"].items():
        summary = by_source[source]
        assert abs(summary.mean_rating - expected["mean_rating"]) < 0.005
        assert format_mean(summary.mean_rating) == f'{expected["mean_rating"]:.2f}'
        assert abs(summary.pct_jokes - expected["pct_jokes"]) < 0.05
        assert format_pct(summary.pct_jokes) == f'{expected["pct_jokes"]:.1f}'


def test_fixture_reproduces_per_pair_means(fixture_result, table1):
    result, _ = fixture_result
    for source, expected in table1["sources"].items():
        for i, pair_mean in enumerate(expected["per_pair_means"]):
            pair_id = f"{source}-{i + 1:02d}"
            assert format_mean(result.per_pair[pair_id]) == f"{pair_mean:.2f}", pair_id


def test_fixture_shape(fixture_result):
    result, mapping = fixture_result
    assert len(mapping) == 39
    assert len(result.per_pair) == 39


# --- report ------------------------------------------------------------------------------

def test_emit_report(tmp_path, fixture_result):
    result, mapping = fixture_result
    path = tmp_path / "report.csv"
    emit_report(result, mapping, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["source", "mean_rating", "pct_jokes"]
    assert rows[1] == ["human", "1.84", "23.6"]
    assert rows[2] == ["gpt_lol", "1.96", "33.8"]
    assert rows[3] == ["witscript3", "2.36", "44.1"]
    assert rows[4] == []
    assert rows[5] == ["pair_id", "source", "mean_rating"]
    assert len(rows) == 6 + 39
    assert rows[6][0] == "human-01"


def test_rounding_is_half_up():
    assert format_mean(1.8354) == "1.84"
    assert format_mean(1.845) == "1.85"
    assert format_mean(2.355) == "2.36"
    assert format_pct(23.55) == "23.6"
    assert format_pct(44.0499) == "44.0"


def test_emit_report_requires_summaries(tmp_path):
    with pytest.raises(ValueError):
        emit_report(AggregateResult(per_pair={}, summaries=()), {}, tmp_path / "r.csv")


# --- ratings file I/O ----------------------------------------------------------------------

def test_load_ratings_validates_header(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("pair,rater,points\na,b,3\n")
    with pytest.raises(FormatError, match="header"):
        load_ratings(path)


def test_load_ratings_names_bad_row(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("pair_id,rater_id,score\np1,r1,3\np1,r2,five\n")
    with pytest.raises(FormatError, match="row 3"):
        load_ratings(path)


def test_load_pair_map_rejects_blank(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("pair_id,source\np1,\n")
    with pytest.raises(FormatError, match="row 2"):
        load_pair_map(path)
