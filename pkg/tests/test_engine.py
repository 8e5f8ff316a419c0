"""Engine: event loop ordering, traces, scoring, and cross-strategy compare."""

import random

import pytest

from refmem.engine import (
    MismatchedScenarioError,
    Metrics,
    STRATEGY_NAMES,
    capability_rows,
    compare,
    run_scenario,
    score_trace,
)
from refmem.resolution import Outcome
from refmem.scenario import parse_scenario

from helpers import random_scenario

THREE_HOUSES = """
VOCAB nouns=house,tree colours=red,green,blue
FPS 28
CONFIG w_size=1.0 w_centrality=0.0 range=100
ENTITY H1 type=house colour=red pos=4.0,0.0 radius=4.0
ENTITY H2 type=house colour=green pos=20.0,0.0 radius=2.0
ENTITY H3 type=house colour=blue pos=10.0,0.0 radius=2.0
TICK 0 TELEPORT 0,0,0
TICK 2 UTTER "the red house" GOLD H1
"""

OFFSCREEN = """
VOCAB nouns=house,tree colours=red,green,blue
FPS 28
ENTITY H1 type=house colour=red pos=10.0,0.0 radius=2.0
ENTITY T1 type=tree colour=green pos=-10.0,0.0 radius=2.0
TICK 0 TELEPORT 0,0,0
TICK 3 TURN 3.141592653589793
TICK 5 UTTER "the red house" GOLD H1
"""

NEVER_COVISIBLE = """
VOCAB nouns=house,tree colours=red,green,blue
FPS 28
ENTITY H1 type=house colour=red pos=10.0,0.0 radius=2.0
ENTITY H2 type=house colour=blue pos=-10.0,0.0 radius=2.0
TICK 0 TELEPORT 0,0,0
TICK 2 TURN 3.141592653589793
TICK 4 UTTER "the houses" GOLD H1,H2
"""

FIRST_SEEN = """
VOCAB nouns=house,tree colours=red,green,blue
FPS 28
ENTITY B1 type=house colour=blue pos=10.0,0.0 radius=2.0
ENTITY B2 type=house colour=blue pos=0.0,10.0 radius=2.0
TICK 0 TELEPORT 0,0,0
TICK 10 TURN 1.5707963267948966
TICK 12 UTTER "the first blue house we saw" GOLD B1
"""


def utter_outcomes(trace):
    return [r.resolution for r in trace.utterance_records]


class TestRunScenario:
    def test_figure_style_fixture_resolves_h1(self):
        scenario = parse_scenario(THREE_HOUSES)
        trace = run_scenario(scenario, "episodic")
        (resolution,) = utter_outcomes(trace)
        assert resolution.referents == {"H1"}

    def test_empty_event_list_traces_frames_only(self):
        scenario = parse_scenario(
            "VOCAB nouns=house colours=red\n"
            "ENTITY H1 type=house colour=red pos=5.0,0.0 radius=1.0\n"
        )
        trace = run_scenario(scenario, "episodic")
        assert [r.kind for r in trace.records] == ["frame"]

    def test_frame_update_precedes_utterance_within_tick(self):
        # Utterance at tick 0 must already see tick 0's frame.
        scenario = parse_scenario(
            "VOCAB nouns=house colours=red\n"
            "ENTITY H1 type=house colour=red pos=5.0,0.0 radius=1.0\n"
            'TICK 0 UTTER "the red house" GOLD H1\n'
        )
        trace = run_scenario(scenario, "episodic")
        assert [r.kind for r in trace.records] == ["frame", "utter"]
        (resolution,) = utter_outcomes(trace)
        assert resolution.referents == {"H1"}

    def test_commands_apply_before_their_tick_frame(self):
        scenario = parse_scenario(
            "VOCAB nouns=house colours=red\n"
            "ENTITY H1 type=house colour=red pos=5.0,0.0 radius=1.0\n"
            "TICK 0 TELEPORT 0,0,3.141592653589793\n"
        )
        trace = run_scenario(scenario, "visibility-kb")
        frame_record = next(r for r in trace.records if r.kind == "frame")
        assert frame_record.payload == "-"  # facing away: nothing visible

    def test_identical_runs_are_byte_identical(self):
        rng = random.Random(777)
        scenarios = [parse_scenario(THREE_HOUSES), parse_scenario(OFFSCREEN)]
        scenarios += [random_scenario(rng, max_ticks=40) for _ in range(10)]
        for scenario in scenarios:
            for strategy in STRATEGY_NAMES:
                first = run_scenario(scenario, strategy).serialize()
                second = run_scenario(scenario, strategy).serialize()
                assert first == second

    def test_parse_errors_recorded_not_raised(self):
        scenario = parse_scenario(
            "VOCAB nouns=house colours=red\n"
            "ENTITY H1 type=house colour=red pos=5.0,0.0 radius=1.0\n"
            'TICK 0 UTTER "gibberish beyond grammar" GOLD H1\n'
        )
        trace = run_scenario(scenario, "global")
        (resolution,) = utter_outcomes(trace)
        assert resolution.outcome is Outcome.PARSE_ERROR


class TestScoreTrace:
    def test_all_correct_accuracy_one(self):
        scenario = parse_scenario(THREE_HOUSES)
        metrics = score_trace(run_scenario(scenario, "episodic"), scenario)
        assert metrics.correct == 1 and metrics.accuracy == 1.0

    def test_half_correct_accuracy(self):
        scenario = parse_scenario(
            "VOCAB nouns=house,tree colours=red,green\n"
            "ENTITY H1 type=house colour=red pos=5.0,0.0 radius=1.0\n"
            "ENTITY T1 type=tree colour=green pos=6.0,1.0 radius=1.0\n"
            'TICK 0 UTTER "the red house" GOLD H1\n'
            'TICK 1 UTTER "it" GOLD H1\n'  # two visible candidates: ambiguous
        )
        metrics = score_trace(run_scenario(scenario, "visibility-kb"), scenario)
        assert metrics.correct == 1
        assert metrics.ambiguous == 1
        assert metrics.accuracy == 0.5

    def test_counts_match_hand_recount_on_random_traces(self):
        rng = random.Random(55)
        for _ in range(40):
            scenario = random_scenario(rng, max_ticks=30, max_utterances=6)
            for strategy in STRATEGY_NAMES:
                trace = run_scenario(scenario, strategy)
                metrics = score_trace(trace, scenario)
                buckets = dict(correct=0, wrong=0, abstain=0, ambiguous=0, unsupported=0)
                for record, event in zip(trace.utterance_records, scenario.utterances):
                    res = record.resolution
                    if res.outcome is Outcome.REFERENT:
                        buckets["correct" if res.referents == event.gold else "wrong"] += 1
                    elif res.outcome is Outcome.NO_REFERENT:
                        buckets["abstain"] += 1
                    elif res.outcome is Outcome.AMBIGUOUS:
                        buckets["ambiguous"] += 1
                    elif res.outcome is Outcome.UNSUPPORTED:
                        buckets["unsupported"] += 1
                    else:
                        buckets["wrong"] += 1
                assert metrics == Metrics(strategy, **buckets)
                assert metrics.total == len(scenario.utterances)
                assert 0.0 <= metrics.accuracy <= 1.0

    def test_mismatched_scenario_rejected(self):
        scenario = parse_scenario(THREE_HOUSES)
        other = parse_scenario(OFFSCREEN)
        trace = run_scenario(scenario, "episodic")
        with pytest.raises(MismatchedScenarioError):
            score_trace(trace, other)


class TestCompare:
    def test_offscreen_referent_matrix(self):
        result = compare(parse_scenario(OFFSCREEN))
        outcomes = {
            name: utter_outcomes(result.traces[name])[0] for name in STRATEGY_NAMES
        }
        assert outcomes["episodic"].referents == {"H1"}
        assert outcomes["global"].referents == {"H1"}
        assert outcomes["visibility-kb"].outcome is Outcome.NO_REFERENT

    def test_never_covisible_plural_matrix(self):
        result = compare(parse_scenario(NEVER_COVISIBLE))
        outcomes = {
            name: utter_outcomes(result.traces[name])[0] for name in STRATEGY_NAMES
        }
        assert outcomes["episodic"].outcome is Outcome.NO_REFERENT
        assert outcomes["global"].referents == {"H1", "H2"}

    def test_ordinal_matrix(self):
        result = compare(parse_scenario(FIRST_SEEN))
        outcomes = {
            name: utter_outcomes(result.traces[name])[0] for name in STRATEGY_NAMES
        }
        assert outcomes["episodic"].referents == {"B1"}
        assert outcomes["global"].outcome is Outcome.UNSUPPORTED

    def test_capability_rows_cover_all_utterances(self):
        scenario = parse_scenario(THREE_HOUSES)
        result = compare(scenario)
        rows = capability_rows(result)
        assert len(rows) == len(scenario.utterances)
        assert rows[0].startswith("2\tthe red house\t")
        assert len(rows[0].split("\t")) == 2 + len(STRATEGY_NAMES)
