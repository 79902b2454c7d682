import random

import pytest

from gencanvas.controls import GenerationRequest
from gencanvas.errors import InvalidRequestError, ShutdownError
from gencanvas.scheduler import (
    EDIT_COALESCE,
    IMMEDIATE,
    LENS_IDLE,
    Scheduler,
    VirtualClock,
)


def req(prompt="p", seed=0):
    return GenerationRequest(prompt=prompt, seed=seed)


def make_scheduler(max_inflight=4, counters=None):
    clock = VirtualClock()
    counters = counters if counters is not None else {}
    sched = Scheduler(
        clock,
        counter_of=lambda t: counters.get(t, 0),
        windows_ms={LENS_IDLE: 2000, EDIT_COALESCE: 300},
        max_inflight=max_inflight,
    )
    return clock, counters, sched


def test_two_submits_coalesce_to_one_fire_at_last_plus_window():
    clock, _, sched = make_scheduler()
    sched.submit("lens", "e1", LENS_IDLE, req("a"))
    clock.advance(1000)
    job = sched.submit("lens", "e1", LENS_IDLE, req("b"))
    clock.advance(1999)
    assert sched.due_jobs() == []
    clock.advance(1)
    fired = sched.due_jobs()
    assert [j.id for j in fired] == [job.id]
    assert fired[0].fire_at == 3000
    assert fired[0].request.prompt == "b"  # later request supersedes
    assert sched.due_jobs() == []


def test_submits_to_different_targets_fire_independently():
    clock, _, sched = make_scheduler()
    a = sched.submit("lens", "e1", LENS_IDLE, req())
    b = sched.submit("lens", "e2", LENS_IDLE, req())
    clock.advance(2000)
    assert {j.id for j in sched.due_jobs()} == {a.id, b.id}


def test_immediate_fires_with_no_delay():
    _, _, sched = make_scheduler()
    job = sched.submit("image-create", "e1", IMMEDIATE, req())
    assert [j.id for j in sched.due_jobs()] == [job.id]


def test_job_ids_strictly_increase():
    _, _, sched = make_scheduler()
    ids = [sched.submit("lens", f"e{i}", LENS_IDLE, req()).id for i in range(5)]
    assert ids == sorted(ids) and len(set(ids)) == 5


def test_one_pending_per_target_class():
    clock, _, sched = make_scheduler()
    sched.submit("lens", "e1", LENS_IDLE, req("a"))
    sched.submit("lens", "e1", LENS_IDLE, req("b"))
    sched.submit("edit", "e1", EDIT_COALESCE, req("c"))
    assert sched.pending_count() == 2  # one per class


def test_invalid_request_and_class_rejected():
    _, _, sched = make_scheduler()
    with pytest.raises(InvalidRequestError):
        sched.submit("lens", "e1", LENS_IDLE, {"prompt": "raw dict"})
    with pytest.raises(InvalidRequestError):
        sched.submit("lens", "e1", "never-class", req())


def test_shutdown_rejects_submits():
    _, _, sched = make_scheduler()
    sched.shutdown()
    with pytest.raises(ShutdownError):
        sched.submit("lens", "e1", LENS_IDLE, req())


def test_stale_result_discarded_fresh_applied():
    clock, counters, sched = make_scheduler()
    job = sched.submit("edit", "e1", EDIT_COALESCE, req())
    clock.advance(300)
    (fired,) = sched.due_jobs()
    assert sched.on_result(fired) == "applied"
    counters["e1"] = counters.get("e1", 0) + 1

    stale = sched.submit("edit", "e1", EDIT_COALESCE, req())
    clock.advance(300)
    (fired2,) = sched.due_jobs()
    counters["e1"] += 1  # something newer applied meanwhile
    assert sched.on_result(fired2) == "discarded"


def test_racing_results_older_discarded():
    # Counter-ordering oracle: whichever applies first wins; the other is stale.
    clock, counters, sched = make_scheduler()
    older = sched.submit("edit", "e1", EDIT_COALESCE, req("old"))
    clock.advance(300)
    (fired_old,) = sched.due_jobs()
    newer = sched.submit("edit", "e1", EDIT_COALESCE, req("new"))
    clock.advance(300)
    (fired_new,) = sched.due_jobs()

    assert sched.on_result(fired_new) == "applied"
    counters["e1"] = counters.get("e1", 0) + 1
    assert sched.on_result(fired_old) == "discarded"


def test_cancel_target_counts_pending_and_flags_inflight():
    clock, _, sched = make_scheduler()
    sched.submit("lens", "e1", LENS_IDLE, req())
    assert sched.cancel_target("e1") == 1
    assert sched.cancel_target("e1") == 0

    job = sched.submit("lens", "e1", LENS_IDLE, req())
    clock.advance(2000)
    (fired,) = sched.due_jobs()
    sched.cancel_target("e1")
    assert sched.on_result(fired) == "discarded"


def test_bounded_inflight():
    clock, _, sched = make_scheduler(max_inflight=4)
    for i in range(10):
        sched.submit("gen", f"e{i}", IMMEDIATE, req())
    first = sched.due_jobs()
    assert len(first) == 4
    assert sched.due_jobs() == []  # capacity exhausted
    for job in first[:2]:
        sched.on_result(job)
    assert len(sched.due_jobs()) == 2


def test_liveness_every_fired_job_gets_one_result():
    clock, _, sched = make_scheduler(max_inflight=100)
    rng = random.Random(7)
    submitted = []
    for i in range(50):
        submitted.append(sched.submit("gen", f"e{i}", rng.choice([IMMEDIATE, EDIT_COALESCE, LENS_IDLE]), req()))
    clock.advance(5000)
    fired = sched.due_jobs()
    assert {j.id for j in fired} == {j.id for j in submitted}
    results = [sched.on_result(j) for j in fired]
    assert len(results) == 50
    assert sched.idle()


def test_coalescing_burst_one_adapter_call_per_window():
    # Coalescing oracle: any burst of submits with gaps < window ends in one fire.
    rng = random.Random(99)
    for _ in range(50):
        clock, _, sched = make_scheduler()
        t = 0
        for _ in range(rng.randint(1, 10)):
            gap = rng.randint(0, 1999)
            clock.advance(gap)
            t += gap
            sched.submit("lens", "e1", LENS_IDLE, req())
        clock.advance(2000)
        fired = sched.due_jobs()
        assert len(fired) == 1
        assert fired[0].fire_at == t + 2000
