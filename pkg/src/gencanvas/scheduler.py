"""Debounced, coalescing job scheduling with staleness filtering.

The scheduler is pure bookkeeping over an injected clock: the runtime fires
due jobs, executes them against adapters, and feeds outcomes back through
``on_result``, which drops anything superseded by a newer generation of the
same target.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from .controls import GenerationRequest
from .errors import InvalidRequestError, ShutdownError

IMMEDIATE = "immediate"
LENS_IDLE = "lens-idle"
EDIT_COALESCE = "edit-coalesce"

DEFAULT_WINDOWS_MS = {IMMEDIATE: 0, LENS_IDLE: 2000, EDIT_COALESCE: 300}


class VirtualClock:
    """Manually advanced millisecond clock for deterministic runs."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def set(self, t_ms: int) -> None:
        if t_ms < self._now:
            raise ValueError(f"clock cannot go backwards ({t_ms} < {self._now})")
        self._now = t_ms

    def advance(self, ms: int) -> None:
        self.set(self._now + ms)


class SystemClock:
    def __init__(self):
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)


@dataclass
class Job:
    id: int
    kind: str  # apply-dispatch tag, e.g. image-gen | lens | container | brush
    target: str
    debounce_class: str
    request: GenerationRequest
    payload: dict = field(default_factory=dict)
    target_counter: int = 0
    fire_at: int = 0
    cancelled: bool = False


class Scheduler:
    def __init__(
        self,
        clock,
        counter_of: Callable[[str], int],
        windows_ms: dict[str, int] | None = None,
        max_inflight: int = 4,
    ):
        self.clock = clock
        self.counter_of = counter_of
        self.windows_ms = dict(DEFAULT_WINDOWS_MS)
        if windows_ms:
            self.windows_ms.update(windows_ms)
        self.max_inflight = max_inflight
        self._pending: dict[tuple[str, str], Job] = {}
        self._inflight: dict[int, Job] = {}
        self._next_id = 1
        self._shutdown = False
        self._lock = threading.RLock()

    # -- submission ---------------------------------------------------------

    def submit(
        self,
        kind: str,
        target: str,
        debounce_class: str,
        request: GenerationRequest,
        payload: dict | None = None,
    ) -> Job:
        """Queue a job; an already-pending job for (target, class) is
        superseded and its timer re-armed."""
        with self._lock:
            if self._shutdown:
                raise ShutdownError("scheduler is shut down")
            if debounce_class not in self.windows_ms:
                raise InvalidRequestError(f"unknown debounce class {debounce_class!r}")
            if not isinstance(request, GenerationRequest):
                raise InvalidRequestError("submit needs a GenerationRequest")
            job = Job(
                id=self._next_id,
                kind=kind,
                target=target,
                debounce_class=debounce_class,
                request=request,
                payload=dict(payload or {}),
                target_counter=self.counter_of(target),
                fire_at=self.clock.now_ms() + self.windows_ms[debounce_class],
            )
            self._next_id += 1
            self._pending[(target, debounce_class)] = job
            return job

    # -- firing -------------------------------------------------------------

    def due_jobs(self) -> list[Job]:
        """Move due pending jobs (capacity permitting) into the in-flight set."""
        with self._lock:
            now = self.clock.now_ms()
            due = sorted(
                (j for j in self._pending.values() if j.fire_at <= now),
                key=lambda j: (j.fire_at, j.id),
            )
            fired = []
            for job in due:
                if len(self._inflight) >= self.max_inflight:
                    break
                del self._pending[(job.target, job.debounce_class)]
                self._inflight[job.id] = job
                fired.append(job)
            return fired

    def next_fire_time(self) -> int | None:
        with self._lock:
            if not self._pending:
                return None
            return min(j.fire_at for j in self._pending.values())

    # -- results ------------------------------------------------------------

    def on_result(self, job: Job) -> str:
        """'applied' when the job still matches its target's generation
        counter, else 'discarded'. The caller performs the actual apply and
        the counter bump."""
        with self._lock:
            self._inflight.pop(job.id, None)
            if job.cancelled:
                return "discarded"
            if self.counter_of(job.target) != job.target_counter:
                return "discarded"
            return "applied"

    # -- cancellation and introspection --------------------------------------

    def cancel_target(self, target: str) -> int:
        with self._lock:
            keys = [k for k in self._pending if k[0] == target]
            for k in keys:
                del self._pending[k]
            for job in self._inflight.values():
                if job.target == target:
                    job.cancelled = True
            return len(keys)

    def pending_count(self) -> int:
        with self._lock:
            return len(self._pending)

    def inflight_count(self) -> int:
        with self._lock:
            return len(self._inflight)

    def pending_job(self, target: str, debounce_class: str) -> Job | None:
        with self._lock:
            return self._pending.get((target, debounce_class))

    def idle(self) -> bool:
        with self._lock:
            return not self._pending and not self._inflight

    def shutdown(self) -> None:
        with self._lock:
            self._shutdown = True
            self._pending.clear()
