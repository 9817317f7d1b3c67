"""Run worker: executes experiment runs concurrently and records them in the ledger."""

import asyncio
import logging
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Any, Callable, Iterable, Optional

import numpy as np

from .db import Ledger, RunRecord
from .metrics import ConfusionMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunJob:
    """One cell repetition: (seed, fraction) under a selector and a classifier."""

    classifier: str
    selector: str
    seed: int
    fraction_index: int
    fraction: float
    k: int

    @property
    def run_id(self) -> str:
        return f"{self.classifier}/{self.selector}/seed={self.seed}/fraction={self.fraction:g}"


@dataclass(frozen=True)
class RunOutcome:
    """Result of a run. `selection` and `fitted` exist only for runs executed in-process."""

    job: RunJob
    accuracy: Optional[float] = None
    confusion: Optional[ConfusionMatrix] = None
    error: Optional[str] = None
    selection: Any = field(default=None, repr=False, compare=False)
    fitted: Any = field(default=None, repr=False, compare=False)
    started_at: Optional[datetime] = field(default=None, compare=False)
    completed_at: Optional[datetime] = field(default=None, compare=False)

    @property
    def run_id(self) -> str:
        return self.job.run_id

    @property
    def classifier(self) -> str:
        return self.job.classifier

    @property
    def selector(self) -> str:
        return self.job.selector

    @property
    def fraction(self) -> float:
        return self.job.fraction

    @property
    def succeeded(self) -> bool:
        return self.error is None

    def to_record(self, config_hash: str) -> RunRecord:
        return RunRecord(
            config_hash=config_hash,
            run_id=self.run_id,
            classifier=self.job.classifier,
            selector=self.job.selector,
            seed=self.job.seed,
            fraction=self.job.fraction,
            k=self.job.k,
            state="completed" if self.succeeded else "failed",
            accuracy=self.accuracy,
            confusion=None if self.confusion is None else self.confusion.counts.tolist(),
            error=self.error,
            started_at=self.started_at,
            completed_at=self.completed_at,
        )

    @classmethod
    def from_record(cls, record: RunRecord, fraction_index: int = 0) -> "RunOutcome":
        job = RunJob(
            classifier=record.classifier,
            selector=record.selector,
            seed=record.seed,
            fraction_index=fraction_index,
            fraction=record.fraction,
            k=record.k,
        )
        return cls(
            job=job,
            accuracy=record.accuracy,
            confusion=None if record.confusion is None else ConfusionMatrix(np.asarray(record.confusion, dtype=np.int64)),
            error=record.error if record.state != "completed" else None,
            started_at=record.started_at,
            completed_at=record.completed_at,
        )


class RunWorker:
    """
    Executes run jobs on a thread pool driven by an asyncio loop.

    Example:
        worker = RunWorker(execute, concurrency=4, ledger=ledger, config_hash=config_hash)
        outcomes = asyncio.run(worker.run(jobs))
    """

    def __init__(
        self,
        execute: Callable[[RunJob], RunOutcome],
        concurrency: int = 1,
        ledger: Optional[Ledger] = None,
        config_hash: str = "",
    ):
        """
        Initialize worker.

        Args:
            execute: Blocking function running one job
            concurrency: Number of jobs executed at once
            ledger: Where finished runs are recorded (optional)
            config_hash: Key of the experiment in the ledger
        """
        self.execute = execute
        self.concurrency = concurrency
        self.ledger = ledger
        self.config_hash = config_hash

        self._executor: Optional[ThreadPoolExecutor] = None
        self._running: set[asyncio.Task] = set()
        self._shutdown: bool = False

    async def run(self, jobs: Iterable[RunJob]) -> list[RunOutcome]:
        """Run every job; outcomes come back in job order whatever the completion order."""
        jobs = list(jobs)
        pending = list(jobs)
        outcomes: dict[str, RunOutcome] = {}
        self._executor = ThreadPoolExecutor(max_workers=self.concurrency, thread_name_prefix="ngnboost-run")
        logger.info(f"Starting RunWorker with concurrency={self.concurrency} for {len(jobs)} runs")

        try:
            while pending or self._running:
                while pending and len(self._running) < self.concurrency and not self._shutdown:
                    self._running.add(asyncio.create_task(self._execute_run(pending.pop(0))))
                if not self._running:
                    break

                done, _ = await asyncio.wait(set(self._running), return_when=asyncio.FIRST_COMPLETED)
                for task in done:
                    self._running.discard(task)
                    outcome = task.result()
                    outcomes[outcome.run_id] = outcome
        finally:
            await self.shutdown()

        return [outcomes[job.run_id] for job in jobs if job.run_id in outcomes]

    async def _execute_run(self, job: RunJob) -> RunOutcome:
        """Execute a single job, converting any exception into a failed outcome."""
        started_at = datetime.utcnow()
        loop = asyncio.get_running_loop()
        try:
            outcome = await loop.run_in_executor(self._executor, self.execute, job)
            outcome = replace(outcome, started_at=started_at, completed_at=datetime.utcnow())
            logger.info(f"Run {job.run_id} completed: accuracy {outcome.accuracy:.4f}")
        except Exception as e:
            outcome = self._handle_failure(job, e, started_at)

        if self.ledger is not None:
            self.ledger.record(outcome.to_record(self.config_hash))
        return outcome

    def _handle_failure(self, job: RunJob, error: Exception, started_at: datetime) -> RunOutcome:
        """Record the failure; deterministic runs are not retried."""
        error_msg = f"{error.__class__.__name__}: {str(error)}\n{traceback.format_exc()}"
        logger.warning(f"Run {job.run_id} failed. Error: {error}")
        return RunOutcome(job=job, error=error_msg, started_at=started_at, completed_at=datetime.utcnow())

    async def shutdown(self) -> None:
        """Graceful shutdown."""
        self._shutdown = True
        if self._running:
            logger.info("Waiting for running runs to complete...")
            await asyncio.gather(*self._running, return_exceptions=True)
            self._running.clear()

        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
        logger.info("Worker shutdown complete")
