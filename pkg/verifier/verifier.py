import json
import logging
import time
from dataclasses import dataclass
from threading import Event, Thread
from typing import Callable

from chain_rule.scalar import ArithmeticMode
from params.verify_params import VerifyParams
from verifier.suites import SUITES, SuiteReport

Suite = Callable[[VerifyParams, ArithmeticMode, Event, logging.Logger], SuiteReport]


class SuiteWorker(Thread):
    """
    A class that represents a worker for one verification suite.

    Every suite draws from its own seeded generator, so the report is the same
    whether suites run in parallel threads or one after another.
    """
    params: VerifyParams
    mode: ArithmeticMode

    suite_name: str
    suite: Suite

    report: SuiteReport | None

    def __init__(
            self,
            suite_name: str,
            suite: Suite,
            params: VerifyParams,
            mode: ArithmeticMode
    ):
        super().__init__(name=f"Verifier ({suite_name})")

        self.suite_name = suite_name
        self.suite = suite
        self.params = params
        self.mode = mode

        self.logger = logging.getLogger(f"Verifier ({suite_name})")
        self.report = None

        self.stop_event = Event()

    def run(self):
        """
        Runs the suite and keeps its report; an unexpected exception is turned
        into a failed report instead of killing the whole verification.
        """
        self.logger.info(f"Suite `{self.suite_name}` started")
        started = time.monotonic()

        try:
            self.report = self.suite(self.params, self.mode, self.stop_event, self.logger)
        except Exception as e:
            self.logger.critical(f"Suite `{self.suite_name}` crashed: {type(e).__name__}: {e}")
            self.report = SuiteReport(self.suite_name)
            self.report.record(False, {"error": f"{type(e).__name__}: {e}"})
            return

        elapsed = time.monotonic() - started
        if self.report.interrupted:
            self.logger.warning(f"Suite `{self.suite_name}` stopped after {self.report.checked} checks ⚠️")
        elif self.report.passed:
            self.logger.info(f"Suite `{self.suite_name}` passed: {self.report.checked} checks in {elapsed:.2f}s ✅")
        else:
            self.logger.error(f"Suite `{self.suite_name}` failed {self.report.failures} "
                              f"of {self.report.checked} checks ❌")

    def stop(self):
        self.logger.info("Stopping suite...")
        self.stop_event.set()


@dataclass(frozen=True)
class VerificationReport:
    """
    Suite reports in fixed suite order plus the run configuration they came from.
    """
    mode: ArithmeticMode
    seed: int
    max_order: int
    dims: tuple[int, int]
    suites: tuple[SuiteReport, ...]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.suites)

    @property
    def interrupted(self) -> bool:
        return any(report.interrupted for report in self.suites)

    @property
    def first_counterexample(self) -> dict | None:
        for report in self.suites:
            if report.failures:
                return {"suite": report.name, **(report.counterexample or {})}
        return None

    @property
    def worst_float_error(self) -> float | None:
        errors = [report.worst_error for report in self.suites if report.worst_error is not None]
        return max(errors, default=None)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "interrupted": self.interrupted,
            "mode": self.mode.value,
            "seed": self.seed,
            "max_order": self.max_order,
            "dims": list(self.dims),
            "worst_float_error": self.worst_float_error,
            "first_counterexample": self.first_counterexample,
            "suites": [report.to_json() for report in self.suites]
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)


def run_verification(
        params: VerifyParams,
        mode: ArithmeticMode = ArithmeticMode.RATIONAL,
        suites: tuple[tuple[str, Suite], ...] = SUITES
) -> VerificationReport:
    """
    Runs every suite and reduces their reports in suite order.

    :param params: trial counts, seed, orders and dimensions
    :param mode: arithmetic used by the random-jet suites
    :param suites: ``(name, suite)`` pairs, all of them by default
    :return: ``VerificationReport``, identical for identical parameters
    """
    logger = params.get_logger()
    workers = [SuiteWorker(name, suite, params, mode) for name, suite in suites]

    if not params.is_parallel():
        try:
            for worker in workers:
                worker.run()

        except KeyboardInterrupt:
            logger.info("Interrupt received! Stopping suites...")
            for worker in workers:
                worker.stop()
            for worker in workers:
                if worker.report is None:
                    worker.run()
    else:
        for worker in workers:
            worker.start()

        try:
            while any(worker.is_alive() for worker in workers):
                time.sleep(0.1)

        except KeyboardInterrupt:
            logger.info("Interrupt received! Stopping suites...")
            for worker in workers:
                worker.stop()

        for worker in workers:
            worker.join()

    report = VerificationReport(
        mode=mode,
        seed=params.get_seed(),
        max_order=params.get_max_order(),
        dims=params.get_dims(),
        suites=tuple(worker.report for worker in workers)
    )
    if report.interrupted:
        logger.warning("Verification was interrupted: unfinished suites count as failed")
    logger.info(f"Verification {'passed' if report.passed else 'FAILED'}: "
                f"{sum(suite.checked for suite in report.suites)} checks across {len(report.suites)} suites")
    return report
