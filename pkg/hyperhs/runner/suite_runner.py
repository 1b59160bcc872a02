from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from loguru import logger

from hyperhs import __version__
from hyperhs.domain.identities import run_identity
from hyperhs.domain.report import IdentityReport, Stopwatch, errored_report
from hyperhs.exceptions import HyperHSError
from hyperhs.reporting import SuiteResult
from hyperhs.settings import CheckSpec, SuiteConfig


class SuiteRunner:
    """
    Runs the checks of a suite configuration and collects their reports.
    A failing check is recorded as an errored report; the suite carries on.
    """

    def __init__(self, config: SuiteConfig, workers: Optional[int] = None):
        """
        Initialize the suite runner.

        Args:
            config: Validated suite configuration
            workers: Number of checks run concurrently (defaults to config.settings.workers)
        """
        self.config = config
        self.workers = workers or config.settings.workers
        self.name = "Identity Suite"

        logger.info(f"Initialized {self.name} with {len(config.checks)} checks, {self.workers} worker(s)")

    def run_check(self, spec: CheckSpec) -> IdentityReport:
        """
        Run a single check.

        Args:
            spec: Check entry from the suite configuration

        Returns:
            The check's report, or an errored report when the check raised
        """
        watch = Stopwatch()
        settings = spec.settings(self.config.settings)
        try:
            return run_identity(spec.identity_id, spec.params, settings)
        except HyperHSError as e:
            logger.error(f"{spec.identity_id} failed: {type(e).__name__}: {e}")
            return errored_report(spec.identity_id, spec.params, settings, f"{type(e).__name__}: {e}",
                                  watch.elapsed_ms)
        except Exception as e:
            logger.exception(f"Unexpected error in {spec.identity_id}: {e}")
            return errored_report(spec.identity_id, spec.params, settings, f"{type(e).__name__}: {e}",
                                  watch.elapsed_ms)

    def run(self) -> SuiteResult:
        """Run every check; reports keep the configuration order."""
        logger.info("=" * 80)
        logger.info(f"RUNNING {self.name.upper()} ({len(self.config.checks)} checks)")
        logger.info("=" * 80)

        if self.workers > 1 and len(self.config.checks) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                reports: List[IdentityReport] = list(pool.map(self.run_check, self.config.checks))
        else:
            reports = [self.run_check(spec) for spec in self.config.checks]

        result = SuiteResult(reports=reports, config_digest=self.config.digest, tool_version=__version__)
        summary = result.summary
        logger.info("=" * 80)
        logger.info(f"SUITE FINISHED: {summary['passed']} passed, {summary['failed']} failed, "
                    f"{summary['errored']} errored")
        logger.info("=" * 80)
        return result


def run_suite(config: SuiteConfig, workers: Optional[int] = None) -> SuiteResult:
    return SuiteRunner(config, workers).run()
