from hyperhs.runner.suite_runner import SuiteRunner, run_suite

__all__ = ["SuiteRunner", "run_suite"]
