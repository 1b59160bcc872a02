import sys

from dotenv import load_dotenv
from loguru import logger

from hyperhs.logging_config import configure_logging
from hyperhs.reporting import emit_report
from hyperhs.runner import run_suite
from hyperhs.settings import load_config

load_dotenv()
configure_logging()


if __name__ == "__main__":
    logger.info("Running the default verification suite...")
    try:
        config = load_config()
        result = run_suite(config)
        emit_report(result, config.format, config.output_path or "reports/default_suite.json")
        sys.exit(0 if result.all_passed else 1)
    except KeyboardInterrupt:
        logger.info("Interrupted.")
        sys.exit(130)
