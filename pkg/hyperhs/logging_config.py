import os
import sys
from pathlib import Path
from typing import Optional, TextIO

from loguru import logger


def configure_logging(log_path: str = "logs/hyperhs.log", level: Optional[str] = None,
                      stream: TextIO = sys.stdout) -> None:
    level = level or os.getenv("HYPERHS_LOG_LEVEL", "INFO")
    Path(log_path).parent.mkdir(parents=True, exist_ok=True)
    logger.remove()

    logger.add(stream, level=level, enqueue=True, backtrace=True, diagnose=False)

    logger.add(
        log_path,
        level=level,
        rotation="10 MB",
        retention="14 days",
        compression="zip",
        enqueue=True,
        backtrace=True,
        diagnose=False,
    )
