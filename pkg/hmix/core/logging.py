import logging
from typing import Optional

from hmix.core.config import get_settings

LOG_FORMAT = "%(asctime)s %(name)s:%(levelname)s:%(message)s"


def setup_logging(level: Optional[str] = None) -> None:
    """Configure the root logger from HMIX_LOG unless a level is given."""
    level = (level or get_settings().LOG).upper()
    logging.basicConfig(format=LOG_FORMAT, level=level, force=True)
    # scipy/numpy stay quiet below WARNING
    logging.getLogger("scipy").setLevel(logging.WARNING)
