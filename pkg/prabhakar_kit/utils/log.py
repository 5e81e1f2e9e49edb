"""Package logger."""
import logging

PACKAGE_LOGGER = logging.getLogger("prabhakar_kit")


def get_logger(name: str) -> logging.Logger:
    """Return a child of the package logger for module ``name``.

    :param name: usually ``__name__`` of the calling module
    :type name: str
    :return: logger
    :rtype: logging.Logger
    """
    prefix = PACKAGE_LOGGER.name + "."
    if name.startswith(prefix):
        name = name[len(prefix) :]
    return PACKAGE_LOGGER.getChild(name)


def configure_logging(verbosity: int = 0) -> None:
    """Attach a stderr handler to the package logger.

    :param verbosity: 0 for WARNING, 1 for INFO, 2 or more for DEBUG
    :type verbosity: int
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    if not PACKAGE_LOGGER.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        PACKAGE_LOGGER.addHandler(handler)
    PACKAGE_LOGGER.setLevel(level)
