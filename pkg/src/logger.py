import os
from functools import wraps

from fastlogging import LogInit

from src.config import Config


class Logger:
    def __init__(self, filename="barrenbench.log"):
        config = Config()
        logs_dir = config.get_logs_dir()
        os.makedirs(logs_dir, exist_ok=True)
        self.logger = LogInit(
            pathName=os.path.join(logs_dir, filename),
            console=config.get_logging_console(),
            colors=True,
        )

    def info(self, message: str):
        self.logger.info(message)
        self.logger.flush()

    def error(self, message: str):
        self.logger.error(message)
        self.logger.flush()

    def warning(self, message: str):
        self.logger.warning(message)
        self.logger.flush()

    def debug(self, message: str):
        self.logger.debug(message)
        self.logger.flush()

    def exception(self, message: str):
        self.logger.exception(message)
        self.logger.flush()


def stage_logger(logger: Logger):
    """
    Decorator factory that logs entry and exit of a CLI command.
    Exceptions are logged with their traceback and re-raised.

    :param logger: The logger instance to use for logging.
    """

    log_enabled = Config().get_logging_stages()

    def decorator(func):

        @wraps(func)
        def wrapper(*args, **kwargs):
            if log_enabled:
                logger.info(f"{func.__name__} <- {args} {kwargs}")

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.exception(f"{func.__name__} failed - {e}")
                raise

            if log_enabled:
                logger.debug(f"{func.__name__} -> {result}")

            return result
        return wrapper
    return decorator
