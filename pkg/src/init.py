import os

from src.config import Config
from src.logger import Logger


def init_barrenbench(output_dir: str = None):
    config = Config()
    logger = Logger()

    logger.info("Initializing barrenbench...")
    sqlite_db = config.get_sqlite_db()
    output_dir = output_dir or config.get_output_dir()
    logs_dir = config.get_logs_dir()

    logger.info("Creating storage directories...")
    os.makedirs(os.path.dirname(sqlite_db) or ".", exist_ok=True)
    os.makedirs(output_dir, exist_ok=True)
    os.makedirs(logs_dir, exist_ok=True)
    return output_dir
