import os
from os import environ

import toml

SAMPLE_CONFIG = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "sample.config.toml")


def resolve_config_path() -> str:
    if "BARRENBENCH_CONFIG" in environ:
        return environ["BARRENBENCH_CONFIG"]
    if os.path.exists("config.toml"):
        return "config.toml"
    return SAMPLE_CONFIG


class Config:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.reload()
        return cls._instance

    def reload(self, path: str = None):
        self.path = path or resolve_config_path()
        self.config = toml.load(self.path)

    def get_config(self):
        return self.config

    def get_sqlite_db(self):
        return environ.get("SQLITE_DB_PATH", self.config["STORAGE"]["SQLITE_DB"])

    def get_output_dir(self):
        return environ.get("BARRENBENCH_OUTPUT_DIR", self.config["STORAGE"]["OUTPUT_DIR"])

    def get_logs_dir(self):
        return environ.get("LOGS_DIR", self.config["STORAGE"]["LOGS_DIR"])

    def get_sample_budget(self) -> int:
        return int(environ.get("BARRENBENCH_BUDGET", self.config["SAMPLING"]["BUDGET"]))

    def get_block_size(self) -> int:
        return int(environ.get("BARRENBENCH_BLOCK", self.config["SAMPLING"]["BLOCK"]))

    def get_rel_tol(self) -> float:
        return float(environ.get("BARRENBENCH_REL_TOL", self.config["SAMPLING"]["REL_TOL"]))

    def get_threads(self) -> int:
        threads = int(environ.get("BARRENBENCH_THREADS", self.config["SAMPLING"]["THREADS"]))
        return threads if threads > 0 else (os.cpu_count() or 1)

    def get_fd_step(self) -> float:
        return float(environ.get("BARRENBENCH_FD_STEP", self.config["SAMPLING"]["FD_STEP"]))

    def get_moment_samples(self) -> int:
        return int(self.config["SAMPLING"]["MOMENT_SAMPLES"])

    def get_seed(self) -> int:
        return int(environ.get("BARRENBENCH_SEED", self.config["SAMPLING"]["SEED"]))

    def get_logging_stages(self):
        return self.config["LOGGING"]["LOG_STAGES"] == "true"

    def get_logging_console(self):
        return self.config["LOGGING"]["LOG_CONSOLE"] == "true"

    def set_sample_budget(self, budget: int):
        self.config["SAMPLING"]["BUDGET"] = int(budget)
        self.save_config()

    def set_threads(self, threads: int):
        self.config["SAMPLING"]["THREADS"] = int(threads)
        self.save_config()

    def save_config(self):
        if self.path == SAMPLE_CONFIG:
            self.path = "config.toml"
        with open(self.path, "w") as f:
            toml.dump(self.config, f)
