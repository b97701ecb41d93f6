import os
import tempfile

# storage must point away from the working tree before src.config is first imported
_SCRATCH = tempfile.mkdtemp(prefix="barrenbench-tests-")
# console logging is off for tests: fastlogging keeps a handle on whichever sys.stdout it first sees,
# and capsys closes that stream at teardown
os.environ.setdefault("BARRENBENCH_CONFIG", os.path.join(os.path.dirname(os.path.abspath(__file__)), "test.config.toml"))
os.environ.setdefault("LOGS_DIR", os.path.join(_SCRATCH, "logs"))
os.environ.setdefault("SQLITE_DB_PATH", os.path.join(_SCRATCH, "db", "barrenbench.db"))
os.environ.setdefault("BARRENBENCH_OUTPUT_DIR", os.path.join(_SCRATCH, "runs"))
os.makedirs(os.path.join(_SCRATCH, "db"), exist_ok=True)

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return str(path)
