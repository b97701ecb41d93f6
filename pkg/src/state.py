import json
from datetime import datetime
from typing import List, Optional

from sqlmodel import Field, Session, SQLModel, create_engine, select

from src.config import Config


class RunRecord(SQLModel, table=True):
    __tablename__ = "runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    run_id: str = Field(index=True)
    command: str
    config_hash: str
    config_json: str
    version: str
    started_at: str
    finished_at: Optional[str] = None
    status: str = "running"
    outputs_json: str = "{}"


class RunLedger:
    def __init__(self, sqlite_path: Optional[str] = None):
        sqlite_path = sqlite_path or Config().get_sqlite_db()
        self.engine = create_engine(f"sqlite:///{sqlite_path}")
        SQLModel.metadata.create_all(self.engine)

    @staticmethod
    def now() -> str:
        return datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    def open_run(self, manifest) -> int:
        with Session(self.engine) as session:
            record = RunRecord(
                run_id=manifest.run_id,
                command=manifest.command,
                config_hash=manifest.config_hash,
                config_json=json.dumps(manifest.config, sort_keys=True),
                version=manifest.version,
                started_at=manifest.started_at,
                outputs_json=json.dumps(manifest.outputs, sort_keys=True),
            )
            session.add(record)
            session.commit()
            session.refresh(record)
            return record.id

    def finish_run(self, record_id: int, status: str, outputs: dict):
        with Session(self.engine) as session:
            record = session.get(RunRecord, record_id)
            if record:
                record.status = status
                record.finished_at = self.now()
                record.outputs_json = json.dumps(outputs, sort_keys=True)
                session.add(record)
                session.commit()

    def get_run(self, run_id: str) -> Optional[RunRecord]:
        with Session(self.engine) as session:
            statement = select(RunRecord).where(RunRecord.run_id == run_id).order_by(RunRecord.id.desc())
            return session.exec(statement).first()

    def list_runs(self, limit: int = 50) -> List[RunRecord]:
        with Session(self.engine) as session:
            statement = select(RunRecord).order_by(RunRecord.id.desc()).limit(limit)
            return list(session.exec(statement).all())
