"""Run ledger: per-run records keyed by config hash and run id."""

import logging
from pathlib import Path

from sqlalchemy import delete
from sqlmodel import Session, create_engine, select

from .models import RunRecord

logger = logging.getLogger(__name__)


def default_ledger_url(out_dir: str | Path, config_hash: str) -> str:
    return f"sqlite:///{Path(out_dir).resolve() / f'ledger-{config_hash}.sqlite'}"


class Ledger:
    """Thin SQLModel store of RunRecord rows.

    Example:
        ledger = Ledger("sqlite:///results/ledger.sqlite")
        ledger.reset(config_hash)
        ledger.record(RunRecord(...))
        runs = ledger.runs(config_hash)
    """

    def __init__(self, url: str):
        connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
        self.url = url
        self.engine = create_engine(url, echo=False, connect_args=connect_args)
        RunRecord.metadata.create_all(self.engine)

    def reset(self, config_hash: str) -> None:
        """Drop earlier runs of this configuration."""
        with Session(self.engine) as session:
            session.execute(delete(RunRecord).where(RunRecord.config_hash == config_hash))
            session.commit()

    def record(self, run: RunRecord) -> None:
        with Session(self.engine) as session:
            session.add(run)
            session.commit()

    def runs(self, config_hash: str) -> list[RunRecord]:
        with Session(self.engine) as session:
            statement = select(RunRecord).where(RunRecord.config_hash == config_hash).order_by(RunRecord.run_id)
            return list(session.exec(statement).all())

    def config_hashes(self) -> list[str]:
        with Session(self.engine) as session:
            return sorted(set(session.exec(select(RunRecord.config_hash)).all()))

    def close(self) -> None:
        self.engine.dispose()
