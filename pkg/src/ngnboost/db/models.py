"""SQLModel schema for the run ledger."""

from datetime import datetime
from typing import Optional
from uuid import UUID, uuid4

from sqlmodel import JSON, Column, Field, SQLModel


class RunRecord(SQLModel, table=True):
    """One (seed, fraction, selector, classifier) run of an experiment."""

    __tablename__ = "runs"

    id: UUID = Field(default_factory=uuid4, primary_key=True)

    config_hash: str = Field(index=True)
    run_id: str = Field(index=True)

    classifier: str = Field(index=True)
    selector: str = Field(index=True)
    seed: int
    fraction: float
    k: int

    state: str = Field(default="completed", index=True)
    accuracy: Optional[float] = None
    confusion: Optional[list] = Field(default=None, sa_column=Column(JSON))
    error: Optional[str] = None

    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    created_at: datetime = Field(default_factory=datetime.utcnow)

    @property
    def succeeded(self) -> bool:
        return self.state == "completed"
