"""ngnboost run ledger."""

from .ledger import Ledger, default_ledger_url
from .models import RunRecord

__all__ = ["Ledger", "RunRecord", "default_ledger_url"]
