from datetime import datetime, timezone
from typing import Optional


def utc_now() -> datetime:
    """Naive UTC timestamp for manifests."""
    return make_naive_datetime(datetime.now(timezone.utc))


def make_naive_datetime(dt: Optional[datetime]) -> Optional[datetime]:
    if dt is None:
        return None
    if dt.tzinfo is not None:
        return dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt


def validate_time_range(started_at: datetime, finished_at: datetime) -> None:
    if finished_at < started_at:
        raise ValueError("run finished before it started")
