from .time_utils import make_naive_datetime, utc_now, validate_time_range

__all__ = ["make_naive_datetime", "utc_now", "validate_time_range"]
