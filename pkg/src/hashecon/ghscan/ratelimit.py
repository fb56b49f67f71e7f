"""Token-bucket rate limiting for search requests.

The search API enforces secondary limits well below the general REST
quota (30 requests/minute for repository search, 10/minute for code
search on authenticated tokens), so the client takes one token per
request and blocks until one is available. Clock and sleep are
injectable for tests.
"""

from __future__ import annotations

import threading
import time


class TokenBucket:
    def __init__(self, rate_per_minute: float, capacity: float | None = None,
                 clock=time.monotonic, sleep=time.sleep):
        if rate_per_minute <= 0:
            raise ValueError(f"rate must be positive, got {rate_per_minute}")
        self.rate_per_second = rate_per_minute / 60.0
        self.capacity = capacity if capacity is not None else rate_per_minute
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def _refill(self) -> None:
        now = self._clock()
        self._tokens = min(self.capacity,
                           self._tokens + (now - self._last) * self.rate_per_second)
        self._last = now

    def try_acquire(self, tokens: float = 1.0) -> bool:
        with self._lock:
            self._refill()
            if self._tokens >= tokens:
                self._tokens -= tokens
                return True
            return False

    def acquire(self, tokens: float = 1.0) -> float:
        """Block until ``tokens`` are available; returns seconds waited."""
        waited = 0.0
        while True:
            with self._lock:
                self._refill()
                if self._tokens >= tokens:
                    self._tokens -= tokens
                    return waited
                deficit = tokens - self._tokens
                delay = deficit / self.rate_per_second
            self._sleep(delay)
            waited += delay
