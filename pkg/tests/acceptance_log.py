"""Collects one pass/fail line per acceptance criterion for the terminal summary."""
from __future__ import annotations

import functools
import time

RESULTS: dict[int, tuple[str, str, str]] = {}


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as e:
                status = "SKIP" if type(e).__name__ == "Skipped" else "FAIL"
                RESULTS[number] = (status, title, f"{type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}")
                raise
            RESULTS[number] = ("PASS", title, f"{detail or ''} [{time.perf_counter() - t0:.1f}s]".strip())

        return run

    return wrap


def lines() -> list[str]:
    return [f"criterion {n:>2} {s}: {t} - {d}" for n, (s, t, d) in sorted(RESULTS.items())]
