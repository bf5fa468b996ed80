"""Pass/fail registry for the acceptance criteria, reported at session end."""
import time
from contextlib import contextmanager

RESULTS = {}


@contextmanager
def criterion(number: int, title: str, budget_s: float = None):
    """Record the outcome of the enclosed checks; ``info`` collects detail strings."""
    info = []
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException as e:
        _record(number, title, False, info + [f"{type(e).__name__}: {e}".splitlines()[0]], t0)
        raise
    elapsed = time.perf_counter() - t0
    if budget_s is not None and elapsed > budget_s:
        _record(number, title, False, info + [f"over the {budget_s:g} s budget"], t0)
        raise AssertionError(f"criterion {number} took {elapsed:.1f} s (budget {budget_s:g} s)")
    _record(number, title, True, info, t0)


def _record(number, title, ok, info, t0):
    RESULTS[number] = (ok, title, "; ".join(info), time.perf_counter() - t0)


def lines():
    out = []
    for n in sorted(RESULTS):
        ok, title, detail, dt = RESULTS[n]
        tail = f" ({detail})" if detail else ""
        out.append(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}{tail} [{dt:.1f} s]")
    return out
