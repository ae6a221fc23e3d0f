import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

TWO_PI = 2.0 * np.pi


def e_frac(num, den):
    """e(num/den) = exp(2 pi i num/den) with the argument reduced mod 1 first.

    Integer inputs are reduced exactly; quarter-turns come out exact.
    """
    num = np.asarray(num)
    den = np.asarray(den)
    if np.issubdtype(num.dtype, np.integer) and np.issubdtype(den.dtype, np.integer):
        r = np.mod(num, den)
        x = r / den
        out = np.exp(1j * TWO_PI * x)
        quarter = (4 * r) % den == 0
        if np.any(quarter):
            k = np.broadcast_to((4 * r) // np.where(den == 0, 1, den), out.shape)
            exact = np.array([1.0, 1j, -1.0, -1j])[k % 4]
            out = np.where(quarter, exact, out)
        return out
    x = np.mod(num / den, 1.0)
    return np.exp(1j * TWO_PI * x)


def e(x):
    """e(x) = exp(2 pi i x) for real x, reduced mod 1."""
    return np.exp(1j * TWO_PI * np.mod(np.asarray(x, dtype=np.float64), 1.0))


def thread_count() -> int:
    """Worker cap from MULTEXP_THREADS (default: CPU count)."""
    raw = os.environ.get("MULTEXP_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pool_map(fn, items, workers: int | None = None) -> list:
    """Ordered map over a thread pool; serial when one worker suffices."""
    items = list(items)
    workers = min(thread_count() if workers is None else workers, len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def splitmix64(x):
    """splitmix64 finalizer applied elementwise to uint64 values (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def seeded_signs(seed: int, keys) -> np.ndarray:
    """Deterministic +-1 per integer key: the top bit of splitmix64(splitmix64(seed) + key)."""
    with np.errstate(over="ignore"):
        s = splitmix64(np.uint64(seed % (1 << 64)))
        h = splitmix64(s + np.asarray(keys, dtype=np.uint64))
    return np.where(h >> np.uint64(63), -1.0, 1.0)
