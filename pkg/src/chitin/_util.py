"""Small shared helpers: atomic writes, worker-count resolution."""

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor


def atomic_write_text(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(text)
    os.replace(tmp, path)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def worker_count():
    """CHITIN_THREADS caps parallelism; 0 or unset means auto."""
    raw = os.environ.get("CHITIN_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(os.cpu_count() or 1, 8)
    return n


def ordered_map(fn, items, workers=None):
    """Order-preserving parallel map; serial when one worker."""
    workers = workers or worker_count()
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
