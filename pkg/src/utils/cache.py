"""Small caches for repeated linear-algebra work."""

import hashlib
import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Hashable, Optional

import numpy as np


class LRUCache:
    """Least-recently-used cache with hit/miss counters."""

    def __init__(self, max_size: int = 64):
        """
        Initialize LRU cache.

        Args:
            max_size: Maximum number of items kept
        """
        self.max_size = max_size
        self.hits = 0
        self.misses = 0
        self._cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[Any]:
        """Get value and mark it most recently used, or None."""
        with self._lock:
            if key not in self._cache:
                self.misses += 1
                return None
            self._cache.move_to_end(key)
            self.hits += 1
            return self._cache[key]

    def set(self, key: Hashable, value: Any) -> None:
        """Store value, evicting the least recently used item when full."""
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            while len(self._cache) > self.max_size:
                self._cache.popitem(last=False)

    def clear(self) -> None:
        """Clear all cached items and counters."""
        with self._lock:
            self._cache.clear()
            self.hits = 0
            self.misses = 0

    def size(self) -> int:
        """Get current cache size."""
        return len(self._cache)


def array_key(matrix: np.ndarray) -> str:
    """Content hash of an array (dtype, shape and bytes)."""
    arr = np.ascontiguousarray(matrix)
    digest = hashlib.sha1()
    digest.update(str(arr.dtype).encode())
    digest.update(str(arr.shape).encode())
    digest.update(arr.tobytes())
    return digest.hexdigest()


def cached_by_array(max_size: int = 64):
    """
    Decorator caching a function of one ndarray by the array's content.

    Cached values are shared between callers and must be treated as read-only.

    Args:
        max_size: Number of distinct arrays remembered
    """
    cache = LRUCache(max_size=max_size)

    def decorator(func):
        @wraps(func)
        def wrapper(matrix, *args, **kwargs):
            if args or kwargs:
                return func(matrix, *args, **kwargs)
            key = array_key(matrix)
            cached = cache.get(key)
            if cached is not None:
                return cached
            result = func(matrix)
            cache.set(key, result)
            return result

        wrapper.clear_cache = cache.clear
        wrapper.cache_size = cache.size
        wrapper.cache = cache
        return wrapper

    return decorator
