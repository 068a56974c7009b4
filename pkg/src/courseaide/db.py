"""Embedded sqlite database shared by the knowledge store and the chat service.

A single connection guarded by an RLock: service endpoints run in a thread
pool, and sqlite is happiest with serialized access. Each subsystem creates
its own tables through ``executescript``.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager


class Database:
    def __init__(self, path: str = ":memory:"):
        self.path = path
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._lock = threading.RLock()

    @contextmanager
    def transaction(self):
        """Serialized transaction; commits on success, rolls back on error."""
        with self._lock:
            try:
                yield self._conn
                self._conn.commit()
            except Exception:
                self._conn.rollback()
                raise

    @contextmanager
    def read(self):
        with self._lock:
            yield self._conn

    def executescript(self, script: str) -> None:
        with self._lock:
            self._conn.executescript(script)
            self._conn.commit()

    def close(self) -> None:
        with self._lock:
            self._conn.close()
