"""Process-boundary protocol for external taggers and corruptors.

Frames are newline-terminated, tab-separated, UTF-8:

    request  "TAG\\t<sentence>\\n"            reply  "<26-char a/b mask>\\n"
    request  "CORRUPT\\t<mask>\\t<sentence>\\n" reply  "<corrupted sentence>\\n"

Payload fields escape backslash, tab and newline as \\\\, \\t and \\n, applied
symmetrically on both sides, so no frame ever contains an interior newline or
tab inside a payload. A reply starting with "ERR " signals a refused frame.
docs/PROTOCOL.md is the normative description and carries conformance vectors.

Each spawned process serves one request at a time; concurrency comes from a
pool of processes. A crash or timeout loses at most the in-flight request, and
restarts are rate-limited per endpoint.
"""

from __future__ import annotations

import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Sequence

from .codec import decode_mask, encode_mask
from .core import TagSet
from .errors import (
    AdapterError,
    AdapterProtocolError,
    AdapterTimeoutError,
    InputContractError,
    MalformedMaskError,
)


def escape(payload: str) -> str:
    return payload.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape(payload: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(payload):
        ch = payload[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(payload):
            raise AdapterProtocolError("dangling escape character in payload")
        nxt = payload[i + 1]
        if nxt == "\\":
            out.append("\\")
        elif nxt == "t":
            out.append("\t")
        elif nxt == "n":
            out.append("\n")
        else:
            raise AdapterProtocolError(f"invalid escape sequence: \\{nxt}")
        i += 2
    return "".join(out)


@dataclass(frozen=True)
class AdapterEndpoint:
    command: str | Sequence[str]
    timeout_ms: int = 30_000
    pool_size: int = 1
    max_restarts_per_minute: int = 3

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise InputContractError("adapter timeout must be > 0")
        if self.pool_size < 1:
            raise InputContractError("adapter pool size must be >= 1")

    def argv(self) -> list[str]:
        if isinstance(self.command, str):
            return shlex.split(self.command)
        return list(self.command)


class _Worker:
    """One external process plus a reader thread feeding a line queue."""

    def __init__(self, argv: list[str]):
        self.proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )
        self.lines: queue.Queue[bytes | None] = queue.Queue()
        self.reader = threading.Thread(target=self._read, daemon=True)
        self.reader.start()

    def _read(self) -> None:
        assert self.proc.stdout is not None
        for raw in self.proc.stdout:
            self.lines.put(raw)
        self.lines.put(None)  # EOF marker

    def request(self, frame: str, timeout_ms: int) -> str:
        assert self.proc.stdin is not None
        try:
            self.proc.stdin.write((frame + "\n").encode("utf-8"))
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterProtocolError(f"adapter process is gone: {exc}") from exc
        try:
            raw = self.lines.get(timeout=timeout_ms / 1000.0)
        except queue.Empty:
            raise AdapterTimeoutError(f"no reply within {timeout_ms} ms") from None
        if raw is None:
            raise AdapterProtocolError("adapter process closed its output mid-stream")
        try:
            return raw.decode("utf-8").rstrip("\n")
        except UnicodeDecodeError as exc:
            raise AdapterProtocolError(f"reply is not valid UTF-8: {exc}") from exc

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                if self.proc.stdin:
                    self.proc.stdin.close()
                self.proc.wait(timeout=2)
            except Exception:
                self.proc.kill()
        self.reader.join(timeout=1)


class AdapterClient:
    """Thread-safe pool facade over one endpoint."""

    def __init__(self, endpoint: AdapterEndpoint):
        self.endpoint = endpoint
        self._idle: queue.Queue[_Worker] = queue.Queue()
        self._restarts: list[float] = []
        self._lock = threading.Lock()
        for _ in range(endpoint.pool_size):
            self._idle.put(_Worker(endpoint.argv()))

    def _respawn(self) -> _Worker:
        with self._lock:
            now = time.monotonic()
            self._restarts = [t for t in self._restarts if now - t < 60.0]
            if len(self._restarts) >= self.endpoint.max_restarts_per_minute:
                raise AdapterError(
                    f"restart budget exhausted "
                    f"({self.endpoint.max_restarts_per_minute}/minute)"
                )
            self._restarts.append(now)
        return _Worker(self.endpoint.argv())

    def _roundtrip(self, frame: str) -> str:
        worker = self._idle.get()
        try:
            reply = worker.request(frame, self.endpoint.timeout_ms)
        except (AdapterTimeoutError, AdapterProtocolError):
            worker.close()
            self._idle.put(self._respawn())
            raise
        self._idle.put(worker)
        return reply

    def request_tags(self, sentence: str) -> TagSet:
        reply = self._roundtrip("TAG\t" + escape(sentence))
        if "\t" in reply:
            raise AdapterProtocolError("tag reply contains a raw tab")
        try:
            return decode_mask(reply)
        except MalformedMaskError as exc:
            raise AdapterProtocolError(f"bad tag reply: {exc}") from None

    def request_corruption(self, tags: TagSet, sentence: str) -> str:
        frame = "CORRUPT\t" + encode_mask(tags) + "\t" + escape(sentence)
        reply = self._roundtrip(frame)
        if not reply:
            raise AdapterProtocolError("empty corruption reply")
        if "\t" in reply:
            raise AdapterProtocolError("corruption reply contains a raw tab")
        if reply.startswith("ERR "):
            raise AdapterProtocolError(f"adapter refused the frame: {reply[4:]}")
        return unescape(reply)

    def close(self) -> None:
        while True:
            try:
                self._idle.get_nowait().close()
            except queue.Empty:
                break

    def __enter__(self) -> "AdapterClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
