"""Reference model host for the gecforge adapter wire protocol.

Reads TAG / CORRUPT frames from stdin and answers one line per request (see
docs/PROTOCOL.md in the toolkit repository). The backend is pluggable: any
pair of callables (sentence -> 26-char mask, (mask, sentence) -> sentence)
can be served, so fine-tuned sequence models drop in without protocol
changes. Two backends ship here:

* dummy     - predicts no tags and corrupts nothing; used for CI and
              protocol conformance.
* delegate  - forwards CORRUPT frames to the `gecforge corrupt` command
              line, closing the loop with the toolkit's built-in engine.

This package deliberately does not import the toolkit; it talks to it only
over the published protocol and CLI.
"""

from __future__ import annotations

import argparse
import shlex
import subprocess
import sys
from dataclasses import dataclass
from typing import Callable, TextIO

MASK_LEN = 26
MASK_ALPHABET = {"a", "b"}


class ProtocolError(ValueError):
    pass


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
            raise ProtocolError("dangling escape")
        nxt = payload[i + 1]
        if nxt == "\\":
            out.append("\\")
        elif nxt == "t":
            out.append("\t")
        elif nxt == "n":
            out.append("\n")
        else:
            raise ProtocolError(f"invalid escape \\{nxt}")
        i += 2
    return "".join(out)


def valid_mask(mask: str) -> bool:
    return len(mask) == MASK_LEN and set(mask) <= MASK_ALPHABET


@dataclass
class ModelBackend:
    name: str
    tag: Callable[[str], str]
    corrupt: Callable[[str, str], str]


def dummy_backend() -> ModelBackend:
    return ModelBackend(
        name="dummy",
        tag=lambda sentence: "a" * MASK_LEN,
        corrupt=lambda mask, sentence: sentence,
    )


def delegate_backend(gecforge_cmd: str = "gecforge", seed: int = 0) -> ModelBackend:
    """Corruptions are delegated to the toolkit CLI; tagging stays inert
    (the CLI has no predict-from-clean-text surface)."""
    argv_prefix = shlex.split(gecforge_cmd)

    def corrupt(mask: str, sentence: str) -> str:
        proc = subprocess.run(
            [*argv_prefix, "corrupt", "--mask", mask, "--seed", str(seed)],
            input=sentence + "\n",
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise ProtocolError(f"delegate command failed: {proc.stderr.strip()}")
        return proc.stdout.rstrip("\n")

    return ModelBackend(name="delegate", tag=lambda sentence: "a" * MASK_LEN, corrupt=corrupt)


def handle_frame(backend: ModelBackend, frame: str) -> str:
    parts = frame.split("\t")
    try:
        if parts[0] == "TAG" and len(parts) == 2:
            sentence = unescape(parts[1])
            mask = backend.tag(sentence)
            if not valid_mask(mask):
                return "ERR backend produced an invalid mask"
            return mask
        if parts[0] == "CORRUPT" and len(parts) == 3:
            if not valid_mask(parts[1]):
                return "ERR malformed mask"
            sentence = unescape(parts[2])
            return escape(backend.corrupt(parts[1], sentence))
    except ProtocolError as exc:
        return f"ERR {exc}"
    return "ERR malformed frame"


def serve(backend: ModelBackend, stdin: TextIO | None = None, stdout: TextIO | None = None) -> None:
    """Answer frames until end-of-input, flushing after every reply."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        reply = handle_frame(backend, line.rstrip("\n"))
        stdout.write(reply + "\n")
        stdout.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gecforge-bridge", description="Serve TAG/CORRUPT frames over stdin/stdout."
    )
    parser.add_argument("--backend", choices=["dummy", "delegate"], default="dummy")
    parser.add_argument("--gecforge-cmd", default="gecforge", help="delegate target command")
    parser.add_argument("--seed", type=int, default=0, help="seed passed to the delegate")
    args = parser.parse_args(argv)
    if args.backend == "dummy":
        backend = dummy_backend()
    else:
        backend = delegate_backend(args.gecforge_cmd, args.seed)
    serve(backend)
    return 0


if __name__ == "__main__":
    sys.exit(main())
