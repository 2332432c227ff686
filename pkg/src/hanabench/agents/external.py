"""Wire adapter hosting an out-of-process policy over newline-delimited JSON.

Protocol (one JSON object per line):

* handshake: both sides send {"type": "hello", "proto": 1} on connect; a
  mismatched or missing reply aborts.
* per game: {"type": "reset", "deck_seed": int, "seat": int, "instance_seed": int}
* per turn: an observation message {"type": "obs", ...} with the legal action
  ids; the policy answers {"type": "move", "action_id": 0..19}.

Endpoints: a command line to spawn ("cmd") or "tcp://host:port". Timeouts,
disconnects, protocol violations, and illegal moves raise
ExternalPolicyError; the harness aborts the game and excludes it from
aggregates rather than guessing a move.
"""

from __future__ import annotations

import json
import queue
import socket
import subprocess
import threading

from ..cards import Move, action_id, move_from_action_id
from ..engine import Observation
from .base import Agent

PROTO_VERSION = 1


class ExternalPolicyError(RuntimeError):
    pass


class _LineChannel:
    """Reader thread + blocking writer over a process or socket stream."""

    def __init__(self, read_file, write_file, on_close=None):
        self._read_file = read_file
        self._write_file = write_file
        self._on_close = on_close
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self):
        try:
            for line in self._read_file:
                self._lines.put(line)
        except (OSError, ValueError):
            pass
        self._lines.put(None)

    def send(self, payload: dict) -> None:
        try:
            self._write_file.write(json.dumps(payload, separators=(",", ":")) + "\n")
            self._write_file.flush()
        except (OSError, ValueError, BrokenPipeError) as exc:
            raise ExternalPolicyError(f"write failed: {exc}") from exc

    def recv(self, timeout: float) -> dict:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise ExternalPolicyError(f"policy timed out after {timeout}s") from None
        if line is None:
            raise ExternalPolicyError("policy closed the connection")
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ExternalPolicyError(f"bad JSON from policy: {line!r}") from exc
        if not isinstance(payload, dict):
            raise ExternalPolicyError(f"non-object from policy: {payload!r}")
        return payload

    def close(self):
        if self._on_close:
            self._on_close()


def observation_payload(obs: Observation) -> dict:
    return {
        "type": "obs",
        "turn": obs.turn_index,
        "seat": obs.seat,
        "legal": [action_id(m) for m in obs.legal],
        "partner_hand": [[c.color, c.rank] for c in obs.partner_hand],
        "own_knowledge": [
            {"color": s.color_hint, "rank": s.rank_hint, "candidates": s.mask}
            for s in obs.own_knowledge.slots
        ],
        "partner_knowledge": [
            {"color": s.color_hint, "rank": s.rank_hint, "candidates": s.mask}
            for s in obs.partner_knowledge.slots
        ],
        "fireworks": list(obs.fireworks),
        "discards": [[c.color, c.rank] for c in obs.discards],
        "hint_tokens": obs.hint_tokens,
        "bombs_remaining": obs.bombs_remaining,
        "deck_size": obs.deck_size,
        "last_action": action_id(obs.last_event.move) if obs.last_event else None,
    }


class ExternalPolicy(Agent):
    algo = "external"
    seeded = True

    def __init__(
        self,
        instance_seed: int = 0,
        cmd: list[str] | None = None,
        endpoint: str | None = None,
        timeout: float = 10.0,
    ):
        super().__init__(instance_seed)
        if (cmd is None) == (endpoint is None):
            raise ValueError("external policy needs exactly one of cmd / endpoint")
        self._cmd = cmd
        self._endpoint = endpoint
        self.timeout = timeout
        self._channel: _LineChannel | None = None
        self._proc: subprocess.Popen | None = None

    def _connect(self) -> _LineChannel:
        if self._cmd is not None:
            self._proc = subprocess.Popen(
                self._cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
            channel = _LineChannel(
                self._proc.stdout, self._proc.stdin, on_close=self._kill_proc
            )
        else:
            assert self._endpoint is not None
            if not self._endpoint.startswith("tcp://"):
                raise ValueError(f"unsupported endpoint: {self._endpoint}")
            host, _, port = self._endpoint[len("tcp://") :].partition(":")
            sock = socket.create_connection((host, int(port)), timeout=self.timeout)
            rfile = sock.makefile("r")
            wfile = sock.makefile("w")
            channel = _LineChannel(rfile, wfile, on_close=sock.close)
        channel.send({"type": "hello", "proto": PROTO_VERSION})
        reply = channel.recv(self.timeout)
        if reply.get("type") != "hello" or reply.get("proto") != PROTO_VERSION:
            raise ExternalPolicyError(f"handshake failed: {reply!r}")
        return channel

    def _kill_proc(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def reset(self, deck_seed: int, seat: int) -> None:
        if self._channel is None:
            self._channel = self._connect()
        self._channel.send(
            {
                "type": "reset",
                "deck_seed": deck_seed,
                "seat": seat,
                "instance_seed": self.instance_seed,
            }
        )

    def act(self, obs: Observation) -> Move:
        if self._channel is None:
            raise ExternalPolicyError("act() before reset()")
        self._channel.send(observation_payload(obs))
        reply = self._channel.recv(self.timeout)
        if reply.get("type") != "move":
            raise ExternalPolicyError(f"expected a move, got {reply!r}")
        aid = reply.get("action_id")
        if not isinstance(aid, int) or not 0 <= aid < 20:
            raise ExternalPolicyError(f"bad action id: {aid!r}")
        move = move_from_action_id(aid)
        if move not in obs.legal:
            raise ExternalPolicyError(f"illegal move from policy: {move.describe()}")
        return move

    def close(self) -> None:
        if self._channel is not None:
            self._channel.close()
            self._channel = None
