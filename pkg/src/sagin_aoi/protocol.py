"""Newline-delimited JSON wire protocol exposing the environment to agents.

Each line is one message: {"type": ..., "protocol_version": "1", "payload":
{...}}. Types are hello / reset / step (requests) and hello / state / outcome /
error (responses); every request gets exactly one response. A session speaks
for one environment instance: hello answers with the state-vector schema,
reset {seed} answers with a state message, step {action} answers with an
outcome message carrying the reward split, next state, done flag and the
per-slot trace record (so a remote driver can reconstruct the exact CSV an
in-process rollout would write). A version-mismatched hello gets an error and
the session closes; any other bad input gets an error and the session - and
the environment state - continues untouched.

The server speaks the same protocol over a TCP socket (one session per
connection, concurrent connections isolated) or over stdin/stdout.
"""
from __future__ import annotations

import json
import socket
import socketserver
import sys
import threading
from typing import Any, Callable, IO

from .env import SaginEnv, SimConfig, state_schema

PROTOCOL_VERSION = "1"

REQUEST_TYPES = ("hello", "reset", "step")
RESPONSE_TYPES = ("hello", "state", "outcome", "error")
MESSAGE_TYPES = tuple(dict.fromkeys(REQUEST_TYPES + RESPONSE_TYPES))


class ProtocolError(Exception):
    """Raised by the client on an error reply or a malformed message."""


def encode_message(mtype: str, payload: dict[str, Any]) -> str:
    """One wire line (no trailing newline); key order and spacing are canonical."""
    if mtype not in MESSAGE_TYPES:
        raise ValueError(f"unknown message type {mtype!r}")
    return json.dumps(
        {"type": mtype, "protocol_version": PROTOCOL_VERSION, "payload": payload},
        sort_keys=True,
        separators=(",", ":"),
    )


def decode_message(line: str) -> tuple[str, str, dict[str, Any]]:
    """Parse one wire line into (type, protocol_version, payload)."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    mtype = obj.get("type")
    version = obj.get("protocol_version")
    payload = obj.get("payload", {})
    if mtype not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {mtype!r}")
    if not isinstance(version, str):
        raise ProtocolError("protocol_version must be a string")
    if not isinstance(payload, dict):
        raise ProtocolError("payload must be a JSON object")
    return mtype, version, payload


def _state_payload(env: SaginEnv) -> dict[str, Any]:
    state = env.current_state()
    return {
        "t": state.slot,
        "state": [float(v) for v in state.to_vector()],
        "visible_mask": [int(v) for v in state.visible_mask],
    }


class EnvSession:
    """One protocol session: a config, at most one environment, a dialogue.

    handle() maps one request line to one (reply_line, close) pair and never
    raises on bad input; protocol errors become error replies. The environment
    only changes on a well-formed step with a well-typed, in-range action.
    """

    def __init__(self, config: SimConfig):
        self.config = config
        self.env: SaginEnv | None = None

    def _error(self, message: str, close: bool = False) -> tuple[str, bool]:
        return encode_message("error", {"error": message}), close

    def handle(self, line: str) -> tuple[str, bool]:
        try:
            mtype, version, payload = decode_message(line)
        except ProtocolError as exc:
            return self._error(str(exc))
        if mtype == "hello":
            if payload.get("protocol_version", version) != PROTOCOL_VERSION:
                return self._error(
                    f"protocol version mismatch: server speaks {PROTOCOL_VERSION}", close=True
                )
            return (
                encode_message(
                    "hello",
                    {
                        "protocol_version": PROTOCOL_VERSION,
                        "num_satellites": self.config.num_satellites,
                        "num_users": self.config.num_users,
                        "episode_slots": self.config.episode_slots,
                        "schema": state_schema(
                            self.config.num_satellites, self.config.num_users
                        ),
                        "action_space": {
                            "kind": "discrete",
                            "low": -1,
                            "high": self.config.num_satellites - 1,
                            "hold": -1,
                        },
                    },
                ),
                False,
            )
        if mtype == "reset":
            seed = payload.get("seed", 0)
            if isinstance(seed, bool) or not isinstance(seed, int):
                return self._error("reset payload needs an integer seed")
            self.env = SaginEnv(self.config, seed=seed)
            return encode_message("state", _state_payload(self.env)), False
        if mtype == "step":
            if self.env is None:
                return self._error("step before reset")
            if "action" not in payload:
                return self._error("step payload needs an action")
            action = payload["action"]
            if action is not None and (
                isinstance(action, bool)
                or not isinstance(action, int)
                or not -1 <= action < self.config.num_satellites
            ):
                return self._error(
                    f"action must be null or an integer in [-1, "
                    f"{self.config.num_satellites - 1}], got {action!r}"
                )
            try:
                outcome = self.env.step(action)
            except RuntimeError as exc:  # stepping a finished episode
                return self._error(str(exc))
            return (
                encode_message(
                    "outcome",
                    {
                        "reward": outcome.reward,
                        "reward_aoi": outcome.reward_aoi,
                        "reward_handover": outcome.reward_handover,
                        "reward_rate": outcome.reward_rate,
                        "t": outcome.state.slot,
                        "state": [float(v) for v in outcome.state.to_vector()],
                        "visible_mask": [int(v) for v in outcome.state.visible_mask],
                        "done": outcome.done,
                        "record": self.env.trace[-1],
                    },
                ),
                False,
            )
        return self._error(f"server does not accept {mtype!r} messages")


def serve_stream(config: SimConfig, rfile: IO[str], wfile: IO[str]) -> None:
    """Run one session over a text stream pair until EOF or a closing error."""
    session = EnvSession(config)
    for line in rfile:
        line = line.strip()
        if not line:
            continue
        reply, close = session.handle(line)
        wfile.write(reply + "\n")
        wfile.flush()
        if close:
            break


def serve_stdio(config: SimConfig) -> None:
    serve_stream(config, sys.stdin, sys.stdout)


class ProtocolServer(socketserver.ThreadingTCPServer):
    """TCP server; each connection gets its own session and environment."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, config: SimConfig, host: str = "127.0.0.1", port: int = 0):
        class Handler(socketserver.StreamRequestHandler):
            def handle(handler) -> None:
                session = EnvSession(config)
                for raw in handler.rfile:
                    line = raw.decode("utf-8").strip()
                    if not line:
                        continue
                    reply, close = session.handle(line)
                    handler.wfile.write((reply + "\n").encode("utf-8"))
                    handler.wfile.flush()
                    if close:
                        break

        super().__init__((host, port), Handler)
        self.config = config

    @property
    def endpoint(self) -> tuple[str, int]:
        host, port = self.server_address[:2]
        return str(host), int(port)

    def serve_in_thread(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


class EnvClient:
    """Driver side of the protocol over a connected text-stream pair."""

    def __init__(self, rfile: IO[str], wfile: IO[str], closer: Callable[[], None] | None = None):
        self._rfile = rfile
        self._wfile = wfile
        self._closer = closer
        self.schema: dict[str, Any] | None = None

    @classmethod
    def connect_tcp(cls, host: str, port: int, timeout: float = 10.0) -> "EnvClient":
        sock = socket.create_connection((host, port), timeout=timeout)
        rfile = sock.makefile("r", encoding="utf-8", newline="\n")
        wfile = sock.makefile("w", encoding="utf-8", newline="\n")
        return cls(rfile, wfile, closer=sock.close)

    def _request(self, mtype: str, payload: dict[str, Any]) -> tuple[str, dict[str, Any]]:
        self._wfile.write(encode_message(mtype, payload) + "\n")
        self._wfile.flush()
        line = self._rfile.readline()
        if not line:
            raise ProtocolError("connection closed by server")
        rtype, _, rpayload = decode_message(line.strip())
        if rtype == "error":
            raise ProtocolError(rpayload.get("error", "unspecified server error"))
        return rtype, rpayload

    def hello(self) -> dict[str, Any]:
        rtype, payload = self._request("hello", {"protocol_version": PROTOCOL_VERSION})
        if rtype != "hello":
            raise ProtocolError(f"expected hello reply, got {rtype}")
        self.schema = payload
        return payload

    def reset(self, seed: int) -> dict[str, Any]:
        rtype, payload = self._request("reset", {"seed": int(seed)})
        if rtype != "state":
            raise ProtocolError(f"expected state reply, got {rtype}")
        return payload

    def step(self, action: int | None) -> dict[str, Any]:
        rtype, payload = self._request("step", {"action": action})
        if rtype != "outcome":
            raise ProtocolError(f"expected outcome reply, got {rtype}")
        return payload

    def close(self) -> None:
        if self._closer is not None:
            self._closer()
