"""Session server: newline-delimited JSON over TCP, one session per
connection.

Client messages: {"type":"key","ch":s}, {"type":"move","pos":n},
{"type":"undo"}, {"type":"choose","id":n}, {"type":"mark_uncommitted","box":n}.
Every message is answered with a full state snapshot; malformed or
failing messages get {"type":"error","message":...} and the session
survives.  An initial snapshot is sent on connect.
"""

import json
import socketserver

from .errors import AutoboxError
from .heuristics import AutoboxConfig
from .session import Session


def handle_message(session, msg):
    kind = msg.get("type")
    if kind == "key":
        ch = msg["ch"]
        if not isinstance(ch, str) or not ch:
            raise AutoboxError("key message needs a non-empty string 'ch'")
        session.key(ch)
    elif kind == "move":
        session.move(int(msg["pos"]))
    elif kind == "undo":
        session.undo()
    elif kind == "choose":
        session.choose(int(msg["id"]))
    elif kind == "mark_uncommitted":
        session.mark_uncommitted(int(msg["box"]))
    else:
        raise AutoboxError("unknown message type %r" % kind)
    return session.snapshot()


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session(self.server.composition, self.server.config)
        self._send(session.snapshot())
        for raw in self.rfile:
            line = raw.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
                reply = handle_message(session, msg)
            except Exception as e:   # malformed input must not kill the session
                reply = {"type": "error", "message": str(e)}
            self._send(reply)

    def _send(self, obj):
        self.wfile.write((json.dumps(obj) + "\n").encode("utf-8"))
        self.wfile.flush()


class SessionServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr, composition, config=None):
        super().__init__(addr, _Handler)
        self.composition = composition
        self.config = config or AutoboxConfig()


def serve_session(composition, listen, config=None):
    """Serve sessions until interrupted; listen is "host:port"."""
    host, port = listen.rsplit(":", 1)
    server = SessionServer((host, int(port)), composition, config)
    try:
        server.serve_forever()
    finally:
        server.server_close()
