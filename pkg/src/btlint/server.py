"""Loopback HTTP API over a review session.

Endpoints (all JSON, rendered canonically so bodies are byte-identical to
the CLI's output for the same data):

    GET  /api/models     -> the model set
    GET  /api/relations  -> the relation graph
    GET  /api/defects    -> the current defect report
    GET  /api/decisions  -> the decision log
    GET  /api/strategy   -> the effective strategy
    POST /api/decisions  -> record {relation_id, verdict[, note, pair_verdicts]},
                            responds with the updated defect report

A static directory (the built review UI) may be served at ``/``. One lock
serialises request handling: decisions have a single writer and every read
sees a consistent log/report snapshot.
"""

from __future__ import annotations

import json
import posixpath
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .bts import emit_json
from .defects import Decision
from .session import Session, UnknownRelation, sidecar_path
from .util import canonical_json

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class ReviewServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, session: Session, static_dir=None, autosave=None):
        super().__init__(address, _Handler)
        self.session = session
        self.static_dir = Path(static_dir) if static_dir else None
        self.autosave = autosave
        self.lock = threading.Lock()

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"


class _Handler(BaseHTTPRequestHandler):
    server: ReviewServer
    protocol_version = "HTTP/1.1"

    # Keep the console quiet; the CLI prints the address once.
    def log_message(self, fmt, *args):
        pass

    def _read_body(self) -> bytes:
        # http.server does not decode chunked bodies itself.
        if self.headers.get("Transfer-Encoding", "").lower() == "chunked":
            chunks = []
            while True:
                size = int(self.rfile.readline().split(b";")[0], 16)
                if size == 0:
                    self.rfile.readline()
                    break
                chunks.append(self.rfile.read(size))
                self.rfile.readline()
            return b"".join(chunks)
        return self.rfile.read(int(self.headers.get("Content-Length", "0")))

    def _send(self, status: int, body: str, content_type: str = "application/json") -> None:
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_error(self, status: int, message: str) -> None:
        self._send(status, canonical_json({"error": message}))

    def do_GET(self):
        session = self.server.session
        with self.server.lock:
            if self.path == "/api/models":
                self._send(200, emit_json(session.model_set))
            elif self.path == "/api/relations":
                self._send(200, canonical_json(session.graph.to_dict()))
            elif self.path == "/api/defects":
                self._send(200, session.report().to_json())
            elif self.path == "/api/decisions":
                body = canonical_json(
                    {"decisions": [d.to_dict() for d in session.decision_log]}
                )
                self._send(200, body)
            elif self.path == "/api/strategy":
                self._send(200, canonical_json(session.strategy.to_dict()))
            elif self.path.startswith("/api/"):
                self._send_error(404, f"unknown endpoint {self.path}")
            else:
                self._serve_static()

    def do_POST(self):
        if self.path != "/api/decisions":
            self._send_error(404, f"unknown endpoint {self.path}")
            return
        try:
            data = json.loads(self._read_body().decode("utf-8"))
            if not isinstance(data, dict):
                raise ValueError("body must be a JSON object")
            decision = Decision(
                relation_id=str(data["relation_id"]),
                verdict=str(data["verdict"]),
                pair_verdicts=dict(data.get("pair_verdicts", {})),
                note=str(data.get("note", "")),
            )
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            self._send_error(400, f"bad decision payload: {exc}")
            return
        with self.server.lock:
            try:
                report = self.server.session.record(decision)
            except UnknownRelation as exc:
                self._send_error(404, str(exc))
                return
            if self.server.autosave:
                from .session import save_session

                save_session(self.server.session, self.server.autosave)
            self._send(200, report.to_json())

    def _serve_static(self):
        root = self.server.static_dir
        if root is None:
            self._send_error(404, "no static directory configured")
            return
        clean = posixpath.normpath(self.path.split("?", 1)[0])
        if clean in ("/", "."):
            clean = "/index.html"
        target = (root / clean.lstrip("/")).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._send_error(404, "not found")
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def create_server(
    session: Session,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir=None,
    autosave=None,
) -> ReviewServer:
    """Bind a server; ``port`` 0 picks a free port (useful in tests)."""
    return ReviewServer((host, port), session, static_dir=static_dir, autosave=autosave)


def serve(session: Session, host: str = "127.0.0.1", port: int = 8765,
          static_dir=None, autosave=None) -> None:
    server = create_server(session, host, port, static_dir=static_dir, autosave=autosave)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
