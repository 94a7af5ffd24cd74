"""HTTP JSON service: configuration, knowledge-base lifecycle, caching.

The wire protocol is small and fixed: ``POST /suggest`` takes a query and
a UTF-8 byte cursor and returns the context summary plus ranked
suggestions; ``GET /health``, ``GET /ready`` and ``GET /version`` report
liveness, source load states, and the build; ``POST /graphs`` pre-warms a
graph (loopback-only unless configured otherwise).

Response bodies are byte-deterministic for a given knowledge-base
generation: timing and cache-hit markers travel in ``X-Timing-Ms`` and
``X-Cache`` headers, never in the body, so identical requests can be
answered verbatim from a bounded memo keyed by (prefix hash, languages,
limit, registry flag, generation).  The memo is dropped wholesale whenever
a new snapshot is published.

Request handlers share one immutable snapshot; background loads build the
next snapshot off to the side and publish it atomically.  A request never
waits on the network longer than the configured budget: whatever finished
in time is used, the rest keeps loading for the next keystroke.
"""

from __future__ import annotations

import hashlib
import json
import sys
import threading
import time
from collections import OrderedDict
from concurrent.futures import Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import __version__
from .context import QueryContext, derive_context, pattern_node_text
from .engine import Registry, SuggestOptions, Suggestion, load_registry_file, suggest
from .index import LangPref
from .knowledge import (
    EndpointError,
    EndpointSource,
    Fetcher,
    FetchPolicy,
    KnowledgeBase,
    LoadStatus,
    load_graph,
    preload_endpoint,
)
from .rdf import Iri


class ConfigError(ValueError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"config field {fieldname!r}: {message}")
        self.field = fieldname


@dataclass(frozen=True)
class Limits:
    max_query_bytes: int = 65536
    default_limit: int = 20
    max_limit: int = 100


@dataclass(frozen=True)
class ServiceConfig:
    ontologies: tuple[str, ...] = ()
    endpoints: tuple[EndpointSource, ...] = ()
    registry_path: str | None = None
    languages: LangPref = LangPref(("en",))
    cache_dir: str | None = None
    listen_port: int = 8080
    fetch: FetchPolicy = FetchPolicy()
    limits: Limits = Limits()
    load_budget: float = 2.0
    include_named: bool = True
    admin_remote: bool = False
    static_dir: str | None = None

    def __post_init__(self) -> None:
        if not (1 <= self.listen_port <= 65535):
            raise ConfigError("listen_port", "must be in [1, 65535]")
        if self.limits.max_limit < self.limits.default_limit:
            raise ConfigError("limits.max_limit", "must be >= default_limit")

    @classmethod
    def from_dict(cls, raw: dict) -> ServiceConfig:
        known = {
            "ontologies", "endpoints", "registry_path", "languages", "cache_dir",
            "listen_port", "fetch", "limits", "load_budget", "include_named",
            "admin_remote", "static_dir",
        }
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown field")
        kwargs: dict = {}
        try:
            if "ontologies" in raw:
                kwargs["ontologies"] = tuple(str(o) for o in raw["ontologies"])
            if "endpoints" in raw:
                kwargs["endpoints"] = tuple(
                    EndpointSource(
                        url=e["url"],
                        default_graph=Iri(e["default_graph"]) if e.get("default_graph") else None,
                        page_size=int(e.get("page_size", 1000)),
                        max_rows=int(e.get("max_rows", 50_000)),
                    )
                    for e in raw["endpoints"]
                )
            if "registry_path" in raw and raw["registry_path"] is not None:
                kwargs["registry_path"] = str(raw["registry_path"])
            if "languages" in raw:
                kwargs["languages"] = LangPref(tuple(raw["languages"]))
            if "cache_dir" in raw and raw["cache_dir"] is not None:
                kwargs["cache_dir"] = str(raw["cache_dir"])
            if "listen_port" in raw:
                kwargs["listen_port"] = int(raw["listen_port"])
            fetch_raw = raw.get("fetch", {})
            kwargs["fetch"] = FetchPolicy(
                timeout=float(fetch_raw.get("timeout", 2.0)),
                max_bytes=int(fetch_raw.get("max_bytes", 8_000_000)),
                cache_dir=Path(raw["cache_dir"]) if raw.get("cache_dir") else None,
                cache_ttl=float(fetch_raw.get("cache_ttl", 3600.0)),
                allow_network=bool(fetch_raw.get("allow_network", False)),
            )
            limits_raw = raw.get("limits", {})
            kwargs["limits"] = Limits(
                max_query_bytes=int(limits_raw.get("max_query_bytes", 65536)),
                default_limit=int(limits_raw.get("default_limit", 20)),
                max_limit=int(limits_raw.get("max_limit", 100)),
            )
            if "load_budget" in raw:
                kwargs["load_budget"] = float(raw["load_budget"])
            if "include_named" in raw:
                kwargs["include_named"] = bool(raw["include_named"])
            if "admin_remote" in raw:
                kwargs["admin_remote"] = bool(raw["admin_remote"])
            if "static_dir" in raw and raw["static_dir"] is not None:
                kwargs["static_dir"] = str(raw["static_dir"])
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(type(exc).__name__, str(exc)) from exc
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> ServiceConfig:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError("config", f"malformed JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(raw)


def canonical_json(obj) -> bytes:
    """The one serialization both transports share, byte for byte."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def suggestion_wire(s: Suggestion) -> dict:
    return {
        "insert_text": s.insert_text,
        "display_label": s.display_label,
        "description": s.description,
        "iri": s.iri.value if s.iri else None,
        "kind": s.kind.value,
        "lang": s.lang,
        "provenance": {"type": s.provenance.type, "source": s.provenance.source},
    }


def context_wire(ctx: QueryContext) -> dict:
    return {
        "position": ctx.position.value,
        "variables": list(ctx.variables),
        "from_graphs": [g.value for g in ctx.from_graphs],
        "partial_token": ctx.partial_token,
        "focus_subject": pattern_node_text(ctx.focus_subject),
    }


def build_suggest_body(
    ctx: QueryContext,
    kb: KnowledgeBase,
    registry: Registry | None,
    opts: SuggestOptions,
) -> bytes:
    suggestions = suggest(ctx, kb, registry, opts)
    return canonical_json(
        {
            "context": context_wire(ctx),
            "suggestions": [suggestion_wire(s) for s in suggestions],
            "generation": kb.generation,
        }
    )


class _ResponseMemo:
    """Bounded LRU over serialized response bodies."""

    def __init__(self, capacity: int = 1024):
        self.capacity = capacity
        self._data: OrderedDict[tuple, bytes] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: tuple) -> bytes | None:
        with self._lock:
            body = self._data.get(key)
            if body is not None:
                self._data.move_to_end(key)
            return body

    def put(self, key: tuple, body: bytes) -> None:
        with self._lock:
            self._data[key] = body
            self._data.move_to_end(key)
            while len(self._data) > self.capacity:
                self._data.popitem(last=False)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


@dataclass
class SourceReport:
    source: str
    status: str
    reason: str | None = None
    terms: int = 0

    def wire(self) -> dict:
        return {"source": self.source, "status": self.status, "reason": self.reason, "terms": self.terms}


class RequestError(Exception):
    def __init__(self, status: int, code: str):
        super().__init__(code)
        self.status = status
        self.code = code


class AssistService:
    """Owns the snapshot, the registry, preloading, and response assembly."""

    def __init__(self, config: ServiceConfig, fetcher: Fetcher | None = None):
        self.config = config
        self.fetcher = fetcher
        self.registry: Registry | None = None
        self.memo = _ResponseMemo(1024)
        self.ready = False
        self.sources: dict[str, SourceReport] = {}
        self._kb = KnowledgeBase()
        self._publish_lock = threading.Lock()
        self._inflight: dict[str, Future] = {}
        self._inflight_lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix="kb-load")

    # -- lifecycle ---------------------------------------------------------

    @property
    def kb(self) -> KnowledgeBase:
        return self._kb

    def startup(self) -> None:
        """Load the registry and pre-load configured sources, then go ready.

        Source failures degrade (logged in the readiness report); only a
        broken registry file or config is fatal.
        """
        if self.config.registry_path:
            try:
                self.registry = load_registry_file(self.config.registry_path)
            except (OSError, ValueError) as exc:
                raise ConfigError("registry_path", str(exc)) from exc
        for source in self.config.ontologies:
            self._load_and_publish(source)
        for endpoint in self.config.endpoints:
            self._preload_endpoint(endpoint)
        self.ready = True

    def close(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)

    def _load_and_publish(self, source: str) -> None:
        result = load_graph(source, self.config.fetch, self.fetcher)
        name = source if isinstance(source, str) else str(source)
        if result.status.state != "loaded":
            self.sources[name] = SourceReport(name, "failed", result.status.reason)
            self._set_status(name, result.status)
            return
        source = result.graph.source or _as_iri(name)
        with self._publish_lock:
            before = len(self._kb.index.by_iri)
            kb = self._kb.with_graph(result.graph, source=source)
            kb = kb.with_status(_as_iri(name), result.status)
            self._kb = kb
            added = len(kb.index.by_iri) - before
        self.memo.clear()
        self.sources[name] = SourceReport(name, "loaded", None, added)

    def _preload_endpoint(self, endpoint: EndpointSource) -> None:
        try:
            terms = preload_endpoint(endpoint, self.config.languages, self.config.fetch, self.fetcher)
            status = "loaded"
            reason = None
        except EndpointError as exc:
            terms = getattr(exc, "partial", [])
            status = "failed"
            reason = str(exc)
        if terms:
            from .index import swap_generation

            with self._publish_lock:
                self._kb = replace(self._kb, index=swap_generation(self._kb.index, terms))
            self.memo.clear()
        self.sources[endpoint.url] = SourceReport(endpoint.url, status, reason, len(terms))

    def _set_status(self, name: str, status: LoadStatus) -> None:
        with self._publish_lock:
            self._kb = self._kb.with_status(_as_iri(name), status)

    # -- on-the-fly FROM loading -------------------------------------------

    def _needed_graphs(self, ctx: QueryContext) -> list[Iri]:
        wanted = list(ctx.from_graphs)
        if self.config.include_named:
            wanted += list(ctx.from_named)
        out = []
        for iri in wanted:
            status = self._kb.loaded_graphs.get(iri.value)
            if status is None:
                out.append(iri)
            elif status.state == "failed" and time.time() - status.at >= self.config.fetch.cache_ttl:
                out.append(iri)
        return out

    def _graph_future(self, iri: Iri) -> Future:
        with self._inflight_lock:
            fut = self._inflight.get(iri.value)
            if fut is None:
                fut = self._executor.submit(self._load_from_clause_graph, iri)
                self._inflight[iri.value] = fut
            return fut

    def _load_from_clause_graph(self, iri: Iri) -> None:
        try:
            result = load_graph(iri, self.config.fetch, self.fetcher)
            with self._publish_lock:
                if result.status.state == "loaded":
                    kb = self._kb.with_graph(result.graph, source=iri)
                else:
                    kb = self._kb
                self._kb = kb.with_status(iri, result.status)
            self.memo.clear()
        finally:
            with self._inflight_lock:
                self._inflight.pop(iri.value, None)

    def ensure_for_request(self, ctx: QueryContext) -> KnowledgeBase:
        """Kick off loads for unseen FROM graphs; wait at most the budget."""
        needed = self._needed_graphs(ctx)
        if needed:
            futures = [self._graph_future(iri) for iri in needed]
            wait(futures, timeout=self.config.load_budget)
        return self._kb

    # -- request handling ----------------------------------------------------

    def parse_request(self, raw: bytes) -> tuple[str, int, LangPref, int, bool]:
        try:
            payload = json.loads(raw.decode("utf-8"))
        except ValueError as exc:
            raise RequestError(400, "malformed_json") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("query"), str):
            raise RequestError(400, "malformed_json")
        query: str = payload["query"]
        data = query.encode("utf-8")
        cursor = payload.get("cursor", len(data))
        if not isinstance(cursor, int) or isinstance(cursor, bool):
            raise RequestError(400, "malformed_json")
        if cursor < 0 or cursor > len(data):
            raise RequestError(400, "cursor_out_of_range")
        if 0 < cursor < len(data) and (data[cursor] & 0xC0) == 0x80:
            raise RequestError(400, "cursor_out_of_range")
        langs = self.config.languages
        if payload.get("langs") is not None:
            if not isinstance(payload["langs"], list):
                raise RequestError(400, "malformed_json")
            langs = LangPref(tuple(str(t) for t in payload["langs"]))
        limit = payload.get("limit", self.config.limits.default_limit)
        if not isinstance(limit, int) or isinstance(limit, bool) or limit < 1:
            raise RequestError(400, "limit_out_of_range")
        if limit > self.config.limits.max_limit:
            raise RequestError(400, "limit_out_of_range")
        registry_enabled = bool(payload.get("registry", self.registry is not None))
        return query, cursor, langs, limit, registry_enabled

    def suggest_bytes(
        self, query: str, cursor: int, langs: LangPref, limit: int, registry_enabled: bool
    ) -> tuple[bytes, bool]:
        """(body, cache_hit) for one suggest request."""
        ctx = derive_context(query, cursor)
        kb = self.ensure_for_request(ctx) if (ctx.from_graphs or ctx.from_named) else self._kb
        prefix_hash = hashlib.sha256(query.encode("utf-8")[:cursor]).digest()
        key = (prefix_hash, langs.tags, limit, registry_enabled, kb.generation)
        cached = self.memo.get(key)
        if cached is not None:
            return cached, True
        opts = SuggestOptions(langs=langs, limit=limit, registry_enabled=registry_enabled)
        body = build_suggest_body(ctx, kb, self.registry, opts)
        self.memo.put(key, body)
        return body, False

    def load_graph_admin(self, iri_value: str) -> dict:
        try:
            iri = Iri(iri_value)
        except (ValueError, TypeError) as exc:
            raise RequestError(400, "invalid_iri") from exc
        status = self._kb.loaded_graphs.get(iri.value)
        if status is None or status.state != "loaded":
            fut = self._graph_future(iri)
            wait([fut])
        status = self._kb.loaded_graphs.get(iri.value) or LoadStatus("pending")
        terms = 0
        if status.state == "loaded":
            terms = sum(
                1 for t in self._kb.index.by_iri.values() if t.source and t.source.value == iri.value
            )
        return {
            "iri": iri.value,
            "status": status.state,
            "reason": status.reason,
            "terms": terms,
            "generation": self._kb.generation,
        }

    def ready_wire(self) -> dict:
        return {
            "ready": self.ready,
            "generation": self._kb.generation,
            "term_count": len(self._kb.index.by_iri),
            "sources": [self.sources[k].wire() for k in sorted(self.sources)],
        }


def _as_iri(name: str) -> Iri:
    try:
        return Iri(name)
    except ValueError:
        return Iri("file://" + name.replace(" ", "%20"))


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    service: AssistService  # set by make_server
    protocol_version = "HTTP/1.1"

    # -- plumbing ---------------------------------------------------------

    def _send(self, status: int, body: bytes, headers: dict[str, str] | None = None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        for k, v in (headers or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)
        self._log_line(status)

    def _send_json(self, status: int, obj, headers: dict[str, str] | None = None) -> None:
        self._send(status, canonical_json(obj), headers)

    def _log_line(self, status: int) -> None:
        ms = (time.monotonic() - self._t0) * 1000.0
        sys.stderr.write(
            f"{self.command} {self.path} {status} {ms:.1f}ms gen={self.service.kb.generation}\n"
        )

    def log_message(self, fmt, *args):  # default logging replaced by _log_line
        pass

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _is_loopback(self) -> bool:
        return self.client_address[0] in ("127.0.0.1", "::1", "localhost")

    # -- routes -----------------------------------------------------------

    def do_GET(self) -> None:
        self._t0 = time.monotonic()
        if self.path == "/health":
            self._send_json(200, {"status": "ok"})
        elif self.path == "/ready":
            report = self.service.ready_wire()
            self._send_json(200 if report["ready"] else 503, report)
        elif self.path == "/version":
            self._send_json(
                200,
                {
                    "name": "sparqlcomplete",
                    "version": __version__,
                    "generation": self.service.kb.generation,
                },
            )
        elif self.path == "/" or self.path.startswith("/static/"):
            self._serve_static()
        else:
            self._send_json(404, {"error": "not_found"})

    def do_POST(self) -> None:
        self._t0 = time.monotonic()
        if self.path == "/suggest":
            self._suggest()
        elif self.path == "/graphs":
            self._graphs()
        else:
            self._send_json(404, {"error": "not_found"})

    def _suggest(self) -> None:
        length = int(self.headers.get("Content-Length") or 0)
        if length > self.service.config.limits.max_query_bytes:
            # the body is left unread, so the connection cannot be reused
            self.close_connection = True
            self._send_json(413, {"error": "oversize"}, {"Connection": "close"})
            return
        raw = self._body()
        try:
            query, cursor, langs, limit, registry_enabled = self.service.parse_request(raw)
            body, hit = self.service.suggest_bytes(query, cursor, langs, limit, registry_enabled)
        except RequestError as exc:
            self._send_json(exc.status, {"error": exc.code})
            return
        ms = (time.monotonic() - self._t0) * 1000.0
        self._send(200, body, {"X-Cache": "hit" if hit else "miss", "X-Timing-Ms": f"{ms:.2f}"})

    def _graphs(self) -> None:
        if not self._is_loopback() and not self.service.config.admin_remote:
            self._send_json(403, {"error": "forbidden"})
            return
        try:
            payload = json.loads(self._body().decode("utf-8"))
            iri = payload["iri"]
        except (ValueError, KeyError, TypeError):
            self._send_json(400, {"error": "malformed_json"})
            return
        try:
            self._send_json(200, self.service.load_graph_admin(iri))
        except RequestError as exc:
            self._send_json(exc.status, {"error": exc.code})

    def _serve_static(self) -> None:
        root = self.service.config.static_dir
        if root is None:
            self._send_json(404, {"error": "not_found"})
            return
        rel = "index.html" if self.path == "/" else self.path[len("/static/"):]
        target = (Path(root) / rel).resolve()
        if not str(target).startswith(str(Path(root).resolve())) or not target.is_file():
            self._send_json(404, {"error": "not_found"})
            return
        ctype = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
        }.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        self._log_line(200)


def make_server(service: AssistService, port: int | None = None) -> ThreadingHTTPServer:
    """Bind a threaded HTTP server on *port* (0 picks an ephemeral port)."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    if port is None:
        port = service.config.listen_port
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    return server


def serve_forever(config: ServiceConfig, fetcher: Fetcher | None = None) -> None:
    """Start up (pre-loads included) and serve until interrupted."""
    service = AssistService(config, fetcher)
    service.startup()
    server = make_server(service)
    host, port = server.server_address[:2]
    sys.stderr.write(f"listening on http://{host}:{port} (generation {service.kb.generation})\n")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        service.close()
