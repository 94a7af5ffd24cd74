"""The HTTP boundary: start a service, speak the JSON protocol.

Run:  python3 demos/05_http_service.py
(Also runnable as a daemon: `sparqlcomplete serve --config my.json`.)
"""

import http.client
import json
import threading
from pathlib import Path

from sparqlcomplete.index import LangPref
from sparqlcomplete.service import AssistService, ServiceConfig, make_server

DATA = Path(__file__).parent.parent / "tests" / "data"

config = ServiceConfig(
    ontologies=(str(DATA / "bilingual.ttl"),),
    registry_path=str(DATA / "registry.tsv"),
    languages=LangPref(("en", "de")),
)
service = AssistService(config)
service.startup()
server = make_server(service, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
port = server.server_address[1]
print(f"service on 127.0.0.1:{port}\n")


def call(method: str, path: str, body: dict | None = None):
    conn = http.client.HTTPConnection("127.0.0.1", port, timeout=5)
    conn.request(method, path, body=json.dumps(body).encode() if body else None)
    resp = conn.getresponse()
    payload = json.loads(resp.read())
    headers = dict(resp.getheaders())
    conn.close()
    return resp.status, headers, payload


status, _, ready = call("GET", "/ready")
print(f"GET /ready -> {status}: {ready['term_count']} terms, generation {ready['generation']}")

query = "PREFIX sio: <http://semanticscience.org/resource/> SELECT ?x WHERE { ?x sio:"
request = {"query": query, "cursor": len(query.encode("utf-8")), "langs": ["en"], "limit": 5}
status, headers, payload = call("POST", "/suggest", request)
print(f"\nPOST /suggest -> {status} (X-Cache: {headers['X-Cache']})")
print(f"  position: {payload['context']['position']}, partial: {payload['context']['partial_token']!r}")
for s in payload["suggestions"]:
    print(f"  {s['insert_text']:22s} {s['display_label']!r} [{s['provenance']['type']}]")

status, headers, _ = call("POST", "/suggest", request)
print(f"\nsame request again -> {status} (X-Cache: {headers['X-Cache']})")

server.shutdown()
server.server_close()
service.close()
