"""HTTP endpoint matrix: catalog caching, story CRUD, PDF, app shell."""

from __future__ import annotations

import json
import threading
import time
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from conftest import make_story
from cuentoterapp.grammar import default_catalog_bytes, story_to_dict
from cuentoterapp.service import BindError, ConfigError, ServiceConfig, create_app, serve


@pytest.fixture
def config(tmp_path) -> ServiceConfig:
    catalog_path = tmp_path / "catalog.json"
    catalog_path.write_bytes(default_catalog_bytes())
    return ServiceConfig(data_dir=tmp_path / "data", catalog_path=catalog_path)


@pytest.fixture
def client(config) -> TestClient:
    return TestClient(create_app(config), raise_server_exceptions=False)


def assert_api_error(response, status: int, code: str) -> dict:
    assert response.status_code == status
    body = response.json()
    assert set(body) == {"status", "code", "message"}
    assert body["status"] == status
    assert body["code"] == code
    assert isinstance(body["message"], str) and body["message"]
    return body


def post_story(client, **overrides):
    doc = story_to_dict(make_story(**overrides))
    doc.pop("id", None)
    doc.pop("created_at", None)
    return client.post("/api/v1/stories", json=doc)


# --- startup ----------------------------------------------------------------


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_client_config_exposes_require_ending(config):
    client = TestClient(create_app(config))
    assert client.get("/api/v1/config").json() == {"require_ending": False}
    config.require_ending = True
    client = TestClient(create_app(config))
    assert client.get("/api/v1/config").json() == {"require_ending": True}


def test_missing_catalog_is_config_error(tmp_path):
    config = ServiceConfig(data_dir=tmp_path, catalog_path=tmp_path / "nope.json")
    with pytest.raises(ConfigError, match="catalog"):
        create_app(config)


def test_invalid_catalog_is_config_error(tmp_path):
    bad = tmp_path / "catalog.json"
    bad.write_text("{}")
    with pytest.raises(ConfigError):
        create_app(ServiceConfig(data_dir=tmp_path, catalog_path=bad))


def test_bad_port_is_config_error(config):
    config.port = 0
    with pytest.raises(ConfigError):
        create_app(config)


# --- catalog ----------------------------------------------------------------


def test_catalog_get_with_etag(client, config):
    response = client.get("/api/v1/catalog")
    assert response.status_code == 200
    assert response.content == config.catalog_path.read_bytes()
    etag = response.headers["ETag"]
    assert etag.startswith('"') and etag.endswith('"')

    conditional = client.get("/api/v1/catalog", headers={"If-None-Match": etag})
    assert conditional.status_code == 304
    assert conditional.content == b""

    stale = client.get("/api/v1/catalog", headers={"If-None-Match": '"other"'})
    assert stale.status_code == 200


def test_catalog_etag_tracks_file_content(tmp_path, config):
    first = TestClient(create_app(config)).get("/api/v1/catalog").headers["ETag"]
    doc = json.loads(config.catalog_path.read_text())
    doc["functions"][0]["description"] += " (edited)"
    config.catalog_path.write_text(json.dumps(doc))
    second = TestClient(create_app(config)).get("/api/v1/catalog").headers["ETag"]
    assert first != second


def test_catalog_subsets(client):
    functions = client.get("/api/v1/catalog/functions").json()
    assert len(functions) == 31
    assert functions[0]["title"] == "Estrangement from the family"
    characters = client.get("/api/v1/catalog/characters").json()
    assert any(c["name"] == "Prince" for c in characters)
    situations = client.get("/api/v1/catalog/situations").json()
    assert len(situations) >= 2


def test_non_get_catalog_is_405_with_error_shape(client):
    assert_api_error(client.post("/api/v1/catalog"), 405, "bad_request")


# --- stories -----------------------------------------------------------------


def test_story_crud_roundtrip(client):
    created = post_story(client, title="Wonderful Story")
    assert created.status_code == 201
    doc = created.json()
    assert doc["id"] and doc["created_at"]  # server-assigned

    listed = client.get("/api/v1/stories").json()
    assert [s["id"] for s in listed] == [doc["id"]]

    fetched = client.get(f"/api/v1/stories/{doc['id']}")
    assert fetched.status_code == 200
    assert fetched.json() == doc

    deleted = client.delete(f"/api/v1/stories/{doc['id']}")
    assert deleted.status_code == 204
    assert_api_error(client.delete(f"/api/v1/stories/{doc['id']}"), 404, "not_found")
    assert client.get("/api/v1/stories").json() == []


def test_out_of_order_fragments_rejected(client):
    doc = story_to_dict(make_story(fragment_ids=(1, 2)))
    doc["fragments"] = [
        {"function_id": 5, "text": "five"},
        {"function_id": 2, "text": "two"},
    ]
    body = assert_api_error(client.post("/api/v1/stories", json=doc), 400, "invalid_story")
    assert "increasing" in body["message"]


def test_unknown_references_rejected(client):
    body = assert_api_error(post_story(client, character_ids=(999,)), 400, "invalid_story")
    assert "character" in body["message"]
    assert_api_error(post_story(client, situation_id=999), 400, "invalid_story")


def test_duplicate_id_conflict(client):
    doc = story_to_dict(make_story())
    assert client.post("/api/v1/stories", json=doc).status_code == 201
    assert_api_error(client.post("/api/v1/stories", json=doc), 409, "duplicate_id")


def test_malformed_body_rejected(client):
    response = client.post(
        "/api/v1/stories", content=b"{nope", headers={"Content-Type": "application/json"}
    )
    assert_api_error(response, 400, "bad_request")
    assert_api_error(
        client.post("/api/v1/stories", json=["not", "an", "object"]), 400, "invalid_story"
    )


def test_list_order_matches_store_contract(client):
    for title, created in [("Old", "2024-01-01T00:00:00Z"), ("New", "2024-02-01T00:00:00Z")]:
        doc = story_to_dict(make_story(title=title, created_at=created))
        assert client.post("/api/v1/stories", json=doc).status_code == 201
    titles = [s["title"] for s in client.get("/api/v1/stories").json()]
    assert titles == ["New", "Old"]


def test_unknown_story_404(client):
    assert_api_error(client.get("/api/v1/stories/missing"), 404, "not_found")


# --- pdf ------------------------------------------------------------------------


def test_pdf_download(client):
    story_id = post_story(client, title="¡Cuento Maravilloso!").json()["id"]
    response = client.get(f"/api/v1/stories/{story_id}/pdf")
    assert response.status_code == 200
    assert response.headers["content-type"] == "application/pdf"
    assert "attachment" in response.headers["content-disposition"]
    assert "cuento-maravilloso.pdf" in response.headers["content-disposition"]
    assert response.content.startswith(b"%PDF-1.4")
    assert response.content.endswith(b"%%EOF")

    again = client.get(f"/api/v1/stories/{story_id}/pdf")
    assert again.content == response.content  # deterministic bytes


def test_pdf_unknown_story(client):
    assert_api_error(client.get("/api/v1/stories/missing/pdf"), 404, "not_found")


# --- static shell ------------------------------------------------------------------


def test_root_serves_entry_page(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/html")
    assert b"<html" in response.content


def test_manifest_contract(client):
    response = client.get("/manifest.webmanifest")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("application/manifest+json")
    manifest = json.loads(response.content)
    for member in ("name", "short_name", "start_url", "display",
                   "background_color", "theme_color", "icons"):
        assert member in manifest
    assert manifest["display"] == "standalone"
    assert manifest["start_url"] == "/"
    sizes = {icon["sizes"] for icon in manifest["icons"]}
    assert {"192x192", "512x512"} <= sizes


def test_service_worker_headers(client):
    response = client.get("/sw.js")
    assert response.status_code == 200
    assert response.headers["cache-control"] == "no-cache"
    assert b"fetch" in response.content


def test_spa_fallback_and_asset_404(client):
    fallback = client.get("/library")
    assert fallback.status_code == 200
    assert b"<html" in fallback.content
    assert client.get("/library/abc123").status_code == 200
    assert_api_error(client.get("/missing-asset.png"), 404, "not_found")
    assert_api_error(client.get("/api/v1/nonsense"), 404, "not_found")
    assert_api_error(client.get("/%2e%2e/%2e%2e/etc/passwd"), 404, "not_found")


def test_existing_asset_served(client):
    response = client.get("/icons/icon-192.png")
    assert response.status_code == 200
    assert response.content[:8] == b"\x89PNG\r\n\x1a\n"


# --- concurrency and real socket ------------------------------------------------------


def test_concurrent_catalog_reads_are_identical(client):
    def fetch(_):
        return client.get("/api/v1/catalog")

    with ThreadPoolExecutor(max_workers=8) as pool:
        responses = list(pool.map(fetch, range(32)))
    assert all(r.status_code == 200 for r in responses)
    assert len({r.content for r in responses}) == 1
    assert client.get("/healthz").status_code == 200  # still responsive


def test_bind_error_when_port_taken(config):
    import socket as socket_mod

    blocker = socket_mod.socket()
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    config.port = blocker.getsockname()[1]
    config.host = "127.0.0.1"
    try:
        with pytest.raises(BindError):
            serve(config)
    finally:
        blocker.close()


def test_real_socket_serve_and_graceful_stop(config):
    import uvicorn

    app = create_app(config)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.time() + 10
        while not server.started:
            assert time.time() < deadline, "server did not start"
            time.sleep(0.01)
        port = server.servers[0].sockets[0].getsockname()[1]
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/healthz", timeout=5) as response:
            assert response.status == 200
            assert json.loads(response.read()) == {"status": "ok"}
    finally:
        server.should_exit = True
        thread.join(timeout=10)
    assert not thread.is_alive()
