"""HTTP service: catalog, story library, PDF export, and the app shell.

Serves the versioned catalog with conditional-request support, CRUD for the
online story library backed by the file store, per-story PDF downloads, and
the static single-page client including its installability contract
(manifest plus service worker). TLS is a deployment concern: the service
speaks plain HTTP and is meant to sit behind an HTTPS-terminating proxy in
public deployments (browsers exempt localhost from the secure-context rule).
"""

from __future__ import annotations

import hashlib
import socket
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import uvicorn
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from cuentoterapp.grammar import (
    Catalog,
    CatalogParseError,
    CatalogValidationError,
    InvalidStoryError,
    catalog_to_dict,
    load_catalog,
    story_from_dict,
    story_to_dict,
    utc_now_iso,
)
from cuentoterapp.pdf import render_pdf, slugify_title
from cuentoterapp.store import DuplicateIdError, StoryNotFoundError, open_store

__all__ = ["ServiceConfig", "ConfigError", "BindError", "create_app", "serve",
           "default_static_dir"]


class ConfigError(Exception):
    pass


class BindError(Exception):
    pass


def default_static_dir() -> Path:
    """The placeholder app shell bundled with the package."""

    return Path(str(resources.files("cuentoterapp.data").joinpath("appshell")))


@dataclass
class ServiceConfig:
    data_dir: Path
    catalog_path: Path
    static_dir: Path = field(default_factory=default_static_dir)
    port: int = 8000
    host: str = "127.0.0.1"
    require_ending: bool = False
    allow_cross_origin: bool = False


_ERROR_CODES = {400: "bad_request", 404: "not_found", 405: "bad_request",
                409: "duplicate_id"}


class ApiError(Exception):
    """Carried through the handler stack and rendered as the error document."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"status": status, "code": code, "message": message},
    )


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the application; raises ConfigError before any socket is bound."""

    if not 1 <= config.port <= 65535:
        raise ConfigError(f"port out of range: {config.port}")
    catalog_path = Path(config.catalog_path)
    if not catalog_path.is_file():
        raise ConfigError(f"catalog file not found: {catalog_path}")
    static_dir = Path(config.static_dir)
    if not static_dir.is_dir():
        raise ConfigError(f"static directory not found: {static_dir}")
    catalog_bytes = catalog_path.read_bytes()
    try:
        catalog: Catalog = load_catalog(catalog_bytes)
    except (CatalogParseError, CatalogValidationError) as exc:
        raise ConfigError(f"catalog rejected: {exc}") from exc
    # hash-derived so the tag changes exactly when the file content changes
    content_hash = hashlib.sha256(catalog_bytes).hexdigest()[:12]
    catalog_etag = f'"{catalog.catalog_version}-{content_hash}"'

    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    store = open_store(data_dir / "stories")
    catalog_doc = catalog_to_dict(catalog)

    app = FastAPI(title="cuentoterapp", docs_url=None, redoc_url=None)
    if config.allow_cross_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
            allow_headers=["*"],
        )

    # -- error shape ---------------------------------------------------------

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(_request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = _ERROR_CODES.get(exc.status_code, "bad_request")
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error_response(400, "bad_request", str(exc.errors()[:1]))

    # -- health and catalog ---------------------------------------------------

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/api/v1/config")
    async def client_config() -> dict:
        # therapist-facing knobs the client engine must honor
        return {"require_ending": config.require_ending}

    @app.get("/api/v1/catalog")
    async def get_catalog(request: Request) -> Response:
        if _etag_matches(request.headers.get("if-none-match"), catalog_etag):
            return Response(status_code=304, headers={"ETag": catalog_etag})
        return Response(
            content=catalog_bytes,
            media_type="application/json",
            headers={"ETag": catalog_etag},
        )

    @app.get("/api/v1/catalog/functions")
    async def get_functions() -> JSONResponse:
        return JSONResponse(catalog_doc["functions"])

    @app.get("/api/v1/catalog/characters")
    async def get_characters() -> JSONResponse:
        return JSONResponse(catalog_doc["characters"])

    @app.get("/api/v1/catalog/situations")
    async def get_situations() -> JSONResponse:
        return JSONResponse(catalog_doc["situations"])

    # -- stories ---------------------------------------------------------------

    @app.post("/api/v1/stories", status_code=201)
    async def post_story(request: Request) -> JSONResponse:
        try:
            doc = await request.json()
        except Exception:
            raise ApiError(400, "bad_request", "request body is not valid JSON")
        if not isinstance(doc, dict):
            raise ApiError(400, "invalid_story", "story document must be an object")
        doc.setdefault("id", str(uuid.uuid4()))
        doc.setdefault("created_at", utc_now_iso())
        doc.setdefault("finalized", True)
        try:
            story = story_from_dict(doc, catalog)
        except InvalidStoryError as exc:
            raise ApiError(400, "invalid_story", str(exc))
        try:
            store.save_story(story)
        except DuplicateIdError as exc:
            raise ApiError(409, "duplicate_id", str(exc))
        return JSONResponse(status_code=201, content=story_to_dict(story))

    @app.get("/api/v1/stories")
    async def list_stories() -> JSONResponse:
        return JSONResponse([story_to_dict(r.story) for r in store.list_stories()])

    @app.get("/api/v1/stories/{story_id}")
    async def get_story(story_id: str) -> JSONResponse:
        try:
            return JSONResponse(story_to_dict(store.get_story(story_id)))
        except StoryNotFoundError as exc:
            raise ApiError(404, "not_found", str(exc))

    @app.delete("/api/v1/stories/{story_id}", status_code=204)
    async def delete_story(story_id: str) -> Response:
        try:
            store.delete_story(story_id)
        except StoryNotFoundError as exc:
            raise ApiError(404, "not_found", str(exc))
        return Response(status_code=204)

    @app.get("/api/v1/stories/{story_id}/pdf")
    async def story_pdf(story_id: str) -> Response:
        try:
            story = store.get_story(story_id)
        except StoryNotFoundError as exc:
            raise ApiError(404, "not_found", str(exc))
        data = render_pdf(story, catalog)
        filename = f"{slugify_title(story.title)}.pdf"
        return Response(
            content=data,
            media_type="application/pdf",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    # -- installability contract and app shell ----------------------------------

    @app.get("/manifest.webmanifest")
    async def manifest() -> FileResponse:
        path = static_dir / "manifest.webmanifest"
        if not path.is_file():
            raise ApiError(404, "not_found", "manifest.webmanifest missing")
        return FileResponse(path, media_type="application/manifest+json")

    @app.get("/sw.js")
    async def service_worker() -> FileResponse:
        path = static_dir / "sw.js"
        if not path.is_file():
            raise ApiError(404, "not_found", "sw.js missing")
        return FileResponse(
            path, media_type="text/javascript",
            headers={"Cache-Control": "no-cache"},  # workers must revalidate
        )

    @app.get("/{path:path}")
    async def app_shell(path: str) -> FileResponse:
        if path.startswith("api/"):
            raise ApiError(404, "not_found", f"unknown API path: /{path}")
        index = static_dir / "index.html"
        if not path:
            return FileResponse(index, media_type="text/html")
        candidate = (static_dir / path).resolve()
        if not str(candidate).startswith(str(static_dir.resolve())):
            raise ApiError(404, "not_found", "path escapes the static root")
        if candidate.is_file():
            return FileResponse(candidate)
        if "." in path.rsplit("/", 1)[-1]:
            raise ApiError(404, "not_found", f"no such asset: /{path}")
        # client-side route: single-page fallback
        return FileResponse(index, media_type="text/html")

    return app


def _etag_matches(header: str | None, etag: str) -> bool:
    if not header:
        return False
    candidates = [value.strip() for value in header.split(",")]
    return "*" in candidates or etag in candidates


def serve(config: ServiceConfig) -> int:
    """Run the service until interrupted; returns 0 on graceful shutdown."""

    app = create_app(config)
    # fail fast with a clear error instead of uvicorn's logged-and-swallowed one
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise BindError(f"cannot bind {config.host}:{config.port}: {exc}") from exc
    finally:
        probe.close()
    server = uvicorn.Server(
        uvicorn.Config(app, host=config.host, port=config.port, log_level="warning")
    )
    server.run()
    return 0
