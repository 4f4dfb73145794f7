"""ASGI entry point for the study API.

Usage:
    PYTHONPATH=projects uv run uvicorn imputation_lab.api.app:app --port 8006
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from imputation_lab import __version__
from imputation_lab.api.routers.experiment import cancel_background_runs, router
from imputation_lab.utils.config import load_config

logger = logging.getLogger(__name__)


@asynccontextmanager
async def _lifespan(app: FastAPI):
    env = load_config()
    logging.basicConfig(
        level=str(env["log_level"]).upper(),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    logger.info("Study API ready (version %s)", __version__)
    yield
    cancelled = cancel_background_runs()
    logger.info("Study API stopped, %d unfinished runs cancelled", cancelled)


def create_app(cors_origins: list[str] | None = None) -> FastAPI:
    """Build the API with the experiment routes and a health check.

    Args:
        cors_origins: Allowed browser origins; defaults to the comma-separated
            IMPUTATION_LAB_CORS_ORIGINS setting.

    Returns:
        FastAPI: The configured application.
    """
    if cors_origins is None:
        cors_origins = list(load_config()["cors_origins"])
    api = FastAPI(title="Imputation Lab API", version=__version__, lifespan=_lifespan)
    if cors_origins:
        api.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )
    api.include_router(router)

    @api.get("/health")
    async def health() -> dict[str, str]:
        return {"status": "ok"}

    return api


app = create_app()
