from __future__ import annotations

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.routers import sessions as sessions_router
from app.settings import get_settings

settings = get_settings()
logging.getLogger("app").setLevel(settings.log_level)

app = FastAPI(title="weylfiber")


# Include routers
app.include_router(sessions_router.router)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.allowed_origins,
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)
