"""Sessions API router: run one session and return its report."""

import logging

from fastapi import APIRouter, HTTPException, status

from app import schemas
from app.session.runner import run_source
from app.settings import get_settings, use_settings

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/sessions", tags=["Sessions"])

_STATUS_BY_EXIT = {
    1: status.HTTP_422_UNPROCESSABLE_ENTITY,
    2: status.HTTP_400_BAD_REQUEST,
    3: status.HTTP_500_INTERNAL_SERVER_ERROR,
}


@router.post(
    "/run",
    response_model=schemas.Report,
    status_code=status.HTTP_200_OK,
)
def run_session(payload: schemas.SessionRunRequest) -> schemas.Report:
    """
    Parse and run a session.

    Parse errors answer 400, refused preconditions 422 and engine failures
    500, with the report as detail; computed verdicts (true or false) answer 200.
    """
    base = get_settings()
    try:
        settings = base.with_overrides(max_degree=payload.max_degree, zpower=payload.zpower)
    except ValueError as exc:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))
    use_settings(settings)
    try:
        report = run_source(payload.source, stats=payload.stats or settings.stats)
    finally:
        use_settings(base)
    if report.exit_code:
        logger.info("session ended with exit code %d", report.exit_code)
        raise HTTPException(status_code=_STATUS_BY_EXIT.get(report.exit_code, 500), detail=report.model_dump())
    return report
