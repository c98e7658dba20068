"""FastAPI front end over the experiment handlers.

Synchronous endpoints wrap one handler call each.  Comparisons can run
for minutes, so ``POST /compare`` starts a background job by default
and returns a job id to poll at ``GET /compare/{job_id}``; pass
``wait=true`` to block until the grid finishes.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..data.io import DatasetFormatError
from .. import experiment
from .schemas import (
    CompareRequest,
    CompareSummary,
    EvaluateRequest,
    EvaluateResponse,
    GenDataRequest,
    GenDataResponse,
    HealthResponse,
    JobStatus,
    ScoreRequest,
    ScoreResponse,
    TrainRequest,
    TrainResponse,
)


@dataclass
class _Job:
    job_id: str
    status: str = "queued"
    progress: list[str] = field(default_factory=list)
    result: dict | None = None
    error: str | None = None


class JobStore:
    def __init__(self):
        self._jobs: dict[str, _Job] = {}
        self._lock = threading.Lock()

    def create(self) -> _Job:
        job = _Job(job_id=uuid.uuid4().hex[:12])
        with self._lock:
            self._jobs[job.job_id] = job
        return job

    def get(self, job_id: str) -> _Job:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(job_id)
            return self._jobs[job_id]

    def status(self, job: _Job) -> JobStatus:
        with self._lock:
            return JobStatus(
                job_id=job.job_id,
                status=job.status,
                progress=list(job.progress),
                result=CompareSummary(**job.result) if job.result else None,
                error=job.error,
            )


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, FileExistsError):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, FileNotFoundError):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (ValueError, DatasetFormatError)):
        return HTTPException(status_code=422, detail=str(exc))
    raise exc


def create_app() -> FastAPI:
    app = FastAPI(title="entcur", version=__version__)
    jobs = JobStore()

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/generate", response_model=GenDataResponse)
    def generate(req: GenDataRequest) -> GenDataResponse:
        try:
            return GenDataResponse(**experiment.cmd_gen_data(req.config, req.out_dir, req.force))
        except Exception as exc:
            raise _http_error(exc) from exc

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest) -> ScoreResponse:
        try:
            return ScoreResponse(
                **experiment.cmd_score(req.config, req.dataset_path, req.out_path, req.force)
            )
        except Exception as exc:
            raise _http_error(exc) from exc

    @app.post("/train", response_model=TrainResponse)
    def train(req: TrainRequest) -> TrainResponse:
        if req.mode == "curriculum" and req.partition_path is None:
            raise HTTPException(status_code=422, detail="curriculum mode requires partition_path")
        try:
            return TrainResponse(
                **experiment.cmd_train(
                    req.config,
                    req.dataset_path,
                    req.partition_path or "",
                    req.mode,
                    req.out_prefix,
                    force=req.force,
                    run_index=req.run_index,
                    target_steps=req.target_steps,
                )
            )
        except Exception as exc:
            raise _http_error(exc) from exc

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        try:
            return EvaluateResponse(
                **experiment.cmd_evaluate(
                    req.config, req.dataset_path, req.model_path, req.out_path, req.force
                )
            )
        except Exception as exc:
            raise _http_error(exc) from exc

    def _run_compare(job: _Job, req: CompareRequest) -> None:
        job.status = "running"
        try:
            job.result = experiment.cmd_compare(
                req.config, req.out_dir, force=req.force, progress=job.progress.append
            )
            job.status = "done"
        except Exception as exc:
            job.error = str(exc)
            job.status = "failed"

    @app.post("/compare", response_model=JobStatus)
    def compare(req: CompareRequest) -> JobStatus:
        job = jobs.create()
        if req.wait:
            _run_compare(job, req)
            if job.status == "failed":
                raise HTTPException(status_code=422, detail=job.error)
        else:
            # Early refusal beats a job that fails instantly on a dirty
            # output directory.
            from pathlib import Path

            out = Path(req.out_dir)
            if out.exists() and any(out.iterdir()) and not req.force:
                raise HTTPException(
                    status_code=409,
                    detail=f"refusing to write into non-empty {out}; pass force",
                )
            thread = threading.Thread(target=_run_compare, args=(job, req), daemon=True)
            thread.start()
        return jobs.status(job)

    @app.get("/compare/{job_id}", response_model=JobStatus)
    def compare_status(job_id: str) -> JobStatus:
        try:
            return jobs.status(jobs.get(job_id))
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no such job {job_id!r}") from None

    return app


app = create_app()
