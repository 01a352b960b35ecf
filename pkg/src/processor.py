"""
Batch processing: JSON-lines job files fanned out over a thread pool.
Reports come back in input order; a bad line yields an error record and the rest still run.
"""

import json
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from .config_validator import AppConfig, ConfigValidator, performance_metrics
from .errors import FewnomialError, ParseError
from .jobs import JobSpec, error_report, run
from .logger import log_success, logger

BatchItem = Tuple[int, Union[JobSpec, FewnomialError]]


def ingest_batch(path: str) -> Iterator[BatchItem]:
    """(line number, JobSpec or the error that line produced) for every non-blank line."""
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, 1):
            text = raw.strip()
            if not text:
                continue
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                yield number, ParseError(f"Malformed JSON: {e.msg}")
                continue
            try:
                yield number, JobSpec.from_dict(data)
            except FewnomialError as e:
                yield number, e
            except TypeError as e:
                yield number, ParseError(f"Invalid job fields: {e}")


def _line_report(number: int, status: int, report: Dict[str, Any]) -> Dict[str, Any]:
    return {"line": number, "status": status, **report}


def run_batch(path: str, config: Optional[AppConfig] = None) -> Tuple[int, List[Dict[str, Any]]]:
    """Run every job in ``path``; returns (worst status, per-line reports in input order)."""
    config = config or ConfigValidator.from_env()
    performance_metrics.start_operation("batch")
    items = list(ingest_batch(path))
    results: List[Optional[Dict[str, Any]]] = [None] * len(items)
    workers = config.batch.workers
    logger.info(f"Running {len(items)} batch jobs with {workers} workers")

    def run_single(item: BatchItem) -> Dict[str, Any]:
        number, job = item
        if isinstance(job, FewnomialError):
            status, report = error_report(job)
            return _line_report(number, status, report)
        try:
            status, report = run(job, config)
        except Exception as e:
            # anything outside the error hierarchy is a bug: report it as status 4
            logger.error(f"Line {number} crashed: {e}\n{traceback.format_exc()}")
            status, report = error_report(e)
        return _line_report(number, status, report)

    failed = 0
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(run_single, item): index for index, item in enumerate(items)
        }

        completed = 0
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            results[index] = future.result()
            completed += 1
            if results[index]["status"]:
                failed += 1

            if completed % 100 == 0 or completed == len(items):
                percentage = (completed / len(items)) * 100
                logger.info(
                    f"Batch progress: {completed}/{len(items)} ({percentage:.1f}%) "
                    f"- {failed} failed"
                )

    performance_metrics.end_operation("batch", jobs=len(items), failed=failed)
    if failed:
        logger.warning(f"Batch completed with {failed} failures out of {len(items)} jobs")
    else:
        log_success(f"Batch completed: all {len(items)} jobs succeeded")
    worst = max((r["status"] for r in results), default=0)
    return worst, results
