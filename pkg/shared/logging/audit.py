"""
Audit trail helpers for solver runs and written artifacts.
"""
from typing import Any, Dict, Optional
from datetime import datetime, timezone
from shared.logging.logger import setup_logger

logger = setup_logger(__name__)


def log_audit_event(
    action: str,
    resource_type: str,
    resource_id: str,
    initiated_by: str,
    reason: str,
    metadata: Optional[Dict[str, Any]] = None
) -> None:
    """
    Log an audit trail event.

    Args:
        action: Action performed (e.g., "run_started", "artifact_written")
        resource_type: Type of resource (e.g., "solve_run", "instance_file")
        resource_id: Identifier of the resource (run name, file path)
        initiated_by: Command or component that performed the action
        reason: Short human-readable reason
        metadata: Additional metadata about the action
    """
    audit_data = {
        "event_type": "audit",
        "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
        "action": action,
        "resource_type": resource_type,
        "resource_id": resource_id,
        "initiated_by": initiated_by,
        "reason": reason,
        "metadata": metadata or {}
    }

    logger.info(
        f"Audit: {action} on {resource_type} {resource_id} | Initiated by: {initiated_by} | Reason: {reason}",
        extra={"extra_fields": audit_data}
    )


def log_run_event(
    run_name: str,
    phase: str,
    status: str,
    details: Optional[Dict[str, Any]] = None
) -> None:
    """
    Log a lifecycle event of a solve, verify or bench run.

    Args:
        run_name: Name of the run (e.g., "solve:kp_n10_s1")
        phase: Phase of the run (e.g., "setup", "loop", "finish")
        status: Status of the run ("started", "completed", "failed")
        details: Result fields to attach (bounds, status, counts)
    """
    log_audit_event(
        action=f"run_{status}",
        resource_type="run",
        resource_id=f"{run_name}/{phase}",
        initiated_by=run_name.split(":", 1)[0],
        reason=f"{phase} {status}",
        metadata={
            "run_name": run_name,
            "phase": phase,
            "status": status,
            "details": details or {}
        }
    )


def log_artifact_written(path: str, kind: str, initiated_by: str) -> None:
    """
    Log that a file was written by a command.

    Args:
        path: Path of the written file
        kind: Artifact kind ("instance", "result", "csv")
        initiated_by: Command that wrote the file
    """
    log_audit_event(
        action="artifact_written",
        resource_type=f"{kind}_file",
        resource_id=path,
        initiated_by=initiated_by,
        reason=f"Writing {kind} output",
        metadata={"kind": kind}
    )
