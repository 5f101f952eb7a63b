"""
Reading and writing instance files.

Files are UTF-8 JSON documents validated by ``InstanceDocument``. Floats are
written with ``repr`` precision, which round-trips every double exactly.
"""
import json
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from shared.errors import CovarianceError, DimensionMismatchError, InstanceFormatError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.instance import ConstraintDocument, InstanceDocument
from tools.gaussian.types import GaussianVector
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, LinearConstraint, Relation

logger = setup_logger(__name__)

PathLike = Union[str, Path]


def _format_location(loc) -> str:
    parts = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts) or "<document>"


def instance_to_document(instance: ProblemInstance) -> InstanceDocument:
    """Convert an instance into its file document."""
    constraints = [
        ConstraintDocument(
            terms=[(i, j, c) for i, j, c in constraint.terms],
            rel=constraint.relation.value,
            rhs=constraint.rhs,
            name=constraint.name or None,
        )
        for constraint in instance.region.constraints
    ]
    return InstanceDocument(
        n=instance.n,
        mu=instance.gaussian.mu.tolist(),
        sigma=instance.gaussian.sigma.tolist(),
        sense=instance.sense.value,
        constraints=constraints,
        label=instance.label or None,
        family=instance.family,
        param=instance.param,
        seed=instance.seed,
    )


def document_to_instance(document: InstanceDocument) -> ProblemInstance:
    """
    Convert a validated document into a ProblemInstance.

    Raises:
        InstanceFormatError: On dimension, symmetry or PSD violations
    """
    n = document.n
    if len(document.mu) != n:
        raise InstanceFormatError(f"expected {n} means, got {len(document.mu)}", location="mu")
    if len(document.sigma) != n:
        raise InstanceFormatError(f"expected {n} rows, got {len(document.sigma)}", location="sigma")
    for j, row in enumerate(document.sigma):
        if len(row) != n:
            raise InstanceFormatError(f"expected {n} entries, got {len(row)}", location=f"sigma[{j}]")
    for j in range(n):
        for k in range(j + 1, n):
            if document.sigma[j][k] != document.sigma[k][j]:
                raise InstanceFormatError(
                    f"sigma[{j}][{k}] = {document.sigma[j][k]!r} differs from sigma[{k}][{j}] = {document.sigma[k][j]!r}",
                    location=f"sigma[{j}][{k}]",
                )

    try:
        gaussian = GaussianVector(mu=document.mu, sigma=document.sigma)
    except (CovarianceError, DimensionMismatchError) as e:
        raise InstanceFormatError(str(e), location="sigma") from e

    constraints = []
    for index, item in enumerate(document.constraints):
        location = f"constraints[{index}]"
        for i, j, _ in item.terms:
            if i not in (0, 1) or not 0 <= j < n:
                raise InstanceFormatError(f"index ({i}, {j}) outside (2, {n})", location=f"{location}.terms")
        try:
            constraints.append(
                LinearConstraint(tuple(item.terms), Relation(item.rel), item.rhs, name=item.name or "")
            )
        except ValueError as e:
            raise InstanceFormatError(str(e), location=location) from e

    return ProblemInstance(
        gaussian=gaussian,
        region=FeasibleRegion(n, tuple(constraints)),
        sense=Sense(document.sense),
        label=document.label or "",
        family=document.family,
        param=document.param,
        seed=document.seed,
    )


def dumps_instance(instance: ProblemInstance) -> str:
    """Serialize an instance to the file text."""
    payload = instance_to_document(instance).model_dump(exclude_none=True)
    return json.dumps(payload, indent=2) + "\n"


def loads_instance(text: str) -> ProblemInstance:
    """
    Parse instance file text.

    Raises:
        InstanceFormatError: If the text is not a valid instance document
    """
    try:
        document = InstanceDocument.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        raise InstanceFormatError(first["msg"], location=_format_location(first["loc"])) from e
    return document_to_instance(document)


def write_instance(instance: ProblemInstance, path: PathLike) -> Path:
    """
    Write an instance file.

    Args:
        instance: Instance to write
        path: Destination path

    Returns:
        The written path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps_instance(instance), encoding="utf-8")
    log_with_context(logger, "debug", "Instance written", path=str(target), n=instance.n)
    return target


def read_instance(path: PathLike) -> ProblemInstance:
    """
    Read an instance file.

    Raises:
        InstanceFormatError: If the file is missing or malformed
    """
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError(f"cannot read instance: {e}", location=str(source)) from e

    try:
        return loads_instance(text)
    except InstanceFormatError as e:
        log_with_context(logger, "error", "Invalid instance file", path=str(source), error=str(e))
        raise
