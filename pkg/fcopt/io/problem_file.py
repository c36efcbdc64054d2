# fcopt/io/problem_file.py
"""
Reads and writes problem files.

A problem file is a JSON document describing the norm operator, the smooth
components with their declared constants, the outer function and the
starting point. The schema is enforced with Pydantic; infinite constants
are written as the string "inf", and `"constants": "analytic"` asks for the
constants to be derived from the component parameters.
"""

import json
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

import numpy as np
import structlog
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, model_validator

from fcopt.core.outer import (
    AdditiveComposite, ConstraintForm, LogSumExpForm, MaxForm, OuterFunction, PowerForm, SimpleSet
)
from fcopt.core.problem import CompositeProblem
from fcopt.core.smooth import (
    AffineComponent, AffineLogSumExpComponent, ComponentConstants, PowerOfNormComponent, QuadraticComponent,
    SmoothComponent, SumComponent, VectorFunction
)
from fcopt.exceptions import ConfigError, ProblemFileError, ReportWriteError
from fcopt.linalg import NormKind, NormOperator
from fcopt.types import ComponentKind, OuterKind, SetKind

logger = structlog.get_logger(__name__)


def _parse_extended(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return value


def _dump_extended(value: float) -> Union[float, str]:
    return "inf" if math.isinf(value) else value


ExtendedReal = Annotated[float, BeforeValidator(_parse_extended), PlainSerializer(_dump_extended)]


class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConstantsModel(_Schema):
    L1: ExtendedReal
    L2: ExtendedReal
    sigma2: float = 0.0
    sigma3: float = 0.0

    def build(self) -> ComponentConstants:
        return ComponentConstants(L1=self.L1, L2=self.L2, sigma2=self.sigma2, sigma3=self.sigma3)

    @classmethod
    def of(cls, constants: ComponentConstants) -> "ConstantsModel":
        return cls(L1=constants.L1, L2=constants.L2, sigma2=constants.sigma2, sigma3=constants.sigma3)


class NormModel(_Schema):
    type: NormKind = NormKind.IDENTITY
    data: Optional[List[Any]] = None

    def build(self, n: int) -> NormOperator:
        if self.type is NormKind.IDENTITY:
            return NormOperator.identity(n)
        if self.data is None:
            raise ConfigError(f"Norm of type '{self.type.value}' needs 'data'.")
        if self.type is NormKind.DIAGONAL:
            return NormOperator.diagonal(self.data)
        return NormOperator.dense(self.data)

    @classmethod
    def of(cls, norm: NormOperator) -> "NormModel":
        if norm.kind is NormKind.IDENTITY:
            return cls()
        if norm.kind is NormKind.DIAGONAL:
            return cls(type=NormKind.DIAGONAL, data=norm.diagonal_entries().tolist())
        return cls(type=NormKind.DENSE, data=norm.matrix.tolist())


class ComponentModel(_Schema):
    kind: ComponentKind
    parameters: Dict[str, Any] = Field(default_factory=dict)
    constants: Union[ConstantsModel, Literal["analytic"]]

    @model_validator(mode="after")
    def validate_sum_constants(self) -> "ComponentModel":
        if self.kind is ComponentKind.SUM and self.constants == "analytic":
            raise ValueError("Sum components need explicitly declared constants.")
        return self

    def build(self, norm: NormOperator) -> SmoothComponent:
        constants = None if self.constants == "analytic" else self.constants.build()
        p = self.parameters
        try:
            if self.kind is ComponentKind.QUADRATIC:
                return QuadraticComponent(p["A"], p.get("b"), p.get("c", 0.0), constants=constants, norm=norm)
            if self.kind is ComponentKind.AFFINE_LOG_SUM_EXP:
                return AffineLogSumExpComponent(p["rows"], p.get("offsets"), constants=constants, norm=norm)
            if self.kind is ComponentKind.POWER_OF_NORM:
                return PowerOfNormComponent(p["center"], p["degree"], p["coefficient"], norm=norm,
                                            constants=constants)
            if self.kind is ComponentKind.AFFINE:
                return AffineComponent(p["a"], p.get("b", 0.0), constants=constants)
            parts = [ComponentModel.model_validate(part).build(norm) for part in p["parts"]]
            return SumComponent(parts, constants)
        except KeyError as e:
            raise ConfigError(f"Component '{self.kind.value}' is missing parameter {e}.") from e
        except ValidationError as e:
            raise ConfigError(f"Invalid part of a Sum component: {e}") from e

    @classmethod
    def of(cls, component: SmoothComponent) -> "ComponentModel":
        c = component
        if isinstance(c, QuadraticComponent):
            parameters = {"A": c.A.tolist(), "b": c.b.tolist(), "c": c.c}
        elif isinstance(c, AffineLogSumExpComponent):
            parameters = {"rows": c.rows.tolist(), "offsets": c.offsets.tolist()}
        elif isinstance(c, PowerOfNormComponent):
            parameters = {"center": c.center.tolist(), "degree": c.degree, "coefficient": c.coefficient}
        elif isinstance(c, AffineComponent):
            parameters = {"a": c.a.tolist(), "b": c.b}
        elif isinstance(c, SumComponent):
            parameters = {"parts": [cls.of(part).model_dump(mode="json") for part in c.parts]}
        else:
            raise ConfigError(f"Component type {type(c).__name__} cannot be serialized.")
        return cls(kind=c.kind, parameters=parameters, constants=ConstantsModel.of(c.constants))


class SetModel(_Schema):
    kind: SetKind = SetKind.ALL
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None
    center: Optional[List[float]] = None
    radius: Optional[float] = None

    def build(self) -> SimpleSet:
        if self.kind is SetKind.BOX:
            if self.lower is None or self.upper is None:
                raise ConfigError("Box needs 'lower' and 'upper'.")
            return SimpleSet.box(self.lower, self.upper)
        if self.kind is SetKind.BALL:
            if self.center is None or self.radius is None:
                raise ConfigError("Ball needs 'center' and 'radius'.")
            return SimpleSet.ball(self.center, self.radius)
        return SimpleSet.all()

    @classmethod
    def of(cls, Q: SimpleSet) -> "SetModel":
        return cls.model_validate(Q.describe())


class OuterModel(_Schema):
    kind: OuterKind
    Q: SetModel = Field(default_factory=SetModel)
    parameters: Dict[str, Any] = Field(default_factory=dict)

    def build(self, m: int) -> OuterFunction:
        Q = self.Q.build()
        if self.kind is OuterKind.ADDITIVE:
            return AdditiveComposite(Q, self.parameters.get("linear"))
        if self.kind is OuterKind.POWER:
            return PowerForm(float(self.parameters.get("exponent", 2.0)), Q)
        forms = {OuterKind.CONSTRAINT: ConstraintForm, OuterKind.MAX: MaxForm, OuterKind.LOG_SUM_EXP: LogSumExpForm}
        return forms[self.kind](m, Q)

    @classmethod
    def of(cls, outer: OuterFunction) -> "OuterModel":
        parameters: Dict[str, Any] = {}
        if outer.linear is not None:
            parameters["linear"] = outer.linear.tolist()
        if isinstance(outer, PowerForm):
            parameters["exponent"] = outer.exponent
        return cls(kind=outer.kind, Q=SetModel.of(outer.Q), parameters=parameters)


class ProblemFile(_Schema):
    """The JSON problem document."""
    name: str = "problem"
    dimension: int = Field(..., ge=1)
    norm: NormModel = Field(default_factory=NormModel)
    components: List[ComponentModel] = Field(..., min_length=1)
    outer: OuterModel
    x0: List[float]
    known_opt: Optional[float] = None
    known_opt_point: Optional[List[float]] = None
    D0: Optional[float] = None
    diameter: Optional[float] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_dimensions(self) -> "ProblemFile":
        if len(self.x0) != self.dimension:
            raise ValueError(f"x0 has length {len(self.x0)}, dimension is {self.dimension}.")
        if self.known_opt_point is not None and len(self.known_opt_point) != self.dimension:
            raise ValueError("known_opt_point does not match the dimension.")
        return self

    def build(self) -> CompositeProblem:
        """The in-memory problem; constants are validated on construction."""
        norm = self.norm.build(self.dimension)
        f = VectorFunction([c.build(norm) for c in self.components])
        if f.n != self.dimension:
            raise ConfigError(f"Components act on dimension {f.n}, the file declares {self.dimension}.")
        return CompositeProblem(
            f=f, outer=self.outer.build(f.m), x0=np.asarray(self.x0, dtype=np.float64), norm=norm,
            name=self.name, known_opt=self.known_opt,
            known_opt_point=None if self.known_opt_point is None else np.asarray(self.known_opt_point),
            D0=self.D0, diameter=self.diameter, metadata=dict(self.metadata),
        )

    @classmethod
    def of(cls, problem: CompositeProblem) -> "ProblemFile":
        return cls(
            name=problem.name, dimension=problem.n, norm=NormModel.of(problem.norm),
            components=[ComponentModel.of(c) for c in problem.f.components], outer=OuterModel.of(problem.outer),
            x0=problem.x0.tolist(), known_opt=problem.known_opt,
            known_opt_point=None if problem.known_opt_point is None else problem.known_opt_point.tolist(),
            D0=problem.D0, diameter=problem.diameter, metadata=dict(problem.metadata),
        )

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


def parse_problem(document: Dict[str, Any]) -> CompositeProblem:
    """
    Validates a decoded JSON document and builds the problem.

    Raises:
        ConfigError: On schema violations or inconsistent problem data.
    """
    try:
        model = ProblemFile.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"Invalid problem file: {e}") from e
    return model.build()


def load_problem(path: Union[str, Path]) -> CompositeProblem:
    """
    Reads a problem file.

    Raises:
        ProblemFileError: If the file cannot be read or is not JSON.
        ConfigError: If the document violates the schema.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"Cannot read problem file {path}: {e}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"Problem file {path} is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ProblemFileError(f"Problem file {path} must contain a JSON object.")
    problem = parse_problem(document)
    logger.info("Problem loaded.", path=str(path), problem=problem.name, n=problem.n, m=problem.m)
    return problem


def problem_to_document(problem: CompositeProblem) -> Dict[str, Any]:
    """Serializes a problem with explicit constants for every component."""
    return ProblemFile.of(problem).to_document()


def save_problem(problem: CompositeProblem, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(problem_to_document(problem), indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Failed to write problem file to {path}") from e
    logger.info("Problem written.", path=str(path), problem=problem.name)
    return path
