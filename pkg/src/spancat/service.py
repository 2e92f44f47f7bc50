"""HTTP service over the engine, with the request/response models shared
by the command-line client.

Every endpoint is stateless and deterministic for a fixed seed, so the
service can run many clients concurrently.  The handler functions do
the work; the FastAPI routes are thin wrappers, and the CLI calls the
same handlers in process.
"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Union

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import serialize
from .bicategory import UnknownDiagram
from .counting import equivariant_fix_count, fix_count, fuller_count, least_period_count
from .equivariant import BUILTIN_GROUPS, FinGroup, Subgroup
from .finset import FinSetError
from .smbf import multispan_action, rigidity_witness
from .suites import SuiteReport, run_suite, suite_names


class InputError(ValueError):
    """Malformed request payloads; maps to exit code 2 and HTTP 422."""


class CoherenceRequest(BaseModel):
    suite: str
    instances: int = Field(default=100, ge=1)
    seed: int = 0
    max_size: int = Field(default=4, ge=0)
    max_fiber: int = Field(default=3, ge=0)
    max_total: int = Field(default=6, ge=0)
    n: int = Field(default=2, ge=1)
    base: Optional[dict] = None
    group: Optional[Union[str, dict]] = None
    subgroup: Optional[str] = None
    workers: Optional[int] = None


class FailureModel(BaseModel):
    instance: int
    detail: str
    element: Optional[str] = None
    left: Optional[str] = None
    right: Optional[str] = None
    group: Optional[str] = None
    subgroup: Optional[str] = None


class SuiteReportModel(BaseModel):
    suite: str
    seed: int
    instances: int
    passed: bool
    failures: List[FailureModel]
    params: Dict[str, Any]

    @classmethod
    def from_report(cls, report: SuiteReport) -> "SuiteReportModel":
        return cls(
            suite=report.suite,
            seed=report.seed,
            instances=report.instances,
            passed=report.passed,
            failures=[FailureModel(**f) for f in report.failures],
            params=report.params,
        )


class SpanActRequest(BaseModel):
    span: dict
    inputs: Optional[dict] = None


class ParamSetResponse(BaseModel):
    document: dict


class RigidityResponse(BaseModel):
    rigid: bool
    witness: Optional[List[Any]] = None


class CountRequest(BaseModel):
    kind: Literal["fix", "fuller", "least-period", "equivariant"]
    map_document: dict = Field(alias="map")
    n: int = Field(ge=1)
    group: Optional[Union[str, dict]] = None
    subgroup: Optional[str] = None
    certify: bool = False

    model_config = {"populate_by_name": True}


class CountResponse(BaseModel):
    count: int
    certificate: Optional[dict] = None


class DeformRequest(BaseModel):
    op: Literal["validate", "derive", "compare", "ho"]
    model: Union[str, dict] = "graph"
    size: int = Field(default=3, ge=0, le=5)
    functor: str = "vertices"
    functor_list: Optional[List[str]] = Field(default=None, alias="list")
    budget: Optional[int] = None

    model_config = {"populate_by_name": True}


class DeformResponse(BaseModel):
    ok: bool
    report: dict


def _resolve_group(spec) -> tuple:
    """Returns (group, raw document or None)."""
    if spec is None:
        raise InputError("a group is required")
    if isinstance(spec, str):
        if spec not in BUILTIN_GROUPS:
            raise InputError(f"unknown built-in group {spec!r}")
        return BUILTIN_GROUPS[spec](), None
    try:
        return serialize.group_from_json(spec), spec
    except (KeyError, FinSetError) as exc:
        raise InputError(f"bad group document: {exc}") from exc


def _resolve_subgroup(group: FinGroup, doc, spec) -> Subgroup:
    if spec is None:
        raise InputError("a subgroup is required")
    try:
        return serialize.subgroup_from_spec(group, doc or {}, spec)
    except FinSetError as exc:
        raise InputError(f"bad subgroup: {exc}") from exc


def handle_coherence(req: CoherenceRequest) -> SuiteReportModel:
    if req.suite not in suite_names():
        raise InputError(f"unknown suite {req.suite!r}")
    base = None
    if req.base is not None:
        try:
            base = serialize.finset_from_json(req.base)
        except FinSetError as exc:
            raise InputError(f"bad base set: {exc}") from exc
    group = subgroup = None
    if req.group is not None:
        group, doc = _resolve_group(req.group)
        if req.subgroup is not None:
            subgroup = _resolve_subgroup(group, doc, req.subgroup)
    try:
        report = run_suite(
            req.suite,
            instances=req.instances,
            seed=req.seed,
            max_size=req.max_size,
            max_fiber=req.max_fiber,
            max_total=req.max_total,
            n=req.n,
            base=base,
            group=group,
            subgroup=subgroup,
            workers=req.workers,
        )
    except UnknownDiagram as exc:
        raise InputError(str(exc)) from exc
    return SuiteReportModel.from_report(report)


def handle_span_act(req: SpanActRequest) -> ParamSetResponse:
    try:
        span = serialize.multispan_from_document(req.span)
        inputs = (
            serialize.param_list_from_document(req.inputs, span.ctx)
            if req.inputs is not None
            else []
        )
        result = multispan_action(span, inputs)
    except FinSetError as exc:
        raise InputError(str(exc)) from exc
    return ParamSetResponse(document=serialize.param_set_to_document(result))


def handle_span_rigid(req: SpanActRequest) -> RigidityResponse:
    try:
        span = serialize.multispan_from_document(req.span)
    except FinSetError as exc:
        raise InputError(str(exc)) from exc
    witness = rigidity_witness(span)
    if witness is None:
        return RigidityResponse(rigid=True)
    return RigidityResponse(
        rigid=False,
        witness=[serialize.elem_to_json(witness[0]), serialize.elem_to_json(witness[1])],
    )


def handle_count(req: CountRequest) -> CountResponse:
    try:
        f = serialize.endomap_from_document(req.map_document)
    except FinSetError as exc:
        raise InputError(str(exc)) from exc
    if req.kind == "fix":
        return CountResponse(count=fix_count(f, req.n))
    if req.kind == "least-period":
        return CountResponse(count=least_period_count(f, req.n))
    if req.kind == "fuller":
        if req.certify:
            count, certificate = fuller_count(f, req.n, certify=True)
            return CountResponse(
                count=count,
                certificate={
                    "source_size": len(certificate.source),
                    "map": [
                        [serialize.elem_to_json(k), serialize.elem_to_json(v)]
                        for k, v in certificate.mapping.items()
                    ],
                },
            )
        return CountResponse(count=fuller_count(f, req.n))
    group, doc = _resolve_group(req.group)
    subgroup = _resolve_subgroup(group, doc, req.subgroup)
    try:
        gset = serialize.gset_from_document(req.map_document, group)
    except (KeyError, FinSetError) as exc:
        raise InputError(f"bad action data: {exc}") from exc
    try:
        return CountResponse(
            count=equivariant_fix_count(gset, f, subgroup, req.n)
        )
    except FinSetError as exc:
        raise InputError(str(exc)) from exc


_FUNCTOR_ALIASES = {
    "condensation": "condense",
    "vertex-set": "vertices",
    "vertex-edge-set": "vertices_edges",
    "edge-reversal": "reverse",
}


def _functor_name(name: str) -> str:
    return _FUNCTOR_ALIASES.get(name, name)


def handle_deform(req: DeformRequest) -> DeformResponse:
    from . import deformation as dfm
    from .graphmodel import graph_model

    if isinstance(req.model, str) and req.model != "graph":
        raise InputError(f"unknown model {req.model!r}")
    if isinstance(req.model, dict):
        return _handle_table_deform(req)
    model = graph_model(req.size)
    budget = req.budget
    functor_name = _functor_name(req.functor)
    if req.op == "validate":
        if functor_name not in model.functors:
            raise InputError(f"unknown functor {req.functor!r}")
        report = dfm.validate_deformation(
            model.functors[functor_name], model.deformation, budget
        )
        return DeformResponse(ok=report.ok, report=report.to_dict())
    if req.op == "derive":
        if functor_name not in model.functors:
            raise InputError(f"unknown functor {req.functor!r}")
        derived, report = dfm.derived_functor(
            model.functors[functor_name], model.deformation, budget
        )
        payload = report.to_dict()
        payload["functor"] = derived.name
        return DeformResponse(ok=report.ok, report=payload)
    if req.op == "compare":
        names = [_functor_name(x) for x in (req.functor_list or ["condense", "vertices"])]
        try:
            functors = tuple(model.functors[x] for x in names)
        except KeyError as exc:
            raise InputError(f"unknown functor in list: {exc}") from exc
        dl = dfm.DeformableList(
            functors=functors,
            deformations=tuple(model.deformations[x] for x in names),
        )
        try:
            _, report = dfm.compare_composites(dl, budget)
        except dfm.DeformationError as exc:
            return DeformResponse(ok=False, report={"error": str(exc)})
        return DeformResponse(ok=report.ok, report=report.to_dict())
    ho, _, report = dfm.homotopy_category(
        model.category, model.deformation, budget
    )
    payload = report.to_dict()
    payload["objects"] = len(ho.objects())
    return DeformResponse(ok=report.ok, report=payload)


def _handle_table_deform(req: DeformRequest) -> DeformResponse:
    from . import deformation as dfm

    doc = req.model
    try:
        cat = dfm.TableCategory.from_json(doc["category"])
    except (KeyError, dfm.DeformationError) as exc:
        raise InputError(f"bad category document: {exc}") from exc
    d = _table_deformation(cat, doc.get("deformation"))
    functor = dfm.identity_functor(cat)
    if req.op == "validate":
        report = dfm.validate_deformation(functor, d, req.budget)
        return DeformResponse(ok=report.ok, report=report.to_dict())
    if req.op == "derive":
        _, report = dfm.derived_functor(functor, d, req.budget)
        return DeformResponse(ok=report.ok, report=report.to_dict())
    if req.op == "ho":
        ho, _, report = dfm.homotopy_category(cat, d, req.budget)
        payload = report.to_dict()
        payload["objects"] = len(ho.objects())
        return DeformResponse(ok=report.ok, report=payload)
    dl = dfm.DeformableList(functors=(functor,), deformations=(d,))
    try:
        _, report = dfm.compare_composites(dl, req.budget)
    except dfm.DeformationError as exc:
        return DeformResponse(ok=False, report={"error": str(exc)})
    return DeformResponse(ok=report.ok, report=report.to_dict())


def _table_deformation(cat, doc):
    from . import deformation as dfm

    if doc is None:
        return dfm.RightDeformation(
            cat,
            is_radiant=lambda a: True,
            replace_obj=lambda a: a,
            replace_mor=lambda f: f,
            unit=cat.identity,
            name="trivial",
        )
    radiant = set(doc["radiant"])
    replace = dict(doc["replace"])
    replace_mor_table = dict(doc.get("replace_mor", {}))
    unit_table = dict(doc["unit"])

    def replace_mor(f):
        data = replace_mor_table.get(f.data, f.data)
        return dfm.Mor(replace[f.src], replace[f.dst], data)

    return dfm.RightDeformation(
        cat,
        is_radiant=lambda a: a in radiant,
        replace_obj=lambda a: replace[a],
        replace_mor=replace_mor,
        unit=lambda a: dfm.Mor(a, replace[a], unit_table[a]),
        name=doc.get("name", "table"),
    )


app = FastAPI(
    title="spancat",
    description=(
        "Coherence suites, span actions and fixed-point counting over "
        "finite sets"
    ),
)


@app.exception_handler(InputError)
async def _input_error_handler(request, exc):
    from fastapi.responses import JSONResponse

    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/suites")
def suites() -> dict:
    return {"suites": suite_names()}


@app.post("/coherence", response_model=SuiteReportModel)
def coherence(req: CoherenceRequest) -> SuiteReportModel:
    return handle_coherence(req)


@app.post("/span/act", response_model=ParamSetResponse)
def span_act(req: SpanActRequest) -> ParamSetResponse:
    return handle_span_act(req)


@app.post("/span/rigid", response_model=RigidityResponse)
def span_rigid(req: SpanActRequest) -> RigidityResponse:
    return handle_span_rigid(req)


@app.post("/count", response_model=CountResponse)
def count(req: CountRequest) -> CountResponse:
    return handle_count(req)


@app.post("/deform", response_model=DeformResponse)
def deform(req: DeformRequest) -> DeformResponse:
    return handle_deform(req)
