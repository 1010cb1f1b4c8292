from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pathlib import Path
from typing import List, Optional
from dotenv import load_dotenv
from pydantic import ValidationError
import logging
import sys

ROOT = Path(__file__).parent
load_dotenv(ROOT.parent.parent / ".env")  # Load .env from project root

sys.path.insert(0, str(ROOT.parent))  # backend/, for app.xxx imports

from app import __version__
from app.config.filter_config import FilterSpec, TEMPLATES, apply_template, validate_config
from app.errors import PnmError, ShapeSpaceError
from app.hierarchy.component_tree import tree_stats
from app.imaging.pnm import read_pnm, write_pnm
from app.log import configure_logging
from app.models.schemas import DetectionRecord, RangeReport, TreeStats
from app.shapespace.pipeline import attribute_range, build_tree, detect_objects, run_shape_filter

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="ShapeSpace", description="Connected filtering on tree-based shape spaces")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

PGM_MEDIA_TYPE = "image/x-portable-graymap"


async def _read_image(upload: UploadFile):
    data = await upload.read()
    try:
        return read_pnm(data)
    except PnmError as e:
        raise HTTPException(status_code=400, detail=str(e.with_source(upload.filename or "upload")))


def _spec(template: Optional[str], **fields) -> FilterSpec:
    given = {k: v for k, v in fields.items() if v is not None}
    try:
        spec = apply_template(template, **given) if template else FilterSpec(**given)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=e.errors(include_url=False, include_context=False))
    except ValueError as e:
        raise HTTPException(status_code=422, detail=str(e))
    ok, message = validate_config(spec)
    if not ok:
        raise HTTPException(status_code=422, detail=message)
    return spec


@app.get("/health")
async def health():
    return {"status": "ok", "version": __version__}


@app.get("/templates")
async def list_templates():
    return TEMPLATES


@app.post("/filter")
async def filter_image(
    file: UploadFile = File(...),
    template: Optional[str] = Form(None),
    tree_kind: Optional[str] = Form(None),
    connectivity: Optional[int] = Form(None),
    attribute: Optional[str] = Form(None),
    orientation: Optional[str] = Form(None),
    strategy: Optional[str] = Form(None),
    param: Optional[float] = Form(None),
    aa_kind: Optional[str] = Form(None),
    mode: Optional[str] = Form(None),
    ascii: bool = Form(False),
):
    f = await _read_image(file)
    spec = _spec(
        template,
        tree_kind=tree_kind, connectivity=connectivity, attribute=attribute, orientation=orientation,
        strategy=strategy, param=param, aa_kind=aa_kind, mode=mode,
    )
    try:
        outcome = run_shape_filter(f, spec)
    except ShapeSpaceError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return Response(
        content=write_pnm(outcome.image, ascii=ascii),
        media_type=PGM_MEDIA_TYPE,
        headers={"X-Survivors": str(len(outcome.result.survivors))},
    )


@app.post("/range", response_model=RangeReport)
async def filter_range(
    file: UploadFile = File(...),
    tree_kind: str = Form("tos"),
    connectivity: int = Form(4),
    attribute: str = Form("circularity"),
    orientation: Optional[str] = Form(None),
):
    f = await _read_image(file)
    spec = _spec(None, tree_kind=tree_kind, connectivity=connectivity, attribute=attribute, orientation=orientation)
    try:
        return RangeReport(**attribute_range(f, spec))
    except ShapeSpaceError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/detect", response_model=List[DetectionRecord])
async def detect(
    file: UploadFile = File(...),
    attributes: str = Form("circularity"),
    eps: float = Form(...),
):
    f = await _read_image(file)
    kinds = [a.strip() for a in attributes.split(",") if a.strip()]
    try:
        found = detect_objects(f, kinds, eps)
    except ShapeSpaceError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return [
        DetectionRecord(
            id=o.node, level=int(round(o.level)), area=o.area, centroid=list(o.centroid),
            attribute=o.attribute_value, extinction=o.extinction, attr=o.kind,
        )
        for o in found
    ]


@app.post("/tree-stats", response_model=TreeStats)
async def stats(
    file: UploadFile = File(...),
    tree_kind: str = Form("tos"),
    connectivity: int = Form(4),
):
    f = await _read_image(file)
    if tree_kind not in ("min", "max", "tos") or connectivity not in (4, 8):
        raise HTTPException(status_code=422, detail="tree_kind must be min/max/tos and connectivity 4 or 8")
    try:
        return TreeStats(**tree_stats(build_tree(f, tree_kind, connectivity)))
    except ShapeSpaceError as e:
        raise HTTPException(status_code=400, detail=str(e))
