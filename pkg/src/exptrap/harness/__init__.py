from .catalog import CATALOG_NAMES, CatalogEntry, CatalogError, catalog_lookup
from .emit_service import EmitError, EmitService, OutputFormat, emit, render
from .lemma_check_service import LemmaCheckService, LemmaRow
from .rate_fit import RateFit, RateFitError, RateModel, fit_rate
from .study_service import (
    CSV_FIELDS,
    StudyMode,
    StudyRecord,
    StudyService,
    run_study,
)

__all__ = [
    "CATALOG_NAMES",
    "CSV_FIELDS",
    "CatalogEntry",
    "CatalogError",
    "EmitError",
    "EmitService",
    "LemmaCheckService",
    "LemmaRow",
    "OutputFormat",
    "RateFit",
    "RateFitError",
    "RateModel",
    "StudyMode",
    "StudyRecord",
    "StudyService",
    "catalog_lookup",
    "emit",
    "fit_rate",
    "render",
    "run_study",
]
