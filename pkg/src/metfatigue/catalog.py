"""Data-driven catalog of empirical MET models.

Each model is one closed-form curve MET(f) in minutes, tagged with a body
region. Families and their coefficient layout:

    InversePolynomial  c0 + c1/f + c2/f**2 + c3/f**3
    ShiftedPower       c0 * (f - c1)**c2
    Power              c0 * f**c1
    Exponential        c0 * exp(c1 * f)
    HuijgensRatio      c0 * ((1 - f) / (f - c1))**c2

Catalog documents are JSON; a coefficient may be a number or a ratio string
such as ``"1/1.4"`` so printed precision survives a round trip.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional, Union

import jsonschema
import numpy as np

from .errors import CatalogError, DomainError


class Group(str, Enum):
    GENERAL = "General"
    SHOULDER = "Shoulder"
    ELBOW = "Elbow"
    HAND = "Hand"
    HIPBACK = "HipBack"

    @classmethod
    def parse(cls, text: str) -> "Group":
        key = text.strip().lower().replace("/", "").replace("-", "").replace("_", "")
        for g in cls:
            if g.value.lower() == key:
                return g
        raise CatalogError(f"unknown muscle group {text!r}; expected one of "
                           + ", ".join(g.value for g in cls))


class Family(str, Enum):
    INVERSE_POLYNOMIAL = "InversePolynomial"
    SHIFTED_POWER = "ShiftedPower"
    POWER = "Power"
    EXPONENTIAL = "Exponential"
    HUIJGENS_RATIO = "HuijgensRatio"


ARITY = {
    Family.INVERSE_POLYNOMIAL: 4,
    Family.SHIFTED_POWER: 3,
    Family.POWER: 2,
    Family.EXPONENTIAL: 2,
    Family.HUIJGENS_RATIO: 3,
}

_NUMBER_OR_RATIO = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*-?[0-9.]+(e-?[0-9]+)?\s*/\s*-?[0-9.]+(e-?[0-9]+)?\s*$"},
    ]
}

CATALOG_SCHEMA = {
    "type": "object",
    "required": ["version", "models"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "models": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "group", "family", "coefficients"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "name": {"type": "string"},
                    "group": {"enum": [g.value for g in Group]},
                    "family": {"enum": [f.value for f in Family]},
                    "coefficients": {"type": "array", "items": _NUMBER_OR_RATIO, "minItems": 1},
                    "domain_min": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                    "printed_coefficients": {"type": "array", "items": _NUMBER_OR_RATIO},
                    "note": {"type": "string"},
                },
            },
        },
    },
}


def _coef_value(token) -> float:
    if isinstance(token, str):
        num, den = token.split("/")
        return float(num) / float(den)
    return float(token)


@dataclass(frozen=True)
class EmpiricalMetModel:
    """One empirical MET formula; valid on ``domain_min < f <= 1``."""

    id: str
    group: Group
    family: Family
    coefficients: tuple
    domain_min: float = 0.0
    name: str = ""
    note: str = ""
    coefficient_tokens: tuple = field(default=(), compare=False, repr=False)
    printed_coefficients: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "group", Group(self.group))
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) != ARITY[self.family]:
            raise CatalogError(
                f"model {self.id!r}: family {self.family.value} takes "
                f"{ARITY[self.family]} coefficients, got {len(self.coefficients)}"
            )
        if not all(np.isfinite(self.coefficients)):
            raise CatalogError(f"model {self.id!r}: non-finite coefficient")
        if not self.coefficient_tokens:
            object.__setattr__(self, "coefficient_tokens", self.coefficients)

    @property
    def corrected(self) -> bool:
        return bool(self.printed_coefficients)

    def check_domain(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        bad_low = ~(f > self.domain_min)
        if np.any(bad_low):
            raise DomainError(self.id, f"f > {self.domain_min}", f[bad_low].flat[0].item())
        bad_high = f > 1.0
        if np.any(bad_high):
            raise DomainError(self.id, "f <= 1", f[bad_high].flat[0].item())
        return f

    def evaluate(self, f_mvc):
        """MET in minutes at relative load ``f_mvc`` (scalar or array)."""
        f = self.check_domain(f_mvc)
        c = self.coefficients
        fam = self.family
        if fam is Family.INVERSE_POLYNOMIAL:
            out = c[0] + c[1] / f + c[2] / f**2 + c[3] / f**3
        elif fam is Family.SHIFTED_POWER:
            out = c[0] * (f - c[1]) ** c[2]
        elif fam is Family.POWER:
            out = c[0] * f ** c[1]
        elif fam is Family.EXPONENTIAL:
            out = c[0] * np.exp(c[1] * f)
        else:
            out = c[0] * ((1.0 - f) / (f - c[1])) ** c[2]
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "name": self.name,
            "group": self.group.value,
            "family": self.family.value,
            "coefficients": list(self.coefficient_tokens),
        }
        if self.domain_min:
            d["domain_min"] = self.domain_min
        if self.printed_coefficients:
            d["printed_coefficients"] = list(self.printed_coefficients)
        if self.note:
            d["note"] = self.note
        if not self.name:
            del d["name"]
        return d


@dataclass(frozen=True)
class ModelCatalog:
    models: tuple
    version: str = ""

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        seen = set()
        for m in self.models:
            if m.id in seen:
                raise CatalogError(f"duplicate model id {m.id!r}")
            seen.add(m.id)

    def __iter__(self) -> Iterator[EmpiricalMetModel]:
        return iter(self.models)

    def __len__(self) -> int:
        return len(self.models)

    def __getitem__(self, model_id: str) -> EmpiricalMetModel:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)

    @property
    def ids(self) -> list:
        return [m.id for m in self.models]

    @property
    def groups(self) -> list:
        """Groups in first-appearance order."""
        out = []
        for m in self.models:
            if m.group not in out:
                out.append(m.group)
        return out

    def by_group(self, group) -> list:
        g = group if isinstance(group, Group) else Group.parse(group)
        return [m for m in self.models if m.group is g]

    def to_dict(self) -> dict:
        return {"version": self.version, "models": [m.to_dict() for m in self.models]}


def catalog_from_dict(doc: dict) -> ModelCatalog:
    """Validate a parsed catalog document and build the catalog."""
    validator = jsonschema.Draft7Validator(CATALOG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise CatalogError(f"catalog schema violation at {where}: {err.message}")

    models = []
    seen = {}
    for i, entry in enumerate(doc["models"]):
        mid = entry["id"]
        if mid in seen:
            raise CatalogError(
                f"duplicate model id {mid!r} at models/{i} (first at models/{seen[mid]})"
            )
        seen[mid] = i
        tokens = tuple(entry["coefficients"])
        family = Family(entry["family"])
        if len(tokens) != ARITY[family]:
            raise CatalogError(
                f"models/{i} ({mid!r}): family {family.value} takes "
                f"{ARITY[family]} coefficients, got {len(tokens)}"
            )
        models.append(EmpiricalMetModel(
            id=mid,
            group=Group(entry["group"]),
            family=family,
            coefficients=tuple(_coef_value(t) for t in tokens),
            domain_min=float(entry.get("domain_min", 0.0)),
            name=entry.get("name", ""),
            note=entry.get("note", ""),
            coefficient_tokens=tokens,
            printed_coefficients=tuple(entry.get("printed_coefficients", ())),
        ))
    return ModelCatalog(tuple(models), doc["version"])


def parse_catalog(text: str) -> ModelCatalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return catalog_from_dict(doc)


def load_catalog(source: Optional[Union[str, Path]] = None) -> ModelCatalog:
    """Load a catalog file; ``None`` loads the bundled reference catalog."""
    if source is None:
        text = resources.files("metfatigue").joinpath("data/table2_catalog.json").read_text()
    else:
        path = Path(source)
        if not path.is_file():
            raise FileNotFoundError(f"catalog file not found: {path}")
        text = path.read_text()
    return parse_catalog(text)


def reference_catalog() -> ModelCatalog:
    return load_catalog(None)


def dump_catalog(catalog: ModelCatalog) -> str:
    return json.dumps(catalog.to_dict(), indent=2)


def evaluate(model: EmpiricalMetModel, f_mvc):
    return model.evaluate(f_mvc)
