"""Loading and validating model files.

Every model file is a JSON object whose ``kind`` selects a schema and a
constructor.  Loading happens in three stages, each with its own error:
JSON parsing (:class:`ParseError` with a byte offset), schema validation
(:class:`SchemaError` with a JSON path) and mathematical invariants
(:class:`ModelError` subclasses naming the failing point).
"""

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .collapse.covering import DivisorModel
from .collapse.metrics import euclidean, from_degeneration, log_weighted, orbifold
from .degeneration import MonodromyRep, NilpotentOrbitModel, period_map_eval
from .errors import InputError, ModelError, ParseError, SchemaError
from .schemas import SCHEMAS
from .semiflat import FibrationModel
from .special_kahler import Prepotential


@dataclass
class LoadedModel:
    """A validated model together with its source document."""

    kind: str
    value: object
    document: dict
    hash: str
    path: str = None
    extras: dict = None

    @property
    def name(self):
        return self.document.get("name") or (Path(self.path).stem if self.path else self.kind)


def canonical_hash(document):
    text = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def parse_json(data, source="<input>"):
    """Decode bytes or text; errors carry the byte offset of the failure."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            err = ParseError(f"{source} is not UTF-8: {exc.reason}", f"byte {exc.start}")
            err.offset = exc.start
            raise err from exc
    else:
        text = data
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        err = ParseError(f"{source}: {exc.msg}", f"byte {offset}")
        err.offset = offset
        raise err from exc


def validate_schema(document):
    if not isinstance(document, dict):
        raise SchemaError("model file must hold a JSON object", "$")
    kind = document.get("kind")
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown model kind {kind!r}; expected one of {sorted(SCHEMAS)}", "$.kind")
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in first.absolute_path)
        raise SchemaError(first.message, path)
    return kind


def _complex_list(pairs):
    return np.array([complex(a, b) for a, b in pairs])


def _check_degeneration(model, rng_seed=0):
    model.validate_residues()
    rng = np.random.default_rng(rng_seed)
    for t in model.sample_points(rng, 16, 0.5):
        period_map_eval(model, t)


def _build(kind, doc):
    extras = {}
    if kind == "prepotential":
        F = Prepotential.from_json(doc)
        F.validate_domain()
        value = FibrationModel.from_prepotential(F, doc.get("polarization"))
    elif kind == "fibration":
        value = FibrationModel.from_json(doc)
        value.validate()
    elif kind == "monodromy":
        value = MonodromyRep.from_json(doc)
        if "expected_orders" in doc:
            extras["expected_orders"] = tuple(doc["expected_orders"])
    elif kind == "monodromy_catalog":
        value = []
        for k, entry in enumerate(doc["entries"]):
            try:
                rep = MonodromyRep.from_json(entry)
            except InputError as exc:
                raise type(exc)(str(exc), f"$.entries[{k}]") from exc
            value.append((entry.get("name", f"entry{k}"), rep, tuple(entry.get("expected_orders", ()))))
    elif kind == "degeneration":
        value = NilpotentOrbitModel.from_json(doc)
        _check_degeneration(value)
        if "continuity" in doc:
            c = doc["continuity"]
            extras["continuity"] = {"entry": tuple(c["entry"]), "coord": int(c["coord"]),
                                    "base_point": _complex_list(c["base_point"])}
    elif kind == "metric":
        value, divisor = _build_metric(doc)
        extras["divisor"] = divisor
    else:  # pragma: no cover - guarded by the schema
        raise SchemaError(f"unknown kind {kind}")
    return value, extras


def _build_metric(doc):
    n = int(doc["n"])
    typ = doc["type"]
    divisor = tuple(doc.get("divisor", ()))
    orders = tuple(doc.get("orders", (1,) * len(divisor)))
    if typ == "euclidean":
        metric = euclidean(n)
    elif typ == "orbifold":
        if len(orders) != len(divisor):
            raise SchemaError("orbifold metric needs one order per divisor component", "$.orders")
        metric = orbifold(n, orders, divisor)
    else:
        if "degeneration" not in doc:
            raise SchemaError("degeneration metric needs a 'degeneration' block", "$.degeneration")
        model = NilpotentOrbitModel.from_json(doc["degeneration"])
        _check_degeneration(model)
        metric = from_degeneration(model)
        divisor = metric.divisor
        orders = metric.orders
    if "log_power" in doc:
        metric = log_weighted(metric, float(doc["log_power"]))
    if any(not 0 <= j < n for j in divisor):
        raise SchemaError("divisor coordinate out of range", "$.divisor")
    rng = np.random.default_rng(0)
    pts = 0.5 * rng.uniform(0.05, 1.0, (16, n)) * np.exp(1j * rng.uniform(-np.pi, np.pi, (16, n)))
    for p in pts:
        ev = np.linalg.eigvalsh(metric(p[None])[0])
        if not ev[0] > 0:
            raise ModelError("metric is not positive definite off the divisor",
                             f"w={np.round(p, 6).tolist()}")
    return metric, DivisorModel(n, divisor, orders)


def load_document(document, path=None):
    kind = validate_schema(document)
    value, extras = _build(kind, document)
    return LoadedModel(kind, value, document, canonical_hash(document), path, extras)


def load_model(path):
    """Read, schema-check and invariant-check a model file."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read model file: {exc.strerror}", str(path)) from exc
    return load_document(parse_json(data, str(path)), str(path))


def bundled(name):
    """Path of a model fixture shipped with the package."""
    ref = resources.files("skcollapse") / "data" / f"{name}.json"
    if not ref.is_file():
        raise InputError(f"no bundled model named {name!r}")
    return Path(str(ref))


def bundled_names():
    folder = resources.files("skcollapse") / "data"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))
