"""JSON schemas for model files, keyed by their ``kind`` field."""

NUMBER = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
MATRIX = {"type": "array", "items": {"type": "array", "items": NUMBER}}
INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}
POLARIZATION = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}
INTERVALS = {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                        "minItems": 2, "maxItems": 2}}
DOMAIN = {"type": "object", "required": ["re", "im"],
          "properties": {"re": INTERVALS, "im": INTERVALS}}
INDEX = {"type": "array", "items": {"type": "integer", "minimum": 0}}

SCALAR_TERM = {"type": "object", "required": ["index"],
               "properties": {"index": INDEX, "re": NUMBER, "im": NUMBER}}
MATRIX_TERM = {"type": "object", "required": ["index"],
               "properties": {"index": INDEX, "re": MATRIX, "im": MATRIX}}
VECTOR_TERM = {"type": "object", "required": ["index"],
               "properties": {"index": INDEX, "re": {"type": "array", "items": NUMBER},
                              "im": {"type": "array", "items": NUMBER}}}

PREPOTENTIAL_BODY = {
    "type": "object",
    "required": ["n", "terms"],
    "properties": {"n": {"type": "integer", "minimum": 1},
                   "terms": {"type": "array", "items": SCALAR_TERM, "minItems": 1},
                   "domain": DOMAIN},
}

PREPOTENTIAL = {
    **PREPOTENTIAL_BODY,
    "properties": {**PREPOTENTIAL_BODY["properties"], "kind": {"const": "prepotential"},
                   "polarization": POLARIZATION, "name": {"type": "string"}},
}

FIBRATION = {
    "type": "object",
    "required": ["kind", "polarization"],
    "properties": {
        "kind": {"const": "fibration"},
        "name": {"type": "string"},
        "polarization": POLARIZATION,
        "prepotential": PREPOTENTIAL_BODY,
        "period_model": {"type": "object", "required": ["n", "terms"],
                         "properties": {"n": {"type": "integer", "minimum": 1},
                                        "terms": {"type": "array", "items": MATRIX_TERM},
                                        "domain": DOMAIN}},
    },
    "oneOf": [{"required": ["prepotential"]}, {"required": ["period_model"]}],
}

MONODROMY = {
    "type": "object",
    "required": ["kind", "generators"],
    "properties": {
        "kind": {"const": "monodromy"},
        "name": {"type": "string"},
        "generators": {"type": "array", "items": INT_MATRIX, "minItems": 1},
        "form": MATRIX,
        "polarization": POLARIZATION,
        "expected_orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
    },
}

MONODROMY_CATALOG = {
    "type": "object",
    "required": ["kind", "entries"],
    "properties": {
        "kind": {"const": "monodromy_catalog"},
        "name": {"type": "string"},
        "entries": {"type": "array", "minItems": 1,
                    "items": {**MONODROMY, "required": ["generators"],
                              "properties": {**MONODROMY["properties"],
                                             "kind": {"const": "monodromy"}}}},
    },
}

CONTINUITY = {"type": "object", "required": ["entry", "coord", "base_point"],
              "properties": {"entry": {"type": "array", "items": {"type": "integer"},
                                       "minItems": 2, "maxItems": 2},
                             "coord": {"type": "integer", "minimum": 0},
                             "base_point": {"type": "array", "items": COMPLEX}}}

DEGENERATION_BODY = {
    "type": "object",
    "required": ["n", "k", "Q", "residues"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 0},
        "Q": {"type": "array", "items": MATRIX_TERM},
        "residues": {"type": "array", "items": MATRIX},
        "polarization": POLARIZATION,
        "orbifold_orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "frame": {"type": "array", "items": VECTOR_TERM},
    },
}

DEGENERATION = {
    **DEGENERATION_BODY,
    "required": ["kind"] + DEGENERATION_BODY["required"],
    "properties": {**DEGENERATION_BODY["properties"], "kind": {"const": "degeneration"},
                   "name": {"type": "string"}, "continuity": CONTINUITY},
}

METRIC = {
    "type": "object",
    "required": ["kind", "n", "type"],
    "properties": {
        "kind": {"const": "metric"},
        "name": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "type": {"enum": ["euclidean", "orbifold", "degeneration"]},
        "divisor": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "log_power": {"type": "number"},
        "degeneration": DEGENERATION_BODY,
    },
}

SCHEMAS = {
    "prepotential": PREPOTENTIAL,
    "fibration": FIBRATION,
    "monodromy": MONODROMY,
    "monodromy_catalog": MONODROMY_CATALOG,
    "degeneration": DEGENERATION,
    "metric": METRIC,
}

REPORT = {
    "type": "object",
    "required": ["suite", "model_hash", "records", "passed", "seed"],
    "properties": {
        "suite": {"type": "string"},
        "model_hash": {"type": "string"},
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "records": {"type": "array", "items": {
            "type": "object",
            "required": ["name", "provenance", "inputs", "measured", "tolerance", "pass"],
            "properties": {"pass": {"type": "boolean"}, "name": {"type": "string"},
                           "provenance": {"type": "string"}}}},
    },
}
