"""JSON Schemas for the reports printed by the command-line tool.

Non-finite numbers (the divergent products of limit resources) are emitted
as the strings ``"inf"``, ``"-inf"`` or ``"nan"`` so every report stays
valid JSON.
"""

NUMBER = {"anyOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
VECTOR2 = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
MATRIX2 = {"type": "array", "items": VECTOR2, "minItems": 2, "maxItems": 2}
STATE = {
    "type": "object",
    "properties": {"mean": VECTOR2, "cov": MATRIX2},
    "required": ["mean", "cov"],
    "additionalProperties": False,
}
LABELLED = {
    "type": "object",
    "properties": {k: NUMBER for k in ("mean_q", "mean_p", "cov_qq", "cov_qp", "cov_pp", "fidelity")},
    "required": ["mean_q", "mean_p", "cov_qq", "cov_qp", "cov_pp", "fidelity"],
}
RESOURCE = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["params", "tmss", "mirror-tmss", "epr", "mirror", "point"]},
        "r": {"type": ["number", "null"]},
        "a": {"type": "number"},
        "b": {"type": "number"},
        "c1": {"type": "number"},
        "c2": {"type": "number"},
    },
    "required": ["kind"],
}

CHECK = {
    "type": "object",
    "properties": {
        "resource": RESOURCE,
        "single_mode_2": NUMBER,
        "single_mode_3": NUMBER,
        "sum_product": NUMBER,
        "diff_product": NUMBER,
        "verdict": {"enum": ["Physical", "Nonphysical"]},
        "saturated": {
            "type": "array",
            "items": {"enum": ["single_mode_2", "single_mode_3", "sum_product", "diff_product"]},
            "uniqueItems": True,
        },
        "mirror_entangled": {"type": "boolean"},
    },
    "required": [
        "single_mode_2",
        "single_mode_3",
        "sum_product",
        "diff_product",
        "verdict",
        "saturated",
        "mirror_entangled",
    ],
}

TELEPORT = {
    "type": "object",
    "properties": {
        "resource": RESOURCE,
        "realizability": CHECK,
        "noise_q": NUMBER,
        "noise_p": NUMBER,
        "averaged_output": STATE,
        "conditional_output": STATE,
        "beta": VECTOR2,
        "fidelity": {"type": "number"},
        "perfect": {"type": "boolean"},
        "ensemble_perfect": {"type": "boolean"},
        "variant": {"enum": ["standard", "classical"]},
        "physically_measurable": {"type": "boolean"},
    },
    "required": [
        "realizability",
        "noise_q",
        "noise_p",
        "averaged_output",
        "fidelity",
        "perfect",
        "ensemble_perfect",
        "variant",
    ],
}

MC = {
    "type": "object",
    "properties": {
        "resource": RESOURCE,
        "variant": {"enum": ["standard", "classical"]},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "streams": {"type": "integer", "minimum": 1},
        "empirical": STATE,
        "fidelity_estimate": {"type": "number"},
        "standard_errors": LABELLED,
        "analytic": {
            "type": "object",
            "properties": {"mean": VECTOR2, "cov": MATRIX2, "fidelity": {"type": "number"}},
            "required": ["mean", "cov", "fidelity"],
        },
        "z_scores": LABELLED,
        "single_shot_delta": {"type": "boolean"},
    },
    "required": [
        "empirical",
        "fidelity_estimate",
        "standard_errors",
        "analytic",
        "z_scores",
        "single_shot_delta",
    ],
}

ERROR = {
    "type": "object",
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
    "required": ["error", "message"],
    "additionalProperties": False,
}
