"""JSON schemas for the config file and every report the CLI prints."""

_num = {"type": "number"}
_opt_num = {"type": ["number", "null"]}
_poly = {"type": "array", "items": _num, "minItems": 1}
_row_table = {"type": "object", "additionalProperties": _poly}
_pair_table = {"type": "object", "additionalProperties": _row_table}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["system", "T"],
    "properties": {
        "system": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "required": ["coeffs", "envelopes"],
                    "properties": {
                        "label": {"type": "string"},
                        "coeffs": {
                            "type": "object",
                            "properties": {"a": _row_table, "b": _pair_table, "c": _pair_table},
                            "additionalProperties": False,
                        },
                        "envelopes": {
                            "type": "object",
                            "properties": {"g": _row_table, "h": _row_table},
                            "additionalProperties": False,
                        },
                    },
                },
            ]
        },
        "T": {"type": "number", "exclusiveMinimum": 0},
        "p": {"type": "number", "minimum": 1},
        "J": {"type": "integer", "minimum": 1},
        "M": {"type": "integer", "minimum": 3},
        "quadrature": {"enum": ["simpson", "gauss"]},
        "gauss_order": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "relaxation": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "envelope_radius": {"type": "number", "exclusiveMinimum": 0},
        "hypothesis": {
            "type": "object",
            "properties": {
                "J": {"type": "integer", "minimum": 1},
                "t_samples": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "verify": {
            "type": "object",
            "properties": {
                "residual_fd": _num,
                "residual_analytic": _num,
                "boundary": _num,
                "slack": _num,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

HYPOTHESIS_SCHEMA = {
    "type": "object",
    "required": ["T", "p", "G_majorant", "G_numeric", "H", "cond_A", "cond_B",
                 "k_contraction", "r", "verdict", "notes"],
    "properties": {
        "T": _num,
        "p": _num,
        "G_majorant": _num,
        "G_numeric": _num,
        "H": _num,
        "cond_A": _num,
        "cond_B": _num,
        "k_contraction": _num,
        "r": _opt_num,
        "verdict": {"enum": ["guaranteed", "stated-condition-only", "fails"]},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

SOLVE_SCHEMA = {
    "type": "object",
    "required": ["system", "hypothesis", "solve"],
    "properties": {
        "system": {"type": "string"},
        "hypothesis": HYPOTHESIS_SCHEMA,
        "solve": {
            "type": "object",
            "required": ["iterations", "converged", "iterate_deltas", "sup_norm",
                         "truncation_error_bound", "warnings", "J", "M", "T"],
            "properties": {
                "iterations": {"type": "integer", "minimum": 0},
                "converged": {"type": "boolean"},
                "iterate_deltas": {"type": "array", "items": _num},
                "sup_norm": _num,
                "truncation_error_bound": _num,
                "warnings": {"type": "array", "items": {"type": "string"}},
                "relaxation": _num,
                "radius": _opt_num,
                "within_radius": {"type": ["boolean", "null"]},
                "J": {"type": "integer"},
                "M": {"type": "integer"},
                "T": _num,
            },
        },
    },
}

_residual = {
    "type": "object",
    "required": ["max_residual", "location", "boundary_max"],
    "properties": {
        "max_residual": _num,
        "location": {"type": ["array", "null"], "minItems": 3, "maxItems": 3},
        "boundary_max": _num,
    },
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["residual_fd", "residual_analytic", "boundary_max", "ball_invariance",
                 "contraction_margins", "equicontinuity", "passed", "failures"],
    "properties": {
        "residual_fd": _residual,
        "residual_analytic": _residual,
        "boundary_max": _num,
        "ball_invariance": {"type": ["object", "null"]},
        "contraction_margins": {"type": "array", "items": {"type": "array", "items": _num}},
        "contraction_cutoffs": {"type": "array", "items": {"type": "integer"}},
        "equicontinuity": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["eps", "modulus", "ratio"],
                "properties": {"eps": _num, "modulus": _num, "ratio": _num},
            },
        },
        "passed": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}
