"""JSON Schemas (draft 2020-12) for every JSON document the CLI emits."""

_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer", "minimum": 0}
_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_ALICE = {
    "type": "object",
    "properties": {k: _COMPLEX for k in ("alpha", "beta", "gamma", "delta")},
    "required": ["alpha", "beta", "gamma", "delta"],
    "additionalProperties": False,
}
_GAME = {"theta": _NUM, "s": _NUM, "R": _NUM, "win": _NUM, "loss": _NUM}


def _obj(props: dict, command: str | None = None) -> dict:
    if command is not None:
        props = {"command": {"const": command}, **props}
    return {"type": "object", "properties": props, "required": list(props), "additionalProperties": False}


PAYOFF = _obj({
    "alice": _ALICE, **_GAME,
    "p_b1": _NUM, "p_pass": _NUM, "p_fail": _NUM, "expected_gain": _NUM,
}, "payoff")

PLAY = _obj({
    "seed": _INT, "rounds": _INT, "alice": _ALICE, **_GAME,
    "mean_payoff": _NUM, "std_error": _NUM,
    "counts": _obj({"b1": _INT, "pass": _INT, "fail": _INT}),
    "expected_gain": _NUM, "z_score": _NUM,
}, "play")

OPTIMIZE_GUARANTEE = _obj({
    "mode": {"const": "guarantee"}, "seed": _INT, "R": _NUM,
    "theta_star": _NUM, "s_star": _NUM, "guarantee": _NUM,
    "paper_G": _NUM, "asymptotic_s": _NUM, "eta_star": _NUM, "alice": _ALICE,
    "evaluations": _INT, "tolerance_achieved": _NUM, "converged": {"type": "boolean"},
}, "optimize")

OPTIMIZE_RESPONSE = _obj({
    "mode": {"const": "best_response"}, "seed": _INT, "R": _NUM, "theta": _NUM, "s": _NUM,
    "value": _NUM, "restricted_value": _NUM, "eta": _NUM, "alice": _ALICE,
    "evaluations": _INT, "tolerance_achieved": _NUM, "converged": {"type": "boolean"},
}, "optimize")

OPTIMIZE = {"oneOf": [OPTIMIZE_GUARANTEE, OPTIMIZE_RESPONSE]}

SWEEP_ROW = _obj({
    "R": _NUM, "theta_star": _NUM, "s_star": _NUM, "guarantee": _NUM,
    "paper_G": _NUM, "ratio": _NUM, "eta_star": _NUM, "converged": {"type": "boolean"},
})

SWEEP = _obj({
    "seed": _INT,
    "rows": {"type": "array", "items": SWEEP_ROW},
    "summary": _obj({"slope": _NUM, "intercept": _NUM}),
}, "sweep")

GATE = _obj({
    "kind": {"enum": ["X", "Z", "H", "RY", "RZ", "CNOT"]},
    "wires": {"type": "array", "items": _INT, "minItems": 1, "maxItems": 2},
    "angle": _NUM,
})

DECOMPOSE = _obj({
    "target": {"enum": ["u", "prep"]},
    "n_qubits": _INT,
    "wires": {"type": "array", "items": {"type": "string"}},
    "parameters": {"type": "object"},
    "gates": {"type": "array", "items": GATE},
    "gate_count": _INT,
    "distance": _NUM,
    "ok": {"type": "boolean"},
}, "decompose")

FLUX = _obj({
    "levels": _INT, "hbar": _NUM,
    "epsilon": _NUM, "delta": _NUM, "trace_shift": _NUM, "gauge_angle": _NUM, "gap_ratio": _NUM,
    "full_eigenvalues": {"type": "array", "items": _NUM},
    "reduced_eigenvalues": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    "rabi": {"type": "array", "items": _obj({"t": _NUM, "p1": _NUM})},
}, "flux")

SCHEMAS = {
    "payoff": PAYOFF,
    "play": PLAY,
    "optimize": OPTIMIZE,
    "sweep": SWEEP,
    "decompose": DECOMPOSE,
    "flux": FLUX,
}
