"""Versioned JSON test vectors for the CKKS routines.

A document pins the parameters and seed, stores the input slot vectors and
the plaintext-oracle result for each routine, and a per-case tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .ckks import CkksContext, EncryptionParameters, KeySet

FORMAT = "hekl-ckks-vectors"
VERSION = 1

_slots = {
    "type": "object",
    "required": ["re", "im"],
    "properties": {
        "re": {"type": "array", "items": {"type": "number"}},
        "im": {"type": "array", "items": {"type": "number"}},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["format", "version", "params", "seed", "cases"],
    "properties": {
        "format": {"const": FORMAT},
        "version": {"const": VERSION},
        "seed": {"type": "integer"},
        "params": {
            "type": "object",
            "required": ["n", "levels", "delta_bits", "first_bits", "special_bits", "error_sigma"],
            "properties": {
                "n": {"type": "integer", "minimum": 8},
                "levels": {"type": "integer", "minimum": 1},
                "delta_bits": {"type": "integer", "minimum": 1},
                "first_bits": {"type": "integer", "minimum": 2},
                "special_bits": {"type": "integer", "minimum": 2},
                "error_sigma": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["routine", "inputs", "expected", "tolerance"],
                "properties": {
                    "routine": {"enum": ["EncryptDecrypt", "MulLin", "MulLinRS", "SqrLinRS",
                                         "MulLinRSModSwAdd", "Rotate"]},
                    "inputs": {"type": "array", "items": _slots, "minItems": 1, "maxItems": 3},
                    "expected": _slots,
                    "tolerance": {"type": "number", "exclusiveMinimum": 0},
                    "step": {"type": "integer"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

ARITY = {"EncryptDecrypt": 1, "MulLin": 2, "MulLinRS": 2, "SqrLinRS": 1, "MulLinRSModSwAdd": 3,
         "Rotate": 1}


def _pack(z: np.ndarray) -> dict:
    return {"re": [float(v) for v in z.real], "im": [float(v) for v in z.imag]}


def _unpack(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=np.float64) + 1j * np.asarray(d["im"], dtype=np.float64)


def oracle(routine: str, inputs: list[np.ndarray], step: int = 0) -> np.ndarray:
    """Plaintext result of a routine on slot vectors."""
    if routine == "EncryptDecrypt":
        return inputs[0]
    if routine in ("MulLin", "MulLinRS"):
        return inputs[0] * inputs[1]
    if routine == "SqrLinRS":
        return inputs[0] * inputs[0]
    if routine == "MulLinRSModSwAdd":
        return inputs[0] * inputs[1] + inputs[2]
    if routine == "Rotate":
        return np.roll(inputs[0], -step)
    raise ValueError(f"unknown routine {routine!r}")


def generate(n: int = 8192, levels: int = 4, delta_bits: int = 40, seed: int = 0, *,
             first_bits: int = 60, special_bits: int = 60, error_sigma: float = 3.2,
             rotation_steps=(1, 5), roundtrip_tol: float = 1e-4, op_tol: float = 1e-3) -> dict:
    rng = np.random.default_rng(seed)
    half = n // 2

    def draw():
        return rng.uniform(-1, 1, half) + 1j * rng.uniform(-1, 1, half)

    cases = []

    def add(routine, tol, step=None):
        ins = [draw() for _ in range(ARITY[routine])]
        case = {"routine": routine, "inputs": [_pack(z) for z in ins],
                "expected": _pack(oracle(routine, ins, step or 0)), "tolerance": tol}
        if step is not None:
            case["step"] = step
        cases.append(case)

    add("EncryptDecrypt", roundtrip_tol)
    for r in ("MulLin", "MulLinRS", "SqrLinRS", "MulLinRSModSwAdd"):
        add(r, op_tol)
    for s in rotation_steps:
        add("Rotate", op_tol, s)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "seed": seed,
        "params": {"n": n, "levels": levels, "delta_bits": delta_bits, "first_bits": first_bits,
                   "special_bits": special_bits, "error_sigma": error_sigma},
        "cases": cases,
    }
    validate(doc)
    return doc


def validate(doc: dict) -> None:
    jsonschema.validate(doc, SCHEMA)
    n = doc["params"]["n"]
    for c in doc["cases"]:
        if len(c["inputs"]) != ARITY[c["routine"]]:
            raise jsonschema.ValidationError(f"{c['routine']} takes {ARITY[c['routine']]} inputs")
        for s in c["inputs"] + [c["expected"]]:
            if len(s["re"]) != n // 2 or len(s["im"]) != n // 2:
                raise jsonschema.ValidationError(f"slot vectors must have length {n // 2}")


def dump(doc: dict, path) -> None:
    validate(doc)
    Path(path).write_text(json.dumps(doc))


def load(path) -> dict:
    doc = json.loads(Path(path).read_text())
    validate(doc)
    return doc


@dataclass
class CaseResult:
    routine: str
    step: int | None
    max_error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_error <= self.tolerance


def params_of(doc: dict) -> EncryptionParameters:
    p = doc["params"]
    return EncryptionParameters.create(p["n"], p["levels"], p["delta_bits"], first_bits=p["first_bits"],
                                       special_bits=p["special_bits"], error_sigma=p["error_sigma"],
                                       seed=doc["seed"])


def run_case(ctx: CkksContext, keys: KeySet, case: dict) -> CaseResult:
    routine = case["routine"]
    ins = [_unpack(s) for s in case["inputs"]]
    step = case.get("step")
    evk = keys.evk
    if routine == "MulLinRSModSwAdd":
        a, b = (ctx.encrypt_vector(z, keys.pk) for z in ins[:2])
        q_last = ctx.basis.primes[a.level - 1].p
        c = ctx.encrypt_vector(ins[2], keys.pk, scale=a.scale * b.scale / q_last)
        out = ctx.mul_lin_rs_modsw_add(a, b, c, evk)
        cts = [a, b, c]
    else:
        cts = [ctx.encrypt_vector(z, keys.pk) for z in ins]
        if routine == "EncryptDecrypt":
            out = cts[0]
            cts = []
        elif routine == "MulLin":
            out = ctx.mul_lin(cts[0], cts[1], evk)
        elif routine == "MulLinRS":
            out = ctx.mul_lin_rs(cts[0], cts[1], evk)
        elif routine == "SqrLinRS":
            out = ctx.sqr_lin_rs(cts[0], evk)
        else:
            out = ctx.rotate_routine(cts[0], step, keys.galois)
    got = ctx.decrypt_vector(out, keys.sk)
    ctx.release(out, *cts)
    err = float(np.max(np.abs(got - _unpack(case["expected"]))))
    return CaseResult(routine, step, err, case["tolerance"])


def run(doc: dict, ctx: CkksContext | None = None) -> list[CaseResult]:
    validate(doc)
    ctx = ctx or CkksContext(params_of(doc))
    steps = sorted({c["step"] for c in doc["cases"] if "step" in c})
    keys = ctx.keygen(steps)
    return [run_case(ctx, keys, c) for c in doc["cases"]]
