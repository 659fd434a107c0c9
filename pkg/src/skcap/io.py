"""JSON model loading and deterministic report writing."""

import json
import math

import numpy as np

from .bounds import AuxiliaryWitness
from .errors import ModelError
from .models import (
    DegradedProductProblem,
    DiscreteProblem,
    SideInfoProblem,
    WiretapChannel,
)
from .probkit import joint_from_json, joint_to_json, matrix_from_json

SCHEMA_VERSION = 1

_FACTORED = {
    ("y_given_x", "z_given_y"): WiretapChannel.degraded,
    ("z_given_x", "y_given_z"): WiretapChannel.reversed,
    ("y_given_x", "z_given_x"): WiretapChannel.independent,
}


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}", "input") from None
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})", "input") from None


def _require(doc, key, field):
    if not isinstance(doc, dict):
        raise ModelError(f"{field} must be an object", field)
    if key not in doc:
        name = f"{field}.{key}" if field else key
        raise ModelError(f"{name} is missing", name)
    return doc[key]


def channel_from_json(doc, field="channel"):
    """Joint tensor ``{"alphabets": {x, y, z}, "probs"}`` or one factored pair."""
    if not isinstance(doc, dict):
        raise ModelError(f"{field} must be an object", field)
    if "probs" in doc:
        alph = _require(doc, "alphabets", field)
        if not isinstance(alph, dict) or len(alph) != 3:
            raise ModelError(f"{field}.alphabets must name x, y and z", f"{field}.alphabets")
        sizes = list(alph.values())
        if not all(isinstance(k, int) and k >= 1 for k in sizes):
            raise ModelError(f"{field}.alphabets sizes must be positive integers",
                             f"{field}.alphabets")
        try:
            flat = np.asarray(doc["probs"], dtype=float)
        except (TypeError, ValueError):
            raise ModelError(f"{field}.probs must be numeric", f"{field}.probs") from None
        if flat.ndim != 1 or flat.size != math.prod(sizes):
            raise ModelError(f"{field}.probs needs {math.prod(sizes)} entries",
                             f"{field}.probs")
        return WiretapChannel(matrix_from_json(flat.reshape(sizes), f"{field}.probs"))
    for (a, b), make in _FACTORED.items():
        if a in doc and b in doc:
            m1 = matrix_from_json(doc[a], f"{field}.{a}")
            m2 = matrix_from_json(doc[b], f"{field}.{b}")
            try:
                return make(m1, m2)
            except ModelError as exc:
                raise ModelError(str(exc), f"{field}.{exc.field or b}") from None
    raise ModelError(
        f"{field} needs either alphabets/probs or a factored pair "
        "(y_given_x + z_given_y, z_given_x + y_given_z, y_given_x + z_given_x)",
        field,
    )


def _beta(doc):
    beta = doc.get("beta", 1.0) if isinstance(doc, dict) else 1.0
    if not isinstance(beta, (int, float)) or isinstance(beta, bool):
        raise ModelError("beta must be a number", "beta")
    return float(beta)


def _source(doc, field="source"):
    j = joint_from_json(_require(doc, "source", ""), field)
    if j.probs.ndim != 2:
        raise ModelError(f"{field} must have exactly two alphabets (u, v)", f"{field}.alphabets")
    return j


def problem_from_json(doc):
    return DiscreteProblem(_source(doc), channel_from_json(_require(doc, "channel", "")),
                           _beta(doc))


def side_info_from_json(doc):
    source = _source(doc)
    wv = matrix_from_json(_require(doc, "w_given_v", ""), "w_given_v")
    ch = doc.get("channel")
    if ch is None and "y_given_x" in doc and "z_given_y" in doc:
        ch = {"y_given_x": doc["y_given_x"], "z_given_y": doc["z_given_y"]}
    if ch is None:
        raise ModelError("channel (y_given_x, z_given_y) is missing", "z_given_y")
    return SideInfoProblem(source, wv, channel_from_json(ch), _beta(doc))


def degraded_from_json(doc):
    subs = _require(doc, "subchannels", "")
    if not isinstance(subs, list) or not subs:
        raise ModelError("subchannels must be a non-empty list", "subchannels")
    chans = tuple(channel_from_json(s, f"subchannels[{i}]") for i, s in enumerate(subs))
    return DegradedProductProblem(_source(doc), chans, _beta(doc))


def problem_to_json(problem):
    out = {"source": joint_to_json(problem.source), "beta": problem.beta}
    ch = problem.channel
    x, y, z = ch.shape
    out["channel"] = {"alphabets": {"x": x, "y": y, "z": z},
                      "probs": [float(p) for p in ch.tensor.ravel()]}
    return out


def witness_from_json(doc):
    return AuxiliaryWitness.from_json(doc, "witness")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_report(command, result):
    """Canonical report text: sorted keys, fixed separators, schema version."""
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "result": _plain(result)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
