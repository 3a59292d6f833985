"""Game files: JSON parsing with position-bearing diagnostics, and output formatting."""

import hashlib
import json
import math

import numpy as np

from .errors import GameFileError, OLPError
from .perception import INF, LimitedRank, Masked, Quantized, Table, TableFamily, format_level
from .solver import GameInstance

FAMILIES = ("masked", "quantized", "limited_rank", "table")


# ------------------------------------------------------------ reading


def _level(value, path):
    if value == "inf":
        return INF
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise GameFileError("capability must be a positive integer or \"inf\"", path)
    return value


def _matrix(value, path):
    """A matrix given as ``{"rows", "cols", "data"}`` (row-major) or as nested lists."""
    if isinstance(value, dict):
        for key in ("rows", "cols", "data"):
            if key not in value:
                raise GameFileError(f"missing key \"{key}\"", path)
        rows, cols, data = value["rows"], value["cols"], value["data"]
        for key, v in (("rows", rows), ("cols", cols)):
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise GameFileError("must be a positive integer", f"{path}.{key}")
        if not isinstance(data, list) or len(data) != rows * cols:
            raise GameFileError(f"expected {rows * cols} numbers", f"{path}.data")
        flat = data
        where = lambda i: f"{path}.data[{i}]"
    elif isinstance(value, list) and value and all(isinstance(r, list) for r in value):
        cols = len(value[0])
        for i, r in enumerate(value):
            if len(r) != cols:
                raise GameFileError("ragged rows", f"{path}[{i}]")
        rows = len(value)
        flat = [x for r in value for x in r]
        where = lambda i: f"{path}[{i // cols}][{i % cols}]"
    else:
        raise GameFileError("expected a matrix object or a list of rows", path)
    out = []
    for i, x in enumerate(flat):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise GameFileError("expected a finite number", where(i))
        out.append(float(x))
    return np.array(out, dtype=np.float64).reshape(rows, cols)


def _tol(doc, key, default):
    if key not in doc:
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
        raise GameFileError("must be a positive number", f"$.{key}")
    return float(v)


def _table(doc):
    for key in ("universe", "map", "level_cap"):
        if key not in doc:
            raise GameFileError(f"missing key \"{key}\"", "$")
    if not isinstance(doc["universe"], list) or not doc["universe"]:
        raise GameFileError("expected a non-empty list", "$.universe")
    universe = {}
    for i, item in enumerate(doc["universe"]):
        path = f"$.universe[{i}]"
        if not isinstance(item, dict) or "id" not in item or "A" not in item:
            raise GameFileError("expected an object with \"id\" and \"A\"", path)
        if "B" in item:
            raise GameFileError("per-entry column payoffs \"B\" are not supported; list column payoffs as their own universe entries", f"{path}.B")
        uid = item["id"]
        if not isinstance(uid, str) or uid in universe:
            raise GameFileError("ids must be unique strings", f"{path}.id")
        universe[uid] = _matrix(item["A"], f"{path}.A")
    if not isinstance(doc["map"], list):
        raise GameFileError("expected a list", "$.map")
    mapping = {}
    for i, item in enumerate(doc["map"]):
        path = f"$.map[{i}]"
        if not isinstance(item, dict) or not {"from", "level", "to"} <= set(item):
            raise GameFileError("expected an object with \"from\", \"level\", \"to\"", path)
        for key in ("from", "to"):
            if item[key] not in universe:
                raise GameFileError(f"unknown id {item[key]!r}", f"{path}.{key}")
        lvl = item["level"]
        if isinstance(lvl, bool) or not isinstance(lvl, int) or lvl < 1:
            raise GameFileError("level must be a positive integer", f"{path}.level")
        if (item["from"], lvl) in mapping:
            raise GameFileError("duplicate map entry", path)
        mapping[(item["from"], lvl)] = item["to"]
    cap = doc["level_cap"]
    if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
        raise GameFileError("level_cap must be a positive integer", "$.level_cap")
    try:
        return TableFamily(universe, mapping, cap)
    except OLPError as exc:
        raise GameFileError(str(exc), "$") from None


def _table_matrix(value, universe, path):
    if isinstance(value, str):
        if value not in universe:
            raise GameFileError(f"unknown id {value!r}", path)
        return universe[value]
    return _matrix(value, path)


def parse_game(text):
    """Parse game-file text into a :class:`GameInstance` (raises GameFileError)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise GameFileError("top level must be an object", "$")
    fam_name = doc.get("family")
    if fam_name not in FAMILIES:
        raise GameFileError(f"family must be one of {', '.join(FAMILIES)}", "$.family")
    zero_sum = doc.get("zero_sum")
    if not isinstance(zero_sum, bool):
        raise GameFileError("must be true or false", "$.zero_sum")
    caps = doc.get("capabilities")
    if not isinstance(caps, list) or len(caps) != 2:
        raise GameFileError("expected [c1, c2]", "$.capabilities")
    c1, c2 = (_level(v, f"$.capabilities[{i}]") for i, v in enumerate(caps))
    if fam_name == "table":
        tf = _table(doc)
        family = Table(tf)
        read = lambda key: _table_matrix(doc[key], tf.universe, f"$.{key}")
    else:
        if fam_name == "masked":
            family = Masked()
        elif fam_name == "quantized":
            family = Quantized()
        else:
            family = LimitedRank(tie_tol=_tol(doc, "tie_tol", 1e-10), rank_tol=_tol(doc, "rank_tol", 1e-9))
        read = lambda key: _matrix(doc[key], f"$.{key}")
    if "perceived_row" not in doc:
        raise GameFileError("missing key \"perceived_row\"", "$")
    row = read("perceived_row")
    col = None
    if not zero_sum:
        if "perceived_col" not in doc:
            raise GameFileError("general-sum games need \"perceived_col\"", "$")
        col = read("perceived_col")
    true_row = read("true_row") if "true_row" in doc else None
    true_col = read("true_col") if "true_col" in doc else None
    try:
        return GameInstance(family, row, c1, c2, zero_sum=zero_sum, perceived_col=col, true_row=true_row, true_col=true_col)
    except OLPError as exc:
        raise GameFileError(str(exc), "$") from None


def load_game(path):
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


# ------------------------------------------------------------ writing


def matrix_doc(a):
    a = np.asarray(a, dtype=np.float64)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": [float(x) for x in a.ravel()]}


def game_doc(game):
    """Game-file document for a table game (the format written by ``reduce``)."""
    if not isinstance(game.family, Table):
        raise GameFileError("only table games are serialised", "$.family")
    tf = game.family.table
    doc = {
        "family": "table",
        "zero_sum": game.zero_sum,
        "capabilities": [format_level(game.c1), format_level(game.c2)],
        "level_cap": tf.level_cap,
        "universe": [{"id": k, "A": matrix_doc(a)} for k, a in tf.universe.items()],
        "map": [{"from": a, "level": lvl, "to": b} for (a, lvl), b in tf.mapping.items()],
        "perceived_row": tf.id_of(game.perceived_row),
    }
    if not game.zero_sum:
        doc["perceived_col"] = tf.id_of(game.perceived_col)
    return doc


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format_float(x)
    return json.dumps(str(obj))


def format_float(x):
    """17 significant digits, keeping a decimal point on integral values."""
    if x == 0.0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def dumps(obj, indent=2):
    """JSON with 17-significant-digit floats and infinities as strings."""
    return _encode(obj, indent, 0) + "\n"


def digest(text, extra=""):
    h = hashlib.sha256()
    h.update(text.encode("utf-8"))
    h.update(b"\0")
    h.update(extra.encode("utf-8"))
    return h.hexdigest()
