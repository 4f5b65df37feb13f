"""Game JSON and Partition JSON, plus bundled fixtures."""
from __future__ import annotations

import json
from importlib import resources
from typing import Any

from .families import HedonicGame
from .model import OrderingProfile, make_partition, validate_partition
from .reductions import Formula, GadgetGame, build_gadget, parse_cnf


class InputError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def fixture_text(name: str) -> str:
    """Contents of a bundled CNF fixture (``phi0`` or ``phi6``)."""
    if not name.endswith(".cnf"):
        name += ".cnf"
    return resources.files("hedonica").joinpath("data", name).read_text(encoding="utf-8")


def fixture(name: str) -> Formula:
    return parse_cnf(fixture_text(name))


def game_to_dict(game: HedonicGame, gadget: GadgetGame | None = None) -> dict:
    p = game.profile
    agents = []
    for i in range(p.n):
        entry = {"index": i, "label": p.labels[i] if p.labels[i] is not None else str(i)}
        if gadget is not None:
            entry["role"] = gadget.roles[i].to_dict()
        agents.append(entry)
    data = {
        "n": p.n,
        "agents": agents,
        "rankings": [[sorted(cls) for cls in r] for r in p.rankings],
        "family": game.family.value,
        "params": dict(game.params),
        "roles": {},
    }
    if gadget is not None:
        data["roles"] = {
            "theorem": gadget.theorem.value,
            "formula": {"num_vars": gadget.formula.num_vars, "clauses": [list(c) for c in gadget.formula.clauses]},
        }
    return data


def game_from_dict(data: dict) -> tuple:
    """Return ``(game, gadget or None)``; the gadget is rebuilt from the roles table and cross-checked."""
    try:
        n = int(data["n"])
        rankings = data["rankings"]
        labels = [a["label"] for a in sorted(data.get("agents", []), key=lambda a: a["index"])] or ()
        profile = OrderingProfile(n, tuple(tuple(frozenset(c) for c in r) for r in rankings), tuple(labels))
        game = HedonicGame(profile, data["family"], data.get("params") or None)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed game: {exc}") from None
    roles = data.get("roles") or {}
    gadget = None
    if roles.get("theorem") and roles.get("formula"):
        f = roles["formula"]
        try:
            formula = Formula(int(f["num_vars"]), tuple(tuple(int(l) for l in c) for c in f["clauses"]))
            gadget = build_gadget(roles["theorem"], formula)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed roles table: {exc}") from None
        if gadget.profile.rankings != profile.rankings:
            raise InputError("roles table does not match the rankings")
    return game, gadget


def load_game(path: str) -> tuple:
    return game_from_dict(_read_json(path))


def partition_to_list(partition) -> list:
    return [sorted(b) for b in make_partition(partition)]


def partition_from_list(data, n: int):
    if not isinstance(data, list) or not all(isinstance(b, list) for b in data):
        raise InputError("partition must be an array of arrays of agent indices")
    problem = validate_partition(data, n)
    if problem:
        raise InputError(f"invalid partition: {problem}")
    return make_partition(data)


def load_partition(path: str, n: int):
    return partition_from_list(_read_json(path), n)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
