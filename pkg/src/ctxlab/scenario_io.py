"""JSON scenario files.

Complex amplitudes are encoded as [re, im] pairs. A file may carry a POVM
directly, a dilation (outcomes + phi_init), or both; states are labelled pure
vectors or density matrices; an optional hardy block names an F/D1/D2 triple.

Schema (version 1)::

    {
      "version": 1,
      "system_dim": 3,
      "env_dim": 2,                       # required with outcomes/phi_init
      "outcomes": [{"label": "...", "vector": [[re, im], ...]}, ...],
      "phi_init": [[re, im], ...],
      "povm": [{"label": "...", "vector": ...} | {"label": "...", "matrix": ...}, ...],
      "states": [{"label": "...", "vector": ...} | {"label": "...", "matrix": ...}, ...],
      "hardy": {"f": "...", "d1": "...", "d2": "..."}
    }

Parse and schema problems raise ScenarioFileError; physical invariants are
enforced by the constructed objects themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ScenarioFileError
from .dilation import Dilation, JointOutcomeSet, povm_from_dilation
from .hilbert import Ket, Operator, Space
from .povm import DensityMatrix, Povm, PovmElement

SCHEMA_VERSION = 1

_TOP_KEYS = {"version", "system_dim", "env_dim", "outcomes", "phi_init", "povm", "states", "hardy"}


def encode_vector(amplitudes: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(amplitudes, dtype=complex)]


def encode_matrix(entries: np.ndarray) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(entries, dtype=complex)]


def _decode_complex(obj: object, what: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ScenarioFileError(f"{what}: expected an [re, im] pair, got {obj!r}")
    return complex(obj[0], obj[1])


def decode_vector(obj: object, length: int, what: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != length:
        raise ScenarioFileError(f"{what}: expected {length} [re, im] pairs")
    return np.array([_decode_complex(entry, what) for entry in obj], dtype=complex)


def decode_matrix(obj: object, dim: int, what: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ScenarioFileError(f"{what}: expected a {dim}x{dim} matrix")
    return np.stack([decode_vector(row, dim, what) for row in obj])


@dataclass(frozen=True)
class Scenario:
    """Parsed contents of one scenario file."""

    system_dim: int
    env_dim: int | None = None
    outcomes: JointOutcomeSet | None = None
    phi_init: Ket | None = None
    povm: Povm | None = None
    states: dict[str, Ket | DensityMatrix] = field(default_factory=dict)
    hardy: tuple[str, str, str] | None = None

    def dilation(self) -> Dilation:
        if self.outcomes is None or self.phi_init is None:
            raise ScenarioFileError("the file carries no dilation (outcomes + phi_init)")
        return Dilation(self.outcomes, self.phi_init)

    def resolve_povm(self) -> Povm:
        """The file's POVM, deriving it from the dilation when absent."""
        if self.povm is not None:
            return self.povm
        if self.outcomes is not None and self.phi_init is not None:
            return povm_from_dilation(self.dilation())
        raise ScenarioFileError("the file carries neither a povm nor a dilation")


def _positive_int(raw: dict, key: str) -> int:
    value = raw.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ScenarioFileError(f"{key} must be a positive integer")
    return value


def _labelled_entries(raw: object, section: str) -> list[dict]:
    if not isinstance(raw, list):
        raise ScenarioFileError(f"{section} must be a list")
    seen = set()
    entries = []
    for item in raw:
        if not isinstance(item, dict) or not isinstance(item.get("label"), str):
            raise ScenarioFileError(f"{section}: every entry needs a string label")
        if item["label"] in seen:
            raise ScenarioFileError(f"{section}: duplicate label {item['label']!r}")
        seen.add(item["label"])
        entries.append(item)
    return entries


def scenario_from_dict(raw: dict, tol: float | None = None) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioFileError("scenario file must hold a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ScenarioFileError(f"unknown keys {sorted(unknown)}")
    if raw.get("version") != SCHEMA_VERSION:
        raise ScenarioFileError(f"unsupported version {raw.get('version')!r}")
    system_dim = _positive_int(raw, "system_dim")

    env_dim: int | None = None
    outcomes = phi_init = None
    if "outcomes" in raw or "phi_init" in raw:
        if "outcomes" not in raw or "phi_init" not in raw:
            raise ScenarioFileError("outcomes and phi_init must appear together")
        env_dim = _positive_int(raw, "env_dim")
        joint = Space.joint(env_dim, system_dim)
        pairs = []
        for item in _labelled_entries(raw["outcomes"], "outcomes"):
            vec = decode_vector(
                item.get("vector"), joint.dim, f"outcome {item['label']!r}"
            )
            pairs.append((item["label"], Ket(joint, vec)))
        outcomes = JointOutcomeSet(joint, tuple(pairs), tol=tol)
        phi_init = Ket(
            Space.environment(env_dim), decode_vector(raw["phi_init"], env_dim, "phi_init")
        )
    elif "env_dim" in raw:
        env_dim = _positive_int(raw, "env_dim")

    povm = None
    if "povm" in raw:
        space = Space.system(system_dim)
        elements = []
        for item in _labelled_entries(raw["povm"], "povm"):
            if ("vector" in item) == ("matrix" in item):
                raise ScenarioFileError(
                    f"povm element {item['label']!r} needs exactly one of vector/matrix"
                )
            if "vector" in item:
                vec = decode_vector(item["vector"], system_dim, f"povm {item['label']!r}")
                elements.append(PovmElement(item["label"], vector=Ket(space, vec)))
            else:
                mat = decode_matrix(item["matrix"], system_dim, f"povm {item['label']!r}")
                elements.append(PovmElement(item["label"], operator=Operator(space, mat)))
        povm = Povm(system_dim, tuple(elements))

    states: dict[str, Ket | DensityMatrix] = {}
    if "states" in raw:
        space = Space.system(system_dim)
        for item in _labelled_entries(raw["states"], "states"):
            if ("vector" in item) == ("matrix" in item):
                raise ScenarioFileError(
                    f"state {item['label']!r} needs exactly one of vector/matrix"
                )
            if "vector" in item:
                vec = decode_vector(item["vector"], system_dim, f"state {item['label']!r}")
                states[item["label"]] = Ket(space, vec)
            else:
                mat = decode_matrix(item["matrix"], system_dim, f"state {item['label']!r}")
                states[item["label"]] = DensityMatrix(Operator(space, mat))

    hardy = None
    if "hardy" in raw:
        block = raw["hardy"]
        if not isinstance(block, dict) or set(block) != {"f", "d1", "d2"}:
            raise ScenarioFileError("hardy must map exactly the keys f, d1, d2")
        if not all(isinstance(block[k], str) for k in ("f", "d1", "d2")):
            raise ScenarioFileError("hardy labels must be strings")
        hardy = (block["f"], block["d1"], block["d2"])

    return Scenario(system_dim, env_dim, outcomes, phi_init, povm, states, hardy)


def load_scenario(path: str | Path, tol: float | None = None) -> Scenario:
    """Read and validate a scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioFileError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw, tol)


def scenario_to_dict(
    system_dim: int,
    env_dim: int | None = None,
    outcomes: JointOutcomeSet | None = None,
    phi_init: Ket | None = None,
    povm: Povm | None = None,
    states: dict[str, Ket | DensityMatrix] | None = None,
    hardy: tuple[str, str, str] | None = None,
) -> dict:
    """Assemble a JSON-ready scenario dict from library objects."""
    raw: dict = {"version": SCHEMA_VERSION, "system_dim": int(system_dim)}
    if env_dim is not None:
        raw["env_dim"] = int(env_dim)
    if outcomes is not None:
        raw["outcomes"] = [
            {"label": label, "vector": encode_vector(ket.amplitudes)}
            for label, ket in outcomes.outcomes
        ]
    if phi_init is not None:
        raw["phi_init"] = encode_vector(phi_init.amplitudes)
    if povm is not None:
        raw["povm"] = [
            {"label": el.label, "vector": encode_vector(el.vector.amplitudes)}
            if el.is_vector
            else {"label": el.label, "matrix": encode_matrix(el.operator.entries)}
            for el in povm.elements
        ]
    if states:
        raw["states"] = [
            {"label": label, "vector": encode_vector(state.amplitudes)}
            if isinstance(state, Ket)
            else {"label": label, "matrix": encode_matrix(state.matrix)}
            for label, state in states.items()
        ]
    if hardy is not None:
        raw["hardy"] = {"f": hardy[0], "d1": hardy[1], "d2": hardy[2]}
    return raw


def save_scenario(path: str | Path, raw: dict) -> None:
    Path(path).write_text(json.dumps(raw, indent=2) + "\n")
