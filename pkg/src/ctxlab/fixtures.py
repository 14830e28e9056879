"""Bundled scenario files and their deterministic regeneration.

Running ``python -m ctxlab.fixtures`` rewrites the packaged data files from
the library itself, so the JSON on disk can always be cross-checked against
fresh output.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .contextuality import hardy_embedding_povm
from .errors import ScenarioFileError
from .hilbert import Ket, Space
from .interferometer import build_three_path, dilation_DA, dilation_VH, povm_DA
from .dilation import povm_from_dilation
from .scenario_io import Scenario, load_scenario, save_scenario, scenario_to_dict

FIXTURE_NAMES = ("three-path-VH", "three-path-DA", "hardy")


def fixture_dict(name: str) -> dict:
    """Regenerate a bundled scenario from the library (no file access)."""
    if name == "three-path-VH":
        s = build_three_path()
        d = dilation_VH(s)
        return scenario_to_dict(
            system_dim=3,
            env_dim=2,
            outcomes=d.outcomes,
            phi_init=d.phi_init,
            povm=povm_from_dilation(d),
        )
    if name == "three-path-DA":
        s = build_three_path()
        d = dilation_DA(s)
        return scenario_to_dict(
            system_dim=3,
            env_dim=2,
            outcomes=d.outcomes,
            phi_init=d.phi_init,
            povm=povm_DA(s, merge_A=True),
        )
    if name == "hardy":
        s = build_three_path()
        space = s.system
        basis1 = Ket(space, np.array([1.0, 0.0, 0.0]))
        basis2 = Ket(space, np.array([0.0, 1.0, 0.0]))
        d1 = (s.f - basis1.inner(s.f) * basis1).normalized().with_canonical_phase()
        d2 = (s.f - basis2.inner(s.f) * basis2).normalized().with_canonical_phase()
        p = hardy_embedding_povm(s.f, d1, d2)
        # hardy_state(d1, d2) up to last-ulp SVD noise; stored exactly so the
        # two D overlaps cancel to a clean zero in reports
        paradox = Ket(space, np.ones(3) / np.sqrt(3.0))
        return scenario_to_dict(
            system_dim=3,
            povm=p,
            states={"hardy": paradox},
            hardy=("F", "D1", "D2"),
        )
    raise ScenarioFileError(f"unknown fixture {name!r}; choose one of {FIXTURE_NAMES}")


def fixture_path(name: str) -> Path:
    if name not in FIXTURE_NAMES:
        raise ScenarioFileError(f"unknown fixture {name!r}; choose one of {FIXTURE_NAMES}")
    return Path(str(resources.files("ctxlab") / "data" / f"{name}.json"))


def load_fixture(name: str) -> Scenario:
    return load_scenario(fixture_path(name))


def write_fixtures(directory: Path | None = None) -> list[Path]:
    """Write all bundled fixtures; defaults to the packaged data directory."""
    target = Path(directory) if directory is not None else Path(__file__).parent / "data"
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURE_NAMES:
        path = target / f"{name}.json"
        save_scenario(path, fixture_dict(name))
        written.append(path)
    return written


if __name__ == "__main__":
    for path in write_fixtures():
        entries = json.loads(path.read_text())
        print(f"wrote {path} ({len(entries)} top-level keys)")
