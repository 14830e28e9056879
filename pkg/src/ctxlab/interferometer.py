"""A three-path interferometer with a polarisation environment.

Paths are the system (dim 3), polarisation the environment (dim 2). A
half-wave plate sits in one path superposition (F by default) and flips the
polarisation there, so the photon's final polarisation records which
measurement context the path detectors realised: the H/V readout gives two
projective path contexts, while the rotated D/A readout gives entangled
outcomes whose derived POVM mixes context information into the path
statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .hilbert import Ket, Space, basis_ket, resolve_tol, tensor
from .povm import Povm, coarse_grain
from .dilation import Dilation, JointOutcomeSet, povm_from_dilation

_PATH_NAMES = ("1", "2", "3", "S1", "S2", "F")


@dataclass(frozen=True)
class ThreePathScenario:
    """Fixed states of the three-path layout, parameterised by plate placement."""

    system: Space
    environment: Space
    paths: tuple[Ket, Ket, Ket]
    s1: Ket
    s2: Ket
    f: Ket
    h: Ket
    v: Ket
    d: Ket
    a: Ket
    hwp_path: str = "F"


def build_three_path(hwp_path: str = "F") -> ThreePathScenario:
    """The standard layout: S1 = (|2>+|3>)/sqrt2, S2 = (|1>+|3>)/sqrt2, F = (1,1,-1)/sqrt3."""
    if hwp_path not in _PATH_NAMES:
        raise ValidationError(
            f"unknown plate position {hwp_path!r}; choose one of {_PATH_NAMES}",
            invariant="hwp-path",
        )
    system = Space.system(3)
    environment = Space.environment(2)
    p1, p2, p3 = (basis_ket(system, i) for i in range(3))
    inv2 = 1.0 / np.sqrt(2.0)
    scenario = ThreePathScenario(
        system=system,
        environment=environment,
        paths=(p1, p2, p3),
        s1=(p2 + p3) * inv2,
        s2=(p1 + p3) * inv2,
        f=Ket(system, np.array([1.0, 1.0, -1.0]) / np.sqrt(3.0)),
        h=basis_ket(environment, 0),
        v=basis_ket(environment, 1),
        d=Ket(environment, np.array([1.0, 1.0]) * inv2),
        a=Ket(environment, np.array([1.0, -1.0]) * inv2),
        hwp_path=hwp_path,
    )
    return scenario


def _plate_ket(s: ThreePathScenario) -> Ket:
    named = {"1": s.paths[0], "2": s.paths[1], "3": s.paths[2], "S1": s.s1, "S2": s.s2, "F": s.f}
    return named[s.hwp_path]


def hwp_transform(s: ThreePathScenario, psi: Ket) -> Ket:
    """Reflect a path state about the plate's path: psi - 2 <w|psi> w."""
    w = _plate_ket(s)
    return psi - (2.0 * w.inner(psi)) * w


def joint_outcomes_VH(s: ThreePathScenario) -> JointOutcomeSet:
    """Product outcomes of path detection with an H/V polarisation readout.

    V heralds the unmodified path basis, H the plate-reflected one.
    """
    space = Space.joint(2, 3)
    outcomes = [(f"V{i + 1}", tensor(s.v, s.paths[i])) for i in range(3)]
    outcomes += [(f"H{i + 1}", tensor(s.h, hwp_transform(s, s.paths[i]))) for i in range(3)]
    return JointOutcomeSet(space, tuple(outcomes))


def joint_outcomes_DA(s: ThreePathScenario) -> JointOutcomeSet:
    """Entangled outcomes of the same detection with a D/A polarisation readout.

    (D, i) and (A, i) are the +/- combinations of |H> (x) u_H,i and
    |V> (x) u_V,i, where u are the unit context vectors of the H/V readout.
    """
    space = Space.joint(2, 3)
    inv2 = 1.0 / np.sqrt(2.0)
    d_outcomes, a_outcomes = [], []
    for i in range(3):
        u_h = hwp_transform(s, s.paths[i])
        u_v = s.paths[i]
        d_outcomes.append((f"D{i + 1}", (tensor(s.h, u_h) + tensor(s.v, u_v)) * inv2))
        a_outcomes.append((f"A{i + 1}", (tensor(s.h, u_h) - tensor(s.v, u_v)) * inv2))
    return JointOutcomeSet(space, tuple(d_outcomes + a_outcomes))


def dilation_VH(s: ThreePathScenario, phi_init: Ket | None = None) -> Dilation:
    """H/V-readout dilation; the photon enters diagonally polarised by default."""
    return Dilation(joint_outcomes_VH(s), s.d if phi_init is None else phi_init)


def dilation_DA(s: ThreePathScenario, phi_init: Ket | None = None) -> Dilation:
    """D/A-readout dilation; the photon enters diagonally polarised by default."""
    return Dilation(joint_outcomes_DA(s), s.d if phi_init is None else phi_init)


def povm_DA(s: ThreePathScenario, merge_A: bool = True, tol: float | None = None) -> Povm:
    """The D/A-readout POVM for a diagonally polarised photon.

    With ``merge_A`` the three proportional A outcomes are summed into a
    single rank-1 element labelled "A", giving three weight-2/3 path-context
    elements plus one weight-1 element along the plate direction.
    """
    p = povm_from_dilation(dilation_DA(s))
    if merge_A:
        p = coarse_grain(p, ("A1", "A2", "A3"), "A", resolve_tol(tol))
    return p
