"""Labelled finite-dimensional Hilbert spaces: kets, operators, tensor products.

Joint vectors are stored flat in environment-major order,
``flat_index = env_index * sys_dim + sys_index``, so that the flat vector of
``env (x) sys`` is ``numpy.kron(env, sys)``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import SpaceMismatchError, ValidationError

SYSTEM = "system"
ENVIRONMENT = "environment"
JOINT = "joint"

_KINDS = (SYSTEM, ENVIRONMENT, JOINT)

DEFAULT_TOL = 1e-9


def set_default_tol(tol: float) -> None:
    """Override the global tolerance used when a call does not pass one."""
    global DEFAULT_TOL
    if not tol > 0:
        raise ValidationError("tolerance must be positive", invariant="tolerance")
    DEFAULT_TOL = float(tol)


def resolve_tol(tol: float | None) -> float:
    return DEFAULT_TOL if tol is None else float(tol)


@dataclass(frozen=True)
class Space:
    """A labelled Hilbert space: system, environment, or their tensor product."""

    kind: str
    dim: int
    env_dim: int | None = None
    sys_dim: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown space kind {self.kind!r}", invariant="space-kind")
        if self.dim < 1:
            raise ValidationError("space dimension must be at least 1", invariant="space-dim")
        if self.kind == JOINT:
            if self.env_dim is None or self.sys_dim is None:
                raise ValidationError(
                    "joint spaces need env_dim and sys_dim", invariant="space-dim"
                )
            if self.env_dim < 1 or self.sys_dim < 1 or self.env_dim * self.sys_dim != self.dim:
                raise ValidationError(
                    f"joint dimension {self.dim} != env {self.env_dim} * sys {self.sys_dim}",
                    invariant="space-dim",
                )
        elif self.env_dim is not None or self.sys_dim is not None:
            raise ValidationError(
                "only joint spaces carry factor dimensions", invariant="space-dim"
            )

    @classmethod
    def system(cls, dim: int) -> Space:
        return cls(SYSTEM, dim)

    @classmethod
    def environment(cls, dim: int) -> Space:
        return cls(ENVIRONMENT, dim)

    @classmethod
    def joint(cls, env_dim: int, sys_dim: int) -> Space:
        return cls(JOINT, env_dim * sys_dim, env_dim, sys_dim)


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude entry is real positive.

    Ties pick the first index; the zero vector is returned unchanged.
    """
    v = np.array(vector, dtype=complex).reshape(-1)
    pivot = v[int(np.argmax(np.abs(v)))]
    if abs(pivot) == 0.0:
        return v
    return v * (pivot.conjugate() / abs(pivot))


@dataclass(frozen=True)
class Ket:
    """An immutable vector over a labelled space. Not necessarily normalised."""

    space: Space
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.space.dim:
            raise SpaceMismatchError(
                f"{amps.shape[0]} amplitudes for a dim-{self.space.dim} space"
            )
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise ValidationError("amplitudes must be finite", invariant="finite-amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def _require_same_space(self, other: Ket, what: str) -> None:
        if self.space != other.space:
            raise SpaceMismatchError(f"{what} needs kets on the same space")

    def inner(self, other: Ket) -> complex:
        """<self|other>, conjugate-linear in self."""
        self._require_same_space(other, "inner product")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float | None = None) -> bool:
        return abs(self.norm_sq() - 1.0) <= resolve_tol(tol)

    def normalized(self, tol: float | None = None) -> Ket:
        n = self.norm()
        if n <= resolve_tol(tol):
            raise ValidationError("cannot normalise a zero vector", invariant="normalisable")
        return Ket(self.space, self.amplitudes / n)

    def with_canonical_phase(self) -> Ket:
        return Ket(self.space, fix_phase(self.amplitudes))

    def projector(self) -> np.ndarray:
        """|v><v| as a dense matrix."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __add__(self, other: Ket) -> Ket:
        self._require_same_space(other, "addition")
        return Ket(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: Ket) -> Ket:
        self._require_same_space(other, "subtraction")
        return Ket(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> Ket:
        return Ket(self.space, self.amplitudes * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> Ket:
        return Ket(self.space, -self.amplitudes)


def basis_ket(space: Space, index: int) -> Ket:
    """The index-th canonical basis vector of a space."""
    if not 0 <= index < space.dim:
        raise ValidationError(
            f"basis index {index} outside dim-{space.dim} space", invariant="basis-index"
        )
    amps = np.zeros(space.dim, dtype=complex)
    amps[index] = 1.0
    return Ket(space, amps)


@dataclass(frozen=True)
class Operator:
    """An immutable square matrix acting on a labelled space."""

    space: Space
    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.entries, dtype=complex)
        if mat.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError(
                f"matrix shape {mat.shape} for a dim-{self.space.dim} space"
            )
        if not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
            raise ValidationError("entries must be finite", invariant="finite-entries")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @classmethod
    def identity(cls, space: Space) -> Operator:
        return cls(space, np.eye(space.dim, dtype=complex))

    def hermiticity_residual(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def is_hermitian(self, tol: float | None = None) -> bool:
        return self.hermiticity_residual() <= resolve_tol(tol)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def apply(self, ket: Ket) -> Ket:
        if ket.space != self.space:
            raise SpaceMismatchError("operator and ket live on different spaces")
        return Ket(self.space, self.entries @ ket.amplitudes)


def tensor(env: Ket, sys: Ket) -> Ket:
    """Tensor product of an environment ket with a system ket (env-major flat order)."""
    if env.space.kind != ENVIRONMENT or sys.space.kind != SYSTEM:
        raise SpaceMismatchError(
            f"tensor expects (environment, system) kets, got ({env.space.kind}, {sys.space.kind})"
        )
    joint = Space.joint(env.space.dim, sys.space.dim)
    return Ket(joint, np.kron(env.amplitudes, sys.amplitudes))


def partial_inner_env(phi: Ket, m: Ket) -> Ket:
    """Contract a joint vector with an environment bra, leaving a system vector.

    Parameters
    ----------
    phi : Ket
        Environment ket; enters as the bra <phi|.
    m : Ket
        Joint ket over the matching environment factor.

    Returns
    -------
    Ket
        System vector with amplitudes ``sum_e conj(phi[e]) * m[e, s]``.
    """
    if phi.space.kind != ENVIRONMENT:
        raise SpaceMismatchError(f"expected an environment ket, got {phi.space.kind}")
    if m.space.kind != JOINT:
        raise SpaceMismatchError(f"expected a joint ket, got {m.space.kind}")
    if m.space.env_dim != phi.space.dim:
        raise SpaceMismatchError(
            f"environment dim {phi.space.dim} does not match joint factor {m.space.env_dim}"
        )
    table = m.amplitudes.reshape(m.space.env_dim, m.space.sys_dim)
    return Ket(Space.system(m.space.sys_dim), phi.amplitudes.conj() @ table)


def gram(vectors: Sequence[Ket]) -> np.ndarray:
    """Hermitian Gram matrix G[i, j] = <v_i|v_j> of same-space vectors."""
    if len(vectors) == 0:
        raise ValidationError("gram of an empty vector list", invariant="nonempty")
    space = vectors[0].space
    for v in vectors[1:]:
        if v.space != space:
            raise SpaceMismatchError("gram needs vectors on one common space")
    stack = np.stack([v.amplitudes for v in vectors])
    return stack.conj() @ stack.T


def eigh(op: Operator, tol: float | None = None) -> tuple[np.ndarray, list[Ket]]:
    """Eigendecomposition of a Hermitian operator.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvector kets. Raises if the operator is not Hermitian within tol.
    """
    residual = op.hermiticity_residual()
    if residual > resolve_tol(tol):
        raise ValidationError(
            f"operator is not Hermitian (residual {residual:.3e})", invariant="hermiticity"
        )
    values, vectors = np.linalg.eigh(op.entries)
    return values, [Ket(op.space, vectors[:, k]) for k in range(values.shape[0])]
