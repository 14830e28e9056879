"""POVMs over a system space and the statistics of context selection.

Rank-1 elements are stored as system-space vectors with a canonical global
phase (largest-magnitude amplitude real positive); coarse-grained elements may
be full operators. An element's squared norm is both its completeness weight
and the probability that the environment selects its measurement context.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import SpaceMismatchError, UnknownLabelError, ValidationError
from .hilbert import SYSTEM, Ket, Operator, Space, fix_phase, gram, resolve_tol


@dataclass(frozen=True)
class PovmElement:
    """One labelled POVM element: a system vector or a positive operator."""

    label: str
    vector: Ket | None = None
    operator: Operator | None = None

    def __post_init__(self) -> None:
        if (self.vector is None) == (self.operator is None):
            raise ValidationError(
                f"element {self.label!r} needs exactly one of vector/operator",
                invariant="element-payload",
            )
        payload = self.vector if self.vector is not None else self.operator
        if payload.space.kind != SYSTEM:
            raise SpaceMismatchError(f"element {self.label!r} must live on a system space")
        if self.operator is not None and not self.operator.is_hermitian():
            raise ValidationError(
                f"element {self.label!r} is not Hermitian", invariant="hermiticity"
            )

    @property
    def is_vector(self) -> bool:
        return self.vector is not None

    @property
    def dim(self) -> int:
        payload = self.vector if self.vector is not None else self.operator
        return payload.space.dim

    def weight(self) -> float:
        """<lambda|lambda> for vectors, the trace for operators."""
        if self.vector is not None:
            return self.vector.norm_sq()
        return float(self.operator.trace().real)

    def matrix(self) -> np.ndarray:
        """The element as a dense positive operator."""
        if self.vector is not None:
            return self.vector.projector()
        return np.array(self.operator.entries)


@dataclass(frozen=True)
class Povm:
    """An ordered, labelled POVM on a system space.

    Construction does not enforce completeness, so partial collections can be
    inspected; ``completeness_check`` reports the residual and
    ``validate_povm`` raises on violations.
    """

    system_dim: int
    elements: tuple[PovmElement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValidationError("a POVM needs at least one element", invariant="nonempty")
        labels = [el.label for el in self.elements]
        if len(set(labels)) != len(labels):
            raise ValidationError("outcome labels must be unique", invariant="unique-labels")
        for el in self.elements:
            if el.dim != self.system_dim:
                raise SpaceMismatchError(
                    f"element {el.label!r} has dim {el.dim}, POVM has {self.system_dim}"
                )

    @classmethod
    def from_vectors(
        cls,
        labelled_vectors: Sequence[tuple[str, Ket | np.ndarray]],
        system_dim: int | None = None,
    ) -> Povm:
        """Build a rank-1 POVM, canonicalising each vector's global phase."""
        elements = []
        for label, vec in labelled_vectors:
            amps = vec.amplitudes if isinstance(vec, Ket) else vec
            amps = fix_phase(np.asarray(amps, dtype=complex))
            if system_dim is None:
                system_dim = amps.shape[0]
            elements.append(PovmElement(str(label), vector=Ket(Space.system(system_dim), amps)))
        if system_dim is None:
            raise ValidationError("a POVM needs at least one element", invariant="nonempty")
        return cls(system_dim, tuple(elements))

    def labels(self) -> tuple[str, ...]:
        return tuple(el.label for el in self.elements)

    def element(self, label: str) -> PovmElement:
        for el in self.elements:
            if el.label == label:
                return el
        raise UnknownLabelError(f"no outcome labelled {label!r}")

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class DensityMatrix:
    """A positive, unit-trace system operator used as an input state."""

    op: Operator

    def __post_init__(self) -> None:
        if self.op.space.kind != SYSTEM:
            raise SpaceMismatchError("density matrices live on system spaces")
        tol = resolve_tol(None)
        if not self.op.is_hermitian(tol):
            raise ValidationError("density matrix is not Hermitian", invariant="hermiticity")
        low = float(np.linalg.eigvalsh(self.op.entries)[0])
        if low < -tol:
            raise ValidationError(
                f"density matrix has eigenvalue {low:.3e} < 0", invariant="positivity"
            )
        tr = self.op.trace().real
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"trace {tr!r} != 1", invariant="unit-trace")

    @classmethod
    def from_ket(cls, psi: Ket, tol: float | None = None) -> DensityMatrix:
        if not psi.is_normalized(tol):
            raise ValidationError(
                "pure states must be normalised", invariant="state-normalisation"
            )
        return cls(Operator(psi.space, psi.projector()))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> DensityMatrix:
        mat = np.asarray(matrix, dtype=complex)
        return cls(Operator(Space.system(mat.shape[0]), mat))

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries

    @property
    def dim(self) -> int:
        return self.op.space.dim


def completeness_check(p: Povm) -> float:
    """Max-entry residual of (sum of elements) - identity."""
    total = np.zeros((p.system_dim, p.system_dim), dtype=complex)
    for el in p.elements:
        total += el.matrix()
    return float(np.abs(total - np.eye(p.system_dim)).max())


def validate_povm(p: Povm, tol: float | None = None) -> None:
    """Raise unless the POVM is complete with well-bounded elements."""
    tol = resolve_tol(tol)
    for el in p.elements:
        if el.is_vector:
            w = el.weight()
            if w > 1.0 + tol:
                raise ValidationError(
                    f"element {el.label!r} has weight {w!r} > 1", invariant="element-bounds"
                )
        else:
            eigs = np.linalg.eigvalsh(el.operator.entries)
            if eigs[0] < -tol or eigs[-1] > 1.0 + tol:
                raise ValidationError(
                    f"element {el.label!r} has eigenvalues outside [0, 1]",
                    invariant="element-bounds",
                )
    residual = completeness_check(p)
    if residual > tol:
        raise ValidationError(
            f"POVM does not sum to identity (residual {residual:.3e})",
            invariant="completeness",
        )


def _state_density(state: Ket | DensityMatrix, dim: int, tol: float | None) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        if state.dim != dim:
            raise SpaceMismatchError(f"state dim {state.dim} != system dim {dim}")
        return state.matrix
    if state.space.kind != SYSTEM or state.space.dim != dim:
        raise SpaceMismatchError("state must be a system ket of the POVM's dimension")
    if not state.is_normalized(tol):
        raise ValidationError("pure states must be normalised", invariant="state-normalisation")
    return state.projector()


def probability(p: Povm, state: Ket | DensityMatrix, label: str, tol: float | None = None) -> float:
    """Outcome probability <lambda|rho|lambda> (vector) or tr(E rho) (operator)."""
    el = p.element(label)
    tol = resolve_tol(tol)
    if el.is_vector:
        amps = el.vector.amplitudes
        if isinstance(state, DensityMatrix):
            rho = _state_density(state, p.system_dim, tol)
            value = float(np.vdot(amps, rho @ amps).real)
        else:
            _state_density(state, p.system_dim, tol)
            value = float(abs(np.vdot(amps, state.amplitudes)) ** 2)
    else:
        rho = _state_density(state, p.system_dim, tol)
        value = float(np.trace(el.operator.entries @ rho).real)
    if value < -tol:
        raise ValidationError(f"negative probability {value!r}", invariant="positivity")
    return value


def context_selection_probability(p: Povm, label: str, tol: float | None = None) -> float:
    """Probability that the environment selects this outcome's context.

    For a vector element this is its squared norm; for an operator element it
    is the largest eigenvalue, the supremum of the outcome probability over
    states (an extension that reduces to the trace on rank-1 operators).
    """
    el = p.element(label)
    if el.is_vector:
        return el.weight()
    return float(np.linalg.eigvalsh(el.operator.entries)[-1])


def maximizing_state(p: Povm, label: str, tol: float | None = None) -> DensityMatrix:
    """The pure state attaining the outcome's maximal probability."""
    el = p.element(label)
    tol = resolve_tol(tol)
    if el.is_vector:
        if el.weight() <= tol:
            raise ValidationError(
                f"element {label!r} has zero weight", invariant="nonzero-element"
            )
        return DensityMatrix.from_ket(el.vector.normalized(tol))
    values, vectors = np.linalg.eigh(el.operator.entries)
    if values[-1] <= tol:
        raise ValidationError(f"element {label!r} has zero weight", invariant="nonzero-element")
    if values.shape[0] > 1 and values[-2] > tol:
        raise ValidationError(
            f"element {label!r} is not rank one", invariant="rank-one"
        )
    top = Ket(Space.system(p.system_dim), fix_phase(vectors[:, -1]))
    return DensityMatrix.from_ket(top.normalized(tol))


def rescaled_probability(
    p: Povm, state: Ket | DensityMatrix, label: str, tol: float | None = None
) -> float:
    """Outcome probability divided by its context-selection probability."""
    weight = context_selection_probability(p, label)
    if weight <= resolve_tol(tol):
        raise ValidationError(f"element {label!r} has zero weight", invariant="nonzero-element")
    return probability(p, state, label, tol) / weight


@dataclass(frozen=True)
class ContextRelation:
    """Result of a pairwise context test with the tested magnitude as witness."""

    shared: bool
    witness: float
    test: str
    proportional: bool = False


def _support_projector(el: PovmElement, tol: float) -> np.ndarray:
    values, vectors = np.linalg.eigh(el.matrix())
    cols = vectors[:, values > tol]
    return cols @ cols.conj().T


def share_context(p: Povm, label1: str, label2: str, tol: float | None = None) -> ContextRelation:
    """Whether two outcomes can belong to one measurement context.

    Rank-1 pairs share a context iff their normalised inner-product magnitude
    is 0 (orthogonal) or 1 (proportional, flagged) within tol. Pairs involving
    operator elements share a context iff their support projectors commute;
    the witness is then the spectral norm of the commutator.
    """
    tol = resolve_tol(tol)
    e1, e2 = p.element(label1), p.element(label2)
    for el in (e1, e2):
        if context_selection_probability(p, el.label) <= tol:
            raise ValidationError(
                f"element {el.label!r} has zero weight", invariant="nonzero-element"
            )
    if e1.is_vector and e2.is_vector:
        overlap = abs(e1.vector.normalized(tol).inner(e2.vector.normalized(tol)))
        proportional = overlap >= 1.0 - tol
        return ContextRelation(
            shared=(overlap <= tol or proportional),
            witness=float(overlap),
            test="inner-product",
            proportional=proportional,
        )
    pi1, pi2 = _support_projector(e1, tol), _support_projector(e2, tol)
    commutator = pi1 @ pi2 - pi2 @ pi1
    witness = float(np.linalg.norm(commutator, 2))
    return ContextRelation(shared=(witness <= tol), witness=witness, test="commutator")


@dataclass(frozen=True)
class ContextGraph:
    """Outcome labels as nodes, context-sharing pairs as witnessed edges."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    skipped: tuple[str, ...]

    def has_edge(self, a: str, b: str) -> bool:
        return any({a, b} == {x, y} for x, y, _ in self.edges)

    def degree(self, label: str) -> int:
        return sum(1 for x, y, _ in self.edges if label in (x, y))

    def to_dot(self) -> str:
        """Render as Graphviz DOT with the tested magnitude as an edge attribute."""
        lines = ["graph contexts {"]
        for node in self.nodes:
            lines.append(f'  "{node}";')
        for a, b, witness in self.edges:
            lines.append(f'  "{a}" -- "{b}" [witness="{witness:.12g}"];')
        lines.append("}")
        return "\n".join(lines)


def context_graph(p: Povm, tol: float | None = None) -> ContextGraph:
    """Pairwise context-sharing structure; zero-weight outcomes are skipped."""
    tol = resolve_tol(tol)
    nodes, skipped = [], []
    for el in p.elements:
        weight = el.weight() if el.is_vector else context_selection_probability(p, el.label)
        (nodes if weight > tol else skipped).append(el.label)
    edges = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            relation = share_context(p, a, b, tol)
            if relation.shared:
                edges.append((a, b, relation.witness))
    return ContextGraph(tuple(nodes), tuple(edges), tuple(skipped))


def coarse_grain(
    p: Povm, labels_to_merge: Sequence[str], new_label: str, tol: float | None = None
) -> Povm:
    """Replace a group of outcomes by their sum, kept rank-1 when possible.

    The merged element sits at the first merged label's position. If the sum
    is rank one within tol it is stored back as a scaled unit vector with the
    canonical phase, otherwise as an operator element.
    """
    merge = [str(label) for label in labels_to_merge]
    if not merge:
        raise ValidationError("nothing to merge", invariant="nonempty")
    tol = resolve_tol(tol)
    total = np.zeros((p.system_dim, p.system_dim), dtype=complex)
    for label in merge:
        total += p.element(label).matrix()

    values, vectors = np.linalg.eigh(total)
    if values.shape[0] == 1 or values[-2] <= tol:
        amps = np.sqrt(max(values[-1], 0.0)) * fix_phase(vectors[:, -1])
        merged = PovmElement(new_label, vector=Ket(Space.system(p.system_dim), amps))
    else:
        merged = PovmElement(new_label, operator=Operator(Space.system(p.system_dim), total))

    merge_set = set(merge)
    elements: list[PovmElement] = []
    placed = False
    for el in p.elements:
        if el.label in merge_set:
            if not placed:
                elements.append(merged)
                placed = True
            continue
        elements.append(el)
    return Povm(p.system_dim, tuple(elements))


def basis_mixture_povm(
    bases: Sequence[Sequence[Ket]],
    weights: Sequence[float],
    labels: Sequence[Sequence[str]] | None = None,
    tol: float | None = None,
) -> Povm:
    """One POVM for a random choice among projective bases.

    Parameters
    ----------
    bases : sequence of orthonormal complete system bases
        Each inner sequence must hold ``dim`` mutually orthonormal kets.
    weights : probability vector
        P(basis), nonnegative and summing to one within tol.
    labels : optional per-(basis, outcome) labels
        Defaults to ``"x:a"`` index pairs.

    Returns
    -------
    Povm
        Elements ``sqrt(P(x)) |a_x>``; complete by construction.
    """
    tol = resolve_tol(tol)
    if len(bases) == 0:
        raise ValidationError("at least one basis is required", invariant="nonempty")
    if len(weights) != len(bases):
        raise ValidationError("one weight per basis is required", invariant="weights")
    w = np.asarray(weights, dtype=float)
    if np.any(w < -tol):
        raise ValidationError("weights must be nonnegative", invariant="weights")
    if abs(w.sum() - 1.0) > tol:
        raise ValidationError(f"weights sum to {w.sum()!r} != 1", invariant="weights")

    dim = bases[0][0].space.dim
    pairs: list[tuple[str, Ket]] = []
    for x, basis in enumerate(bases):
        if len(basis) != dim:
            raise ValidationError(
                f"basis {x} has {len(basis)} kets for dim {dim}",
                invariant="basis-completeness",
            )
        residual = float(np.abs(gram(list(basis)) - np.eye(dim)).max())
        if residual > tol:
            raise ValidationError(
                f"basis {x} is not orthonormal (residual {residual:.3e})",
                invariant="basis-orthonormality",
            )
        scale = np.sqrt(max(float(w[x]), 0.0))
        for a, ket in enumerate(basis):
            label = labels[x][a] if labels is not None else f"{x}:{a}"
            pairs.append((label, scale * ket))
    return Povm.from_vectors(pairs, system_dim=dim)
