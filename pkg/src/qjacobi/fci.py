"""Brute-force ground truth: determinant bases, dense matrices, exact eigensolve.

Matrix elements are produced by the same sparse operator action used by the
residual engine, so the two code paths validate each other.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .fermion import FermionOperator, apply_key_to_det
from .hamiltonian import MolecularProblem
from .pauli import PauliOperator, pauli_action_on_det

_HERM_TOL = 1e-10


def enumerate_determinants(n_qubits: int, n_electrons: int, sz: float | None = None) -> tuple[int, ...]:
    """All occupation bitstrings with the given electron count, lexicographic.

    With ``sz`` given (in units of hbar, alpha = even bits), the alpha/beta
    split is fixed to n_alpha - n_beta = 2 sz.
    """
    if sz is None:
        dets = (sum(1 << q for q in c) for c in combinations(range(n_qubits), n_electrons))
        return tuple(sorted(dets))
    twice_sz = round(2 * sz)
    if (n_electrons + twice_sz) % 2:
        raise ValueError("sz incompatible with electron count")
    n_alpha = (n_electrons + twice_sz) // 2
    n_beta = n_electrons - n_alpha
    alphas = range(0, n_qubits, 2)
    betas = range(1, n_qubits, 2)
    dets = []
    for ca in combinations(alphas, n_alpha):
        bits_a = sum(1 << q for q in ca)
        for cb in combinations(betas, n_beta):
            dets.append(bits_a + sum(1 << q for q in cb))
    return tuple(sorted(dets))


class DeterminantBasis:
    """Ordered determinant list with an index map."""

    def __init__(self, determinants):
        self.determinants = tuple(determinants)
        self.index = {d: i for i, d in enumerate(self.determinants)}

    @classmethod
    def build(cls, n_qubits: int, n_electrons: int, sz: float | None = None) -> "DeterminantBasis":
        return cls(enumerate_determinants(n_qubits, n_electrons, sz))

    def __len__(self) -> int:
        return len(self.determinants)


def dense_matrix(op, n_qubits: int, basis: DeterminantBasis | None = None) -> np.ndarray:
    """<nu| op |mu> by sparse action on basis states.

    ``basis=None`` uses the full 2^n space ordered by integer value.  Entries
    landing outside a restricted basis are discarded (the sector projection).
    """
    if basis is None:
        dets = range(1 << n_qubits)
        index = None
        dim = 1 << n_qubits
    else:
        dets = basis.determinants
        index = basis.index
        dim = len(basis)
    mat = np.zeros((dim, dim), dtype=complex)
    if isinstance(op, FermionOperator):
        for j, d in enumerate(dets):
            for key, coeff in op.terms.items():
                res = apply_key_to_det(key, d)
                if res is None:
                    continue
                sign, d2 = res
                i = d2 if index is None else index.get(d2)
                if i is not None:
                    mat[i, j] += coeff * sign
        if op.constant:
            mat += op.constant * np.eye(dim)
    elif isinstance(op, PauliOperator):
        for j, d in enumerate(dets):
            for key, coeff in op.terms.items():
                phase, d2 = pauli_action_on_det(key, d)
                i = d2 if index is None else index.get(d2)
                if i is not None:
                    mat[i, j] += coeff * phase
    else:
        raise TypeError(f"unsupported operator type {type(op).__name__}")
    return mat


def ground_state(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a Hermitian matrix by dense symmetric eigensolve.

    The eigenvector is normalized with its largest-magnitude entry made real
    positive.
    """
    dev = np.max(np.abs(matrix - matrix.conj().T))
    if dev > _HERM_TOL:
        raise ValueError(f"matrix not Hermitian (max deviation {dev:.3e})")
    vals, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2.0)
    vec = vecs[:, 0]
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    vec = vec * phase.conjugate()
    return float(vals[0]), vec


def fci_ground_state(problem: MolecularProblem, sz: float | None = 0.0):
    """FCI energy and vector of a molecular problem in its particle sector."""
    basis = DeterminantBasis.build(problem.n_qubits, problem.n_electrons, sz)
    energy, vec = ground_state(dense_matrix(problem.hamiltonian, problem.n_qubits, basis))
    return energy, vec, basis


def embed_in_full_space(vector: np.ndarray, basis: DeterminantBasis, n_qubits: int) -> np.ndarray:
    """Lift a sector vector onto the full 2^n statevector."""
    full = np.zeros(1 << n_qubits, dtype=complex)
    for amp, det in zip(vector, basis.determinants):
        full[det] = amp
    return full
