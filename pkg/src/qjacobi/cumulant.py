"""Restricted cumulant decomposition of high-rank fermionic terms.

Against a single-determinant reference the contraction <a+_r a_r> is a
Kronecker delta, so decomposing only the spectator part of a term is a sum
over which occupied spectator pair gets contracted, each removal carrying a
1/l weight.  The recursion stops once the whole term (pure part included) is
two-body, or earlier when no spectators remain.
"""

from __future__ import annotations

from .fermion import FermionOperator, Key, ZERO_FLOOR, classify_indices, excitation_rank


def _block_sign(pure: tuple[int, ...], spectators: tuple[int, ...]) -> int:
    # parity of sorting the written order (pure block, spectator block)
    inv = 0
    for r in spectators:
        for p in pure:
            if p > r:
                inv += 1
    return -1 if inv & 1 else 1


def _factored_sign(pure_cre, pure_ann, spectators) -> int:
    """Sign relating the canonical key to its pure x spectator factored form."""
    return _block_sign(pure_cre, spectators) * _block_sign(pure_ann, spectators)


def _emit(out: dict[Key, float], pure_cre, pure_ann, spectators, coeff: float):
    cre = tuple(sorted(pure_cre + spectators))
    ann = tuple(sorted(pure_ann + spectators))
    out[(cre, ann)] = out.get((cre, ann), 0.0) + coeff * _factored_sign(pure_cre, pure_ann, spectators)


def _contract(out: dict[Key, float], pure_cre, pure_ann, spectators, coeff: float):
    rank = len(pure_cre) + len(spectators)
    if rank <= 2 or not spectators:
        _emit(out, pure_cre, pure_ann, spectators, coeff)
        return
    l = len(spectators)
    w = coeff / l
    for j in range(l):
        _contract(out, pure_cre, pure_ann, spectators[:j] + spectators[j + 1:], w)


def cumulant_decompose(op: FermionOperator, kappa: float, reference: int,
                       floor: float = ZERO_FLOOR) -> FermionOperator:
    """Decompose rank > 2 terms with |h| < kappa; keep everything else.

    Terms whose spectator block touches an orbital unoccupied in the
    reference are dropped outright (their contraction vanishes on the HF
    state).  The HF expectation value of every surviving term is preserved
    exactly by the 1/l weights.
    """
    out: dict[Key, float] = {}
    for key, h in op.terms.items():
        if excitation_rank(key) <= 2 or abs(h) >= kappa:
            out[key] = out.get(key, 0.0) + h
            continue
        pure_cre, pure_ann, spectators = classify_indices(key)
        if not spectators:
            out[key] = out.get(key, 0.0) + h
            continue
        if any(not reference >> r & 1 for r in spectators):
            continue
        # move to the factored E^{pure,spect} form, contract, fold signs back
        h_factored = h * _factored_sign(pure_cre, pure_ann, spectators)
        _contract(out, pure_cre, pure_ann, spectators, h_factored)
    return FermionOperator(out, op.constant).pruned(floor)
