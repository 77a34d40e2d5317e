"""Channel simulation: canonical recovery maps and end-to-end EA checks.

Recovery follows the standard construction from the error correlation
matrix: diagonalize it, rotate the error set into orthogonal channels F_k,
and take Kraus operators P F_k^dag / sqrt(d_k), completed to a
trace-preserving map on the full space.  Verification then drives encoded
states through error + recovery and demands unit fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import analysis, qla, structure
from .codes import PauliOperator, QuantumCode, projector
from .config import (COMPLETION_TOL, FIDELITY_SLACK, MAX_SUBSET, RANK_TOL,
                     RESIDUAL_TOL)
from .errors import (ContractError, ModelMismatchError, NotCorrectableError,
                     SizeError)

NOISELESS = "noiseless"
NOISY = "noisy"

_TRACE_PRESERVATION_TOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    operators: tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self):
        if not self.operators:
            raise ContractError("channel needs at least one Kraus operator")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for op in self.operators:
            if op.shape != (self.dim, self.dim):
                raise ContractError(f"Kraus operator shape {op.shape} != {(self.dim,) * 2}")
            total += op.conj().T @ op
        defect = float(np.linalg.norm(total - np.eye(self.dim)))
        if defect > _TRACE_PRESERVATION_TOL * max(1.0, np.sqrt(self.dim)):
            raise ContractError(f"channel is not trace preserving (defect {defect:.2e})")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        for op in self.operators:
            out += op @ rho @ op.conj().T
        return out

    def apply_to_pure(self, state: np.ndarray) -> np.ndarray:
        """Channel output on |state><state|, returned as a density matrix."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for op in self.operators:
            v = op @ state
            out += np.outer(v, v.conj())
        return out


def replacer_channel(n: int, subset) -> KrausChannel:
    """Erasure modelled as replacement: the subset is reset to maximally mixed.

    Kraus operators are the embedded Pauli basis on the subset scaled by
    1/2^b; the output marginal on the subset is I/2^b regardless of input.
    """
    subset = tuple(subset)
    if len(subset) > MAX_SUBSET:
        raise SizeError(f"replacer channel on {len(subset)} qubits exceeds cap {MAX_SUBSET}")
    qla.check_dim(1 << n)
    scale = 1.0 / (1 << len(subset))
    ops = tuple(p.matrix() * scale for p in analysis.pauli_basis_on(n, subset))
    return KrausChannel(operators=ops, dim=1 << n)


def kl_recovery(code: QuantumCode, errors,
                residual_tol: float = RESIDUAL_TOL,
                rank_tol: float = RANK_TOL) -> KrausChannel:
    """Canonical recovery channel for a correctable discrete error set.

    errors: dense matrices or PauliOperators.  Raises NotCorrectableError
    when the correlation-matrix residual shows the set is not correctable.
    """
    mats = [e.matrix() if isinstance(e, PauliOperator) else np.asarray(e, dtype=complex)
            for e in errors]
    if not mats:
        raise ContractError("empty error set")
    dim = 1 << code.n
    k = code.k_dim
    basis = code.basis_matrix                      # dim x K
    images = [m @ basis for m in mats]             # each dim x K

    lam = np.zeros((len(mats), len(mats)), dtype=complex)
    worst = 0.0
    eye_k = np.eye(k)
    for a, b in product(range(len(mats)), repeat=2):
        if b < a:
            continue
        block = images[a].conj().T @ images[b]     # K x K
        lam[a, b] = np.trace(block) / k
        lam[b, a] = np.conj(lam[a, b])
        worst = max(worst, float(np.linalg.norm(block - lam[a, b] * eye_k)))
    if worst > residual_tol:
        raise NotCorrectableError(
            f"error set violates the correctability condition (residual {worst:.2e})")

    vals, vecs = qla.eig_hermitian(lam)
    vals = np.maximum(vals, 0.0)
    cutoff = rank_tol * vals[0] if vals.size and vals[0] > 0 else 0.0
    proj = projector(code)
    kraus = []
    for idx in range(vals.size):
        if vals[idx] <= cutoff:
            break
        f_op = sum(vecs[j, idx] * mats[j] for j in range(len(mats)))
        kraus.append(proj @ f_op.conj().T / np.sqrt(vals[idx]))

    total = np.zeros((dim, dim), dtype=complex)
    for op in kraus:
        total += op.conj().T @ op
    gap = np.eye(dim) - total
    if float(np.linalg.norm(gap)) > COMPLETION_TOL * dim:
        kraus.append(qla.sqrtm_psd(gap))
    return KrausChannel(operators=tuple(kraus), dim=dim)


@dataclass(frozen=True)
class VerificationReport:
    strategy: str
    model: str
    error_weight: int
    cases_run: int
    min_fidelity: float
    failures: tuple[tuple[str, float], ...]
    exploratory: bool = False

    @property
    def passed(self) -> bool:
        return self.min_fidelity >= 1.0 - FIDELITY_SLACK


def _paulis_up_to_weight(n: int, qubits, weight: int):
    """Phase-free Paulis with support in qubits and weight at most the bound."""
    ops = [PauliOperator(n, 0, 0)]
    for w in range(1, weight + 1):
        for support in combinations(sorted(qubits), w):
            for letters in product(((1, 0), (0, 1), (1, 1)), repeat=w):
                x = z = 0
                for q, (lx, lz) in zip(support, letters):
                    bit = 1 << (n - q)
                    x |= bit * lx
                    z |= bit * lz
                ops.append(PauliOperator(n, x, z))
    return ops


def _test_states(code: QuantumCode):
    states = [(f"basis_{i}", code.basis[i]) for i in range(code.k_dim)]
    if code.k_dim > 1:
        sup = code.basis.sum(axis=0) / np.sqrt(code.k_dim)
        states.append(("superposition", sup))
    return states


def verify_ea(ea: structure.EACode, dec: structure.StructureDecomposition,
              code: QuantumCode, model: str, weight: int,
              exploratory: bool = False,
              residual_tol: float = RESIDUAL_TOL,
              rank_tol: float = RANK_TOL) -> VerificationReport:
    """Drive encoded states through weight-w errors and canonical recovery.

    noiseless: errors act on the kept qubits only (the receiver's share is
    pristine).  noisy: errors act anywhere.  The compressed strategy only
    supports the noiseless model; pass exploratory=True to run it under
    noise anyway: errors then act on the kept qubits and on the carrier
    qubits of the compressed share before the receiver re-expands it, and
    the results are reported without any guarantee (fidelities below one
    are expected; that is the cost the compression trades away).
    """
    if model not in (NOISELESS, NOISY):
        raise ContractError(f"unknown error model {model!r}")
    if weight < 0:
        raise ContractError("error weight must be nonnegative")
    compressed = ea.strategy == structure.COMPRESSED
    if compressed and model == NOISY and not exploratory:
        raise ModelMismatchError(
            "the compressed strategy assumes noiseless erased qubits; "
            "rerun with exploratory=True to probe it under noise anyway")

    split = dec.split
    allowed = split.kept if model == NOISELESS else tuple(range(1, split.n + 1))
    recovery_set = _paulis_up_to_weight(split.n, allowed, weight)
    recovery = kl_recovery(code, recovery_set,
                           residual_tol=residual_tol, rank_tol=rank_tol)
    apply_errors = [p for p in recovery_set if p.weight == weight]
    if not apply_errors:
        apply_errors = [PauliOperator(split.n, 0, 0)]

    states = _test_states(code)
    if compressed:
        prepared = _compressed_states(ea, dec, code, states)
    else:
        prepared = [(label, s.copy()) for label, s in states]

    perm = qla.permutation_indices(split.n, split.order)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)

    share_noise = compressed and model == NOISY
    n_kept = len(split.kept)
    if share_noise:
        n_virtual = n_kept + ea.ebit_cost
        virt = _paulis_up_to_weight(n_virtual, range(1, n_virtual + 1), weight)
        apply_errors = [p for p in virt if p.weight == weight]
        if not apply_errors:
            apply_errors = [PauliOperator(n_virtual, 0, 0)]

    cases = 0
    min_fid = 1.0
    failures: dict[str, float] = {}
    for err in apply_errors:
        letters = "".join(err.to_string()[1]) if err.n else "I"
        if share_noise:
            err_label = letters[:n_kept] + "|" + letters[n_kept:]
        else:
            err_label = letters
        for (label, target), (_, sent) in zip(states, prepared):
            if compressed:
                if model == NOISELESS:
                    corrupted = _restrict_to_kept(err, split).apply(sent)
                else:
                    corrupted = _share_noise_corrupt(sent, err, ea)
                full = _compressed_expand(corrupted, ea, inv)
            else:
                full = err.apply(sent)
            fid = 0.0
            for op in recovery.operators:
                amp = np.vdot(target, op @ full)
                fid += float(np.abs(amp) ** 2)
            cases += 1
            min_fid = min(min_fid, fid)
            if fid < 1.0 - FIDELITY_SLACK:
                failures[err_label] = min(failures.get(err_label, 1.0), fid)
    return VerificationReport(
        strategy=ea.strategy, model=model, error_weight=weight,
        cases_run=cases, min_fidelity=min_fid,
        failures=tuple(sorted(failures.items())), exploratory=exploratory and compressed)


def _compressed_states(ea, dec, code, states):
    """Compressed-representation states as kept x receiver matrices."""
    r, c = dec.ancilla_dim, ea.receiver_dim
    psi_small = ea.shared_state.reshape(r, c)
    blocks = dec.blocks()
    out = []
    for label, s in states:
        weights = code.basis.conj() @ s        # coefficients in the codeword basis
        mat = sum(w * (blk @ psi_small) for w, blk in zip(weights, blocks))
        out.append((label, mat))
    return out


def _restrict_to_kept(err: PauliOperator, split: qla.SubsystemSplit) -> PauliOperator:
    """Rewrite a Pauli supported on kept qubits as an operator on the kept factor."""
    kept = split.kept
    pos = {q: j + 1 for j, q in enumerate(kept)}
    m = len(kept)
    x_loc = z_loc = 0
    for q in err.support:
        if q not in pos:
            raise ContractError(f"error touches erased qubit {q}")
        bit = 1 << (m - pos[q])
        if err.x_bits >> (split.n - q) & 1:
            x_loc |= bit
        if err.z_bits >> (split.n - q) & 1:
            z_loc |= bit
    return PauliOperator(m, x_loc, z_loc, err.phase_exp)


def _share_noise_corrupt(mat: np.ndarray, err: PauliOperator, ea) -> np.ndarray:
    """Noise on the compressed share's carrier qubits, before re-expansion.

    The C-dimensional share rides on ebit_cost qubits; the state is padded
    to that register, hit by the error, and truncated back.  Amplitude
    pushed outside the C-dimensional support is lost (the receiver's
    re-expansion only reads that subspace), which is precisely how the
    compression trades away noisy-model protection.
    """
    c = ea.receiver_dim
    share_dim = 1 << ea.ebit_cost
    padded = np.zeros((mat.shape[0], share_dim), dtype=complex)
    padded[:, :c] = mat
    hit = err.apply(padded.reshape(-1))
    return hit.reshape(mat.shape[0], share_dim)[:, :c]


def _compressed_expand(mat: np.ndarray, ea, inv: np.ndarray) -> np.ndarray:
    """Re-expand the receiver's share through V and undo the qubit permutation."""
    full_perm = (mat @ ea.compress_isometry.T).reshape(-1)
    return full_perm[inv]


def channel_form_check(dec: structure.StructureDecomposition,
                       code: QuantumCode) -> float:
    """Worst deviation between the erasure output and its structured form.

    For a spanning set of pure code states compares
    Tr_B(rho) otimes I/2^b against (U (rho_R otimes Gamma_A) U^dag) otimes
    I/2^b in the permuted frame.  Both sides share the I/2^b factor, so the
    comparison reduces to the kept-side operators; the returned number is
    the full-space Frobenius deviation.
    """
    split = dec.split
    if split.b > MAX_SUBSET:
        raise SizeError(f"erased set of size {split.b} exceeds cap {MAX_SUBSET}")
    k = dec.k_dim
    gamma = dec.ancilla_state
    u = dec.isometry
    worst = 0.0
    for i in range(k):
        for j in range(i, k):
            if i == j:
                combos = [np.eye(k)[i]]
            else:
                e_i, e_j = np.eye(k)[i], np.eye(k)[j]
                combos = [(e_i + e_j) / np.sqrt(2.0), (e_i + 1j * e_j) / np.sqrt(2.0)]
            for w in combos:
                state = w @ code.basis
                mat = qla.bipartite_matrix(state, split)
                lhs_kept = mat @ mat.conj().T
                rho_r = np.outer(w, w.conj())
                rhs_kept = u @ np.kron(rho_r, gamma) @ u.conj().T
                dev = float(np.linalg.norm(lhs_kept - rhs_kept)) / np.sqrt(split.dim_erased)
                worst = max(worst, dev)
    return worst
