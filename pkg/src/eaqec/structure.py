"""Factor a code through an isometry on kept qubits plus a shared state.

For a correctable erased set B every codeword splits as
|i~> = (U otimes I_B)(|i>_R otimes |psi>_AB): the kept qubits carry an
isometric image of a message register R and an ancilla A, while B holds
half of a fixed bipartite state psi_AB.  The construction is direct: reshape
codeword 0 into a kept x erased matrix, SVD it to extract psi and the first
isometry block, then solve the remaining blocks with the pseudoinverse of
psi.  Everything is certified after the fact (isometry and reconstruction
residuals), so a non-correctable set fails loudly rather than returning a
bogus factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis, qla
from .codes import CodeParameters, EAParameters, QuantumCode
from .config import RANK_TOL, RESIDUAL_TOL, UNITARITY_TOL
from .errors import (ConsistencyError, ContractError, NotCorrectableError,
                     StructureViolationError)

PRESEND = "presend"
STRUCTURE = "structure"
COMPRESSED = "compressed"

NOISELESS_AND_NOISY = "noiseless_and_noisy"
NOISELESS_ONLY = "noiseless_only"


@dataclass(frozen=True)
class StructureDecomposition:
    """Certified factorization of a code over a kept/erased split.

    isometry maps the message register (index major) and ancilla (index
    minor) into the kept qubits; shared_state is the ancilla/erased-side
    pure state with the ancilla index major; ancilla_state is its reduced
    density operator on A.
    """

    split: qla.SubsystemSplit
    k_dim: int
    ancilla_dim: int
    isometry: np.ndarray       # dim_kept x (k_dim * ancilla_dim)
    ancilla_state: np.ndarray  # ancilla_dim x ancilla_dim, PSD, unit trace
    shared_state: np.ndarray   # length ancilla_dim * dim_erased
    residual: float            # worst codeword reconstruction error
    isometry_defect: float     # ||U^dag U - I||_F

    def blocks(self):
        """Isometry split into per-codeword blocks U_i."""
        r = self.ancilla_dim
        return [self.isometry[:, i * r:(i + 1) * r] for i in range(self.k_dim)]

    @property
    def ancilla_spectrum(self) -> np.ndarray:
        return np.sort(np.real(np.diag(self.ancilla_state)))[::-1]


def decompose(code: QuantumCode, subset,
              rank_tol: float = RANK_TOL,
              certify_tol: float = RESIDUAL_TOL) -> StructureDecomposition:
    """Build and certify the factorization for one erased set.

    Codeword 0 anchors the gauge.  Raises StructureViolationError when the
    candidate fails certification, which is exactly what happens when the
    subset is not correctable (no valid factorization exists then).
    """
    subset = tuple(subset)
    split = qla.SubsystemSplit(n=code.n, erased=subset)
    k = code.k_dim
    mats = [qla.bipartite_matrix(v, split) for v in code.basis]

    u0, s0, v0h = qla.svd(mats[0])
    r = qla.numerical_rank(s0, rank_tol)
    if r == 0:
        raise ContractError("codeword 0 vanishes; cannot anchor the factorization")
    if r * k > split.dim_kept:
        raise StructureViolationError(
            f"message x ancilla dimension {k}x{r} exceeds kept dimension "
            f"{split.dim_kept}; subset cannot be correctable")
    for i, m in enumerate(mats[1:], start=1):
        ri = qla.numerical_rank(np.linalg.svd(m, compute_uv=False), rank_tol)
        if ri > r:
            raise StructureViolationError(
                f"codeword {i} has kept-side rank {ri} > anchor rank {r}")

    psi_mat = s0[:r, None] * v0h[:r, :]          # r x dim_erased
    psi_pinv = v0h[:r, :].conj().T / s0[:r]      # dim_erased x r
    blocks = [u0[:, :r]]
    blocks += [m @ psi_pinv for m in mats[1:]]
    isometry = np.hstack(blocks)

    gram = isometry.conj().T @ isometry
    defect = float(np.linalg.norm(gram - np.eye(k * r)))
    recon = max(float(np.linalg.norm(m - blk @ psi_mat))
                for m, blk in zip(mats, blocks))
    if recon > certify_tol or defect > certify_tol:
        raise StructureViolationError(
            f"certification failed (reconstruction {recon:.2e}, isometry defect "
            f"{defect:.2e}); subset {subset} is not correctable at this tolerance")

    gamma = psi_mat @ psi_mat.conj().T
    trace_err = abs(float(np.trace(gamma).real) - 1.0)
    if trace_err > 1e-10:
        raise ConsistencyError(f"ancilla state trace off by {trace_err:.2e}")
    return StructureDecomposition(
        split=split, k_dim=k, ancilla_dim=r, isometry=isometry,
        ancilla_state=gamma, shared_state=psi_mat.reshape(-1),
        residual=recon, isometry_defect=defect)


@dataclass(frozen=True)
class EACode:
    """An entanglement-assisted description of a code over a kept/erased split."""

    params: CodeParameters
    strategy: str
    shared_state: np.ndarray   # bipartite resource, sender index major
    sender_dim: int
    receiver_dim: int
    schmidt_rank: int
    ebit_cost: int
    model_validity: str
    compress_isometry: np.ndarray | None = None

    def __post_init__(self):
        if self.strategy not in (PRESEND, STRUCTURE, COMPRESSED):
            raise ContractError(f"unknown strategy {self.strategy!r}")
        if self.model_validity not in (NOISELESS_AND_NOISY, NOISELESS_ONLY):
            raise ContractError(f"unknown model validity {self.model_validity!r}")
        if self.shared_state.shape != (self.sender_dim * self.receiver_dim,):
            raise ContractError("shared state length does not match its two factors")
        if self.ebit_cost != _ebits(self.schmidt_rank):
            raise ContractError("ebit cost must be ceil(log2 of the Schmidt rank)")


def _ebits(schmidt_rank: int) -> int:
    return max(schmidt_rank - 1, 0).bit_length() if schmidt_rank >= 1 else 0


def _ea_params(code_n: int, k: int, d: int, b: int, receiver_dim: int) -> CodeParameters:
    return CodeParameters(
        n=code_n, k_dim=k, distance=d,
        ea=EAParameters(n_sent=code_n - b, k_dim=k, distance=d,
                        receiver_dim=receiver_dim))


def ea_from_structure(dec: StructureDecomposition, distance: int) -> EACode:
    """Uncompressed EA description: the receiver simply holds the erased qubits.

    Valid under both error models since the encoded states are the original
    codewords; the shared resource is psi_AB itself.
    """
    split = dec.split
    c = dec.ancilla_dim
    return EACode(
        params=_ea_params(split.n, dec.k_dim, distance, split.b, split.dim_erased),
        strategy=STRUCTURE, shared_state=dec.shared_state.copy(),
        sender_dim=c, receiver_dim=split.dim_erased, schmidt_rank=c,
        ebit_cost=_ebits(c), model_validity=NOISELESS_AND_NOISY)


def compress(dec: StructureDecomposition, distance: int,
             rank_tol: float = RANK_TOL) -> EACode:
    """Shrink the receiver's share to the Schmidt rank of the shared state.

    The minimal purification psi' = sum_a sqrt(gamma_a) |a>|a> replaces
    psi_AB, and the isometry V (erased <- compressed) rebuilds the original
    share: (I otimes V) psi' = psi.  Only valid when the erased qubits see
    no noise, since errors on B need not commute with V V^dag.
    """
    split = dec.split
    r = dec.ancilla_dim
    psi_mat = dec.shared_state.reshape(r, split.dim_erased)
    weights = np.linalg.norm(psi_mat, axis=1)
    c = qla.numerical_rank(weights, rank_tol)
    if c != r:
        raise ConsistencyError(
            f"Schmidt rank {c} disagrees with ancilla dimension {r}")
    v_embed = (psi_mat / weights[:, None]).conj().T      # dim_erased x c
    defect = float(np.linalg.norm(v_embed.conj().T @ v_embed - np.eye(c)))
    if defect > UNITARITY_TOL * max(1.0, math.sqrt(c)):
        raise ConsistencyError(f"compression map is not an isometry (defect {defect:.2e})")
    psi_small = np.zeros(r * c, dtype=complex)
    for a in range(r):
        psi_small[a * c + a] = weights[a]
    return EACode(
        params=_ea_params(split.n, dec.k_dim, distance, split.b, c),
        strategy=COMPRESSED, shared_state=psi_small,
        sender_dim=r, receiver_dim=c, schmidt_rank=c,
        ebit_cost=_ebits(c), model_validity=NOISELESS_ONLY,
        compress_isometry=v_embed)


def presend_from_decomposition(dec: StructureDecomposition, code: QuantumCode,
                               distance: int) -> EACode:
    """Presend EA description from an already certified decomposition.

    The shared resource is the encoded reference codeword split kept/erased;
    the sender later steers the message with unitaries supported on the kept
    qubits (see logical_unitary_on_complement).
    """
    split = dec.split
    shared = qla.permute_state(code.basis[0], split.n, split.order)
    c = dec.ancilla_dim
    return EACode(
        params=_ea_params(split.n, dec.k_dim, distance, split.b, split.dim_erased),
        strategy=PRESEND, shared_state=shared,
        sender_dim=split.dim_kept, receiver_dim=split.dim_erased, schmidt_rank=c,
        ebit_cost=_ebits(c), model_validity=NOISELESS_AND_NOISY)


def ea_presend(code: QuantumCode, subset, distance: int,
               rank_tol: float = RANK_TOL,
               residual_tol: float = RESIDUAL_TOL) -> EACode:
    """EA description where the receiver's qubits are sent ahead noiselessly.

    Checks correctability first (clean NotCorrectableError), then certifies
    the factorization to size the entanglement cost.
    """
    subset = tuple(subset)
    report = analysis.kl_matrix(code, subset, residual_tol=residual_tol,
                                rank_tol=rank_tol)
    if not report.correctable:
        raise NotCorrectableError(f"subset {subset} is not correctable")
    dec = decompose(code, subset, rank_tol=rank_tol)
    return presend_from_decomposition(dec, code, distance)


def logical_unitary_on_complement(dec: StructureDecomposition,
                                  message_unitary: np.ndarray,
                                  tol: float = UNITARITY_TOL) -> np.ndarray:
    """Lift a K x K message unitary to the kept qubits only.

    Returns U (V_R otimes I_A) U^dag completed by the identity on the
    orthogonal complement of range(U); acting with the result on the kept
    factor maps encoded states exactly as V_R maps messages.
    """
    k, r = dec.k_dim, dec.ancilla_dim
    v_r = np.asarray(message_unitary, dtype=complex)
    if v_r.shape != (k, k):
        raise ContractError(f"message unitary has shape {v_r.shape}, expected ({k}, {k})")
    if np.linalg.norm(v_r.conj().T @ v_r - np.eye(k)) > tol * max(1.0, math.sqrt(k)):
        raise ContractError("message operator is not unitary within tolerance")
    u = dec.isometry
    lifted = u @ np.kron(v_r, np.eye(r)) @ u.conj().T
    complement = np.eye(u.shape[0]) - u @ u.conj().T
    return lifted + complement


def apply_on_kept(state: np.ndarray, split: qla.SubsystemSplit,
                  kept_operator: np.ndarray) -> np.ndarray:
    """Apply an operator on the kept factor to a full state, original qubit order."""
    mat = qla.bipartite_matrix(state, split)
    out = (kept_operator @ mat).reshape(-1)
    perm = qla.permutation_indices(split.n, split.order)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return out[inv]


def decomposition_to_json(dec: StructureDecomposition) -> dict:
    def c2(z):
        return [float(np.real(z)), float(np.imag(z))]

    return {
        "n": dec.split.n,
        "subset": list(dec.split.erased),
        "k_dim": dec.k_dim,
        "dim_A": dec.ancilla_dim,
        "ancilla_spectrum": [float(x) for x in dec.ancilla_spectrum],
        "shared_state": [c2(z) for z in dec.shared_state],
        "isometry_columns": [[c2(z) for z in dec.isometry[:, j]]
                             for j in range(dec.isometry.shape[1])],
        "residual": dec.residual,
        "isometry_defect": dec.isometry_defect,
    }


def eacode_to_json(ea: EACode) -> dict:
    def c2(z):
        return [float(np.real(z)), float(np.imag(z))]

    data = {
        "parameters": ea.params.dimension_form(),
        "stabilizer_form": ea.params.stabilizer_form(),
        "strategy": ea.strategy,
        "model_validity": ea.model_validity,
        "sender_dim": ea.sender_dim,
        "receiver_dim": ea.receiver_dim,
        "schmidt_rank": ea.schmidt_rank,
        "ebit_cost": ea.ebit_cost,
        "shared_state": [c2(z) for z in ea.shared_state],
    }
    if ea.compress_isometry is not None:
        data["compress_isometry_columns"] = [
            [c2(z) for z in ea.compress_isometry[:, j]]
            for j in range(ea.compress_isometry.shape[1])]
    return data
