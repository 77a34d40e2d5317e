"""Erasure correctability of qubit subsets via error-correction conditions.

For an erased set B the coefficient matrix over the local Pauli basis is
lambda_ij = Tr(varrho_B E_i^dag E_j), with varrho_B the B-marginal of the
normalized codespace projector.  B is correctable when every pair passes
||P E_i^dag E_j P - lambda_ij P||_F <= residual_tol, measured in the code
basis where that norm collapses to a K x K computation.  Correctable sets
classify three ways: pure (marginal maximally mixed), impure nondegenerate
(full rank, not maximally mixed), degenerate (rank deficient, equivalently
lambda rank below 4^b).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import qla
from .codes import PauliOperator, QuantumCode
from .config import MAX_SCAN_QUBITS, MAX_SUBSET, RANK_TOL, RESIDUAL_TOL
from .errors import ConsistencyError, NotCorrectableError, SizeError

PURE = "pure"
IMPURE_NONDEGENERATE = "impure_nondegenerate"
DEGENERATE = "degenerate"


def _basis_patterns(b: int):
    """(x, z) bit patterns for the 4^b local Paulis, identity first, x fastest."""
    mask = (1 << b) - 1
    for m in range(1 << (2 * b)):
        yield m & mask, m >> b


def _embed_bits(local: int, b: int, n: int, subset) -> int:
    out = 0
    for j in range(1, b + 1):
        if local & (1 << (b - j)):
            out |= 1 << (n - subset[j - 1])
    return out


def pauli_basis_on(n: int, subset) -> list[PauliOperator]:
    """All 4^b phase-free Paulis supported on the subset, embedded in n qubits.

    Ordering is fixed: identity first, then by local (x, z) pattern with the
    x part cycling fastest, so b = 1 gives [I, X, Z, XZ].  Operators are
    unnormalized, hence pairwise trace-orthogonal with Tr(E^dag E) = 2^n.
    """
    subset = tuple(subset)
    b = len(subset)
    if b > MAX_SUBSET:
        raise SizeError(f"subset size {b} exceeds cap {MAX_SUBSET}")
    out = []
    for x_loc, z_loc in _basis_patterns(b):
        out.append(PauliOperator(n, _embed_bits(x_loc, b, n, subset),
                                 _embed_bits(z_loc, b, n, subset)))
    return out


@dataclass(frozen=True)
class KLReport:
    """Correctability verdict and spectral data for one erased set."""

    split: qla.SubsystemSplit
    matrix: np.ndarray                    # 4^b x 4^b coefficient matrix
    matrix_rank: int
    residual_max: float
    correctable: bool
    marginal_spectrum: np.ndarray         # eigenvalues of varrho_B, descending
    marginal_rank: int
    kept_marginal_ranks: tuple[int, ...]  # per-codeword rank on the kept side
    kernel: np.ndarray                    # coefficient rows spanning ker(matrix)
    trichotomy: str | None = None


def kl_matrix(code: QuantumCode, subset,
              residual_tol: float = RESIDUAL_TOL,
              rank_tol: float = RANK_TOL) -> KLReport:
    """Coefficient matrix, residuals, and marginal spectra for one subset.

    The matrix is assembled as a Gram matrix of vec(E_j varrho_B^{1/2}), so
    it is Hermitian PSD by construction with unit diagonal.  Residuals come
    from the independent code-basis route, cross-checking the two.
    """
    subset = tuple(subset)
    split = qla.SubsystemSplit(n=code.n, erased=subset)
    b = split.b
    if b > MAX_SUBSET:
        raise SizeError(f"subset size {b} exceeds cap {MAX_SUBSET}")
    k = code.k_dim

    mats = [qla.bipartite_matrix(v, split) for v in code.basis]
    rho = sum(m.T @ m.conj() for m in mats) / k
    spectrum, _ = qla.eig_hermitian(rho)
    marginal_rank = qla.numerical_rank(np.maximum(spectrum, 0.0), rank_tol)
    kept_ranks = tuple(qla.numerical_rank(np.linalg.svd(m, compute_uv=False), rank_tol)
                       for m in mats)

    sqrt_rho = qla.sqrtm_psd(rho)
    local = [PauliOperator(b, x_loc, z_loc) for x_loc, z_loc in _basis_patterns(b)]
    g = np.array([(p.matrix() @ sqrt_rho).ravel() for p in local])
    lam = g.conj() @ g.T
    lam = (lam + lam.conj().T) / 2

    eigs, vecs = qla.eig_hermitian(lam)
    matrix_rank = qla.numerical_rank(np.maximum(eigs, 0.0), rank_tol)
    kernel = vecs[:, matrix_rank:].T.copy()

    embedded = pauli_basis_on(code.n, subset)
    v = code.basis_matrix
    applied = np.stack([e.apply(v) for e in embedded])  # (4^b, 2^n, K)
    eye = np.eye(k)
    residual_max = 0.0
    for a in range(applied.shape[0]):
        blocks = np.einsum("ik,bil->bkl", applied[a].conj(), applied)
        dev = blocks - lam[a, :, None, None] * eye
        residual_max = max(residual_max, float(np.linalg.norm(dev.reshape(dev.shape[0], -1),
                                                              axis=1).max()))
    return KLReport(
        split=split, matrix=lam, matrix_rank=matrix_rank,
        residual_max=residual_max, correctable=bool(residual_max <= residual_tol),
        marginal_spectrum=spectrum, marginal_rank=marginal_rank,
        kept_marginal_ranks=kept_ranks, kernel=kernel)


def classify(report: KLReport, atol: float = 1e-10) -> str:
    """Place a correctable subset in the pure/impure/degenerate trichotomy.

    Also cross-checks the rank equivalence: the coefficient matrix has full
    rank 4^b exactly when the marginal has full rank 2^b (their spectra are
    related by eigenvalue scaling and 2^b-fold multiplicity).
    """
    if not report.correctable:
        raise NotCorrectableError(
            f"subset {report.split.erased} is not correctable; no classification")
    dim = report.split.dim_erased
    lam_full = report.matrix_rank == dim * dim
    marg_full = report.marginal_rank == dim
    if lam_full != marg_full:
        raise ConsistencyError(
            f"rank mismatch: coefficient rank {report.matrix_rank} vs marginal rank "
            f"{report.marginal_rank} disagree about fullness")
    if not marg_full:
        return DEGENERATE
    if np.max(np.abs(report.marginal_spectrum - 1.0 / dim)) <= atol:
        return PURE
    return IMPURE_NONDEGENERATE


def analyze_subset(code: QuantumCode, subset,
                   residual_tol: float = RESIDUAL_TOL,
                   rank_tol: float = RANK_TOL) -> KLReport:
    """kl_matrix plus classification when the subset turns out correctable."""
    report = kl_matrix(code, subset, residual_tol=residual_tol, rank_tol=rank_tol)
    if report.correctable:
        report = replace(report, trichotomy=classify(report))
    return report


def find_correctable_sets(code: QuantumCode, size: int,
                          residual_tol: float = RESIDUAL_TOL,
                          rank_tol: float = RANK_TOL) -> list[KLReport]:
    """Classified reports for every correctable subset of the given size."""
    if code.n > MAX_SCAN_QUBITS:
        raise SizeError(f"scan capped at {MAX_SCAN_QUBITS} qubits, code has {code.n}")
    if size > MAX_SUBSET:
        raise SizeError(f"subset size {size} exceeds cap {MAX_SUBSET}")
    out = []
    for subset in itertools.combinations(range(1, code.n + 1), size):
        report = analyze_subset(code, subset, residual_tol=residual_tol, rank_tol=rank_tol)
        if report.correctable:
            out.append(report)
    return out
