"""Code containers, Pauli operators, fixtures, and the distance search.

A Pauli is stored as i^phase_exp * X^x Z^z with bit-packed x and z masks.
Bit (n - q) of a mask belongs to qubit q, so masks read like the qubit
string itself when printed in binary (qubit 1 leftmost).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import qla
from .config import HERMITICITY_TOL, RESIDUAL_TOL
from .errors import ContractError

_PHASE_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_EXPS = {"+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}

# letter -> (x, z, phase_exp contribution); Y = i * X Z
_LETTERS = {"I": (0, 0, 0), "X": (1, 0, 0), "Z": (0, 1, 0), "Y": (1, 1, 1)}


@dataclass(frozen=True)
class PauliOperator:
    """n-qubit Pauli with explicit phase, exact group arithmetic on ints."""

    n: int
    x_bits: int
    z_bits: int
    phase_exp: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ContractError("x/z mask has bits outside the register")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_string(cls, letters: str, phase: str = "+") -> "PauliOperator":
        if phase not in _PHASE_EXPS:
            raise ContractError(f"unknown phase label {phase!r}")
        x = z = 0
        exp = _PHASE_EXPS[phase]
        for ch in letters:
            if ch not in _LETTERS:
                raise ContractError(f"unknown Pauli letter {ch!r} in {letters!r}")
            lx, lz, lp = _LETTERS[ch]
            x = (x << 1) | lx
            z = (z << 1) | lz
            exp += lp
        return cls(len(letters), x, z, exp)

    def to_string(self) -> tuple[str, str]:
        """Return (phase label, letter string), undoing the Y = iXZ bookkeeping."""
        out = []
        exp = self.phase_exp
        for q in range(1, self.n + 1):
            bit = 1 << (self.n - q)
            x, z = bool(self.x_bits & bit), bool(self.z_bits & bit)
            letter = "I" if not x and not z else "X" if x and not z else "Z" if not x else "Y"
            if letter == "Y":
                exp -= 1
            out.append(letter)
        return _PHASE_LABELS[exp % 4], "".join(out)

    def __str__(self):
        phase, letters = self.to_string()
        return letters if phase == "+" else f"{phase}{letters}"

    @property
    def phase(self) -> complex:
        return 1j ** self.phase_exp

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        bits = self.x_bits | self.z_bits
        return tuple(q for q in range(1, self.n + 1) if bits & (1 << (self.n - q)))

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0 and self.phase_exp == 0

    def is_hermitian(self) -> bool:
        # i^a X^x Z^z is Hermitian iff a and |x & z| have the same parity
        return (self.phase_exp - (self.x_bits & self.z_bits).bit_count()) % 2 == 0

    def compose(self, other: "PauliOperator") -> "PauliOperator":
        """Operator product self @ other with exact phase tracking."""
        if other.n != self.n:
            raise ContractError("cannot compose Paulis on different registers")
        exp = self.phase_exp + other.phase_exp + 2 * (self.z_bits & other.x_bits).bit_count()
        return PauliOperator(self.n, self.x_bits ^ other.x_bits,
                             self.z_bits ^ other.z_bits, exp)

    def adjoint(self) -> "PauliOperator":
        exp = -self.phase_exp + 2 * (self.x_bits & self.z_bits).bit_count()
        return PauliOperator(self.n, self.x_bits, self.z_bits, exp)

    def commutes_with(self, other: "PauliOperator") -> bool:
        s = (self.x_bits & other.z_bits).bit_count() + (self.z_bits & other.x_bits).bit_count()
        return s % 2 == 0

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Apply to a state vector or to each column of a (2^n, k) array."""
        dim = 1 << self.n
        state = np.asarray(state, dtype=complex)
        if state.shape[0] != dim:
            raise ContractError(f"state has leading dim {state.shape[0]}, expected {dim}")
        idx = np.arange(dim, dtype=np.uint64)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(self.z_bits)) & 1)
        out = np.empty_like(state)
        out[idx ^ np.uint64(self.x_bits)] = self.phase * (signs.reshape(-1, *([1] * (state.ndim - 1))) * state)
        return out

    def matrix(self) -> np.ndarray:
        qla.check_dim(1 << self.n)
        return self.apply(np.eye(1 << self.n, dtype=complex))


def pauli_to_matrix(p: PauliOperator) -> np.ndarray:
    """Dense matrix of a Pauli operator, phase included."""
    return p.matrix()


@dataclass(frozen=True)
class QuantumCode:
    """A K-dimensional subspace of n qubits given by an explicit basis.

    basis has shape (K, 2^n), one codeword per row.  Rows are expected to be
    orthonormal; this is enforced where it matters (projector).
    """

    n: int
    basis: np.ndarray
    label: str = ""

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] != 2 ** self.n:
            raise ContractError(f"basis shape {b.shape} does not match n={self.n}")
        if b.shape[0] < 1:
            raise ContractError("need at least one codeword")
        if not np.all(np.isfinite(b)):
            raise ContractError("basis contains non-finite entries")
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @property
    def k_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def basis_matrix(self) -> np.ndarray:
        """Codewords as columns, shape (2^n, K)."""
        return self.basis.T


def projector(code: QuantumCode, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Codespace projector V V^dag; fails if the basis is not orthonormal."""
    v = code.basis_matrix
    gram = code.basis.conj() @ code.basis.T
    if np.linalg.norm(gram - np.eye(code.k_dim)) > tol * max(1.0, code.k_dim):
        raise ContractError("code basis is not orthonormal within tolerance")
    return v @ v.conj().T


@dataclass(frozen=True)
class EAParameters:
    """Parameter tuple of an entanglement-assisted code, dimension form."""

    n_sent: int
    k_dim: int
    distance: int
    receiver_dim: int


@dataclass(frozen=True)
class CodeParameters:
    n: int
    k_dim: int
    distance: int
    ea: EAParameters | None = None

    def __post_init__(self):
        if not 1 <= self.distance <= self.n:
            raise ContractError(f"distance {self.distance} outside 1..{self.n}")
        if self.k_dim < 1:
            raise ContractError("k_dim must be positive")
        if self.ea is not None:
            if self.ea.n_sent < 0 or self.ea.n_sent > self.n:
                raise ContractError("sent-qubit count outside 0..n")
            if self.ea.receiver_dim < 1:
                raise ContractError("receiver dimension must be positive")

    def dimension_form(self) -> str:
        if self.ea is None:
            return f"(({self.n},{self.k_dim},{self.distance}))"
        e = self.ea
        return f"(({e.n_sent},{e.k_dim},{e.distance};{e.receiver_dim}))"

    def stabilizer_form(self) -> str | None:
        """[[n,k,d]] or [[n,k,d;c]] when every dimension is a power of two."""
        def log2_exact(m):
            return m.bit_length() - 1 if m >= 1 and m & (m - 1) == 0 else None

        if self.ea is None:
            k = log2_exact(self.k_dim)
            return None if k is None else f"[[{self.n},{k},{self.distance}]]"
        k, c = log2_exact(self.ea.k_dim), log2_exact(self.ea.receiver_dim)
        if k is None or c is None:
            return None
        return f"[[{self.ea.n_sent},{k},{self.ea.distance};{c}]]"


def dicke(n: int, excitations: int) -> np.ndarray:
    """Symmetric n-qubit state with a fixed number of 1s, uniform amplitudes."""
    if not 0 <= excitations <= n:
        raise ContractError(f"excitation count {excitations} outside 0..{n}")
    qla.check_dim(1 << n)
    v = np.zeros(1 << n, dtype=complex)
    for ones in itertools.combinations(range(1, n + 1), excitations):
        v[sum(1 << (n - q) for q in ones)] = 1.0
    return v / math.sqrt(math.comb(n, excitations))


def _letter_choices(support, n):
    per_qubit = [((1, 0), (0, 1), (1, 1))] * len(support)
    for combo in itertools.product(*per_qubit):
        x = z = 0
        for q, (lx, lz) in zip(support, combo):
            bit = 1 << (n - q)
            x |= bit * lx
            z |= bit * lz
        yield x, z


def min_distance(code: QuantumCode, max_weight: int | None = None,
                 residual_tol: float = RESIDUAL_TOL) -> int | None:
    """Smallest weight of a Pauli the code fails to detect.

    A weight-w operator E is detected when P E P is proportional to the
    codespace projector P; the deviation is measured in the code basis, where
    ||P E P - (tr/K) P||_F equals the same norm on the K x K reduced matrix.
    Scans weights 1..max_weight (default n) exhaustively and returns the
    first weight with a deviation above residual_tol, or None if every
    scanned weight is detected (distance is then at least max_weight + 1).
    """
    n, k = code.n, code.k_dim
    v = code.basis_matrix
    eye = np.eye(k)
    limit = n if max_weight is None else max_weight
    for w in range(1, limit + 1):
        for support in itertools.combinations(range(1, n + 1), w):
            for x, z in _letter_choices(support, n):
                e = PauliOperator(n, x, z)
                m = v.conj().T @ e.apply(v)
                dev = np.linalg.norm(m - (np.trace(m) / k) * eye)
                if dev > residual_tol:
                    return w
    return None


def code_to_json(code: QuantumCode) -> dict:
    rows = []
    for row in code.basis:
        entries = []
        for idx in np.flatnonzero(np.abs(row) > 1e-14):
            amp = row[idx]
            entries.append({"bits": format(int(idx), f"0{code.n}b"),
                            "re": float(amp.real), "im": float(amp.imag)})
        rows.append(entries)
    return {"n": code.n, "k_dim": code.k_dim, "label": code.label, "basis": rows}


def code_from_json(data: dict) -> QuantumCode:
    try:
        n = int(data["n"])
        k_dim = int(data["k_dim"])
        rows = data["basis"]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed code JSON: {exc}") from exc
    if len(rows) != k_dim:
        raise ContractError(f"k_dim={k_dim} but basis has {len(rows)} rows")
    basis = np.zeros((k_dim, 1 << n), dtype=complex)
    for i, entries in enumerate(rows):
        for entry in entries:
            bits = entry["bits"]
            if len(bits) != n or set(bits) - {"0", "1"}:
                raise ContractError(f"bad bitstring {bits!r} for n={n}")
            basis[i, int(bits, 2)] = float(entry["re"]) + 1j * float(entry["im"])
    return QuantumCode(n=n, basis=basis, label=str(data.get("label", "")))


def _bits(n, s):
    return int(s, 2)


def _pair_state(n, bits0, bits1, amp1):
    v = np.zeros(1 << n, dtype=complex)
    v[_bits(n, bits0)] = 1.0
    v[_bits(n, bits1)] = amp1
    return v / np.linalg.norm(v)


FIXTURE_NAMES = ("five_qubit", "steane", "pi_4_2_2", "pi_7_2_3", "xp_7_8_2")

_FIVE_QUBIT_GENERATORS = ("XZZXI", "ZYYZI", "ZZXIX", "YYZIZ")
_STEANE_GENERATORS = ("IIIXXXX", "XIXIXIX", "IXXIIXX",
                      "IIIZZZZ", "ZIZIZIZ", "IZZIIZZ")


def fixture(name: str) -> QuantumCode:
    """Built-in test codes addressed by name; see FIXTURE_NAMES."""
    if name == "five_qubit":
        from . import stab
        group = stab.StabilizerGroup.from_strings(_FIVE_QUBIT_GENERATORS)
        return stab.codewords(group, label="five_qubit")
    if name == "steane":
        from . import stab
        group = stab.StabilizerGroup.from_strings(_STEANE_GENERATORS)
        return stab.codewords(group, label="steane")
    if name == "pi_4_2_2":
        s3, s6 = math.sqrt(3) / 3, math.sqrt(6) / 3
        basis = [s3 * dicke(4, 0) + s6 * dicke(4, 3),
                 s6 * dicke(4, 1) - s3 * dicke(4, 4)]
        return QuantumCode(4, np.array(basis), label="pi_4_2_2")
    if name == "pi_7_2_3":
        a15, a7, a21 = math.sqrt(15) / 8, math.sqrt(7) / 8, math.sqrt(21) / 8
        basis = [a15 * dicke(7, 0) + a7 * dicke(7, 2) + a21 * dicke(7, 4) - a21 * dicke(7, 6),
                 -a21 * dicke(7, 1) + a21 * dicke(7, 3) + a7 * dicke(7, 5) + a15 * dicke(7, 7)]
        return QuantumCode(7, np.array(basis), label="pi_7_2_3")
    if name == "xp_7_8_2":
        w = np.exp(1j * np.pi / 8)
        rows = [("0000000", "1111111", 12), ("0000111", "1111000", 0),
                ("0001011", "1110100", 14), ("0001101", "1110010", 12),
                ("0011110", "1100001", 0), ("0011001", "1100110", 8),
                ("0010101", "1101010", 10), ("0010011", "1101100", 12)]
        basis = [_pair_state(7, b0, b1, w ** p) for b0, b1, p in rows]
        return QuantumCode(7, np.array(basis), label="xp_7_8_2")
    raise ContractError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
