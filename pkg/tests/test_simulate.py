"""Recovery and channel simulation against bit-surgery density oracles.

The replacer channel is checked entry by entry against an independent
construction (kept entries copied under an erased-index delta, scaled by
1/2^b), and recovery channels are validated operationally: every error in
the set must be undone exactly on a spanning family of code states.
"""

import numpy as np
import pytest

from eaqec import analysis, codes, qla, simulate, structure
from eaqec.codes import PauliOperator
from eaqec.errors import (ContractError, ModelMismatchError,
                          NotCorrectableError, SizeError)

from conftest import cached_fixture, random_density
from test_analysis import oracle_projector


def oracle_replacer_output(rho: np.ndarray, n: int, subset) -> np.ndarray:
    """Tr_B(rho) tensor I/2^b re-embedded at the original qubit positions.

    out[i, j] is nonzero only when i and j agree on the erased bits; the
    value averages rho over a shared erased assignment and divides by 2^b.
    """
    subset = tuple(subset)
    b = len(subset)
    d = 1 << n
    erased_mask = 0
    for q in subset:
        erased_mask |= 1 << (n - q)
    kept_mask = (d - 1) ^ erased_mask
    # enumerate the erased-bit assignments once
    fills = []
    for m in range(1 << b):
        bits = 0
        for j, q in enumerate(subset):
            if m >> (b - 1 - j) & 1:
                bits |= 1 << (n - q)
        fills.append(bits)
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            if (i & erased_mask) != (j & erased_mask):
                continue
            acc = 0.0 + 0.0j
            for f in fills:
                acc += rho[(i & kept_mask) | f, (j & kept_mask) | f]
            out[i, j] = acc / (1 << b)
    return out


def _code_states(code):
    states = [code.basis[i] for i in range(code.k_dim)]
    if code.k_dim > 1:
        states.append((code.basis[0] + code.basis[1]) / np.sqrt(2))
        states.append((code.basis[0] + 1j * code.basis[1]) / np.sqrt(2))
    return states


class TestKrausChannel:
    def test_unitary_channel(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        ch = simulate.KrausChannel(operators=(x,), dim=2)
        rho = random_density(np.random.default_rng(0), 2)
        np.testing.assert_allclose(ch.apply(rho), x @ rho @ x, atol=1e-14)

    def test_apply_matches_apply_to_pure(self):
        rng = np.random.default_rng(1)
        k0 = np.array([[1, 0], [0, np.sqrt(0.5)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(0.5)], [0, 0]], dtype=complex)
        ch = simulate.KrausChannel(operators=(k0, k1), dim=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(ch.apply_to_pure(v),
                                   ch.apply(np.outer(v, v.conj())), atol=1e-12)

    def test_rejects_trace_decreasing(self):
        with pytest.raises(ContractError):
            simulate.KrausChannel(operators=(0.5 * np.eye(2, dtype=complex),), dim=2)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ContractError):
            simulate.KrausChannel(operators=(np.eye(3, dtype=complex),), dim=2)

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            simulate.KrausChannel(operators=(), dim=2)


class TestReplacerChannel:
    @pytest.mark.parametrize("n,subset", [(3, (2,)), (3, (1, 3)), (4, (2, 4))])
    def test_matches_oracle(self, n, subset):
        rng = np.random.default_rng(5)
        ch = simulate.replacer_channel(n, subset)
        rho = random_density(rng, 1 << n)
        np.testing.assert_allclose(ch.apply(rho),
                                   oracle_replacer_output(rho, n, subset),
                                   atol=1e-12)

    def test_idempotent(self):
        ch = simulate.replacer_channel(3, (1, 3))
        rho = random_density(np.random.default_rng(9), 8)
        once = ch.apply(rho)
        np.testing.assert_allclose(ch.apply(once), once, atol=1e-12)

    def test_pure_state_entry(self):
        ch = simulate.replacer_channel(3, (2,))
        rng = np.random.default_rng(11)
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(
            ch.apply_to_pure(v),
            oracle_replacer_output(np.outer(v, v.conj()), 3, (2,)), atol=1e-12)

    def test_size_cap(self):
        with pytest.raises(SizeError):
            simulate.replacer_channel(7, (1, 2, 3, 4, 5, 6))


class TestKlRecovery:
    @staticmethod
    def _weight_one_set(n):
        ops = [PauliOperator(n, 0, 0)]
        for q in range(1, n + 1):
            for letter in "XYZ":
                s = ["I"] * n
                s[q - 1] = letter
                ops.append(PauliOperator.from_string("".join(s)))
        return ops

    def test_corrects_every_single_qubit_error(self):
        code = cached_fixture("five_qubit")
        errors = self._weight_one_set(5)
        ch = simulate.kl_recovery(code, errors)
        assert len(ch.operators) == 16  # one per error channel, no completion
        for err in errors:
            e = err.matrix()
            for psi in _code_states(code):
                hit = e @ psi
                fid = sum(abs(np.vdot(psi, op @ hit)) ** 2 for op in ch.operators)
                assert fid >= 1 - 1e-9, str(err)

    def test_kraus_action_proportional_to_projector(self):
        code = cached_fixture("five_qubit")
        errors = [PauliOperator.from_string(s) for s in ["IIIII", "XIIII", "IIZII"]]
        ch = simulate.kl_recovery(code, errors)
        p = oracle_projector(code)
        for op in ch.operators[:len(errors)]:
            for err in errors:
                prod = op @ err.matrix() @ p
                coeff = np.trace(prod @ p) / code.k_dim
                assert np.linalg.norm(prod - coeff * p) <= 1e-8

    def test_degenerate_pair_collapses_to_one_channel(self):
        code = cached_fixture("steane")
        stab_err = PauliOperator.from_string("IIIZZZZ")
        errors = [PauliOperator(7, 0, 0), stab_err]
        ch = simulate.kl_recovery(code, errors)
        # correlation matrix has rank one, so a single primary operator
        # plus the trace-preserving completion
        assert len(ch.operators) == 2
        for err in errors:
            e = err.matrix()
            for psi in _code_states(code):
                hit = e @ psi
                fid = sum(abs(np.vdot(psi, op @ hit)) ** 2 for op in ch.operators)
                assert fid >= 1 - 1e-9

    def test_logical_error_set_rejected(self):
        code = cached_fixture("five_qubit")
        errors = [PauliOperator(5, 0, 0), PauliOperator.from_string("XXXXX")]
        with pytest.raises(NotCorrectableError):
            simulate.kl_recovery(code, errors)

    def test_dense_matrices_accepted(self):
        code = cached_fixture("five_qubit")
        dense = [np.eye(32, dtype=complex),
                 PauliOperator.from_string("XIIII").matrix()]
        ch = simulate.kl_recovery(code, dense)
        psi = code.basis[0]
        hit = dense[1] @ psi
        fid = sum(abs(np.vdot(psi, op @ hit)) ** 2 for op in ch.operators)
        assert fid >= 1 - 1e-9

    def test_empty_error_set_rejected(self):
        with pytest.raises(ContractError):
            simulate.kl_recovery(cached_fixture("five_qubit"), [])


class TestVerifyEa:
    @staticmethod
    def _setup(name, subset, distance):
        code = cached_fixture(name)
        dec = structure.decompose(code, subset)
        return code, dec

    def test_structure_noiseless_weight_one(self):
        code, dec = self._setup("five_qubit", (4, 5), 3)
        ea = structure.ea_from_structure(dec, distance=3)
        report = simulate.verify_ea(ea, dec, code, simulate.NOISELESS, 1)
        assert report.passed
        assert report.min_fidelity >= 1 - 1e-9
        assert report.cases_run == 9 * 3  # 3 kept qubits x 3 letters x 3 states
        assert report.failures == ()
        assert (report.strategy, report.model, report.error_weight) == \
            ("structure", "noiseless", 1)

    def test_structure_noisy_weight_one(self):
        code, dec = self._setup("five_qubit", (4, 5), 3)
        ea = structure.ea_from_structure(dec, distance=3)
        report = simulate.verify_ea(ea, dec, code, simulate.NOISY, 1)
        assert report.passed
        assert report.cases_run == 15 * 3

    def test_presend_noisy_weight_one(self):
        code, dec = self._setup("five_qubit", (4, 5), 3)
        ea = structure.presend_from_decomposition(dec, code, distance=3)
        report = simulate.verify_ea(ea, dec, code, simulate.NOISY, 1)
        assert report.passed

    def test_compressed_noiseless_weight_one(self):
        code, dec = self._setup("steane", (4, 5, 6, 7), 3)
        ea = structure.compress(dec, distance=3)
        report = simulate.verify_ea(ea, dec, code, simulate.NOISELESS, 1)
        assert report.passed
        assert report.cases_run == 9 * 3

    def test_compressed_noisy_refused(self):
        code, dec = self._setup("steane", (4, 5, 6, 7), 3)
        ea = structure.compress(dec, distance=3)
        with pytest.raises(ModelMismatchError):
            simulate.verify_ea(ea, dec, code, simulate.NOISY, 1)

    def test_compressed_noisy_exploratory(self):
        code, dec = self._setup("steane", (4, 5, 6, 7), 3)
        ea = structure.compress(dec, distance=3)
        report = simulate.verify_ea(ea, dec, code, simulate.NOISY, 1,
                                    exploratory=True)
        assert report.exploratory
        assert report.min_fidelity < 1 - 1e-9  # compression really costs here
        assert report.failures
        for label, fid in report.failures:
            kept_part, share_part = label.split("|")
            # only errors that touch the share's carrier qubits break recovery
            assert set(share_part) != {"I"}, label
            assert fid < 1 - 1e-9

    def test_weight_zero_everywhere(self):
        for name, subset in [("five_qubit", (4, 5)), ("pi_7_2_3", (6, 7))]:
            code, dec = self._setup(name, subset, 2)
            ea = structure.ea_from_structure(dec, distance=2)
            report = simulate.verify_ea(ea, dec, code, simulate.NOISY, 0)
            assert report.passed
            assert report.cases_run == 3

    def test_bad_model_and_weight(self):
        code, dec = self._setup("five_qubit", (4, 5), 3)
        ea = structure.ea_from_structure(dec, distance=3)
        with pytest.raises(ContractError):
            simulate.verify_ea(ea, dec, code, "sometimes", 1)
        with pytest.raises(ContractError):
            simulate.verify_ea(ea, dec, code, simulate.NOISELESS, -1)


class TestChannelFormCheck:
    @pytest.mark.parametrize("name,subset", [
        ("five_qubit", (4, 5)), ("pi_4_2_2", (4,)), ("xp_7_8_2", (7,)),
        ("pi_7_2_3", (6, 7)), ("steane", (5, 6, 7)), ("steane", (4, 5, 6, 7))])
    def test_within_tolerance(self, name, subset):
        code = cached_fixture(name)
        dec = structure.decompose(code, subset)
        assert simulate.channel_form_check(dec, code) <= 1e-9

    def test_full_space_oracle(self):
        # the erasure output of any code state must equal the structured
        # form U (rho_R tensor Gamma) U^dag tensor I/2^b; check it on the
        # full 32-dimensional space entry by entry
        code = cached_fixture("five_qubit")
        subset = (4, 5)
        dec = structure.decompose(code, subset)
        split = dec.split
        kept = [q for q in range(1, 6) if q not in subset]
        for w in [np.array([1.0, 0]), np.array([0, 1.0]),
                  np.array([1, 1]) / np.sqrt(2), np.array([1, 1j]) / np.sqrt(2)]:
            psi = w @ code.basis
            lhs = oracle_replacer_output(np.outer(psi, psi.conj()), 5, subset)
            rhs_kept = dec.isometry @ np.kron(np.outer(w, w.conj()),
                                              dec.ancilla_state) @ dec.isometry.conj().T
            rhs = np.zeros_like(lhs)
            for i in range(32):
                for j in range(32):
                    # kept bits are qubits 1..3 (high bits), erased 4..5 (low)
                    if (i & 0b11) != (j & 0b11):
                        continue
                    rhs[i, j] = rhs_kept[i >> 2, j >> 2] / 4.0
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_size_cap(self):
        v = np.zeros(2 ** 7, dtype=complex)
        v[0] = 1.0
        product_code = codes.QuantumCode(n=7, basis=v[None, :])
        dec = structure.decompose(product_code, (2, 3, 4, 5, 6, 7))
        with pytest.raises(SizeError):
            simulate.channel_form_check(dec, product_code)
