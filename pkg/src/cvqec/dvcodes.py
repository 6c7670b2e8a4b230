"""DV ancilla codes: 3-qubit phase-flip, 9-qubit Shor, and the binomial
bosonic code, with encoding, syndrome recovery, logical conditional
displacement and logical Y measurement.

Qubit codes recover through stabilizer parity checks and a lookup table;
the binomial code uses the boson-number mod-3 syndrome with recovery
isometries built from the normalized single-loss / single-gain images of
the codewords.  Components outside the correctable span are mapped back
to the codespace incoherently (best effort) and flagged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fock import (DensityMatrix, LinearOperator, PureState, annihilation,
                   displacement_operator)

__all__ = [
    "CodeSpec",
    "SyndromeResult",
    "three_qubit_phase_code",
    "shor9_code",
    "binomial_code",
    "get_code",
    "encode",
    "recover",
    "logical_flip_probability_three_qubit",
    "logical_conditional_displacement",
    "logical_Y_measurement",
    "logical_Y_probabilities",
    "pauli_matrix",
]

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_SINGLE = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix for a Pauli string such as 'XIZ' (qubit 0 leftmost)."""
    out = np.array([[1.0 + 0j]])
    for ch in label:
        out = np.kron(out, _SINGLE[ch])
    return out


def _pauli_string(n: int, pos: int, ch: str) -> str:
    return "I" * pos + ch + "I" * (n - pos - 1)


@dataclass(frozen=True)
class SyndromeResult:
    syndrome: tuple | int | None
    applied_recovery: str
    unrecoverable: bool = False
    unrecoverable_weight: float = 0.0


@dataclass(frozen=True)
class CodeSpec:
    """Logical qubit codewords over a physical carrier."""

    name: str
    carrier: str  # qubits | single_mode
    logical_g: np.ndarray = field(repr=False)
    logical_e: np.ndarray = field(repr=False)
    n_qubits: int = 0

    def __post_init__(self):
        for v in (self.logical_g, self.logical_e):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{self.name}: codeword not normalized")
        if abs(np.vdot(self.logical_g, self.logical_e)) > 1e-12:
            raise ValueError(f"{self.name}: codewords not orthogonal")

    @property
    def dim(self) -> int:
        return len(self.logical_g)

    def codeword_projectors(self) -> tuple[np.ndarray, np.ndarray]:
        pg = np.outer(self.logical_g, self.logical_g.conj())
        pe = np.outer(self.logical_e, self.logical_e.conj())
        return pg, pe

    def y_states(self) -> tuple[np.ndarray, np.ndarray]:
        plus = (self.logical_g + 1j * self.logical_e) / np.sqrt(2.0)
        minus = (self.logical_g - 1j * self.logical_e) / np.sqrt(2.0)
        return plus, minus


def three_qubit_phase_code() -> CodeSpec:
    """(|+++> +/- |--->)/sqrt(2): repetition in the +/- basis, corrects one
    phase flip."""
    plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
    ppp = np.kron(np.kron(plus, plus), plus)
    mmm = np.kron(np.kron(minus, minus), minus)
    g = (ppp + mmm) / np.sqrt(2.0)
    e = (ppp - mmm) / np.sqrt(2.0)
    return CodeSpec("three_qubit_phase", "qubits", g.astype(complex), e.astype(complex), 3)


def shor9_code() -> CodeSpec:
    """(|000> +/- |111>)^x3 / 2^(3/2): corrects any single-qubit error."""
    b0 = np.zeros(8)
    b0[0] = b0[7] = 1.0
    b1 = np.zeros(8)
    b1[0], b1[7] = 1.0, -1.0
    g = np.kron(np.kron(b0, b0), b0) / (2.0 * np.sqrt(2.0))
    e = np.kron(np.kron(b1, b1), b1) / (2.0 * np.sqrt(2.0))
    return CodeSpec("shor9", "qubits", g.astype(complex), e.astype(complex), 9)


def binomial_code(n_trunc: int = 23) -> CodeSpec:
    """(|0> + sqrt(3)|6>)/2 and (sqrt(3)|3> + |9>)/2: Fock spacing 3,
    corrects single boson loss and gain."""
    if n_trunc < 10:
        raise ValueError("binomial code needs n_trunc >= 10 (gain image reaches |10>)")
    dim = n_trunc + 1
    g = np.zeros(dim, dtype=complex)
    e = np.zeros(dim, dtype=complex)
    g[0], g[6] = 0.5, np.sqrt(3.0) / 2.0
    e[3], e[9] = np.sqrt(3.0) / 2.0, 0.5
    return CodeSpec("binomial_n3", "single_mode", g, e)


def get_code(name: str, n_trunc: int = 23) -> CodeSpec:
    if name == "three_qubit_phase":
        return three_qubit_phase_code()
    if name == "shor9":
        return shor9_code()
    if name == "binomial_n3":
        return binomial_code(n_trunc)
    raise ValueError(f"unknown code {name!r}")


def encode(code: CodeSpec, logical: PureState) -> PureState:
    """a|g> + b|e>  ->  a|g>_L + b|e>_L on the physical carrier."""
    if logical.dim != 2:
        raise ValueError("logical input must be a qubit state")
    a, b = logical.amplitudes
    # the cutoff-leakage check is meaningless for qubit registers, where
    # population on the top basis states is perfectly ordinary
    budget = 1.0 if code.carrier == "qubits" else None
    if budget is None:
        return PureState(a * code.logical_g + b * code.logical_e)
    return PureState(a * code.logical_g + b * code.logical_e, leakage_budget=budget)


# --- stabilizer machinery (qubit carriers) ---------------------------------

_STABILIZERS = {
    "three_qubit_phase": ["XXI", "IXX"],
    "shor9": [
        "ZZIIIIIII", "IZZIIIIII",
        "IIIZZIIII", "IIIIZZIII",
        "IIIIIIZZI", "IIIIIIIZZ",
        "XXXXXXIII", "IIIXXXXXX",
    ],
}


def _commutes(pauli: str, stab: str) -> bool:
    anti = 0
    for p, s in zip(pauli, stab):
        if p != "I" and s != "I" and p != s:
            anti += 1
    return anti % 2 == 0


# Single-qubit error alphabet each code is meant to correct; the phase
# code only handles Z, and listing X/Y there would hijack the Z syndromes
# with corrections that act as logical operators.
_CORRECTABLE = {"three_qubit_phase": "Z", "shor9": "XYZ"}


@lru_cache(maxsize=None)
def _lookup_table(code_name: str) -> dict:
    """Syndrome tuple -> correction Pauli string, from enumerating the
    correctable single-qubit errors (identity included)."""
    stabs = _STABILIZERS[code_name]
    n = len(stabs[0])
    table = {tuple(0 for _ in stabs): "I" * n}
    for pos in range(n):
        for ch in _CORRECTABLE[code_name]:
            err = _pauli_string(n, pos, ch)
            syn = tuple(0 if _commutes(err, s) else 1 for s in stabs)
            table.setdefault(syn, err)
    return table


def _pauli_product(a: str, b: str) -> str:
    out = []
    for x, y in zip(a, b):
        if x == "I":
            out.append(y)
        elif y == "I" or x == y:
            out.append("I" if x == y else x)
        else:
            out.append(({"X", "Y", "Z"} - {x, y}).pop())
    return "".join(out)


@lru_cache(maxsize=None)
def _full_lookup_table(code_name: str) -> dict:
    """Every syndrome -> a consistent Pauli, lowest weight first.

    Unmatched syndromes must still be decoded back into the codespace
    (applying nothing strands the carrier outside it, which the logical
    conditional displacement then cannot undo); breadth-first products of
    correctable singles reach every syndrome coset.
    """
    singles = _lookup_table(code_name)
    stabs = _STABILIZERS[code_name]
    table = dict(singles)
    frontier = list(singles.values())
    while len(table) < 2 ** len(stabs) and frontier:
        nxt = []
        for base in frontier:
            for err in singles.values():
                cand = _pauli_product(base, err)
                syn = tuple(0 if _commutes(cand, s) else 1 for s in stabs)
                if syn not in table:
                    table[syn] = cand
                    nxt.append(cand)
        frontier = nxt
    return table


@lru_cache(maxsize=None)
def stabilizer_matrices(code_name: str) -> tuple:
    return tuple(pauli_matrix(s) for s in _STABILIZERS[code_name])


@lru_cache(maxsize=None)
def correction_matrix(code_name: str, syndrome: tuple):
    """(matrix, label, guaranteed): guaranteed is True when the syndrome
    comes from a single correctable error, False for the best-effort
    extension of the decoder table."""
    label = _full_lookup_table(code_name).get(syndrome)
    if label is None:
        return None, None, False
    return pauli_matrix(label), label, syndrome in _lookup_table(code_name)


# --- binomial recovery ------------------------------------------------------


@lru_cache(maxsize=None)
def binomial_recovery_kraus(n_trunc: int = 23):
    """Kraus operators of the mod-3 syndrome recovery.

    Per syndrome class the primary Kraus maps the designated (codeword,
    loss image, or gain image) pair back onto the codewords; orthogonal
    remainders in the class are sent to the codewords incoherently.
    Returns (kraus list, primary flags, syndrome labels).
    """
    code = binomial_code(n_trunc)
    dim = code.dim
    a = annihilation(n_trunc)
    adag = a.conj().T

    def normalized(v):
        return v / np.linalg.norm(v)

    designated = {
        0: (code.logical_g, code.logical_e),
        2: (normalized(a @ code.logical_g), normalized(a @ code.logical_e)),
        1: (normalized(adag @ code.logical_g), normalized(adag @ code.logical_e)),
    }
    kraus, primary, labels = [], [], []
    for cls in (0, 1, 2):
        levels = [n for n in range(dim) if n % 3 == cls]
        gs, es = designated[cls]
        k = np.outer(code.logical_g, gs.conj()) + np.outer(code.logical_e, es.conj())
        kraus.append(k)
        primary.append(True)
        labels.append(cls)
        # Orthonormal remainder basis of the class subspace.
        basis = np.zeros((dim, len(levels)), dtype=complex)
        for j, n in enumerate(levels):
            basis[n, j] = 1.0
        span = np.stack([gs, es], axis=1)
        proj = basis - span @ (span.conj().T @ basis)
        q, r = np.linalg.qr(proj)
        keep = np.abs(np.diag(r)) > 1e-10
        for j, col in enumerate(q.T[keep]):
            target = code.logical_g if j % 2 == 0 else code.logical_e
            kraus.append(np.outer(target, col.conj()))
            primary.append(False)
            labels.append(cls)
    return kraus, primary, labels


# --- recovery ---------------------------------------------------------------


def _recover_qubit_code(code, rho, mode, rng):
    stabs = stabilizer_matrices(code.name)
    dim = code.dim
    eye = np.eye(dim, dtype=complex)
    if mode == "sample":
        syndrome = []
        m = rho.matrix
        for s in stabs:
            # tr(P+ m) with P+ = (I + S)/2, normalized by the running trace
            p_plus = 0.5 * (1.0 + np.trace(s @ m).real / np.trace(m).real)
            p_plus = min(max(p_plus, 0.0), 1.0)
            bit = 0 if rng.random() < p_plus else 1
            proj = 0.5 * (eye + (1 - 2 * bit) * s)
            m = proj @ m @ proj
            m /= np.trace(m).real
            syndrome.append(bit)
        syndrome = tuple(syndrome)
        corr, label, guaranteed = correction_matrix(code.name, syndrome)
        if corr is None:
            return (DensityMatrix(m), SyndromeResult(syndrome, "I (no table entry)", True))
        out = corr @ m @ corr.conj().T
        return (DensityMatrix(out), SyndromeResult(syndrome, label, not guaranteed))
    # averaged: split into syndrome sectors, correct each, re-sum
    sectors = [((), rho.matrix)]
    for s in stabs:
        nxt = []
        for syn, m in sectors:
            for bit in (0, 1):
                proj = 0.5 * (eye + (1 - 2 * bit) * s)
                blk = proj @ m @ proj
                if np.trace(blk).real > 1e-14:
                    nxt.append((syn + (bit,), blk))
        sectors = nxt
    out = np.zeros((dim, dim), dtype=complex)
    bad_weight = 0.0
    for syn, m in sectors:
        corr, _, guaranteed = correction_matrix(code.name, syn)
        if corr is None:
            bad_weight += np.trace(m).real
            out += m
            continue
        if not guaranteed:
            bad_weight += np.trace(m).real
        out += corr @ m @ corr.conj().T
    res = SyndromeResult(None, "averaged over syndromes",
                         bad_weight > 1e-12, bad_weight)
    return DensityMatrix(out), res


def _recover_binomial(code, rho, mode, rng):
    kraus, primary, labels = binomial_recovery_kraus(code.dim - 1)
    if mode == "sample":
        probs = np.array([np.trace(k @ rho.matrix @ k.conj().T).real for k in kraus])
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        idx = int(np.searchsorted(np.cumsum(probs), rng.random()))
        idx = min(idx, len(kraus) - 1)
        k = kraus[idx]
        m = k @ rho.matrix @ k.conj().T
        m /= np.trace(m).real
        res = SyndromeResult(labels[idx],
                             "primary isometry" if primary[idx] else "best-effort remainder",
                             not primary[idx])
        return DensityMatrix(m), res
    out = np.zeros_like(rho.matrix)
    bad_weight = 0.0
    for k, is_primary in zip(kraus, primary):
        term = k @ rho.matrix @ k.conj().T
        out += term
        if not is_primary:
            bad_weight += np.trace(term).real
    res = SyndromeResult(None, "averaged over syndromes",
                         bad_weight > 1e-12, bad_weight)
    return DensityMatrix(out), res


def recover(code: CodeSpec, state: DensityMatrix, mode: str = "average",
            rng: np.random.Generator | None = None):
    """Syndrome extraction plus recovery; 'average' applies the full CP
    map, 'sample' draws one syndrome projectively (requires rng)."""
    if state.dim != code.dim:
        raise ValueError(f"state dimension {state.dim} != code carrier {code.dim}")
    if mode not in ("average", "sample"):
        raise ValueError(f"mode must be 'average' or 'sample', got {mode!r}")
    if mode == "sample" and rng is None:
        raise ValueError("sample mode needs an rng")
    if code.carrier == "qubits":
        return _recover_qubit_code(code, state, mode, rng)
    return _recover_binomial(code, state, mode, rng)


def logical_flip_probability_three_qubit(p_phi: float) -> float:
    """Probability that majority voting fails, by enumerating the 8
    i.i.d. flip patterns (equals 3 p^2 - 2 p^3)."""
    if not 0.0 <= p_phi <= 1.0:
        raise ValueError(f"p_phi must lie in [0, 1], got {p_phi}")
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=3):
        if sum(pattern) >= 2:
            weight = 1.0
            for bit in pattern:
                weight *= p_phi if bit else (1.0 - p_phi)
            total += weight
    return total


def logical_conditional_displacement(code: CodeSpec, alpha: complex,
                                     n_trunc: int) -> LinearOperator:
    """P_gL x D(-alpha) + P_eL x D(alpha) + (complement) x I on carrier x mode."""
    pg, pe = code.codeword_projectors()
    rest = np.eye(code.dim, dtype=complex) - pg - pe
    d_minus = displacement_operator(-alpha, n_trunc).matrix
    d_plus = displacement_operator(alpha, n_trunc).matrix
    eye = np.eye(n_trunc + 1, dtype=complex)
    mat = np.kron(pg, d_minus) + np.kron(pe, d_plus) + np.kron(rest, eye)
    return LinearOperator(mat, f"C_L[{code.name}]({alpha:.4g})")


def logical_Y_probabilities(code: CodeSpec, state: DensityMatrix):
    """(P(+Y_L), P(-Y_L), P(outside codespace))."""
    plus, minus = code.y_states()
    p_plus = np.real(plus.conj() @ state.matrix @ plus)
    p_minus = np.real(minus.conj() @ state.matrix @ minus)
    return float(p_plus), float(p_minus), float(max(1.0 - p_plus - p_minus, 0.0))


def logical_Y_measurement(code: CodeSpec, state: DensityMatrix,
                          rng: np.random.Generator):
    """Projective measurement in {|+Y>_L, |-Y>_L, complement}; the
    complement outcome is flagged with the label 'complement'."""
    p_plus, p_minus, p_comp = logical_Y_probabilities(code, state)
    u = rng.random()
    plus, minus = code.y_states()
    if u < p_plus:
        proj = np.outer(plus, plus.conj())
        outcome, p = "+", p_plus
    elif u < p_plus + p_minus:
        proj = np.outer(minus, minus.conj())
        outcome, p = "-", p_minus
    else:
        pg, pe = np.outer(plus, plus.conj()), np.outer(minus, minus.conj())
        proj = np.eye(code.dim, dtype=complex) - pg - pe
        outcome, p = "complement", p_comp
    m = proj @ state.matrix @ proj.conj().T
    m /= np.trace(m).real
    return outcome, DensityMatrix(m)
