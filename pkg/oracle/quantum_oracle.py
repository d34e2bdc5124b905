"""
Exact density-matrix runs of the indexing schemes on tiny instances.

The token model claims that a register reported "correct" still holds its
source's entanglement with a reference system. This module checks that claim
with dense linear algebra: encode, transport, adversarial fill with a fixed
intruder state, projective header measurement, rearrangement and ⊥ flags.
Output systems live in C^3 spanned by |0>, |1>, |⊥>.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from agents.auditor import is_intact
from agents.indexers import SyncIndexerAgent, TrivialIndexerAgent
from channel.insdel_channel import apply_channel
from protocol.qubit_protocol import E0Code, encode_E0
from schemas.errors import DimMismatch, TooLarge
from schemas.noise import NoisePattern
from schemas.registers import BOTTOM, Register, TokenMint
from sync.index_decoder import decode_indices
from sync.sync_string import SyncString

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
VERDICT_TOLERANCE = 1e-9
MAX_EXACT_N = 3
MAX_EXACT_BUDGET = 2
ERASURE_LEVEL = 2  # |⊥> in the embedded output space


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    data: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        rows, cols = self.data.shape
        if rows != cols or rows != prod(self.dims):
            raise DimMismatch(f"{rows}x{cols} matrix does not match subsystem dims {self.dims}")
        if not np.allclose(self.data, self.data.conj().T, atol=TOLERANCE):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.data) - 1) > TOLERANCE:
            raise ValueError(f"density matrix has trace {np.trace(self.data).real:.12f}")
        if np.linalg.eigvalsh(self.data).min() < -TOLERANCE:
            raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def pure(cls, psi: np.ndarray, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def kron(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.data, other.data), self.dims + other.dims)

    def permute(self, order: Sequence[int]) -> "DensityMatrix":
        k = len(self.dims)
        tensor = self.data.reshape(self.dims * 2).transpose(list(order) + [k + o for o in order])
        dims = tuple(self.dims[o] for o in order)
        return DensityMatrix(tensor.reshape(prod(dims), prod(dims)), dims)

    def partial_trace(self, traced: Sequence[int]) -> "DensityMatrix":
        """Tr over the listed subsystems"""
        dims = list(self.dims)
        tensor = self.data.reshape(self.dims * 2)
        for idx in sorted(set(traced), reverse=True):
            tensor = np.trace(tensor, axis1=idx, axis2=idx + len(dims))
            dims.pop(idx)
        d = prod(dims)
        return DensityMatrix(np.asarray(tensor).reshape(d, d), tuple(dims))

    def keep(self, kept: Sequence[int]) -> "DensityMatrix":
        """Marginal on `kept`, in the order given"""
        reduced = self.partial_trace([i for i in range(len(self.dims)) if i not in kept])
        survivors = sorted(kept)
        return reduced.permute([survivors.index(i) for i in kept])

    def conjugate_by(self, op: np.ndarray, dims: Sequence[int]) -> "DensityMatrix":
        return DensityMatrix(op @ self.data @ op.conj().T, tuple(dims))


def fidelity(rho: DensityMatrix, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a pure target state"""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (rho.dim,):
        raise DimMismatch(f"state of length {psi.shape[0]} against a {rho.dim}-dimensional density matrix")
    value = psi.conj() @ rho.data @ psi
    if abs(value.imag) > TOLERANCE:
        raise ValueError(f"fidelity has imaginary part {value.imag}")
    return float(min(max(value.real, 0.0), 1.0))


def basis(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


def bell_input(n: int) -> DensityMatrix:
    """n Bell pairs ordered as A_1..A_n, R_1..R_n"""
    pair = (basis(4, 0) + basis(4, 3)) / np.sqrt(2)
    psi = np.array([1], dtype=complex)
    for _ in range(n):
        psi = np.kron(psi, pair)
    interleaved = DensityMatrix.pure(psi, (2,) * (2 * n))
    return interleaved.permute([2 * i for i in range(n)] + [2 * i + 1 for i in range(n)])


def embedded_bell() -> np.ndarray:
    """(|00> + |11>)/sqrt(2) with the first factor embedded in C^3"""
    return (basis(6, 0) + basis(6, 3)) / np.sqrt(2)


class Verdict(str, Enum):
    CORRECT = "correct"
    CORRUPT = "corrupt"
    ERASURE = "erasure"


def _headers(scheme: str, n: int, s: Optional[SyncString]) -> List[str]:
    if scheme == "trivial":
        return [str(i) for i in range(1, n + 1)]
    if scheme == "sync":
        if s is None or len(s) != n:
            raise DimMismatch("sync scheme needs a sync string of length n")
        return [str(s.symbol(i)) for i in range(1, n + 1)]
    raise ValueError(f"unknown scheme {scheme!r}")


def default_fill_headers(scheme: str, pattern: NoisePattern, s: Optional[SyncString] = None) -> List[str]:
    """Each intruder copies the header of the input position its slot number points at"""
    headers = _headers(scheme, pattern.n, s)
    return [headers[min(slot, pattern.n) - 1] for slot in pattern.fill_slots()]


def _measure_header(state: DensityMatrix, header: int, levels: int) -> Tuple[DensityMatrix, int]:
    """Attach the classical header |header>, measure it with Π_ℓ and trace it out"""
    joined = state.kron(DensityMatrix.pure(basis(levels, header), (levels,)))
    rest = np.eye(state.dim)
    outcome, post = None, None
    for label in range(levels):
        projector = np.kron(rest, np.outer(basis(levels, label), basis(levels, label)))
        probability = float(np.trace(projector @ joined.data).real)
        if probability > TOLERANCE:
            if outcome is not None:
                raise ValueError("classical header measured with more than one outcome")
            outcome = label
            post = DensityMatrix((projector @ joined.data @ projector) / probability, joined.dims)
    return post.partial_trace([len(post.dims) - 1]), outcome


def _assign(scheme: str, labels: List[str], n: int, s: Optional[SyncString]) -> List[Optional[int]]:
    """Output position k -> the unique slot (0-based) claiming k, or None"""
    claims: Dict[int, List[int]] = {}
    if scheme == "trivial":
        for slot, label in enumerate(labels):
            if label.isdigit() and label == str(int(label)) and 1 <= int(label) <= n:
                claims.setdefault(int(label), []).append(slot)
    else:
        valid = [(slot, int(label)) for slot, label in enumerate(labels)
                 if label.isdigit() and label == str(int(label)) and int(label) < s.alphabet_size]
        decoding = decode_indices(s, [symbol for _, symbol in valid])
        for (slot, _), index in zip(valid, decoding.entries):
            if index is not None:
                claims.setdefault(index, []).append(slot)
    return [claims[k][0] if len(claims.get(k, [])) == 1 else None for k in range(1, n + 1)]


def simulate_protocol_exact(input_state: DensityMatrix, scheme: str, pattern: NoisePattern,
                            s: Optional[SyncString] = None, fill_headers: Optional[Sequence[str]] = None,
                            intruder: Optional[np.ndarray] = None) -> DensityMatrix:
    """
    Runs one scheme under `pattern` on A_1..A_n (qubits, the first n subsystems)
    jointly with whatever reference systems follow. Returns the state over
    Out_1..Out_n (each C^3) followed by the untouched reference systems.
    """
    n = pattern.n
    if n > MAX_EXACT_N or pattern.p + pattern.q > MAX_EXACT_BUDGET:
        raise TooLarge(f"exact simulation limited to n <= {MAX_EXACT_N}, p+q <= {MAX_EXACT_BUDGET}")
    if input_state.dims[:n] != (2,) * n:
        raise DimMismatch(f"first {n} subsystems must be qubits, got dims {input_state.dims}")

    headers = _headers(scheme, n, s)
    fill_headers = list(fill_headers) if fill_headers is not None else default_fill_headers(scheme, pattern, s)
    if len(fill_headers) != pattern.q:
        raise DimMismatch(f"{len(fill_headers)} fill headers for {pattern.q} inserted slots")
    intruder = basis(2, 0) if intruder is None else intruder
    refs = list(input_state.dims[n:])

    # transport: deleted registers leave the picture, intruders join at the end
    state = input_state.partial_trace([i - 1 for i in pattern.deleted()])
    for _ in range(pattern.q):
        state = state.kron(DensityMatrix.pure(intruder, (2,)))
    # now ordered survivors, references, intruders; bring the data into slot order
    kept_count = len(pattern.survivors)
    systems = list(range(kept_count)) + [kept_count + len(refs) + j for j in range(pattern.q)]
    slot_of = list(pattern.landing) + pattern.fill_slots()
    length = len(slot_of)
    by_slot = [systems[k] for k in sorted(range(length), key=lambda k: slot_of[k])]
    state = state.permute(by_slot + list(range(kept_count, kept_count + len(refs))))

    labels_by_slot = {f: headers[i - 1] for i, f in zip(pattern.survivors, pattern.landing)}
    labels_by_slot.update(zip(pattern.fill_slots(), fill_headers))
    vocabulary = sorted(set(labels_by_slot.values()))
    measured: List[str] = []
    for slot in range(1, length + 1):
        state, outcome = _measure_header(state, vocabulary.index(labels_by_slot[slot]), len(vocabulary))
        measured.append(vocabulary[outcome])

    assignment = _assign(scheme, measured, n, s)
    kept = [slot for slot in assignment if slot is not None]
    state = state.keep(kept + [length + j for j in range(len(refs))])

    embed = np.zeros((3, 2), dtype=complex)
    embed[0, 0] = embed[1, 1] = 1
    op = np.array([[1]], dtype=complex)
    for _ in kept:
        op = np.kron(op, embed)
    op = np.kron(op, np.eye(prod(refs)))
    state = state.conjugate_by(op, (3,) * len(kept) + tuple(refs))

    erased = [k for k, slot in enumerate(assignment) if slot is None]
    for _ in erased:
        state = state.kron(DensityMatrix.pure(basis(3, ERASURE_LEVEL), (3,)))
    # current order: kept positions, refs, erased positions
    positions = [k for k, slot in enumerate(assignment) if slot is not None] + erased
    current = {pos: idx for idx, pos in enumerate(positions[:len(kept)])}
    current.update({pos: len(kept) + len(refs) + j for j, pos in enumerate(erased)})
    order = [current[k] for k in range(n)] + [len(kept) + j for j in range(len(refs))]
    return state.permute(order)


def exact_verdicts(output: DensityMatrix, n: int) -> List[Verdict]:
    """Per-position verdicts for an output of simulate_protocol_exact on bell_input(n)"""
    verdicts = []
    target = embedded_bell()
    for k in range(n):
        out = output.keep([k])
        if abs(out.data[ERASURE_LEVEL, ERASURE_LEVEL].real - 1) < VERDICT_TOLERANCE:
            verdicts.append(Verdict.ERASURE)
        elif abs(fidelity(output.keep([k, n + k]), target) - 1) < VERDICT_TOLERANCE:
            verdicts.append(Verdict.CORRECT)
        else:
            verdicts.append(Verdict.CORRUPT)
    return verdicts


def token_verdicts(scheme: str, pattern: NoisePattern, fill_headers: Sequence[str],
                   s: Optional[SyncString] = None) -> List[Verdict]:
    """Same run in the opaque-token model"""
    mint = TokenMint()
    source = mint.source(pattern.n)
    fill = [Register(payload=mint.adversarial("intruder"), header=h) for h in fill_headers]
    if scheme == "trivial":
        indexer = TrivialIndexerAgent()
        output = indexer.decode(apply_channel(indexer.encode(source), pattern, fill), pattern.n)
    else:
        indexer = SyncIndexerAgent(s)
        output = indexer.decode(apply_channel(indexer.encode(source), pattern, fill))

    verdicts = []
    for expected, entry in zip(source, output.entries):
        if entry is BOTTOM:
            verdicts.append(Verdict.ERASURE)
        elif is_intact(entry.payload, expected):
            verdicts.append(Verdict.CORRECT)
        else:
            verdicts.append(Verdict.CORRUPT)
    return verdicts


def compare_with_token_model(scheme: str, pattern: NoisePattern, s: Optional[SyncString] = None,
                             fill_headers: Optional[Sequence[str]] = None) -> List[Tuple[int, Verdict, Verdict]]:
    """Positions (1-based) where the token model and the exact run disagree"""
    fill_headers = list(fill_headers) if fill_headers is not None else default_fill_headers(scheme, pattern, s)
    exact = exact_verdicts(simulate_protocol_exact(bell_input(pattern.n), scheme, pattern, s, fill_headers),
                           pattern.n)
    tokens = token_verdicts(scheme, pattern, fill_headers, s)
    mismatches = [(k, t, e) for k, (t, e) in enumerate(zip(tokens, exact), start=1) if t is not e]
    if mismatches:
        logger.warning("token model disagrees with the exact run on %s: %s", pattern.to_json(), mismatches)
    return mismatches


def e0_isometry(code: E0Code) -> np.ndarray:
    """2^r' x 2^r matrix sending |x> to |E0(x)>"""
    iso = np.zeros((2 ** code.r_prime, 2 ** code.r), dtype=complex)
    for x in range(2 ** code.r):
        iso[int(encode_E0(format(x, f"0{code.r}b"), code), 2), x] = 1
    return iso


class ToyReport(NamedTuple):
    pass_probability: float
    fidelity: float  # of the decoded chunk with its reference, given that the support test passed


def e0_toy(code: E0Code = E0Code(r=2, s=4), flip: Optional[int] = None) -> ToyReport:
    """
    One chunk maximally entangled with a reference, re-encoded by E0, optionally
    hit by an X on wire qubit `flip` (1-based), then support-tested and decoded.
    """
    iso = e0_isometry(code)
    dim_in, dim_wire = 2 ** code.r, 2 ** code.r_prime
    phi = sum(np.kron(basis(dim_in, x), basis(dim_in, x)) for x in range(dim_in)) / np.sqrt(dim_in)
    wire = np.kron(iso, np.eye(dim_in)) @ phi

    if flip is not None:
        if not 1 <= flip <= code.r_prime:
            raise DimMismatch(f"flip position {flip} outside 1..{code.r_prime}")
        mask = 1 << (code.r_prime - flip)
        perm = np.zeros((dim_wire, dim_wire))
        for b in range(dim_wire):
            perm[b ^ mask, b] = 1
        wire = np.kron(perm, np.eye(dim_in)) @ wire

    projected = np.kron(iso @ iso.conj().T, np.eye(dim_in)) @ wire
    probability = float(np.vdot(projected, projected).real)
    if probability < TOLERANCE:
        return ToyReport(0.0, 0.0)
    decoded = np.kron(iso.conj().T, np.eye(dim_in)) @ projected / np.sqrt(probability)
    return ToyReport(probability, float(abs(np.vdot(phi, decoded)) ** 2))
