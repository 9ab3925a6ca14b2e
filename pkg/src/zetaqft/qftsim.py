"""Gate-level statevector simulation of the QFT and of the centred (Sylvester) transform.

Index conventions: arrays are 0-based, so the 1-based lattice index ``j``
of the discrete position operator corresponds to ``j_array = j - 1``.
Qubit 0 is the least significant bit of a basis index.

With a = N - 1 the centred kernel factorises as::

    F[j, k] = exp(i pi a^2 / 2N) * exp(-i pi a j / N)
              * exp(2 pi i j k / N) / sqrt(N) * exp(-i pi a k / N)

i.e. diagonal phase, standard QFT, diagonal phase.  The constant phase is
folded into the first diagonal layer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .specialfn import DEFAULT_TOL, EvalTolerances
from .wavefuncs import DeformationParams, FunctionId, SampledCurve, Space, position_wavefunction_array

__all__ = [
    "MAX_QUBITS",
    "Hadamard",
    "ControlledPhase",
    "Swap",
    "DiagonalPhase",
    "Circuit",
    "Statevector",
    "position_operator",
    "sylvester_matrix",
    "momentum_operator",
    "build_qft_circuit",
    "build_centered_qft_circuit",
    "apply_circuit",
    "centered_qft",
    "default_dx",
    "qft_pipeline",
]

MAX_QUBITS = 24


@dataclass(frozen=True)
class Hadamard:
    qubit: int

    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True)
class ControlledPhase:
    control: int
    target: int
    angle: float

    def __post_init__(self):
        if self.control == self.target:
            raise ConfigError("controlled phase needs distinct control and target")

    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True)
class Swap:
    a: int
    b: int

    def qubits(self):
        return (self.a, self.b)


@dataclass(frozen=True, eq=False)
class DiagonalPhase:
    """Multiplies basis state |k> by exp(i angles[k])."""

    angles: np.ndarray

    def qubits(self):
        return ()


Gate = Hadamard | ControlledPhase | Swap | DiagonalPhase


def _gate_to_dict(g) -> dict:
    if isinstance(g, Hadamard):
        return {"kind": "hadamard", "qubits": [g.qubit]}
    if isinstance(g, ControlledPhase):
        return {"kind": "controlled_phase", "qubits": [g.control, g.target], "angle": g.angle}
    if isinstance(g, Swap):
        return {"kind": "swap", "qubits": [g.a, g.b]}
    return {"kind": "diagonal_phase", "qubits": [], "angles": [float(a) for a in g.angles]}


def _gate_from_dict(d: dict):
    kind = d["kind"]
    q = d.get("qubits", [])
    if kind == "hadamard":
        return Hadamard(q[0])
    if kind == "controlled_phase":
        return ControlledPhase(q[0], q[1], float(d["angle"]))
    if kind == "swap":
        return Swap(q[0], q[1])
    if kind == "diagonal_phase":
        return DiagonalPhase(np.asarray(d["angles"], dtype=float))
    raise ConfigError(f"unknown gate kind {kind!r}")


def _check_qubits(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise ConfigError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        _check_qubits(self.n_qubits)
        for g in self.gates:
            self._validate(g)

    def _validate(self, g):
        if any(not 0 <= q < self.n_qubits for q in g.qubits()):
            raise ConfigError(f"gate {g} addresses a qubit outside 0..{self.n_qubits - 1}")
        if isinstance(g, DiagonalPhase) and len(g.angles) != 2**self.n_qubits:
            raise ConfigError("diagonal phase length must equal the register dimension")

    def append(self, g):
        self._validate(g)
        self.gates.append(g)

    def count(self, kind) -> int:
        return sum(isinstance(g, kind) for g in self.gates)

    def inverse(self) -> "Circuit":
        inv = []
        for g in reversed(self.gates):
            if isinstance(g, ControlledPhase):
                inv.append(ControlledPhase(g.control, g.target, -g.angle))
            elif isinstance(g, DiagonalPhase):
                inv.append(DiagonalPhase(-np.asarray(g.angles)))
            else:
                inv.append(g)
        return Circuit(self.n_qubits, inv)

    def to_matrix(self) -> np.ndarray:
        """Dense unitary, column k = circuit applied to |k>.  Small n only."""
        dim = 2**self.n_qubits
        cols = [apply_circuit(self, Statevector.basis(self.n_qubits, k)).amplitudes for k in range(dim)]
        return np.stack(cols, axis=1)

    def to_json(self) -> str:
        return json.dumps({"n_qubits": self.n_qubits, "gates": [_gate_to_dict(g) for g in self.gates]}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        data = json.loads(text)
        return cls(data["n_qubits"], [_gate_from_dict(d) for d in data["gates"]])


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_qubits(self.n_qubits)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ConfigError(f"expected {2 ** self.n_qubits} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "Statevector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "Statevector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(math.log2(len(amps))))
        if 2**n != len(amps):
            raise ConfigError("amplitude count must be a power of two")
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Statevector":
        nrm = self.norm()
        if nrm == 0:
            raise ConfigError("cannot normalise the zero vector")
        return Statevector(self.n_qubits, self.amplitudes / nrm)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


# ---------------------------------------------------------------------------
# dense operators


def _centered_index(N: int) -> np.ndarray:
    # 2j - (N+1) for 1-based j, written for 0-based j
    return 2.0 * np.arange(N) - (N - 1)


def position_operator(N: int) -> np.ndarray:
    """Diagonal position matrix sqrt(2pi/4N) (2j - (N+1)), j = 1..N."""
    if N < 2:
        raise ConfigError("N must be >= 2")
    return np.diag(math.sqrt(2 * math.pi / (4 * N)) * _centered_index(N))


def sylvester_matrix(N: int) -> np.ndarray:
    """Centred Fourier kernel exp((2 pi i / 4N)(2j-(N+1))(2k-(N+1))) / sqrt(N)."""
    if N < 2:
        raise ConfigError("N must be >= 2")
    c = _centered_index(N)
    return np.exp(2j * math.pi / (4 * N) * np.outer(c, c)) / math.sqrt(N)


def momentum_operator(N: int) -> np.ndarray:
    """F^dagger Q F."""
    F = sylvester_matrix(N)
    return F.conj().T @ position_operator(N) @ F


# ---------------------------------------------------------------------------
# circuits


def build_qft_circuit(n_qubits: int) -> Circuit:
    """Textbook QFT, |j> -> N^(-1/2) sum_k exp(2 pi i j k / N) |k>.

    Hadamard plus controlled rotations by pi/2^m on each qubit (most
    significant first), then the bit-reversal swap layer.
    """
    _check_qubits(n_qubits)
    c = Circuit(n_qubits)
    for j in reversed(range(n_qubits)):
        c.append(Hadamard(j))
        for k in reversed(range(j)):
            c.append(ControlledPhase(j, k, math.pi / 2 ** (j - k)))
    for i in range(n_qubits // 2):
        c.append(Swap(i, n_qubits - 1 - i))
    return c


def build_centered_qft_circuit(n_qubits: int) -> Circuit:
    """Circuit realising ``sylvester_matrix(2**n_qubits)``."""
    _check_qubits(n_qubits)
    N = 2**n_qubits
    a = N - 1
    j = np.arange(N, dtype=np.int64)
    # phases are integer multiples of pi/2N; reducing mod 4N keeps exp() accurate for large N
    pre = math.pi * ((a * a - 2 * a * j) % (4 * N)) / (2 * N)
    post = math.pi * ((-2 * a * j) % (4 * N)) / (2 * N)
    qft = build_qft_circuit(n_qubits)
    return Circuit(n_qubits, [DiagonalPhase(pre)] + qft.gates + [DiagonalPhase(post)])


def _apply_gate(amps: np.ndarray, n: int, g) -> None:
    """In-place application on the flat amplitude array."""
    if isinstance(g, Hadamard):
        v = amps.reshape(2 ** (n - g.qubit - 1), 2, 2**g.qubit)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = (a0 + a1) * _SQRT_HALF
        v[:, 1, :] = (a0 - a1) * _SQRT_HALF
    elif isinstance(g, ControlledPhase):
        mask = (1 << g.control) | (1 << g.target)
        idx = _indices(n)
        amps[(idx & mask) == mask] *= complex(math.cos(g.angle), math.sin(g.angle))
    elif isinstance(g, Swap):
        if g.a == g.b:
            return
        # axis for qubit q in the (2,)*n view is n - 1 - q
        t = amps.reshape((2,) * n)
        amps[:] = np.swapaxes(t, n - 1 - g.a, n - 1 - g.b).reshape(-1)
    elif isinstance(g, DiagonalPhase):
        amps *= np.exp(1j * np.asarray(g.angles))
    else:
        raise ConfigError(f"unknown gate {g!r}")


_SQRT_HALF = math.sqrt(0.5)
_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(n: int) -> np.ndarray:
    idx = _INDEX_CACHE.get(n)
    if idx is None:
        idx = _INDEX_CACHE[n] = np.arange(2**n)
    return idx


def apply_circuit(circuit: Circuit, sv: Statevector) -> Statevector:
    if circuit.n_qubits != sv.n_qubits:
        raise ConfigError(f"circuit has {circuit.n_qubits} qubits, state has {sv.n_qubits}")
    out = sv.copy()
    for g in circuit.gates:
        _apply_gate(out.amplitudes, sv.n_qubits, g)
    return out


def centered_qft(sv: Statevector) -> Statevector:
    return apply_circuit(build_centered_qft_circuit(sv.n_qubits), sv)


# ---------------------------------------------------------------------------
# position -> momentum pipeline

# 6-qubit default for F3: dx = 0.0625 puts p1 = 14.1347 at the exact midpoint
# between two momentum samples (9 * dp = 14.137), so no sampled dip exists.
_F3_DEFAULT_DX = 0.08


def default_dx(fid, n_qubits: int) -> float:
    """sqrt(2pi/N) (the lattice of the discrete position operator); 0.08 for F3."""
    fid = FunctionId.parse(fid)
    if fid is FunctionId.F3_xi:
        return _F3_DEFAULT_DX
    return math.sqrt(2 * math.pi / 2**n_qubits)


def qft_pipeline(fid, params: DeformationParams = DeformationParams(), n_qubits: int = 6,
                 dx: float | None = None, tol: EvalTolerances = DEFAULT_TOL) -> SampledCurve:
    """Momentum-space curve from a simulated centred QFT of the sampled ground state.

    The position samples on x_j = dx (j - (N-1)/2) are normalised into the
    register, transformed, and rescaled by ``norm * dx * sqrt(N) / sqrt(2pi)``
    so the output approximates the continuous transform on
    p_k = dp (k - (N-1)/2), dp = 2pi/(N dx).  The register computes the
    exp(+ipx) kernel; reading it in reverse order gives exp(-ipx).
    """
    fid = FunctionId.parse(fid)
    if n_qubits < 4:
        raise ConfigError("the pipeline needs at least 4 qubits")
    _check_qubits(n_qubits)
    if dx is None:
        dx = default_dx(fid, n_qubits)
    if not dx > 0:
        raise ConfigError("dx must be positive")
    N = 2**n_qubits
    lattice = np.arange(N) - 0.5 * (N - 1)
    x = dx * lattice
    psi = position_wavefunction_array(fid, x, params, tol)
    sv = Statevector(n_qubits, psi.astype(complex))
    norm = sv.norm()
    out = centered_qft(sv.normalized())
    values = out.amplitudes[::-1] * (norm * dx * math.sqrt(N) / math.sqrt(2 * math.pi))
    dp = 2 * math.pi / (N * dx)
    return SampledCurve(dp * lattice, values, Space.momentum, fid, params)
