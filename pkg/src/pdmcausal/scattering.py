"""Probe-qubit scattering circuit for measuring two-time correlators.

A probe qubit prepared in |0> is Hadamard-rotated, applies a controlled
W = U^dag P2 U (the time-2 Pauli conjugated through the evolution U),
then a controlled V = P1, is Hadamard-rotated again and read out in the
z basis. The final <sigma_z> of the probe equals the two-time correlator
<P1, P2> obtained from coarse-grained measurements, which is the point of
the construction: one fine-grained probe readout stands in for repeated
measurements of the register.

The simulation always evolves the full probe+register density matrix; the
closed-form shortcut Re Tr[P1 U^dag P2 U rho] appears only in tests as an
independent oracle.

Gate grammar
------------
Circuits can be described in JSON with gates drawn from a fixed registry,
written as ``name(args)`` with integer wire indices (0 = most significant
register qubit):

* ``hadamard(q)``
* ``pauli(P,q)``             P one of X, Y, Z (or I)
* ``cnot(c,t)``
* ``swap(a,b)``
* ``partial_swap(theta,a,b)``  theta a float or multiple of pi, e.g. ``3pi/8``

A scattering-spec document looks like::

    {"qubits": 3,
     "state": {"dim": 8, "re": [[...]], "im": [[...]]},
     "gates": ["swap(0,1)", "partial_swap(pi/2,1,2)"],
     "p1": "XII",
     "p2": "IIX"}
"""

import re
from dataclasses import dataclass

import numpy as np

from .channels import DensityMatrix, UnitaryGate, density_matrix, partial_swap
from .pdm import CorrelatorTable
from .serialize import matrix_from_jsonable, parse_angle
from .tensor import PAULI_1Q, as_complex_matrix, kron, pauli_matrix, pauli_strings, qubit_layout

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class ScatteringSpec:
    """Register state, evolution, and the two Pauli measurement choices."""

    system_state: DensityMatrix
    evolution: tuple
    p1: str
    p2: str

    def __post_init__(self):
        object.__setattr__(self, "evolution", tuple(self.evolution))
        d = self.system_state.dim
        n = int(round(np.log2(d)))
        if 2**n != d:
            raise ValueError(f"register dim {d} is not a power of two")
        if len(self.p1) != n or len(self.p2) != n:
            raise ValueError(
                f"Pauli strings must cover the {n}-qubit register, got {self.p1!r}, {self.p2!r}"
            )
        for u in self.evolution:
            if not isinstance(u, UnitaryGate) or u.dim != d:
                raise ValueError("evolution must be UnitaryGates matching the register dim")

    @property
    def n_qubits(self) -> int:
        return len(self.p1)


@dataclass(frozen=True)
class ProbeResult:
    """Final z expectation of the probe qubit."""

    expectation: float

    def __post_init__(self):
        if abs(self.expectation) > 1.0 + 1e-9:
            raise ValueError(f"probe expectation {self.expectation} outside [-1, 1]")


def embed_gate(gate, wires, n_qubits: int) -> np.ndarray:
    """Embed a k-qubit gate acting on ``wires`` into an n-qubit register."""
    g = as_complex_matrix(gate)
    wires = tuple(int(w) for w in wires)
    k = len(wires)
    if g.shape[0] != 2**k:
        raise ValueError(f"gate dim {g.shape[0]} does not match {k} wire(s)")
    if len(set(wires)) != k:
        raise ValueError(f"duplicate wires {wires}")
    if any(w < 0 or w >= n_qubits for w in wires):
        raise ValueError(f"wires {wires} out of range for {n_qubits} qubits")
    rest = [q for q in range(n_qubits) if q not in wires]
    order = list(wires) + rest
    full = np.kron(g, np.eye(2 ** (n_qubits - k), dtype=complex))
    src = [order.index(q) for q in range(n_qubits)]
    axes = src + [n_qubits + s for s in src]
    t = full.reshape((2,) * (2 * n_qubits))
    return t.transpose(axes).reshape(2**n_qubits, 2**n_qubits)


_GATE_RE = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")


def parse_gate(text: str, n_qubits: int) -> UnitaryGate:
    """Build a full-register unitary from a gate-grammar string."""
    match = _GATE_RE.match(text)
    if not match:
        raise ValueError(f"cannot parse gate {text!r}; expected name(args)")
    name, raw = match.group(1), match.group(2)
    args = [a.strip() for a in raw.split(",")] if raw.strip() else []
    layout = qubit_layout(n_qubits)

    def wire(a):
        return int(a)

    if name == "hadamard":
        if len(args) != 1:
            raise ValueError("hadamard takes one wire: hadamard(q)")
        mat = embed_gate(HADAMARD, (wire(args[0]),), n_qubits)
    elif name == "pauli":
        if len(args) != 2 or args[0].upper() not in PAULI_1Q:
            raise ValueError("pauli takes a letter and a wire: pauli(X,q)")
        mat = embed_gate(PAULI_1Q[args[0].upper()], (wire(args[1]),), n_qubits)
    elif name == "cnot":
        if len(args) != 2:
            raise ValueError("cnot takes control and target: cnot(c,t)")
        mat = embed_gate(CNOT, (wire(args[0]), wire(args[1])), n_qubits)
    elif name == "swap":
        if len(args) != 2:
            raise ValueError("swap takes two wires: swap(a,b)")
        mat = embed_gate(SWAP, (wire(args[0]), wire(args[1])), n_qubits)
    elif name == "partial_swap":
        if len(args) != 3:
            raise ValueError("partial_swap takes theta and two wires: partial_swap(theta,a,b)")
        theta = parse_angle(args[0])
        mat = embed_gate(partial_swap(theta).mat, (wire(args[1]), wire(args[2])), n_qubits)
    else:
        raise ValueError(
            f"unknown gate {name!r}; registry: hadamard, pauli, cnot, swap, partial_swap"
        )
    return UnitaryGate(mat=mat, layout=layout)


def spec_from_json(doc: dict) -> ScatteringSpec:
    """Parse a scattering-spec JSON document (see module docstring)."""
    try:
        n = int(doc["qubits"])
        state = density_matrix(matrix_from_jsonable(doc["state"]))
        gates = tuple(parse_gate(g, n) for g in doc["gates"])
        p1 = str(doc["p1"])
        p2 = str(doc["p2"])
    except KeyError as exc:
        raise ValueError(f"scattering spec is missing field {exc}") from exc
    return ScatteringSpec(system_state=state, evolution=gates, p1=p1, p2=p2)


def _total_evolution(spec: ScatteringSpec) -> np.ndarray:
    u = np.eye(spec.system_state.dim, dtype=complex)
    for gate in spec.evolution:
        u = gate.mat @ u
    return u


def _controlled(op: np.ndarray) -> np.ndarray:
    d = op.shape[0]
    c = np.zeros((2 * d, 2 * d), dtype=complex)
    c[:d, :d] = np.eye(d)
    c[d:, d:] = op
    return c


def _register_after_interactions(spec: ScatteringSpec) -> np.ndarray:
    """Probe+register density matrix after C-W and C-V, before the readout Hadamard."""
    d = spec.system_state.dim
    u = _total_evolution(spec)
    v = pauli_matrix(spec.p1)
    w = u.conj().T @ pauli_matrix(spec.p2) @ u
    probe0 = np.zeros((2, 2), dtype=complex)
    probe0[0, 0] = 1.0
    rho = kron(probe0, spec.system_state.mat)
    had = kron(HADAMARD, np.eye(d, dtype=complex))
    rho = had @ rho @ had
    for ctrl in (_controlled(w), _controlled(v)):
        rho = ctrl @ rho @ ctrl.conj().T
    return rho


def probe_state_before_readout(spec: ScatteringSpec) -> np.ndarray:
    """Reduced probe state just before the final Hadamard."""
    d = spec.system_state.dim
    rho = _register_after_interactions(spec)
    return np.einsum("iaja->ij", rho.reshape(2, d, 2, d))


def simulate_scattering(spec: ScatteringSpec) -> ProbeResult:
    """Run the probe circuit by full density-matrix evolution.

    The returned expectation is the z readout of the probe after
    Hadamard, controlled-W, controlled-V, Hadamard.
    """
    d = spec.system_state.dim
    rho = _register_after_interactions(spec)
    had = kron(HADAMARD, np.eye(d, dtype=complex))
    rho = had @ rho @ had
    z = kron(np.diag([1.0, -1.0]).astype(complex), np.eye(d, dtype=complex))
    val = complex(np.trace(z @ rho))
    if abs(val.imag) > IMAG_TOL:
        raise RuntimeError(f"probe expectation has imaginary part {val.imag:.3e}")
    return ProbeResult(expectation=float(val.real))


def correlator_via_scattering(rho1: DensityMatrix, unitaries, p1: str, p2: str) -> float:
    """Two-time correlator measured through the scattering circuit."""
    spec = ScatteringSpec(system_state=rho1, evolution=tuple(unitaries), p1=p1, p2=p2)
    return simulate_scattering(spec).expectation


def pad_pauli(letters: str, wires, n_qubits: int) -> str:
    """Place an n-site Pauli string on the given wires of a larger register."""
    wires = tuple(int(w) for w in wires)
    if len(letters) != len(wires):
        raise ValueError(f"{len(wires)} wire(s) but {len(letters)} Pauli letter(s)")
    out = ["I"] * n_qubits
    for letter, w in zip(letters, wires):
        out[w] = letter
    return "".join(out)


def table_via_scattering(
    state: DensityMatrix, unitaries, t1_wires, t2_wires
) -> CorrelatorTable:
    """Full correlator table where time-1/2 measurements act on chosen wires.

    Wires not listed carry the identity at both times; ancilla wires are
    thereby never measured, only traced out implicitly by the readout.
    """
    if len(t1_wires) != len(t2_wires):
        raise ValueError("need the same number of measured wires at both times")
    n = len(t1_wires)
    n_reg = int(round(np.log2(state.dim)))
    values = {}
    for s1 in pauli_strings(n):
        for s2 in pauli_strings(n):
            values[(s1, s2)] = correlator_via_scattering(
                state,
                unitaries,
                pad_pauli(s1, t1_wires, n_reg),
                pad_pauli(s2, t2_wires, n_reg),
            )
    return CorrelatorTable(n=n, values=values)
