"""Causal classification and the parameter-sweep experiment runners.

The classifier turns the three negativity values (of the PDM, of the
forward Choi matrix, and of the time-reversed Choi matrix) into one of
five structure verdicts: no PDM negativity is compatible with a common
cause; with PDM negativity present, the CP direction(s) decide between
A->B, B->A, either direction, or a mixture when neither direction is CP.

Sweep runners rebuild the swept experiment end to end for every grid
point: prepare the input state, realize the channel, assemble the PDM
(closed form by default, or through the scattering simulator), extract
both Choi matrices, and classify. Optional binomial shot noise models
finite measurement statistics on each correlator.
"""

from dataclasses import dataclass

import numpy as np

from .channels import (
    KET_0,
    DensityMatrix,
    UnitaryGate,
    density_matrix,
    fully_decohering_cj,
    mediated_partial_swap_cj,
    partial_swap,
    polarized_plus_state,
)
from .extraction import ExtractionError, SdpConfig, choi_of, extract_cj
from .pdm import (
    PDM,
    CorrelatorTable,
    correlator_table,
    negativity,
    pdm_closed_form,
    pdm_from_correlators,
    time_reverse,
)
from .scattering import CNOT, SWAP, embed_gate, table_via_scattering
from .tensor import eig_hermitian, kron_all, qubit_layout

VERDICT_KINDS = ("CommonCause", "AtoB", "BtoA", "EitherDirection", "Mixture")

DEFAULT_EPSILON = 1e-6


def _verdict_kind(f_pdm: float, f_fwd: float, f_rev: float, epsilon: float) -> str:
    if f_pdm <= epsilon:
        return "CommonCause"
    fwd_cp = f_fwd <= epsilon
    rev_cp = f_rev <= epsilon
    if fwd_cp and not rev_cp:
        return "AtoB"
    if rev_cp and not fwd_cp:
        return "BtoA"
    if fwd_cp and rev_cp:
        return "EitherDirection"
    return "Mixture"


@dataclass(frozen=True)
class CausalVerdict:
    """Classification outcome together with the evidence that produced it."""

    kind: str
    f_pdm: float
    f_forward: float
    f_reverse: float
    epsilon: float

    def __post_init__(self):
        if self.kind not in VERDICT_KINDS:
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        expected = _verdict_kind(self.f_pdm, self.f_forward, self.f_reverse, self.epsilon)
        if self.kind != expected:
            raise ValueError(
                f"verdict {self.kind} is inconsistent with its own negativities "
                f"(expected {expected})"
            )


def classify(f_pdm: float, f_fwd: float, f_rev: float, epsilon: float = DEFAULT_EPSILON) -> CausalVerdict:
    """Map the three negativity values to a causal-structure verdict.

    ``epsilon`` is the threshold below which a negativity counts as zero;
    noiseless pipelines use 1e-6, shot-noise runs should scale it with the
    statistical error.
    """
    for name, val in (("f_pdm", f_pdm), ("f_fwd", f_fwd), ("f_rev", f_rev)):
        if val < 0:
            raise ValueError(f"{name} must be nonnegative, got {val}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return CausalVerdict(
        kind=_verdict_kind(f_pdm, f_fwd, f_rev, epsilon),
        f_pdm=float(f_pdm),
        f_forward=float(f_fwd),
        f_reverse=float(f_rev),
        epsilon=float(epsilon),
    )


SWEEP_FAMILIES = ("theta_sweep", "lambda_sweep", "decohere_sweep")


@dataclass(frozen=True)
class SweepSpec:
    """One parameter sweep: which family, the grid, and fixed parameters."""

    family: str
    grid: tuple
    fixed: dict = None
    shots: int = None
    seed: int = None
    epsilon: float = None
    via_scattering: bool = False

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "fixed", dict(self.fixed or {}))
        if self.family not in SWEEP_FAMILIES:
            raise ValueError(f"unknown sweep family {self.family!r}; choose from {SWEEP_FAMILIES}")
        if not self.grid:
            raise ValueError("sweep grid is empty")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be a positive integer")
        if self.family == "theta_sweep":
            if any(not 0.0 <= g <= 2.0 * np.pi for g in self.grid):
                raise ValueError("theta grid values must lie in [0, 2*pi]")
            if "lambda" not in self.fixed:
                raise ValueError("theta_sweep needs fixed['lambda']")
        else:
            if any(not 0.0 <= g <= 1.0 for g in self.grid):
                raise ValueError("lambda grid values must lie in [0, 1]")
            if self.family == "lambda_sweep" and "theta" not in self.fixed:
                raise ValueError("lambda_sweep needs fixed['theta']")

    @property
    def effective_epsilon(self) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        if self.shots is not None:
            return 3.0 / np.sqrt(self.shots)
        return DEFAULT_EPSILON


@dataclass(frozen=True)
class SweepRecord:
    """Everything measured at one grid point, eigenvalues ascending."""

    param: float
    eig_pdm: tuple
    f_pdm: float
    eig_forward: tuple
    eig_reverse: tuple
    f_forward: float
    f_reverse: float
    verdict: str
    error: str = None


def sample_correlators(table: CorrelatorTable, shots: int, seed: int) -> CorrelatorTable:
    """Replace each correlator by an empirical mean of ``shots`` +/-1 draws.

    Sampling is binomial with the exact correlator as the mean, seeded
    deterministically; the identity-identity entry is kept at exactly 1.
    """
    if shots < 1:
        raise ValueError("shots must be a positive integer")
    rng = np.random.default_rng(seed)
    ident = "I" * table.n
    values = {}
    for key in sorted(table.values):
        exact = table.values[key]
        if key == (ident, ident):
            values[key] = 1.0
            continue
        p = min(max((1.0 + exact) / 2.0, 0.0), 1.0)
        hits = int(rng.binomial(shots, p))
        values[key] = 2.0 * hits / shots - 1.0
    return CorrelatorTable(n=table.n, values=values)


def _mediated_circuit(theta: float, lam: float):
    """Register state and gate list realizing the mediated partial swap.

    Wires: 0 = input system (measured at time 1), 1 = mediator, 2 = target
    (measured at time 2).
    """
    state = density_matrix(
        kron_all(polarized_plus_state(lam).mat, KET_0, KET_0), qubit_layout(3)
    )
    gates = (
        UnitaryGate(embed_gate(SWAP, (0, 1), 3), qubit_layout(3)),
        UnitaryGate(embed_gate(partial_swap(theta).mat, (1, 2), 3), qubit_layout(3)),
    )
    return state, gates, (0,), (2,)


def _decohering_circuit(lam: float):
    """Four-wire dilation of the fully decohering channel.

    Wire 0 carries the input, wire 1 the output; wires 2 (maximally mixed)
    and 3 scrub the coherence via two CNOTs before a SWAP moves the copy
    onto the output wire.
    """
    eye2 = np.eye(2, dtype=complex) / 2.0
    state = density_matrix(
        kron_all(polarized_plus_state(lam).mat, KET_0, eye2, KET_0), qubit_layout(4)
    )
    gates = (
        UnitaryGate(embed_gate(CNOT, (0, 2), 4), qubit_layout(4)),
        UnitaryGate(embed_gate(CNOT, (0, 3), 4), qubit_layout(4)),
        UnitaryGate(embed_gate(SWAP, (1, 3), 4), qubit_layout(4)),
    )
    return state, gates, (0,), (1,)


def _point_pdm(spec: SweepSpec, index: int, rho1: DensityMatrix, channel, circuit) -> PDM:
    """Assemble the PDM for one grid point along the configured route."""
    if spec.via_scattering:
        state, gates, t1_wires, t2_wires = circuit
        table = table_via_scattering(state, gates, t1_wires, t2_wires)
    elif spec.shots is not None:
        table = correlator_table(rho1, channel)
    else:
        return pdm_closed_form(rho1, channel)
    if spec.shots is not None:
        seed = 0 if spec.seed is None else spec.seed
        table = sample_correlators(table, spec.shots, seed + index)
    return pdm_from_correlators(table)


def _sweep_point(spec: SweepSpec, index: int, param: float, rho1, channel, circuit, cfg) -> SweepRecord:
    eps = spec.effective_epsilon
    r = _point_pdm(spec, index, rho1, channel, circuit)
    eig_r = tuple(float(x) for x in eig_hermitian(r.mat).eigenvalues)
    f_pdm = negativity(r)
    try:
        fwd = extract_cj(r, cfg)
        rev = extract_cj(time_reverse(r), cfg)
    except ExtractionError as exc:
        nan = (float("nan"),) * len(eig_r)
        return SweepRecord(
            param=float(param),
            eig_pdm=eig_r,
            f_pdm=f_pdm,
            eig_forward=nan,
            eig_reverse=nan,
            f_forward=float("nan"),
            f_reverse=float("nan"),
            verdict="",
            error=str(exc),
        )
    choi_fwd = choi_of(fwd.m, fwd.in_dim)
    choi_rev = choi_of(rev.m, rev.in_dim)
    f_fwd = negativity(choi_fwd)
    f_rev = negativity(choi_rev)
    verdict = classify(f_pdm, f_fwd, f_rev, eps)
    return SweepRecord(
        param=float(param),
        eig_pdm=eig_r,
        f_pdm=f_pdm,
        eig_forward=tuple(float(x) for x in eig_hermitian(choi_fwd).eigenvalues),
        eig_reverse=tuple(float(x) for x in eig_hermitian(choi_rev).eigenvalues),
        f_forward=f_fwd,
        f_reverse=f_rev,
        verdict=verdict.kind,
    )


def run_theta_sweep(spec: SweepSpec, cfg: SdpConfig = SdpConfig()) -> list:
    """Sweep the partial-swap strength at fixed input polarization."""
    if spec.family != "theta_sweep":
        raise ValueError(f"expected a theta_sweep spec, got {spec.family}")
    lam = float(spec.fixed["lambda"])
    records = []
    for k, theta in enumerate(spec.grid):
        records.append(
            _sweep_point(
                spec, k, theta,
                polarized_plus_state(lam),
                mediated_partial_swap_cj(theta),
                _mediated_circuit(theta, lam) if spec.via_scattering else None,
                cfg,
            )
        )
    return records


def run_lambda_sweep(spec: SweepSpec, cfg: SdpConfig = SdpConfig()) -> list:
    """Sweep the input polarization at fixed partial-swap strength."""
    if spec.family != "lambda_sweep":
        raise ValueError(f"expected a lambda_sweep spec, got {spec.family}")
    theta = float(spec.fixed["theta"])
    channel = mediated_partial_swap_cj(theta)
    records = []
    for k, lam in enumerate(spec.grid):
        records.append(
            _sweep_point(
                spec, k, lam,
                polarized_plus_state(lam),
                channel,
                _mediated_circuit(theta, lam) if spec.via_scattering else None,
                cfg,
            )
        )
    return records


def run_decohere_sweep(spec: SweepSpec, cfg: SdpConfig = SdpConfig()) -> list:
    """Sweep the input polarization through the fully decohering channel."""
    if spec.family != "decohere_sweep":
        raise ValueError(f"expected a decohere_sweep spec, got {spec.family}")
    channel = fully_decohering_cj()
    records = []
    for k, lam in enumerate(spec.grid):
        records.append(
            _sweep_point(
                spec, k, lam,
                polarized_plus_state(lam),
                channel,
                _decohering_circuit(lam) if spec.via_scattering else None,
                cfg,
            )
        )
    return records


def run_sweep(spec: SweepSpec, cfg: SdpConfig = SdpConfig()) -> list:
    """Dispatch a sweep spec to its runner."""
    runner = {
        "theta_sweep": run_theta_sweep,
        "lambda_sweep": run_lambda_sweep,
        "decohere_sweep": run_decohere_sweep,
    }[spec.family]
    return runner(spec, cfg)


def infer_from_pdm(r: PDM, epsilon: float = DEFAULT_EPSILON, cfg: SdpConfig = SdpConfig()) -> CausalVerdict:
    """Classify the causal structure behind one PDM."""
    f_pdm = negativity(r)
    fwd = extract_cj(r, cfg)
    rev = extract_cj(time_reverse(r), cfg)
    f_fwd = negativity(choi_of(fwd.m, fwd.in_dim))
    f_rev = negativity(choi_of(rev.m, rev.in_dim))
    return classify(f_pdm, f_fwd, f_rev, epsilon)
