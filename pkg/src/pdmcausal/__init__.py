"""Two-time pseudo-density-matrix toolkit.

Builds 2-time n-qubit pseudo-density matrices from two-time Pauli
correlators (via coarse-grained measurement, closed form, or a probe-qubit
scattering circuit), extracts the channel's CJ and Choi matrices
(spectral solve or least-negative-Choi SDP), and classifies the causal
structure behind the data from the negativity pattern.
"""

from .backend import active_backend
from .channels import (
    ChannelCJ,
    DensityMatrix,
    UnitaryGate,
    apply_channel,
    basis_state,
    cj_from_dilation,
    cj_from_kraus,
    cj_from_unitary,
    density_matrix,
    fully_decohering_cj,
    maximally_mixed,
    mediated_partial_swap_cj,
    partial_swap,
    plus_state,
    polarized_plus_state,
)
from .extraction import (
    ExtractionError,
    ExtractionResult,
    SdpConfig,
    choi_of,
    extract_cj,
    reverse_choi_pipeline,
    sdp_solve,
    spectral_solve,
)
from .inference import (
    CausalVerdict,
    SweepRecord,
    SweepSpec,
    classify,
    infer_from_pdm,
    run_decohere_sweep,
    run_lambda_sweep,
    run_sweep,
    run_theta_sweep,
    sample_correlators,
)
from .pdm import (
    PDM,
    CorrelatorTable,
    correlator_oracle,
    correlator_table,
    marginal,
    negativity,
    pdm,
    pdm_closed_form,
    pdm_from_correlators,
    reduce_pdm,
    time_reverse,
)
from .scattering import (
    ProbeResult,
    ScatteringSpec,
    correlator_via_scattering,
    embed_gate,
    parse_gate,
    simulate_scattering,
    spec_from_json,
    table_via_scattering,
)
from .tensor import (
    HermitianSpectrum,
    QubitLayout,
    eig_hermitian,
    kron,
    kron_all,
    partial_trace,
    partial_transpose,
    pauli_matrix,
    pauli_strings,
    qubit_layout,
    trace_norm,
)

__version__ = "0.1.0"
