"""uniqpt: simulation and estimation toolkit for process tomography of
unitary and near-unitary maps."""

__version__ = "1.0.0"

from .bases import (
    OperatorBasis,
    basis_overlap,
    gellmann_basis,
    rotated_basis,
    standard_basis,
    traceless_identity_basis,
)
from .channels import (
    ErrorSpec,
    calibrate_to_fidelity_band,
    coherent_applied_map,
    haar_unitary,
    incoherent_applied_map,
    process_fidelity,
    random_hermitian_unit_trace,
    random_tp_cp_map,
    unitary_fidelity,
)
from .closed_form import (
    UnitaryEstimate,
    minimal_probability_tables,
    reconstruct_from_mixed_uic,
    reconstruct_minimal,
    reconstruct_sequential,
)
from .errors import UniqptError
from .harness import ExperimentSpec, ordered_probes, run_experiment
from .maps import (
    ChoiMatrix,
    CptpReport,
    KrausSet,
    ProcessMatrix,
    SpectralForm,
    apply_map,
    choi_to_kraus,
    choi_to_process,
    is_cptp,
    kraus_to_choi,
    kraus_to_process,
    process_to_choi,
    process_to_kraus,
    spectral_form,
    unitary_to_choi,
    unitary_to_process,
)
from .measure import (
    DesignMatrix,
    MeasurementRecord,
    design_matrices,
    probabilities,
    simulate_record,
)
from .probes import (
    Povm,
    ProbeSet,
    commutant_dimension,
    mub_povm,
    mub_probe_kets,
    pure_state_povm,
    standard_probe_kets,
    truncated_povm,
    uic_mixed,
    uic_pure_plus,
    uic_pure_zero_n,
)
from .solver import (
    Estimate,
    EstimatorConfig,
    default_epsilon,
    estimate_cs_l1,
    estimate_cs_tr,
    estimate_ls,
)
