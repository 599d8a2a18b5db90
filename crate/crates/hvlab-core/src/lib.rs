//! Numerical laboratory for local models of polarization correlations.
//!
//! The crate collects, in one place, the machinery needed to exercise two
//! families of hidden-variable models against their quantum targets:
//!
//! * a Boolean threshold model of photon pairs ([`boolean`]), whose
//!   coincidence law is piecewise linear in the analyzer offset;
//! * a vector-valued stream model ([`stream`]), where each station measures
//!   continuous intensities and a threshold detector converts them to
//!   counts, reproducing the quadratic coincidence laws;
//! * the four pair relationships and their product-space states
//!   ([`bell`]), including the crossed-pair re-expansion identity used by
//!   entanglement swapping;
//! * exact complex linear algebra on small tensor registers ([`linalg`]),
//!   shared by the optical-bench and triple-particle modules.
//!
//! Everything numerical is generic over the floating scalar through
//! [`scalar::Real`]; `f64` aliases for the common types sit at the crate
//! root. Randomness flows through [`rng::CounterRng`], a counter-addressed
//! generator whose draws depend only on `(seed, index, channel)`, so every
//! experiment is reproducible and parallel-safe by construction.

pub mod bell;
pub mod bench;
pub mod boolean;
pub mod ghz;
pub mod linalg;
pub mod nogo;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod stream;

pub use bench::{
    bs_transform, enumerate_routings, ghz_pipeline_run, hom_integrals, hom_outcome, hom_trials,
    pbs_split, swap_run, swap_sweep, window_integral, write_event_csv, HomOutcome, HomTally,
    OpticalElement, PipelineConfig, PipelineEvent, PipelineResult, PulseStatus, Routing,
    SwapConfig, SwapRunResult, SweepPoint, TIE_TOLERANCE,
};
pub use bell::{
    bell_inner, bell_norm, make_bell, place_pairs, project_bell_pair, qm_bell_ket,
    swap_identity_residual, swap_identity_residual_ket, time_avg_inner, BellError, BellKind,
    MeanEstimate, VectorBellState,
};
pub use boolean::{
    boolean_outcome, ch_value, chsh_value, correlator_from_pp, mc_coincidence, qm_pp,
    sawtooth_prob, BellAngles, CoincidenceEstimate,
};
pub use ghz::{
    apply_config, basis_expand, chain_project, eigen_configs, full_table, make_vghz,
    make_vghz_scaled, outcome_axis, setting_operator, triple_count_fraction, BasisFamily,
    CountRow, CountTable, GhzConfig, GhzVector, Setting,
};
pub use linalg::{
    apply2, inner, project, two_qubit, Axis3, Basis, LinalgError, Mat, PauliAxis, TensorState,
    Vec2C, C, Gi,
};
pub use nogo::{
    card_demo, combined_observable, filtering_order_demo, ghz_instruction_search, ghz_qm_targets,
    inplane_witness, ks_assignment_search, mermin_peres_square, pauli_square_targets,
    plane_rotation_demo, rotation_outcome, rotation_square, rotation_square_targets,
    row_col_products, squared_products, two_qubit_instruction_search, CardDemo, CardRotation,
    FrameImages, GhzSearchReport, GhzTargets, InstructionMatrix, KsSearchReport, NogoError,
    PauliSquare, PlaneRotationDemo, RotationSquare,
};
pub use rng::CounterRng;
pub use scalar::{axis_distance, cast, fold_angle, Real};
pub use stats::{chi_square_uniform, fit_sin2, mean_se, Sin2Fit};
pub use stream::{
    chsh_experiment, coincidences, coincidences_with_partner, count_after_analyzer, count_total,
    detection_schedule, gen_unpolarized, pair_stream, DetectionSchedule, HvStream, Interval,
    PairSourceConfig, StreamCsvError, ThresholdDetector, VectorChshResult,
};

/// Double-precision aliases for the generic core types.
pub type Vec2C64 = Vec2C<f64>;
pub type Tensor64 = TensorState<f64>;
pub type Stream64 = HvStream<f64>;
pub type Angles64 = BellAngles<f64>;
