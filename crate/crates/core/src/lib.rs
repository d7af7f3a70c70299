//! Mean energy change of a measurement apparatus conditioned on qubit
//! post-selection, under three models: a quantum clock, a Jaynes-Cummings
//! oscillator, and a degenerate ladder coupling.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! bottom fix `f64`, which is what the tolerances in the tests assume.
//!
//! ```
//! use qpe_core::{basis_from_angle, clock_shift_analytic, Hamiltonian, Outcome, State};
//!
//! let b = basis_from_angle((2.0f64 / 3.0).asin()).unwrap();
//! let r = clock_shift_analytic(&State::up_x(), &b, Outcome::F, &Hamiltonian::unit()).unwrap();
//! assert!((r.shift + 1.0 / (3.0 * 5f64.sqrt())).abs() < 1e-15);
//! ```

pub mod clock;
pub mod common;
pub mod degenerate;
pub mod error;
pub mod fock;
pub mod jc;
pub mod qubit;
pub mod report;
pub mod scalar;
pub mod scenarios;
pub mod selftest;
pub mod sum;

pub use clock::{
    clock_energy_balance, clock_offdiagonal_decay, clock_shift_analytic, clock_shift_numeric, conditioned_wavepacket,
    ClockNumericsConfig, ClockWavepacket, DecoherenceReport,
};
pub use common::{common_form_shift, second_drive_term};
pub use degenerate::{
    common_form_equivalence_residual, deg_full_shift, deg_postselected_amplitudes, deg_subshift_analytic,
    deg_subshift_numeric, DegenerateDriveCalibration,
};
pub use error::{Error, Result};
pub use fock::{AmplitudeMode, ConditionedOscillatorState, OscillatorWindow, SubShiftKind};
pub use jc::{
    fock_drive_purity, jc_conservation_residual, jc_convergence_sweep, jc_full_shift, jc_postselected_amplitudes,
    jc_qubit_subshift, jc_rotation_fidelity, jc_subshift_analytic, jc_subshift_numeric, jc_subshift_probability,
    ConvergenceRow,
};
pub use qubit::{
    basis_from_angle, energy_expectation, outcome_probabilities, weak_value, Level, MeasurementBasis, Outcome,
    QubitHamiltonian, QubitState,
};
pub use report::{Method, Model, ShiftReport};
pub use scalar::Real;
pub use scenarios::{dice_scenario, stevens_theory_curves, sweep_curves, theta_grid, DiceReport, SweepTable};

pub type State = QubitState<f64>;
pub type Basis = MeasurementBasis<f64>;
pub type Hamiltonian = QubitHamiltonian<f64>;
pub type ClockConfig = ClockNumericsConfig<f64>;
pub type Wavepacket = ClockWavepacket<f64>;
pub type Window = OscillatorWindow<f64>;
pub type OscillatorState = ConditionedOscillatorState<f64>;
pub type Report = ShiftReport<f64>;
pub type Table = SweepTable<f64>;
pub type Dice = DiceReport<f64>;
