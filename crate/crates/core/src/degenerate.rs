//! Degenerate ladder interaction `H_D = -i (Omega/2)(L sigma_+ - L^dag sigma_-)`
//! with the norm-preserving lowering operator `L = sum |n><n+1|`.
//!
//! Its Rabi angle does not depend on the photon number, so the sub-shifts are
//! exactly the clock values `(0, -1, +1, 0)` and the full shift reproduces the
//! clock model.

use crate::clock::clock_shift_analytic;
use crate::common::{common_form_shift, second_drive_term};
use crate::error::{Error, Result};
use crate::fock::{drive_amplitudes, ConditionedOscillatorState, Coupling, OscillatorWindow, SubShiftKind};
use crate::qubit::{basis_from_angle, check_overlap, Level, Outcome, QubitHamiltonian, QubitState};
use crate::report::{Method, Model, ShiftReport};
use crate::scalar::{to_f64, Real};

/// `Omega0 t = theta`, independent of the oscillator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerateDriveCalibration<T> {
    theta: T,
}

impl<T: Real> DegenerateDriveCalibration<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be finite (got {})", to_f64(theta))));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn omega_t(&self) -> T {
        self.theta
    }
}

/// Asymptotic sub-shift: `-1` for `down_up`, `+1` for `up_down`, otherwise 0.
pub fn deg_subshift_analytic<T: Real>(kind: SubShiftKind) -> T {
    match kind.excitation_change() {
        1 => -T::one(),
        -1 => T::one(),
        _ => T::zero(),
    }
}

pub fn deg_postselected_amplitudes<T: Real>(
    i: &QubitState<T>,
    theta: T,
    w: &OscillatorWindow<T>,
    found: Level,
) -> Result<ConditionedOscillatorState<T>> {
    let cal = DegenerateDriveCalibration::new(theta)?;
    drive_amplitudes(i, -cal.omega_t(), w, Coupling::Degenerate, found)
}

pub fn deg_subshift_numeric<T: Real>(kind: SubShiftKind, theta: T, w: &OscillatorWindow<T>) -> Result<T> {
    deg_postselected_amplitudes(&QubitState::basis(kind.prep), theta, w, kind.found)?.mean_shift()
}

/// Full conditional shift; the analytic path is the common form with clock sub-shifts.
pub fn deg_full_shift<T: Real>(
    i: &QubitState<T>,
    theta: T,
    outcome: Outcome,
    method: Method,
    w: Option<&OscillatorWindow<T>>,
) -> Result<ShiftReport<T>> {
    let b = basis_from_angle(theta)?;
    let level = outcome.level();
    let second = second_drive_term(&b, outcome);
    let (shift, p) = match method {
        Method::Analytic => {
            let a1 = deg_subshift_analytic(SubShiftKind::new(Level::Up, level));
            let a2 = deg_subshift_analytic(SubShiftKind::new(Level::Down, level));
            common_form_shift(i, &b, outcome, a1, a2)?
        }
        Method::Numeric => {
            let w = w.ok_or_else(|| Error::InvalidParameter("numeric shift needs an oscillator window".into()))?;
            check_overlap(b.state(outcome).overlap_sq(i))?;
            let st = deg_postselected_amplitudes(i, theta, w, level)?;
            (st.mean_shift()? + second, st.probability())
        }
    };
    Ok(ShiftReport::new(Model::Degenerate, method, outcome, shift, p)
        .with_residual("first_segment", shift - second)
        .with_residual("second_drive", second))
}

/// `|clock weak-value shift - common-form shift with clock sub-shifts|`, at `omega0 = 1`.
pub fn common_form_equivalence_residual<T: Real>(i: &QubitState<T>, theta: T, outcome: Outcome) -> Result<T> {
    let b = basis_from_angle(theta)?;
    let clock = clock_shift_analytic(i, &b, outcome, &QubitHamiltonian::unit())?.shift;
    let deg = deg_full_shift(i, theta, outcome, Method::Analytic, None)?.shift;
    Ok((clock - deg).abs())
}
