//! Jaynes-Cummings measurement protocol.
//!
//! Drive `e^{+i theta sigma_y / 2}` through a resonant coupling to a coherent
//! oscillator, measure `sigma_z`, then drive back. Shifts are in photon quanta.

use num_complex::Complex;
use rayon::prelude::*;

use crate::common::second_drive_term;
use crate::error::{Error, Result};
use crate::fock::{
    drive_amplitudes, drive_both, AmplitudeMode, ConditionedOscillatorState, Coupling, OscillatorWindow, SubShiftKind,
    PROBABILITY_FLOOR,
};
use crate::qubit::{basis_from_angle, check_overlap, Level, MeasurementBasis, Outcome, QubitState};
use crate::report::{Method, Model, ShiftReport};
use crate::scalar::{from_u64, lit, to_f64, Real};
use crate::sum::NeumaierSum;

/// Probability of `kind.found` after the ideal rotation of `kind.prep`.
pub fn jc_subshift_probability<T: Real>(kind: SubShiftKind, theta: T) -> T {
    let (s, c) = (theta * lit(0.5)).sin_cos();
    if kind.prep == kind.found {
        c * c
    } else {
        s * s
    }
}

/// Closed-form sub-shift.
///
/// `up_up`, `down_down`: `-(theta/2) tan(theta/2)`;
/// `down_up`: `-1 + (theta/2) cot(theta/2)`; `up_down`: `1 + (theta/2) cot(theta/2)`.
/// At `theta = 0` the cotangent forms return their finite limits even though
/// the outcome has zero probability. Other zero-probability points are poles.
pub fn jc_subshift_analytic<T: Real>(kind: SubShiftKind, theta: T) -> Result<T> {
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite (got {})", to_f64(theta))));
    }
    let x = theta.abs() * lit(0.5);
    let (s, c) = x.sin_cos();
    let floor: T = lit(PROBABILITY_FLOOR);
    let pole = || Error::PoleAtTheta { theta: to_f64(theta) };
    if kind.prep == kind.found {
        if c * c < floor {
            return Err(pole());
        }
        return Ok(-x * s / c);
    }
    let x_cot = if x == T::zero() {
        T::one()
    } else if s * s < floor && x > lit(0.5) {
        return Err(pole());
    } else {
        x * c / s
    };
    let offset = if kind.found == Level::Up { -T::one() } else { T::one() };
    Ok(offset + x_cot)
}

/// `probability * sub-shift`, finite for every `theta`.
pub fn jc_subshift_weighted<T: Real>(kind: SubShiftKind, theta: T) -> T {
    let h = theta * lit(0.5);
    let (s, c) = h.sin_cos();
    let hsc = h * s * c;
    match (kind.prep, kind.found) {
        (Level::Up, Level::Up) | (Level::Down, Level::Down) => -hsc,
        (Level::Down, Level::Up) => hsc - s * s,
        (Level::Up, Level::Down) => hsc + s * s,
    }
}

/// Oscillator change that mirrors the qubit excitation change: `-(found - prep)`.
pub fn jc_qubit_subshift<T: Real>(kind: SubShiftKind) -> T {
    match kind.excitation_change() {
        1 => T::one(),
        -1 => -T::one(),
        _ => T::zero(),
    }
}

/// Residuals of total-excitation conservation for preparations up and down:
/// `sum_found P (sub-shift - excitation change)`.
pub fn jc_conservation_residual<T: Real>(theta: T) -> (T, T) {
    let res = |prep: Level| {
        let mut acc = NeumaierSum::new();
        for found in [Level::Up, Level::Down] {
            let kind = SubShiftKind::new(prep, found);
            acc.add(jc_subshift_weighted(kind, theta));
            acc.add(jc_subshift_probability(kind, theta) * lit(kind.excitation_change() as f64));
        }
        acc.value()
    };
    (res(Level::Up), res(Level::Down))
}

/// Oscillator amplitudes after the first drive, paired with `found`.
pub fn jc_postselected_amplitudes<T: Real>(
    i: &QubitState<T>,
    theta: T,
    w: &OscillatorWindow<T>,
    found: Level,
) -> Result<ConditionedOscillatorState<T>> {
    drive_amplitudes(i, -theta, w, Coupling::jc(w), found)
}

/// Windowed-sum sub-shift.
pub fn jc_subshift_numeric<T: Real>(kind: SubShiftKind, theta: T, w: &OscillatorWindow<T>) -> Result<T> {
    jc_postselected_amplitudes(&QubitState::basis(kind.prep), theta, w, kind.found)?.mean_shift()
}

/// First-segment shift and probability from the closed forms, without poles.
pub fn jc_first_segment_analytic<T: Real>(i: &QubitState<T>, b: &MeasurementBasis<T>, outcome: Outcome) -> Result<(T, T)> {
    let g = b.state(outcome);
    let p = g.overlap_sq(i);
    check_overlap(p)?;
    let level = outcome.level();
    let wu = jc_subshift_weighted(SubShiftKind::new(Level::Up, level), b.theta);
    let wd = jc_subshift_weighted(SubShiftKind::new(Level::Down, level), b.theta);
    let h = b.theta * lit(0.5);
    let (s, c) = h.sin_cos();
    // Re(a b*) (A_up + A_down) with the poles cancelled against c s
    let cross_weight = match outcome {
        Outcome::F => -h * s * s - c * s + h * c * c,
        Outcome::Perp => -c * s - h * c * c + h * s * s,
    };
    let r = (i.amp_up() * i.amp_down().conj()).re;
    let num = i.amp_up().norm_sqr() * wu + i.amp_down().norm_sqr() * wd + r * cross_weight;
    Ok((num / p, p))
}

/// First-segment shift and probability from the windowed evolution.
pub fn jc_first_segment_numeric<T: Real>(
    i: &QubitState<T>,
    b: &MeasurementBasis<T>,
    outcome: Outcome,
    w: &OscillatorWindow<T>,
) -> Result<(T, T)> {
    check_overlap(b.state(outcome).overlap_sq(i))?;
    let st = jc_postselected_amplitudes(i, b.theta, w, outcome.level())?;
    Ok((st.mean_shift()?, st.probability()))
}

/// Full conditional photon-number change: first segment plus second drive.
pub fn jc_full_shift<T: Real>(
    i: &QubitState<T>,
    theta: T,
    outcome: Outcome,
    method: Method,
    w: Option<&OscillatorWindow<T>>,
) -> Result<ShiftReport<T>> {
    let b = basis_from_angle(theta)?;
    let second = second_drive_term(&b, outcome);
    let (total, p) = match method {
        Method::Analytic => jc_full_shift_closed(i, &b, outcome)?,
        Method::Numeric => {
            let w = w.ok_or_else(|| Error::InvalidParameter("numeric shift needs an oscillator window".into()))?;
            let (first, p) = jc_first_segment_numeric(i, &b, outcome, w)?;
            (first + second, p)
        }
    };
    Ok(ShiftReport::new(Model::Jc, method, outcome, total, p)
        .with_residual("first_segment", total - second)
        .with_residual("second_drive", second))
}

/// Factored closed form of the full shift.
///
/// With `h = theta/2`, `D = |i_down|^2 - |i_up|^2`, `R = Re(i_up i_down*)` and
/// `Q = s c D + R cos(theta)`: `f` gives `(h - s c) Q / P_f`, `f_perp` gives
/// `-(h + s c) Q / P_perp`. Dropping `h` leaves the clock shift.
fn jc_full_shift_closed<T: Real>(i: &QubitState<T>, b: &MeasurementBasis<T>, outcome: Outcome) -> Result<(T, T)> {
    let p = b.state(outcome).overlap_sq(i);
    check_overlap(p)?;
    let h = b.theta * lit(0.5);
    let (s, c) = h.sin_cos();
    let sc = s * c;
    let d = i.amp_down().norm_sqr() - i.amp_up().norm_sqr();
    let r = (i.amp_up() * i.amp_down().conj()).re;
    let q = sc * d + r * (c * c - s * s);
    let shift = match outcome {
        Outcome::F => (h - sc) * q / p,
        Outcome::Perp => -(h + sc) * q / p,
    };
    Ok((shift, p))
}

/// One row of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n0: T,
    pub numeric: T,
    pub analytic: T,
    pub abs_error: T,
}

/// Numeric full shift against the closed form for each `n0`, in input order.
pub fn jc_convergence_sweep<T: Real>(
    i: &QubitState<T>,
    theta: T,
    outcome: Outcome,
    n0_list: &[T],
    m: i64,
    window_sigmas: T,
    mode: AmplitudeMode,
) -> Result<Vec<ConvergenceRow<T>>> {
    if let Some(bad) = n0_list.iter().find(|n| !(**n >= lit(100.0))) {
        return Err(Error::InvalidParameter(format!("convergence sweep needs n0 >= 100 (got {})", to_f64(*bad))));
    }
    let analytic = jc_full_shift(i, theta, outcome, Method::Analytic, None)?.shift;
    n0_list
        .par_iter()
        .map(|&n0| {
            let w = OscillatorWindow::new(n0, m, window_sigmas, mode)?;
            let numeric = jc_full_shift(i, theta, outcome, Method::Numeric, Some(&w))?.shift;
            Ok(ConvergenceRow { n0, numeric, analytic, abs_error: (numeric - analytic).abs() })
        })
        .collect()
}

/// `<target|rho|target>` for the reduced qubit state after one drive of angle
/// `theta`, where `target = e^{-i theta sigma_y / 2} i`.
pub fn jc_rotation_fidelity<T: Real>(i: &QubitState<T>, theta: T, w: &OscillatorWindow<T>) -> Result<T> {
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite (got {})", to_f64(theta))));
    }
    let (s, c) = (theta * lit(0.5)).sin_cos();
    let (iu, id) = (i.amp_up(), i.amp_down());
    let tu = iu * c - id * s;
    let td = iu * s + id * c;
    let (up, down, _) = drive_both(i, theta, w, Coupling::jc(w));
    let mut overlap = NeumaierSum::new();
    let mut trace = NeumaierSum::new();
    for (u, d) in up.iter().zip(&down) {
        overlap.add((tu.conj() * u + td.conj() * d).norm_sqr());
        trace.add(u.norm_sqr() + d.norm_sqr());
    }
    Ok(overlap.value() / trace.value())
}

/// Purity `Tr rho^2` of the qubit after driving `i (x) |n>` for time `omega0_t`.
pub fn fock_drive_purity<T: Real>(i: &QubitState<T>, n: u64, omega0_t: T) -> T {
    let half = omega0_t * lit(0.5);
    let (s, c) = (half * from_u64::<T>(n + 1).sqrt()).sin_cos();
    let (sp, cp) = (half * from_u64::<T>(n).sqrt()).sin_cos();
    let (iu, id) = (i.amp_up(), i.amp_down());
    let zero = Complex::new(T::zero(), T::zero());
    let levels = [(-id * sp, zero), (iu * c, id * cp), (zero, iu * s)];
    let mut rho = [[zero; 2]; 2];
    for (u, d) in levels {
        let v = [u, d];
        for (r, row) in rho.iter_mut().enumerate() {
            for (col, cell) in row.iter_mut().enumerate() {
                *cell += v[r] * v[col].conj();
            }
        }
    }
    let mut purity = T::zero();
    for row in &rho {
        for cell in row {
            purity += cell.norm_sqr();
        }
    }
    purity
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn closed_form_values() {
        let v = jc_subshift_analytic(SubShiftKind::UP_UP, FRAC_PI_2).unwrap();
        assert!((v + 0.785_398_163_397_448_3).abs() < 1e-15);
        let v = jc_subshift_analytic(SubShiftKind::DOWN_UP, PI).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        assert_eq!(jc_subshift_analytic(SubShiftKind::UP_DOWN, 0.0).unwrap(), 2.0);
        assert_eq!(jc_subshift_analytic(SubShiftKind::DOWN_UP, 0.0).unwrap(), 0.0);
        let near = jc_subshift_analytic(SubShiftKind::UP_DOWN, 1e-9f64).unwrap();
        assert!((near - 2.0).abs() < 1e-15);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(jc_subshift_analytic(SubShiftKind::UP_UP, PI), Err(Error::PoleAtTheta { .. })));
        assert!(matches!(jc_subshift_analytic(SubShiftKind::DOWN_UP, 2.0 * PI), Err(Error::PoleAtTheta { .. })));
        assert!(matches!(jc_subshift_analytic(SubShiftKind::UP_DOWN, -2.0 * PI), Err(Error::PoleAtTheta { .. })));
    }

    #[test]
    fn even_in_theta() {
        for k in SubShiftKind::ALL {
            for t in [0.3f64, 1.0, 2.5, 4.0, 7.7] {
                assert_eq!(jc_subshift_analytic(k, t).unwrap(), jc_subshift_analytic(k, -t).unwrap());
            }
        }
    }

    #[test]
    fn weighted_agrees_with_product() {
        for k in SubShiftKind::ALL {
            for t in [0.3f64, 1.0, 2.5, -4.0] {
                let direct = jc_subshift_probability(k, t) * jc_subshift_analytic(k, t).unwrap();
                assert!((direct - jc_subshift_weighted(k, t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn conservation() {
        for t in [0.0f64, FRAC_PI_2, 1.0, PI, 3.0 * FRAC_PI_2, -5.0] {
            let (u, d) = jc_conservation_residual(t);
            assert!(u.abs() <= 1e-12 && d.abs() <= 1e-12, "{t}: {u} {d}");
        }
    }

    #[test]
    fn full_shift_examples() {
        let r = jc_full_shift(&QubitState::up_z(), FRAC_PI_2, Outcome::F, Method::Analytic, None).unwrap();
        assert!((r.shift + 0.285_398_163_397_448_3).abs() < 1e-15);
        for t in [0.2f64, 1.3, 4.0, -2.0] {
            for o in [Outcome::F, Outcome::Perp] {
                let r = jc_full_shift(&QubitState::up_y(), t, o, Method::Analytic, None).unwrap();
                assert_eq!(r.shift, 0.0, "{t} {o:?}");
            }
        }
        let e = jc_full_shift(&QubitState::up_x(), 3.0 * FRAC_PI_2, Outcome::F, Method::Analytic, None).unwrap_err();
        assert!(matches!(e, Error::OrthogonalPostSelection { .. }));
    }

    #[test]
    fn analytic_first_segment_matches_probability_weighted_form() {
        let i = QubitState::from_bloch(1.1f64, 0.7).unwrap();
        for t in [0.4f64, 1.9, -2.7] {
            let b = basis_from_angle(t).unwrap();
            for o in [Outcome::F, Outcome::Perp] {
                let lvl = o.level();
                let a1 = jc_subshift_analytic(SubShiftKind::new(Level::Up, lvl), t).unwrap();
                let a2 = jc_subshift_analytic(SubShiftKind::new(Level::Down, lvl), t).unwrap();
                let (gen, _) = crate::common::common_form_first_segment(&i, b.state(o), a1, a2).unwrap();
                let (pf, _) = jc_first_segment_analytic(&i, &b, o).unwrap();
                assert!((gen - pf).abs() < 1e-13, "{t} {o:?}: {gen} vs {pf}");
                let full = jc_full_shift(&i, t, o, Method::Analytic, None).unwrap();
                let second = crate::common::second_drive_term(&b, o);
                assert!((full.shift - (gen + second)).abs() < 1e-13, "{t} {o:?}");
            }
        }
    }

    #[test]
    fn numeric_subshift_pi_over_3() {
        let w = OscillatorWindow::with_defaults(1e6f64, 1).unwrap();
        let v = jc_subshift_numeric(SubShiftKind::UP_UP, FRAC_PI_3, &w).unwrap();
        assert!((v + 0.302_299_894_039_036_3).abs() < 3e-3, "{v}");
        let z = jc_subshift_numeric(SubShiftKind::DOWN_DOWN, 0.0, &w).unwrap();
        assert!(z.abs() < 1e-10);
    }

    #[test]
    fn numeric_zero_probability() {
        let w = OscillatorWindow::with_defaults(1e4f64, 1).unwrap();
        let e = jc_subshift_numeric(SubShiftKind::UP_DOWN, 0.0, &w).unwrap_err();
        assert!(matches!(e, Error::ZeroProbabilityOutcome { .. }));
    }

    #[test]
    fn numeric_full_shift_close_to_closed_form() {
        let w = OscillatorWindow::with_defaults(1e6f64, 1).unwrap();
        let i = QubitState::from_bloch(1.1f64, 0.7).unwrap();
        for o in [Outcome::F, Outcome::Perp] {
            let a = jc_full_shift(&i, 1.3, o, Method::Analytic, None).unwrap();
            let n = jc_full_shift(&i, 1.3, o, Method::Numeric, Some(&w)).unwrap();
            assert!((a.shift - n.shift).abs() < 5e-3, "{o:?}: {} vs {}", a.shift, n.shift);
            assert!((a.probability - n.probability).abs() < 1e-3);
        }
    }

    #[test]
    fn unitarity_pi_over_3() {
        let w = OscillatorWindow::with_defaults(1e4f64, 1).unwrap();
        let i = QubitState::up_x();
        let u = jc_postselected_amplitudes(&i, FRAC_PI_3, &w, Level::Up).unwrap().norm_sq();
        let d = jc_postselected_amplitudes(&i, FRAC_PI_3, &w, Level::Down).unwrap().norm_sq();
        assert!((u + d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity() {
        let i = QubitState::up_z();
        let w2 = OscillatorWindow::with_defaults(1e2f64, 1).unwrap();
        let w4 = OscillatorWindow::with_defaults(1e4f64, 1).unwrap();
        assert!((jc_rotation_fidelity(&i, 0.0, &w2).unwrap() - 1.0).abs() < 1e-12);
        let f2 = jc_rotation_fidelity(&i, FRAC_PI_2, &w2).unwrap();
        let f4 = jc_rotation_fidelity(&i, FRAC_PI_2, &w4).unwrap();
        assert!(f4 > f2 && f4 <= 1.0, "{f2} {f4}");
    }

    #[test]
    fn fock_maximal_entanglement() {
        for n in [0u64, 3, 100] {
            let t = FRAC_PI_2 / ((n + 1) as f64).sqrt();
            assert!((fock_drive_purity(&QubitState::up_z(), n, t) - 0.5).abs() < 1e-10);
        }
        assert!((fock_drive_purity(&QubitState::up_x(), 5, 0.0f64) - 1.0).abs() < 1e-14);
    }
}
