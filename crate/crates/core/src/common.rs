//! The shared analytic form of the full conditional shift.
//!
//! For outcome state `g` and preparation `i`, let `a = <g|up><up|i>` and
//! `b = <g|down><down|i>`. Every model's first-segment shift is
//! `(|a|^2 A1 + |b|^2 A2 + Re(a b*) (A1 + A2)) / |a + b|^2`, where
//! `(A1, A2)` are the sub-shifts for preparations up and down found in the
//! outcome's `sigma_z` level. The second drive then adds minus the qubit
//! excitation change from that level to `g`.

use crate::error::Result;
use crate::qubit::{check_overlap, MeasurementBasis, Outcome, QubitState};
use crate::scalar::Real;

/// `(a, b)` for outcome state `g`.
pub fn branch_amplitudes<T: Real>(
    i: &QubitState<T>,
    g: &QubitState<T>,
) -> (num_complex::Complex<T>, num_complex::Complex<T>) {
    (g.amp_up().conj() * i.amp_up(), g.amp_down().conj() * i.amp_down())
}

/// First-segment shift and its probability from sub-shifts `(a1, a2)`.
pub fn common_form_first_segment<T: Real>(i: &QubitState<T>, g: &QubitState<T>, a1: T, a2: T) -> Result<(T, T)> {
    let (a, b) = branch_amplitudes(i, g);
    let p = (a + b).norm_sqr();
    check_overlap(p)?;
    let cross = (a * b.conj()).re;
    let num = a.norm_sqr() * a1 + b.norm_sqr() * a2 + cross * (a1 + a2);
    Ok((num / p, p))
}

/// Oscillator cost of the second drive: `1 - |<f|up>|^2` for `f`, `-|<f_perp|up>|^2` for `f_perp`.
pub fn second_drive_term<T: Real>(b: &MeasurementBasis<T>, outcome: Outcome) -> T {
    let (_, s) = b.half_angle();
    match outcome {
        Outcome::F => s * s,
        Outcome::Perp => -(s * s),
    }
}

/// Full shift `first segment + second drive` from sub-shifts `(a1, a2)`, with its probability.
pub fn common_form_shift<T: Real>(
    i: &QubitState<T>,
    b: &MeasurementBasis<T>,
    outcome: Outcome,
    a1: T,
    a2: T,
) -> Result<(T, T)> {
    let (first, p) = common_form_first_segment(i, b.state(outcome), a1, a2)?;
    Ok((first + second_drive_term(b, outcome), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::clock_shift_analytic;
    use crate::qubit::{basis_from_angle, QubitHamiltonian};

    #[test]
    fn clock_values_reproduce_weak_value_formula() {
        let h = QubitHamiltonian::unit();
        for (t, p) in [(0.3, 0.1), (1.2, 2.0), (2.9, -1.0), (0.0, 0.0)] {
            let i = QubitState::from_bloch(t, p).unwrap();
            for theta in [0.4f64, 1.9, -2.2, 7.0] {
                let b = basis_from_angle(theta).unwrap();
                let (f, _) = common_form_shift(&i, &b, Outcome::F, 0.0, -1.0).unwrap();
                let (q, _) = common_form_shift(&i, &b, Outcome::Perp, 1.0, 0.0).unwrap();
                let cf = clock_shift_analytic(&i, &b, Outcome::F, &h).unwrap().shift;
                let cq = clock_shift_analytic(&i, &b, Outcome::Perp, &h).unwrap().shift;
                assert!((f - cf).abs() < 1e-13, "{t} {theta}: {f} vs {cf}");
                assert!((q - cq).abs() < 1e-13, "{t} {theta}: {q} vs {cq}");
            }
        }
    }

    #[test]
    fn second_drive_is_minus_the_excitation_change() {
        let b = basis_from_angle(1.1f64).unwrap();
        let (c, _) = b.half_angle();
        assert!((second_drive_term(&b, Outcome::F) + (c * c - 1.0)).abs() < 1e-15);
        let up_weight = b.f_perp.amp_up().norm_sqr();
        assert!((second_drive_term(&b, Outcome::Perp) + up_weight).abs() < 1e-15);
    }
}
