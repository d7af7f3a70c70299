//! Values frozen from an independent 40-digit evaluation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use qpe_core::*;

const DICE_SHIFT_F: f64 = -0.149_071_198_499_985_980;
const DICE_SHIFT_PERP: f64 = -0.745_355_992_499_929_899;
const DICE_QUBIT_F: f64 = 0.372_677_996_249_964_949;
const EPS_SHIFT: f64 = -9.924_937_185_533_099_8;
const EPS_WEAK_VALUE: f64 = -9.974_937_185_533_1;
const JC_PI_3: f64 = -0.302_299_894_039_036_308;
const JC_PI_2: f64 = -0.785_398_163_397_448_310;
const JC_FULL_PI_2: f64 = -0.285_398_163_397_448_310;
const DECAY_UNIT: f64 = 0.303_265_329_856_316_712;

fn eps_basis(eps: f64) -> Basis {
    let theta = 2.0 * (-((1.0 + eps) / 2.0).sqrt()).atan2(((1.0 - eps) / 2.0).sqrt());
    basis_from_angle(theta).unwrap()
}

#[test]
fn dice() {
    let d = dice_scenario::<f64>().unwrap();
    assert!((d.apparatus_shift_f - DICE_SHIFT_F).abs() < 1e-15);
    assert!((d.apparatus_shift_perp - DICE_SHIFT_PERP).abs() < 1e-15);
    assert!((d.qubit_shift_f - DICE_QUBIT_F).abs() < 1e-15);
}

#[test]
fn anomalous_weak_value() {
    let h = Hamiltonian::unit();
    let b = eps_basis(0.1);
    let wv = weak_value(&State::up_x(), &b.f, &h).unwrap();
    assert!((wv.re - EPS_WEAK_VALUE).abs() < 1e-12);
    let r = clock_shift_analytic(&State::up_x(), &b, Outcome::F, &h).unwrap();
    assert!((r.shift - EPS_SHIFT).abs() < 1e-12);
    assert!((r.probability - 0.002_506_281_446_690_023).abs() < 1e-16);
}

#[test]
fn jc_closed_forms() {
    assert!((jc_subshift_analytic(SubShiftKind::UP_UP, FRAC_PI_3).unwrap() - JC_PI_3).abs() < 1e-15);
    assert!((jc_subshift_analytic(SubShiftKind::UP_UP, FRAC_PI_2).unwrap() - JC_PI_2).abs() < 1e-15);
    let r = jc_full_shift(&State::up_z(), FRAC_PI_2, Outcome::F, Method::Analytic, None).unwrap();
    assert!((r.shift - JC_FULL_PI_2).abs() < 1e-15);
}

#[test]
fn decay() {
    let b = basis_from_angle(FRAC_PI_2).unwrap();
    let d = clock_offdiagonal_decay(&b, &ClockConfig::from_ratio(1.0, 1.0), &Hamiltonian::unit()).unwrap();
    assert!((d.closed_form - DECAY_UNIT).abs() < 1e-15);
    assert!(d.agrees());
}

#[test]
fn eps_numeric_uses_tightened_width() {
    let h = Hamiltonian::unit();
    let b = eps_basis(0.1);
    let cfg = ClockConfig::from_ratio(1e-3, 1.0).tightened_for(EPS_SHIFT, 1.0);
    let w = conditioned_wavepacket(&State::up_x(), &b, Outcome::F, &cfg, &h).unwrap();
    let r = clock_shift_numeric(&w, &cfg, &h).unwrap();
    assert!(((r.shift - EPS_SHIFT) / EPS_SHIFT).abs() < 0.02);
}
