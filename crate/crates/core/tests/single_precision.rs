use qpe_core::{basis_from_angle, clock_shift_analytic, jc_full_shift, Method, Outcome, QubitHamiltonian, QubitState};

#[test]
fn models_run_in_f32() {
    let b = basis_from_angle((2.0f32 / 3.0).asin()).unwrap();
    let r = clock_shift_analytic(&QubitState::<f32>::up_x(), &b, Outcome::F, &QubitHamiltonian::unit()).unwrap();
    assert!((r.shift + 0.149_071_2).abs() < 1e-6);
    let j = jc_full_shift(&QubitState::<f32>::up_z(), std::f32::consts::FRAC_PI_2, Outcome::F, Method::Analytic, None)
        .unwrap();
    assert!((j.shift + 0.285_398_2).abs() < 1e-6);
}
