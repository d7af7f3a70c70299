//! Invariant suites run by `--selftest`. Random inputs come from a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::{
    clock_energy_balance, clock_offdiagonal_decay, clock_shift_analytic, clock_shift_numeric, conditioned_wavepacket,
    ClockNumericsConfig,
};
use crate::degenerate::{common_form_equivalence_residual, deg_subshift_analytic, deg_subshift_numeric};
use crate::error::Result;
use crate::fock::{OscillatorWindow, SubShiftKind};
use crate::jc::{
    fock_drive_purity, jc_conservation_residual, jc_full_shift, jc_postselected_amplitudes, jc_rotation_fidelity,
    jc_subshift_analytic, jc_subshift_numeric,
};
use crate::qubit::{
    basis_from_angle, energy_expectation, outcome_probabilities, weak_value, Level, Outcome, QubitHamiltonian,
    QubitState,
};
use crate::report::Method;
use crate::scenarios::{dice_scenario, stevens_theory_curves, sweep_curves};

const SEED: u64 = 0x005e_ed0f_c10c;
const SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Qubit,
    Clock,
    Jc,
    Degenerate,
    Scenarios,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Qubit, Suite::Clock, Suite::Jc, Suite::Degenerate, Suite::Scenarios];

    pub fn label(self) -> &'static str {
        match self {
            Suite::Qubit => "qubit",
            Suite::Clock => "clock",
            Suite::Jc => "jc",
            Suite::Degenerate => "degenerate",
            Suite::Scenarios => "scenarios",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Worst observed value, or the error that stopped the check.
    pub detail: String,
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    let mut out = Checks { suite, checks: Vec::new() };
    match suite {
        Suite::Qubit => qubit_suite(&mut out),
        Suite::Clock => clock_suite(&mut out),
        Suite::Jc => jc_suite(&mut out),
        Suite::Degenerate => degenerate_suite(&mut out),
        Suite::Scenarios => scenarios_suite(&mut out),
    }
    out.checks
}

struct Checks {
    suite: Suite,
    checks: Vec<Check>,
}

impl Checks {
    /// Records `worst <= bound`.
    fn bound(&mut self, name: &str, worst: Result<f64>, bound: f64) {
        let (passed, detail) = match worst {
            Ok(w) => (w <= bound, format!("worst {w:e}, bound {bound:e}")),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, detail });
    }

    fn holds(&mut self, name: &str, ok: Result<bool>, detail: &str) {
        let (passed, detail) = match ok {
            Ok(b) => (b, detail.to_owned()),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, detail });
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// Uniform on the Bloch sphere.
fn random_state(rng: &mut ChaCha8Rng) -> QubitState<f64> {
    let u: f64 = rng.gen();
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    QubitState::from_bloch((1.0 - 2.0 * u).acos(), phi).expect("finite angles")
}

fn random_theta(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-4.0 * std::f64::consts::PI..4.0 * std::f64::consts::PI)
}

fn max_abs(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(v?.abs());
    }
    Ok(worst)
}

fn qubit_suite(c: &mut Checks) {
    let h = QubitHamiltonian::unit();
    let mut r = rng();
    let samples: Vec<_> = (0..SAMPLES).map(|_| (random_state(&mut r), random_theta(&mut r))).collect();

    c.bound(
        "probabilities_sum_to_one",
        max_abs(samples.iter().map(|(i, t)| {
            let (pf, pp) = outcome_probabilities(i, &basis_from_angle(*t)?);
            Ok(pf + pp - 1.0)
        })),
        1e-12,
    );
    c.bound(
        "basis_orthonormal",
        max_abs(samples.iter().map(|(_, t)| {
            let b = basis_from_angle(*t)?;
            Ok(b.f.inner(&b.f_perp).norm().max((b.f.norm_sq() - 1.0).abs()).max((b.f_perp.norm_sq() - 1.0).abs()))
        })),
        1e-14,
    );
    c.bound(
        "eigenstate_weak_value",
        max_abs(samples.iter().flat_map(|(_, t)| {
            let b = basis_from_angle(*t).expect("finite");
            [Level::Up, Level::Down].map(move |l| {
                let i = QubitState::basis(l);
                let g = if b.f.overlap_sq(&i) > 1e-6 { b.f } else { b.f_perp };
                Ok(weak_value(&i, &g, &h)?.re - h.eigenvalue(l))
            })
        })),
        0.0,
    );
    c.bound(
        "hermitian_weak_value",
        max_abs(samples.iter().map(|(i, _)| Ok((weak_value(i, i, &h)? - energy_expectation(i, &h)).norm()))),
        1e-14,
    );
}

fn clock_suite(c: &mut Checks) {
    let h = QubitHamiltonian::unit();
    let mut r = rng();
    let samples: Vec<_> = (0..SAMPLES).map(|_| (random_state(&mut r), random_theta(&mut r))).collect();

    c.bound(
        "energy_balance",
        max_abs(samples.iter().filter_map(|(i, t)| {
            let b = basis_from_angle(*t).ok()?;
            let (pf, pp) = outcome_probabilities(i, &b);
            (pf.min(pp) >= 1e-12).then(|| clock_energy_balance(i, &b, &h))
        })),
        1e-12,
    );
    c.bound(
        "eigenstate_preparations",
        max_abs(samples.iter().flat_map(|(_, t)| {
            let b = basis_from_angle(*t).expect("finite");
            [(Level::Up, Outcome::F), (Level::Up, Outcome::Perp), (Level::Down, Outcome::F), (Level::Down, Outcome::Perp)]
                .into_iter()
                .filter(move |(l, o)| b.state(*o).overlap_sq(&QubitState::basis(*l)) >= 1e-12)
                .map(move |(l, o)| {
                    let i = QubitState::basis(l);
                    let s = clock_shift_analytic(&i, &b, o, &h)?.shift;
                    Ok(s - (energy_expectation(&i, &h) - energy_expectation(b.state(o), &h)))
                })
        })),
        0.0,
    );
    c.bound(
        "energy_basis_is_free",
        max_abs(samples.iter().flat_map(|(i, _)| {
            let b = basis_from_angle(0.0).expect("finite");
            [Outcome::F, Outcome::Perp]
                .into_iter()
                .filter(move |o| b.state(*o).overlap_sq(i) >= 1e-12)
                .map(move |o| Ok(clock_shift_analytic(i, &b, o, &h)?.shift))
        })),
        0.0,
    );
    c.bound(
        "up_y_is_free",
        max_abs(samples.iter().flat_map(|(_, t)| {
            let b = basis_from_angle(*t).expect("finite");
            [Outcome::F, Outcome::Perp].map(|o| Ok(clock_shift_analytic(&QubitState::up_y(), &b, o, &h)?.shift))
        })),
        0.0,
    );

    let dice_i = QubitState::up_x();
    let dice_b = basis_from_angle((2.0f64 / 3.0).asin()).expect("finite");
    let numeric = |ratio: f64, o: Outcome| -> Result<(f64, f64)> {
        let cfg = ClockNumericsConfig::from_ratio(ratio, 1.0);
        let w = conditioned_wavepacket(&dice_i, &dice_b, o, &cfg, &h)?;
        Ok((clock_shift_numeric(&w, &cfg, &h)?.shift, w.norm_sq))
    };
    c.bound(
        "dice_numeric_relative_error",
        (|| {
            let exact = clock_shift_analytic(&dice_i, &dice_b, Outcome::F, &h)?.shift;
            Ok(((numeric(0.01, Outcome::F)?.0 - exact) / exact).abs())
        })(),
        1e-2,
    );
    c.bound(
        "conditioned_norms_sum_to_one",
        (|| Ok((numeric(0.01, Outcome::F)?.1 + numeric(0.01, Outcome::Perp)?.1 - 1.0).abs()))(),
        1e-6,
    );
    c.holds(
        "numeric_converges_monotonically",
        (|| {
            let exact = clock_shift_analytic(&dice_i, &dice_b, Outcome::F, &h)?.shift;
            let mut prev = f64::INFINITY;
            for ratio in [0.1, 0.03, 0.01, 0.003] {
                let err = (numeric(ratio, Outcome::F)?.0 - exact).abs();
                if err > prev + 1e-9 {
                    return Ok(false);
                }
                prev = err;
            }
            Ok(true)
        })(),
        "sigma_q omega0 / v in {0.1, 0.03, 0.01, 0.003}",
    );
    c.holds(
        "offdiagonal_decay_quadrature",
        (|| {
            for ratio in [1e-6, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
                for t in [0.3, std::f64::consts::FRAC_PI_2, 2.5] {
                    let d = clock_offdiagonal_decay(
                        &basis_from_angle(t)?,
                        &ClockNumericsConfig::from_ratio(ratio, 1.0),
                        &h,
                    )?;
                    if !d.agrees() {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })(),
        "closed form vs trapezoid quadrature, relative 1e-8",
    );
}

fn jc_suite(c: &mut Checks) {
    let mut r = rng();
    let thetas: Vec<f64> = (0..SAMPLES)
        .map(|_| loop {
            let t = random_theta(&mut r);
            // stay 1e-3 away from the poles at multiples of pi
            let d = (t / std::f64::consts::PI).round() * std::f64::consts::PI - t;
            if d.abs() >= 1e-3 {
                break t;
            }
        })
        .collect();

    c.bound(
        "conservation_relations",
        max_abs(thetas.iter().flat_map(|t| {
            let (u, d) = jc_conservation_residual(*t);
            [Ok(u), Ok(d)]
        })),
        1e-12,
    );
    c.holds(
        "subshifts_even",
        (|| {
            for t in &thetas {
                for k in SubShiftKind::ALL {
                    if jc_subshift_analytic(k, *t)? != jc_subshift_analytic(k, -*t)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })(),
        "exact equality",
    );
    c.bound(
        "up_y_full_shift_zero",
        max_abs(thetas.iter().flat_map(|t| {
            [Outcome::F, Outcome::Perp]
                .map(|o| Ok(jc_full_shift(&QubitState::up_y(), *t, o, Method::Analytic, None)?.shift))
        })),
        0.0,
    );
    c.bound(
        "unitarity_n0_1e4",
        (|| {
            let w = OscillatorWindow::with_defaults(1e4, 1)?;
            let i = QubitState::up_x();
            let up = jc_postselected_amplitudes(&i, std::f64::consts::FRAC_PI_3, &w, Level::Up)?.norm_sq();
            let down = jc_postselected_amplitudes(&i, std::f64::consts::FRAC_PI_3, &w, Level::Down)?.norm_sq();
            Ok((up + down - 1.0).abs())
        })(),
        1e-9,
    );
    c.bound(
        "numeric_vs_closed_form_n0_1e6",
        (|| {
            let w = OscillatorWindow::with_defaults(1e6, 1)?;
            max_abs(
                [0.5, 1.0, 2.0]
                    .into_iter()
                    .flat_map(|t| SubShiftKind::ALL.map(|k| (k, t)))
                    .map(|(k, t)| Ok(jc_subshift_numeric(k, t, &w)? - jc_subshift_analytic(k, t)?)),
            )
        })(),
        5e-3,
    );
    c.bound(
        "m_independence_n0_1e6",
        (|| {
            let mut worst = 0.0f64;
            for k in SubShiftKind::ALL {
                let vals: Vec<f64> = [0, 1, 2]
                    .into_iter()
                    .map(|m| jc_subshift_numeric(k, 1.0, &OscillatorWindow::with_defaults(1e6, m)?))
                    .collect::<Result<_>>()?;
                worst = worst.max((vals[0] - vals[1]).abs()).max((vals[1] - vals[2]).abs()).max((vals[0] - vals[2]).abs());
            }
            Ok(worst)
        })(),
        1e-3,
    );
    c.holds(
        "rotation_fidelity_improves",
        (|| {
            let i = QubitState::up_z();
            let t = std::f64::consts::FRAC_PI_2;
            let small = jc_rotation_fidelity(&i, t, &OscillatorWindow::with_defaults(1e2, 1)?)?;
            let large = jc_rotation_fidelity(&i, t, &OscillatorWindow::with_defaults(1e4, 1)?)?;
            Ok(large > small && large <= 1.0 + 1e-12)
        })(),
        "fidelity(n0 = 1e4) > fidelity(n0 = 1e2)",
    );
    c.bound(
        "fock_maximal_entanglement",
        max_abs((0..50u64).map(|n| {
            let t = std::f64::consts::FRAC_PI_2 / ((n + 1) as f64).sqrt();
            Ok(fock_drive_purity(&QubitState::up_z(), n, t) - 0.5)
        })),
        1e-10,
    );
}

fn degenerate_suite(c: &mut Checks) {
    let mut r = rng();
    let samples: Vec<_> = (0..SAMPLES)
        .map(|_| {
            let o = if r.gen::<bool>() { Outcome::F } else { Outcome::Perp };
            (random_state(&mut r), random_theta(&mut r), o)
        })
        .collect();
    c.bound(
        "common_form_equivalence",
        max_abs(samples.iter().filter_map(|(i, t, o)| {
            let b = basis_from_angle(*t).ok()?;
            (b.state(*o).overlap_sq(i) >= 1e-12).then(|| common_form_equivalence_residual(i, *t, *o))
        })),
        1e-12,
    );
    c.holds(
        "clock_values_conserve",
        Ok([Level::Up, Level::Down].into_iter().all(|prep| {
            samples.iter().all(|(_, t, _)| {
                let (s, cth) = (t * 0.5).sin_cos();
                let mut total = 0.0;
                for found in [Level::Up, Level::Down] {
                    let k = SubShiftKind::new(prep, found);
                    let p = if prep == found { cth * cth } else { s * s };
                    total += p * (deg_subshift_analytic::<f64>(k) + k.excitation_change() as f64);
                }
                total == 0.0
            })
        })),
        "exact zero",
    );
    c.bound(
        "numeric_n0_1e4",
        (|| {
            let w = OscillatorWindow::with_defaults(1e4, 1)?;
            max_abs(
                [(SubShiftKind::UP_UP, 1.0), (SubShiftKind::DOWN_UP, 1.5), (SubShiftKind::UP_DOWN, 1.5), (SubShiftKind::DOWN_DOWN, 1.0)]
                    .into_iter()
                    .map(|(k, t)| Ok(deg_subshift_numeric(k, t, &w)? - deg_subshift_analytic::<f64>(k))),
            )
        })(),
        2e-3,
    );
    c.bound(
        "theta_independence_n0_1e6",
        (|| {
            let w = OscillatorWindow::with_defaults(1e6, 1)?;
            let mut worst = 0.0f64;
            for k in SubShiftKind::ALL {
                let v: Vec<f64> = [0.5, 1.5, 2.5].into_iter().map(|t| deg_subshift_numeric(k, t, &w)).collect::<Result<_>>()?;
                let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
                worst = worst.max(spread);
            }
            Ok(worst)
        })(),
        1e-3,
    );
}

fn scenarios_suite(c: &mut Checks) {
    c.bound(
        "dice_values",
        (|| {
            let d = dice_scenario::<f64>()?;
            let r5 = 5f64.sqrt();
            Ok([
                d.p_f - 5.0 / 6.0,
                d.qubit_shift_f - r5 / 6.0,
                d.apparatus_shift_f + 1.0 / (3.0 * r5),
                d.apparatus_shift_perp + r5 / 3.0,
                d.balance_residual,
            ]
            .into_iter()
            .fold(0.0, |a: f64, x| a.max(x.abs())))
        })(),
        1e-12,
    );
    c.bound(
        "sweep_balances_and_equivalence",
        (|| {
            let mut r = rng();
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let t = sweep_curves(&random_state(&mut r), -7.0, 13.0, 101, None)?;
                for name in ["clock_balance_residual", "jc_balance_residual"] {
                    for v in t.column(name).unwrap_or(&[]).iter().flatten() {
                        worst = worst.max(v.abs());
                    }
                }
                let clock = t.column("clock_shift").unwrap_or(&[]);
                let deg = t.column("deg_shift").unwrap_or(&[]);
                for (a, b) in clock.iter().zip(deg) {
                    if let (Some(a), Some(b)) = (a, b) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
            Ok(worst)
        })(),
        1e-10,
    );
    c.holds(
        "stevens_even",
        (|| {
            let t = stevens_theory_curves(-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI, 201, None)?;
            let n = t.rows();
            Ok(t.columns.iter().skip(1).all(|col| (0..n).all(|k| col.values[k] == col.values[n - 1 - k])))
        })(),
        "table symmetric under theta -> -theta",
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for s in Suite::ALL {
            for check in run_suite(s) {
                assert!(check.passed, "{}::{}: {}", s.label(), check.name, check.detail);
            }
        }
    }
}
