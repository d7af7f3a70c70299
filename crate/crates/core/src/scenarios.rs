//! Named reproductions: the dice example, theta sweeps across all three
//! models, and the ground-preparation theory curves.

use rayon::prelude::*;

use crate::clock::{clock_energy_balance, clock_shift_analytic};
use crate::degenerate::deg_full_shift;
use crate::error::{Error, Result};
use crate::fock::{OscillatorWindow, SubShiftKind, PROBABILITY_FLOOR};
use crate::jc::{jc_full_shift, jc_subshift_analytic};
use crate::qubit::{basis_from_angle, energy_expectation, outcome_probabilities, Outcome, QubitHamiltonian, QubitState};
use crate::report::Method;
use crate::scalar::{from_u64, lit, to_f64, Real};
use crate::sum::NeumaierSum;

/// A named column of optional cells; `None` marks a divergent or undefined point.
#[derive(Clone, Debug, PartialEq)]
pub struct Column<T> {
    pub name: String,
    pub values: Vec<Option<T>>,
}

/// Equal-length columns over a strictly increasing theta grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable<T> {
    pub scenario: String,
    pub units: String,
    pub parameters: Vec<(String, String)>,
    pub columns: Vec<Column<T>>,
}

impl<T: Real> SweepTable<T> {
    pub fn new(scenario: &str, units: &str) -> Self {
        Self { scenario: scenario.into(), units: units.into(), parameters: Vec::new(), columns: Vec::new() }
    }

    pub fn with_parameter(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    pub fn push_column(&mut self, name: &str, values: Vec<Option<T>>) {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.values.len(), values.len(), "column {name} has the wrong length");
        }
        self.columns.push(Column { name: name.into(), values });
    }

    pub fn column(&self, name: &str) -> Option<&[Option<T>]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }
}

/// `steps` points from `start` to `end` inclusive.
///
/// Points are `(start (n-1-k) + end k) / (n-1)`, so a grid symmetric about
/// zero is exactly symmetric.
pub fn theta_grid<T: Real>(start: T, end: T, steps: usize) -> Result<Vec<T>> {
    if steps < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 steps (got {steps})")));
    }
    if !start.is_finite() || !end.is_finite() || !(start < end) {
        return Err(Error::InvalidRange(format!(
            "theta range must be finite and increasing (got {} .. {})",
            to_f64(start),
            to_f64(end)
        )));
    }
    let last = from_u64::<T>(steps as u64 - 1);
    let grid: Vec<T> = (0..steps)
        .map(|k| {
            let k = from_u64::<T>(k as u64);
            (start * (last - k) + end * k) / last
        })
        .collect();
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidRange("theta grid is not strictly increasing at this resolution".into()));
    }
    Ok(grid)
}

/// Fixed preparation `|up_x>` and basis angle `arcsin(2/3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiceReport<T> {
    pub theta: T,
    pub p_f: T,
    pub p_perp: T,
    pub qubit_shift_f: T,
    pub qubit_shift_perp: T,
    pub apparatus_shift_f: T,
    pub apparatus_shift_perp: T,
    /// Expected apparatus change over six runs.
    pub ensemble_shift_per_six: T,
    pub balance_residual: T,
    pub both_lose_perp: bool,
}

pub fn dice_scenario<T: Real>() -> Result<DiceReport<T>> {
    dice_scenario_with(&QubitHamiltonian::unit())
}

pub fn dice_scenario_with<T: Real>(h: &QubitHamiltonian<T>) -> Result<DiceReport<T>> {
    let theta = (lit::<T>(2.0) / lit(3.0)).asin();
    let i = QubitState::up_x();
    let b = basis_from_angle(theta)?;
    let (p_f, p_perp) = outcome_probabilities(&i, &b);
    let e_i = energy_expectation(&i, h);
    let qubit_shift_f = energy_expectation(&b.f, h) - e_i;
    let qubit_shift_perp = energy_expectation(&b.f_perp, h) - e_i;
    let apparatus_shift_f = clock_shift_analytic(&i, &b, Outcome::F, h)?.shift;
    let apparatus_shift_perp = clock_shift_analytic(&i, &b, Outcome::Perp, h)?.shift;
    let ensemble = (p_f * apparatus_shift_f + p_perp * apparatus_shift_perp) * lit(6.0);
    Ok(DiceReport {
        theta,
        p_f,
        p_perp,
        qubit_shift_f,
        qubit_shift_perp,
        apparatus_shift_f,
        apparatus_shift_perp,
        ensemble_shift_per_six: ensemble,
        balance_residual: clock_energy_balance(&i, &b, h)?,
        both_lose_perp: qubit_shift_perp < T::zero() && apparatus_shift_perp < T::zero(),
    })
}

/// Maps zero-probability errors to an absent cell.
fn cell<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_zero_probability() => Ok(None),
        Err(e) => Err(e),
    }
}

const SWEEP_COLUMNS: [&str; 13] = [
    "theta",
    "clock_shift",
    "clock_shift_perp",
    "jc_shift",
    "jc_shift_perp",
    "deg_shift",
    "deg_shift_perp",
    "neg_qubit_shift",
    "neg_qubit_shift_perp",
    "p_f",
    "p_perp",
    "clock_balance_residual",
    "jc_balance_residual",
];

fn sweep_row<T: Real>(i: &QubitState<T>, theta: T, w: Option<&OscillatorWindow<T>>) -> Result<Vec<Option<T>>> {
    let h = QubitHamiltonian::unit();
    let b = basis_from_angle(theta)?;
    let (p_f, p_perp) = outcome_probabilities(i, &b);
    let e_i = energy_expectation(i, &h);
    let floor: T = lit(PROBABILITY_FLOOR);

    let mut clock = [None; 2];
    let mut jc = [None; 2];
    let mut deg = [None; 2];
    let mut neg_q = [None; 2];
    let mut jc_num = [None; 2];
    for (k, o) in [Outcome::F, Outcome::Perp].into_iter().enumerate() {
        clock[k] = cell(clock_shift_analytic(i, &b, o, &h).map(|r| r.shift))?;
        jc[k] = cell(jc_full_shift(i, theta, o, Method::Analytic, None).map(|r| r.shift))?;
        deg[k] = cell(deg_full_shift(i, theta, o, Method::Analytic, None).map(|r| r.shift))?;
        if b.state(o).overlap_sq(i) >= floor {
            neg_q[k] = Some(e_i - energy_expectation(b.state(o), &h));
        }
        if let Some(w) = w {
            jc_num[k] = cell(jc_full_shift(i, theta, o, Method::Numeric, Some(w)).map(|r| r.shift))?;
        }
    }

    let clock_bal = cell(clock_energy_balance(i, &b, &h))?;
    let jc_bal = match (jc, neg_q) {
        ([Some(sf), Some(sp)], [Some(qf), Some(qp)]) => {
            let mut acc = NeumaierSum::new();
            acc.add(p_f * (sf - qf));
            acc.add(p_perp * (sp - qp));
            Some(acc.value())
        }
        _ => None,
    };

    let mut row = vec![
        Some(theta),
        clock[0],
        clock[1],
        jc[0],
        jc[1],
        deg[0],
        deg[1],
        neg_q[0],
        neg_q[1],
        Some(p_f),
        Some(p_perp),
        clock_bal,
        jc_bal,
    ];
    if w.is_some() {
        row.extend(jc_num);
    }
    Ok(row)
}

/// Conditional shifts of every model over a theta grid, in `omega0` units (quanta for the oscillators).
///
/// With a window, numeric Jaynes-Cummings columns are added.
pub fn sweep_curves<T: Real>(
    i: &QubitState<T>,
    theta_start: T,
    theta_end: T,
    steps: usize,
    w: Option<&OscillatorWindow<T>>,
) -> Result<SweepTable<T>> {
    let grid = theta_grid(theta_start, theta_end, steps)?;
    let rows: Vec<Vec<Option<T>>> = grid.par_iter().map(|&t| sweep_row(i, t, w)).collect::<Result<_>>()?;

    let mut names: Vec<&str> = SWEEP_COLUMNS.to_vec();
    if w.is_some() {
        names.extend(["jc_shift_numeric", "jc_shift_numeric_perp"]);
    }
    let mut table = SweepTable::new("sweep", "omega0")
        .with_parameter("theta_start", to_f64(theta_start))
        .with_parameter("theta_end", to_f64(theta_end))
        .with_parameter("steps", steps);
    for (k, name) in names.iter().enumerate() {
        table.push_column(name, rows.iter().map(|r| r[k]).collect());
    }
    Ok(table)
}

/// Ground-preparation theory curves: `down_down` (ground found) and `down_up` (excited found).
///
/// With an envelope constant `c`, adds `+-c |theta|`.
pub fn stevens_theory_curves<T: Real>(
    theta_start: T,
    theta_end: T,
    steps: usize,
    envelope_constant: Option<T>,
) -> Result<SweepTable<T>> {
    let grid = theta_grid(theta_start, theta_end, steps)?;
    let curve = |kind: SubShiftKind| -> Result<Vec<Option<T>>> {
        grid.iter().map(|&t| cell(jc_subshift_analytic(kind, t))).collect()
    };
    let mut table = SweepTable::new("stevens", "quanta")
        .with_parameter("theta_start", to_f64(theta_start))
        .with_parameter("theta_end", to_f64(theta_end))
        .with_parameter("steps", steps);
    table.push_column("theta", grid.iter().map(|&t| Some(t)).collect());
    table.push_column("ground_postselected", curve(SubShiftKind::DOWN_DOWN)?);
    table.push_column("excited_postselected", curve(SubShiftKind::DOWN_UP)?);
    if let Some(c) = envelope_constant {
        table = table.with_parameter("envelope_constant", to_f64(c));
        table.push_column("envelope_upper", grid.iter().map(|&t| Some(c * t.abs())).collect());
        table.push_column("envelope_lower", grid.iter().map(|&t| Some(-c * t.abs())).collect());
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dice_values() {
        let d = dice_scenario::<f64>().unwrap();
        let r5 = 5f64.sqrt();
        assert!((d.p_f - 5.0 / 6.0).abs() < 1e-15);
        assert!((d.qubit_shift_f - r5 / 6.0).abs() < 1e-15);
        assert!((d.qubit_shift_perp + r5 / 6.0).abs() < 1e-15);
        assert!((d.apparatus_shift_f + 1.0 / (3.0 * r5)).abs() < 1e-15);
        assert!((d.apparatus_shift_perp + r5 / 3.0).abs() < 1e-15);
        assert!((d.ensemble_shift_per_six + 2.0 * r5 / 3.0).abs() < 1e-14);
        assert!(d.balance_residual.abs() < 1e-15);
        assert!(d.both_lose_perp);
    }

    #[test]
    fn grid_is_inclusive_and_symmetric() {
        let g = theta_grid(-2.0 * PI, 2.0 * PI, 9).unwrap();
        assert_eq!(g[0], -2.0 * PI);
        assert_eq!(g[8], 2.0 * PI);
        for k in 0..9 {
            assert_eq!(g[k], -g[8 - k]);
        }
        assert!(matches!(theta_grid(0.0, 1.0, 1), Err(Error::InvalidRange(_))));
        assert!(matches!(theta_grid(1.0, 0.0, 5), Err(Error::InvalidRange(_))));
    }

    #[test]
    fn up_x_sweep_has_absent_cells_at_divergences() {
        let t = sweep_curves(&QubitState::up_x(), 0.0, 4.0 * PI, 17, None).unwrap();
        let theta = t.column("theta").unwrap();
        let clock = t.column("clock_shift").unwrap();
        for (th, c) in theta.iter().zip(clock) {
            let th = th.unwrap();
            let divergent = ((th - 1.5 * PI).abs() < 1e-9) || ((th - 3.5 * PI).abs() < 1e-9);
            assert_eq!(c.is_none(), divergent, "{th}");
        }
    }

    #[test]
    fn sweep_invariants() {
        let i = QubitState::from_bloch(0.9f64, 0.4).unwrap();
        let t = sweep_curves(&i, -3.0, 9.0, 41, None).unwrap();
        let clock = t.column("clock_shift").unwrap();
        let deg = t.column("deg_shift").unwrap();
        for (c, d) in clock.iter().zip(deg) {
            assert!((c.unwrap() - d.unwrap()).abs() < 1e-12);
        }
        for name in ["clock_balance_residual", "jc_balance_residual"] {
            assert!(t.column(name).unwrap().iter().all(|r| r.unwrap().abs() < 1e-10));
        }
    }

    #[test]
    fn up_z_clock_equals_negative_qubit_change() {
        let t = sweep_curves(&QubitState::up_z(), 0.0, 2.0 * PI, 13, None).unwrap();
        for (c, q) in t.column("clock_shift").unwrap().iter().zip(t.column("neg_qubit_shift").unwrap()) {
            assert_eq!(c.is_some(), q.is_some());
            if let (Some(c), Some(q)) = (c, q) {
                assert!((c - q).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stevens_curves() {
        let t = stevens_theory_curves(-2.0 * PI, 2.0 * PI, 9, Some(0.1)).unwrap();
        let g = t.column("ground_postselected").unwrap();
        let e = t.column("excited_postselected").unwrap();
        // theta = pi at index 6
        assert!(g[6].is_none());
        assert!((e[6].unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(g[4], Some(-0.0));
        assert_eq!(e[4], Some(0.0));
        for k in 0..9 {
            assert_eq!(g[k], g[8 - k]);
            assert_eq!(e[k], e[8 - k]);
        }
        assert_eq!(t.column("envelope_upper").unwrap()[0], Some(0.1 * 2.0 * PI));
    }
}
