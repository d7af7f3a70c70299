//! Quantum clock measurement model.
//!
//! A clock with `H_clock = v p` carries a Gaussian wavepacket across a
//! delta-localized interaction that flips a pointer when the qubit is in
//! `|f>`. Reading the pointer selects the `f` or `f_perp` branch; the pointer
//! itself is never stored as state.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qubit::{
    check_overlap, energy_expectation, weak_value, MeasurementBasis, Outcome, QubitHamiltonian,
    QubitState,
};
use crate::report::{Method, Model, ShiftReport};
use crate::scalar::{from_u64, lit, to_f64, Real};
use crate::sum::{ComplexSum, NeumaierSum};

/// Minimum number of grid points per `sigma_q`.
pub const MIN_POINTS_PER_SIGMA: f64 = 8.0;

/// Largest allowed phase advance of the conditioned packet between grid points.
pub const MAX_PHASE_PER_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Wavepacket and grid parameters for the clock numerics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClockNumericsConfig<T> {
    /// Clock speed.
    pub v: T,
    /// Initial packet centre; must lie left of the interaction region.
    pub q0: T,
    /// Gaussian width of `|<q|phi>|`.
    pub sigma_q: T,
    pub grid_halfwidth_sigmas: T,
    pub grid_points: usize,
}

impl<T: Real> ClockNumericsConfig<T> {
    pub const DEFAULT_GRID_POINTS: usize = 4096;
    pub const DEFAULT_HALFWIDTH_SIGMAS: f64 = 10.0;

    /// Default grid; `q0` is placed two grid half-widths left of the origin.
    pub fn new(v: T, sigma_q: T) -> Self {
        let w = lit(Self::DEFAULT_HALFWIDTH_SIGMAS);
        Self {
            v,
            q0: -lit::<T>(2.0) * w * sigma_q,
            sigma_q,
            grid_halfwidth_sigmas: w,
            grid_points: Self::DEFAULT_GRID_POINTS,
        }
    }

    /// Config with `sigma_q * omega0 / v` equal to `ratio`, at `v = 1`.
    pub fn from_ratio(ratio: T, omega0: T) -> Self {
        Self::new(T::one(), ratio / omega0)
    }

    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }

    /// Grid spacing `2 W sigma_q / (N - 1)`.
    pub fn dq(&self) -> T {
        lit::<T>(2.0) * self.grid_halfwidth_sigmas * self.sigma_q / from_u64::<T>(self.grid_points as u64 - 1)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        if !positive(self.v) {
            return Err(Error::InvalidParameter(format!("clock speed v must be positive (got {})", to_f64(self.v))));
        }
        if !positive(self.sigma_q) {
            return Err(Error::InvalidParameter(format!("sigma_q must be positive (got {})", to_f64(self.sigma_q))));
        }
        if !positive(self.grid_halfwidth_sigmas) {
            return Err(Error::InvalidParameter("grid half-width must be positive".into()));
        }
        if !self.q0.is_finite() || self.q0 >= -self.grid_halfwidth_sigmas * self.sigma_q {
            return Err(Error::InvalidParameter(format!(
                "q0 = {} must lie left of -{} sigma_q",
                to_f64(self.q0),
                to_f64(self.grid_halfwidth_sigmas)
            )));
        }
        if self.grid_points < 256 || !self.grid_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid_points must be a power of two >= 256 (got {})",
                self.grid_points
            )));
        }
        let per_sigma = self.sigma_q / self.dq();
        if per_sigma < lit(MIN_POINTS_PER_SIGMA) {
            return Err(Error::GridUnderresolved(format!(
                "sigma_q / dq = {:.3} < {MIN_POINTS_PER_SIGMA}",
                to_f64(per_sigma)
            )));
        }
        Ok(())
    }

    /// Narrows `sigma_q` by `omega0 / |shift|` when the expected shift exceeds ten level spacings.
    ///
    /// The apparatus energy spread `v / (2 sigma_q)` has to dominate the shift being resolved.
    pub fn tightened_for(mut self, analytic_shift: T, omega0: T) -> Self {
        let mag = analytic_shift.abs();
        if mag > lit::<T>(10.0) * omega0 {
            let scale = omega0 / mag;
            self.sigma_q = self.sigma_q * scale;
            self.q0 = self.q0 * scale;
        }
        self
    }
}

/// Clock amplitude on a uniform grid in `q~ = q - q0`.
///
/// After the pointer is read, the joint qubit-clock state is
/// `amps(q~)|g_tau> + leak(q~)|g_perp_tau>`, where `g` is the selected outcome
/// state. `amps` is the component along the selected state; `leak` is the
/// orthogonal component generated by qubit precession across the packet width.
/// `leak` vanishes as `sigma_q -> 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockWavepacket<T> {
    pub outcome: Option<Outcome>,
    /// First grid offset (`-W sigma_q`).
    pub start: T,
    pub dq: T,
    pub amps: Vec<Complex<T>>,
    pub leak: Vec<Complex<T>>,
    /// Trapezoid integral of `|amps|^2 + |leak|^2`.
    pub norm_sq: T,
}

impl<T: Real> ClockWavepacket<T> {
    /// The unconditioned Gaussian `(2 pi sigma^2)^(-1/4) exp(-q~^2 / (4 sigma^2))`.
    pub fn initial(cfg: &ClockNumericsConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let (start, dq) = grid(cfg);
        let amps: Vec<_> = (0..cfg.grid_points)
            .map(|k| Complex::new(gaussian_amplitude(start + dq * from_u64(k as u64), cfg.sigma_q), T::zero()))
            .collect();
        let leak = vec![Complex::new(T::zero(), T::zero()); amps.len()];
        Ok(Self::assemble(None, start, dq, amps, leak))
    }

    fn assemble(outcome: Option<Outcome>, start: T, dq: T, amps: Vec<Complex<T>>, leak: Vec<Complex<T>>) -> Self {
        let density: Vec<T> = amps.iter().zip(&leak).map(|(a, l)| a.norm_sqr() + l.norm_sqr()).collect();
        let norm_sq = trapezoid(&density, dq);
        Self { outcome, start, dq, amps, leak, norm_sq }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn offsets(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.amps.len()).map(move |k| self.start + self.dq * from_u64(k as u64))
    }

    /// `<p> = Im(int psi* dpsi/dq) / int |psi|^2`, summed over both qubit components.
    pub fn mean_momentum(&self) -> T {
        let num = momentum_integral(&self.amps, self.dq) + momentum_integral(&self.leak, self.dq);
        num / self.norm_sq
    }
}

fn grid<T: Real>(cfg: &ClockNumericsConfig<T>) -> (T, T) {
    (-cfg.grid_halfwidth_sigmas * cfg.sigma_q, cfg.dq())
}

fn gaussian_amplitude<T: Real>(x: T, sigma: T) -> T {
    let norm = (lit::<T>(2.0) * T::PI() * sigma * sigma).powf(lit(-0.25));
    norm * (-(x * x) / (lit::<T>(4.0) * sigma * sigma)).exp()
}

fn trapezoid<T: Real>(values: &[T], h: T) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    let mut acc = NeumaierSum::new();
    acc.add(values[0] * lit(0.5));
    for &v in &values[1..n - 1] {
        acc.add(v);
    }
    acc.add(values[n - 1] * lit(0.5));
    acc.value() * h
}

/// Trapezoid `Im(int psi* psi')` with central differences, one-sided at the ends.
fn momentum_integral<T: Real>(psi: &[Complex<T>], h: T) -> T {
    let n = psi.len();
    if n < 3 {
        return T::zero();
    }
    let two_h = lit::<T>(2.0) * h;
    let deriv = |k: usize| -> Complex<T> {
        if k == 0 {
            (psi[1] - psi[0]) / h
        } else if k == n - 1 {
            (psi[n - 1] - psi[n - 2]) / h
        } else {
            (psi[k + 1] - psi[k - 1]) / two_h
        }
    };
    let integrand: Vec<T> = (0..n).map(|k| (psi[k].conj() * deriv(k)).im).collect();
    trapezoid(&integrand, h)
}

/// Conditional clock energy change `Re(<g|H0|i>/<g|i>) - <g|H0|g>` for outcome state `g`.
pub fn clock_shift_analytic<T: Real>(
    i: &QubitState<T>,
    b: &MeasurementBasis<T>,
    outcome: Outcome,
    h: &QubitHamiltonian<T>,
) -> Result<ShiftReport<T>> {
    let g = b.state(outcome);
    let wv = weak_value(i, g, h)?;
    let p = g.overlap_sq(i);
    // Re(wv) - <g|H0|g> expanded for the XZ-plane basis: -omega0 s c Q / P with
    // Q = s c (|i_down|^2 - |i_up|^2) + Re(i_up i_down*) cos(theta). Exact zeros
    // survive (energy basis, |up_y>), unlike the difference of two rounded terms.
    // Energy eigenstates: the weak value is the eigenvalue, so the shift is
    // exactly minus the qubit's change.
    let eigenstate = i.amp_up().norm_sqr() == T::zero() || i.amp_down().norm_sqr() == T::zero();
    let shift = if eigenstate {
        energy_expectation(i, h) - energy_expectation(g, h)
    } else {
        let (c, s) = b.half_angle();
        let sc = s * c;
        let d = i.amp_down().norm_sqr() - i.amp_up().norm_sqr();
        let r = (i.amp_up() * i.amp_down().conj()).re;
        let q = sc * d + r * (c * c - s * s);
        -h.omega0() * sc * q / p
    };
    Ok(ShiftReport::new(Model::Clock, Method::Analytic, outcome, shift, p)
        .with_residual("weak_value_re", wv.re)
        .with_residual("weak_value_im", wv.im))
}

/// Conditioned clock packet on the grid, un-normalized.
///
/// The component along the selected state is
/// `<g|e^{-i H0 q~/v}|g> <g|e^{+i H0 q~/v}|i> phi(q~)`; the leak component uses
/// `<g_perp|e^{-i H0 q~/v}|g>` in the first factor. Both 2x2 exponentials are
/// diagonal in the energy basis and evaluated in closed form.
pub fn conditioned_wavepacket<T: Real>(
    i: &QubitState<T>,
    b: &MeasurementBasis<T>,
    outcome: Outcome,
    cfg: &ClockNumericsConfig<T>,
    h: &QubitHamiltonian<T>,
) -> Result<ClockWavepacket<T>> {
    cfg.validate()?;
    let g = b.state(outcome);
    let gp = b.state(outcome.other());
    let wv = weak_value(i, g, h)?;

    let (start, dq) = grid(cfg);
    let omega = h.omega0();
    // phase gradient bound: weak value plus the precession of both qubit factors
    let phase_step = (wv.norm() + omega) * dq / cfg.v;
    if phase_step > lit(MAX_PHASE_PER_STEP) {
        return Err(Error::GridUnderresolved(format!(
            "phase advance {:.3} rad per grid step exceeds pi/4; increase grid_points or reduce sigma_q",
            to_f64(phase_step)
        )));
    }

    let (gu, gd) = (g.amp_up(), g.amp_down());
    let (pu, pd) = (gp.amp_up(), gp.amp_down());
    let (iu, id) = (i.amp_up(), i.amp_down());
    // <g|e^{+iH x}|i> = conj(gu) iu e^{+i beta} + conj(gd) id e^{-i beta}, beta = omega x / (2 v)
    let cu = gu.conj() * iu;
    let cd = gd.conj() * id;
    // e^{-iH x}|g> projected on g and on g_perp
    let (su, sd) = (gu.norm_sqr(), gd.norm_sqr());
    let lu = pu.conj() * gu;
    let ld = pd.conj() * gd;

    let half_rate = omega / (lit::<T>(2.0) * cfg.v);
    let mut amps = Vec::with_capacity(cfg.grid_points);
    let mut leak = Vec::with_capacity(cfg.grid_points);
    for k in 0..cfg.grid_points {
        let x = start + dq * from_u64(k as u64);
        let beta = half_rate * x;
        let plus = Complex::from_polar(T::one(), beta);
        let minus = plus.conj();
        let selected = cu * plus + cd * minus;
        let env = selected * gaussian_amplitude(x, cfg.sigma_q);
        amps.push((minus * su + plus * sd) * env);
        leak.push((lu * minus + ld * plus) * env);
    }
    Ok(ClockWavepacket::assemble(Some(outcome), start, dq, amps, leak))
}

/// Clock energy change `v <p>` of a conditioned packet (the initial packet has `<p> = 0`).
pub fn clock_shift_numeric<T: Real>(
    w: &ClockWavepacket<T>,
    cfg: &ClockNumericsConfig<T>,
    h: &QubitHamiltonian<T>,
) -> Result<ShiftReport<T>> {
    cfg.validate()?;
    let outcome = w.outcome.ok_or_else(|| Error::InvalidParameter("wavepacket is not conditioned on an outcome".into()))?;
    if !(w.norm_sq > T::zero()) {
        return Err(Error::ZeroProbabilityOutcome { probability: to_f64(w.norm_sq) });
    }
    let p = w.mean_momentum();
    let shift = cfg.v * p;
    Ok(ShiftReport::new(Model::Clock, Method::Numeric, outcome, shift, w.norm_sq)
        .with_residual("sigma_q_omega0_over_v", cfg.sigma_q * h.omega0() / cfg.v))
}

/// Residual of the ensemble energy balance
/// `sum_g P(g) (dE0_g + dEM_g)`, using the analytic clock shifts.
pub fn clock_energy_balance<T: Real>(i: &QubitState<T>, b: &MeasurementBasis<T>, h: &QubitHamiltonian<T>) -> Result<T> {
    let e_i = energy_expectation(i, h);
    let mut acc = NeumaierSum::new();
    for outcome in [Outcome::F, Outcome::Perp] {
        let report = clock_shift_analytic(i, b, outcome, h)?;
        let qubit = energy_expectation(b.state(outcome), h) - e_i;
        acc.add(report.probability * qubit);
        acc.add(report.probability * report.shift);
    }
    Ok(acc.value())
}

/// `|rho_updown|` of the qubit after selecting `|f>` from `|up_z>` with a finite-width clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceReport<T> {
    /// `|<up|f><f|down>| exp(-omega0^2 sigma_q^2 / (2 v^2))`.
    pub closed_form: T,
    /// Same quantity with the Gaussian time average done by quadrature.
    pub quadrature: T,
}

impl<T: Real> DecoherenceReport<T> {
    pub const REL_TOL: f64 = 1e-8;
    /// Below this the oscillatory quadrature is dominated by rounding.
    pub const ABS_FLOOR: f64 = 1e-15;

    pub fn discrepancy(&self) -> T {
        (self.closed_form - self.quadrature).abs()
    }

    pub fn agrees(&self) -> bool {
        let tol = (lit::<T>(Self::REL_TOL) * self.closed_form.abs()).max(lit(Self::ABS_FLOOR));
        self.discrepancy() <= tol
    }
}

pub fn clock_offdiagonal_decay<T: Real>(
    b: &MeasurementBasis<T>,
    cfg: &ClockNumericsConfig<T>,
    h: &QubitHamiltonian<T>,
) -> Result<DecoherenceReport<T>> {
    cfg.validate()?;
    let prefactor = (b.f.amp_up().conj() * b.f.amp_down()).norm();
    let a = h.omega0() * cfg.sigma_q / cfg.v;
    let closed_form = prefactor * (-(a * a) * lit(0.5)).exp();

    // (2 pi sigma^2)^(-1/2) int exp(-i omega q / v) exp(-q^2 / (2 sigma^2)) dq in the
    // scaled variable x = q / sigma: trapezoid over +-40 with step 1/16, which is
    // spectrally accurate for a Gaussian weight at these frequencies.
    let steps: u64 = 1280;
    let half_width: T = lit(40.0);
    let dx = lit::<T>(2.0) * half_width / from_u64(steps);
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for k in 0..=steps {
        let x = -half_width + dx * from_u64(k);
        let wgt = if k == 0 || k == steps { lit(0.5) } else { T::one() };
        let g = (-(x * x) * lit(0.5)).exp() * wgt;
        let ph = a * x;
        re.add(g * ph.cos());
        im.add(-g * ph.sin());
    }
    let norm = dx / (lit::<T>(2.0) * T::PI()).sqrt();
    let integral = Complex::new(re.value(), im.value()) * norm;
    Ok(DecoherenceReport { closed_form, quadrature: prefactor * integral.norm() })
}

/// Born probability of the selected outcome, checked against the overlap floor.
pub fn clock_outcome_probability<T: Real>(i: &QubitState<T>, b: &MeasurementBasis<T>, outcome: Outcome) -> Result<T> {
    let p = b.state(outcome).overlap_sq(i);
    check_overlap(p)?;
    Ok(p)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<S: Send + Sync>() {}
    check::<ClockWavepacket<f64>>();
    check::<ComplexSum<f64>>();
}
