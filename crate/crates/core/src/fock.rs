//! Truncated Fock-space windows and the first-drive evolution shared by the
//! Jaynes-Cummings and degenerate-ladder models.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qubit::{Level, QubitState};
use crate::scalar::{from_u64, lit, to_f64, Real};
use crate::sum::NeumaierSum;

/// Smallest accepted window half-width in units of `sqrt(n0)`.
pub const MIN_WINDOW_SIGMAS: f64 = 6.0;

/// Outcome probabilities below this are reported as zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Photon-number distribution of the initial coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AmplitudeMode {
    /// `sqrt(e^-n0 n0^n / n!)`, evaluated in log space.
    #[default]
    PoissonExact,
    /// `(2 pi n0)^(-1/4) exp(-(n - n0)^2 / (4 n0))` sampled at integer `n`.
    GaussianContinuum,
}

impl AmplitudeMode {
    pub fn label(self) -> &'static str {
        match self {
            AmplitudeMode::PoissonExact => "poisson",
            AmplitudeMode::GaussianContinuum => "gaussian",
        }
    }
}

/// Photon-number window `[n_lo, n_hi]` around a coherent state of mean `n0`.
///
/// The drive is calibrated so that `Omega0 t sqrt(n0 + m) = |theta|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorWindow<T> {
    n0: T,
    m: i64,
    window_sigmas: T,
    n_lo: u64,
    n_hi: u64,
    amp_mode: AmplitudeMode,
}

impl<T: Real> OscillatorWindow<T> {
    pub const DEFAULT_WINDOW_SIGMAS: f64 = 10.0;

    pub fn new(n0: T, m: i64, window_sigmas: T, amp_mode: AmplitudeMode) -> Result<Self> {
        if !n0.is_finite() || n0 <= T::zero() {
            return Err(Error::NonPositiveN0(to_f64(n0)));
        }
        if !window_sigmas.is_finite() || window_sigmas < lit(MIN_WINDOW_SIGMAS) {
            return Err(Error::WindowTooSmall { window_sigmas: to_f64(window_sigmas), minimum: MIN_WINDOW_SIGMAS });
        }
        let root = n0.sqrt();
        let m_t: T = T::from(m).ok_or_else(|| Error::InvalidParameter(format!("m = {m} out of range")))?;
        if m_t.abs() > root / lit(10.0) {
            return Err(Error::InvalidParameter(format!(
                "drive offset |m| = {} must not exceed sqrt(n0)/10 = {}",
                m.unsigned_abs(),
                to_f64(root / lit(10.0))
            )));
        }
        let half = window_sigmas * root;
        let lo = (n0 - half).floor().max(T::zero());
        let hi = (n0 + half).ceil();
        let (n_lo, n_hi) = match (lo.to_u64(), hi.to_u64()) {
            (Some(a), Some(b)) if b < u64::MAX / 2 => (a, b),
            _ => return Err(Error::InvalidParameter(format!("n0 = {} too large for the window", to_f64(n0)))),
        };
        Ok(Self { n0, m, window_sigmas, n_lo, n_hi, amp_mode })
    }

    /// Default window (10 sigmas, Poisson amplitudes).
    pub fn with_defaults(n0: T, m: i64) -> Result<Self> {
        Self::new(n0, m, lit(Self::DEFAULT_WINDOW_SIGMAS), AmplitudeMode::PoissonExact)
    }

    pub fn n0(&self) -> T {
        self.n0
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn window_sigmas(&self) -> T {
        self.window_sigmas
    }

    pub fn n_lo(&self) -> u64 {
        self.n_lo
    }

    pub fn n_hi(&self) -> u64 {
        self.n_hi
    }

    pub fn amp_mode(&self) -> AmplitudeMode {
        self.amp_mode
    }

    pub fn len(&self) -> usize {
        (self.n_hi - self.n_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Omega0 t` for drive angle `theta`.
    pub fn omega_t(&self, theta: T) -> T {
        theta / (self.n0 + T::from(self.m).unwrap_or_else(T::zero)).sqrt()
    }

    /// `<n|alpha>` for every `n` in the window, ascending.
    pub fn coherent_amplitudes(&self) -> Vec<T> {
        (self.n_lo..=self.n_hi).map(|n| coherent_amplitude(n, self.n0, self.amp_mode)).collect()
    }
}

/// `<n|alpha>` for real `alpha = sqrt(n0)`.
pub fn coherent_amplitude<T: Real>(n: u64, n0: T, mode: AmplitudeMode) -> T {
    match mode {
        AmplitudeMode::PoissonExact => (poisson_ln_pmf(n, n0) * lit(0.5)).exp(),
        AmplitudeMode::GaussianContinuum => {
            let d = from_u64::<T>(n) - n0;
            let norm = (lit::<T>(2.0) * T::PI() * n0).powf(lit(-0.25));
            norm * (-(d * d) / (lit::<T>(4.0) * n0)).exp()
        }
    }
}

/// `ln(e^-lambda lambda^n / n!)` in the saddle-point form
/// `-stirlerr(n) - bd0(n, lambda) - ln(2 pi n)/2`, which keeps full relative
/// accuracy for `n` and `lambda` up to ~1e15.
pub fn poisson_ln_pmf<T: Real>(n: u64, lambda: T) -> T {
    if n == 0 {
        return -lambda;
    }
    let x = from_u64::<T>(n);
    -stirlerr::<T>(n) - bd0(x, lambda) - (lit::<T>(2.0) * T::PI() * x).ln() * lit(0.5)
}

/// `ln n! - ((n + 1/2) ln n - n + ln(2 pi)/2)`.
fn stirlerr<T: Real>(n: u64) -> T {
    let x = from_u64::<T>(n);
    if n <= 15 {
        let mut ln_fact = NeumaierSum::new();
        for k in 2..=n {
            ln_fact.add(from_u64::<T>(k).ln());
        }
        let half_ln_2pi = (lit::<T>(2.0) * T::PI()).ln() * lit(0.5);
        return ln_fact.value() - ((x + lit(0.5)) * x.ln() - x + half_ln_2pi);
    }
    let s0: T = lit(1.0 / 12.0);
    let s1: T = lit(1.0 / 360.0);
    let s2: T = lit(1.0 / 1260.0);
    let s3: T = lit(1.0 / 1680.0);
    let s4: T = lit(1.0 / 1188.0);
    let nn = x * x;
    (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / x
}

/// `x ln(x / np) + np - x`, without cancellation near `x = np`.
fn bd0<T: Real>(x: T, np: T) -> T {
    let d = x - np;
    if d.abs() < lit::<T>(0.1) * (x + np) {
        let v = d / (x + np);
        let mut s = d * v;
        let mut ej = lit::<T>(2.0) * x * v;
        let v2 = v * v;
        for j in 1..1000u64 {
            ej = ej * v2;
            let s1 = s + ej / from_u64::<T>(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// The `(prep, found)` label of a first-segment sub-shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubShiftKind {
    pub prep: Level,
    pub found: Level,
}

impl SubShiftKind {
    pub const UP_UP: Self = Self { prep: Level::Up, found: Level::Up };
    pub const DOWN_UP: Self = Self { prep: Level::Down, found: Level::Up };
    pub const UP_DOWN: Self = Self { prep: Level::Up, found: Level::Down };
    pub const DOWN_DOWN: Self = Self { prep: Level::Down, found: Level::Down };
    pub const ALL: [Self; 4] = [Self::UP_UP, Self::DOWN_UP, Self::UP_DOWN, Self::DOWN_DOWN];

    pub fn new(prep: Level, found: Level) -> Self {
        Self { prep, found }
    }

    /// `up_up`, `down_up`, ...
    pub fn label(self) -> String {
        format!("{}_{}", self.prep.label(), self.found.label())
    }

    /// Qubit excitation change `found - prep`.
    pub fn excitation_change(self) -> i8 {
        self.found.excitation() as i8 - self.prep.excitation() as i8
    }
}

/// How the drive's Rabi angle depends on the photon number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling<T> {
    /// Jaynes-Cummings: angle `phi sqrt(k / scale)` on the `|up, k-1> <-> |down, k>` pair.
    JaynesCummings { scale: T },
    /// Norm-preserving ladder: angle `phi` for every pair.
    Degenerate,
}

impl<T: Real> Coupling<T> {
    pub fn jc(w: &OscillatorWindow<T>) -> Self {
        Coupling::JaynesCummings { scale: w.n0 + T::from(w.m).unwrap_or_else(T::zero) }
    }

    fn rate(&self, k: u64) -> T {
        match *self {
            Coupling::JaynesCummings { scale } => (from_u64::<T>(k) / scale).sqrt(),
            Coupling::Degenerate => T::one(),
        }
    }
}

/// Oscillator amplitudes paired with one qubit level after the first drive.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedOscillatorState<T> {
    pub window: OscillatorWindow<T>,
    pub found: Level,
    /// Amplitude at `n = n_lo + k`.
    pub amps: Vec<Complex<T>>,
    /// `sum |<n|alpha>|^2` over the window, the baseline for probabilities.
    pub initial_norm_sq: T,
    /// `sum (n - n0) |<n|alpha>|^2` over the window.
    pub initial_offset: T,
}

impl<T: Real> ConditionedOscillatorState<T> {
    pub fn norm_sq(&self) -> T {
        let mut acc = NeumaierSum::new();
        for a in &self.amps {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// Probability of finding `found`, relative to the windowed initial norm.
    pub fn probability(&self) -> T {
        self.norm_sq() / self.initial_norm_sq
    }

    /// Conditional mean photon-number change relative to the initial window mean.
    pub fn mean_shift(&self) -> Result<T> {
        let mut norm = NeumaierSum::new();
        let mut first = NeumaierSum::new();
        let n0 = self.window.n0;
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            norm.add(p);
            first.add((from_u64::<T>(self.window.n_lo + k as u64) - n0) * p);
        }
        let norm = norm.value();
        let prob = norm / self.initial_norm_sq;
        if !(prob >= lit(PROBABILITY_FLOOR)) {
            return Err(Error::ZeroProbabilityOutcome { probability: to_f64(prob) });
        }
        Ok(first.value() / norm - self.initial_offset / self.initial_norm_sq)
    }
}

/// Coherent amplitudes with out-of-window lookups returning zero.
struct Alphas<T> {
    lo: u64,
    values: Vec<T>,
}

impl<T: Real> Alphas<T> {
    fn new(w: &OscillatorWindow<T>) -> Self {
        Self { lo: w.n_lo, values: w.coherent_amplitudes() }
    }

    fn get(&self, n: i128) -> T {
        if n < self.lo as i128 {
            return T::zero();
        }
        self.values.get((n - self.lo as i128) as usize).copied().unwrap_or_else(T::zero)
    }

    fn moments(&self, n0: T) -> (T, T) {
        let mut norm = NeumaierSum::new();
        let mut first = NeumaierSum::new();
        for (k, a) in self.values.iter().enumerate() {
            let p = *a * *a;
            norm.add(p);
            first.add((from_u64::<T>(self.lo + k as u64) - n0) * p);
        }
        (norm.value(), first.value())
    }
}

/// Applies the first drive `e^{-i phi sigma_y / 2}` (photon-number dependent
/// for Jaynes-Cummings) to `i (x) |alpha>` and projects on `found`.
///
/// With `a_k = <k|alpha>` and rate `r_k`:
/// `up_n = cos(phi r_{n+1}/2) i_up a_n - sin(phi r_{n+1}/2) i_down a_{n+1}`,
/// `down_n = sin(phi r_n/2) i_up a_{n-1} + cos(phi r_n/2) i_down a_n`,
/// and `|down, 0>` is never coupled.
pub fn drive_amplitudes<T: Real>(
    i: &QubitState<T>,
    phi: T,
    w: &OscillatorWindow<T>,
    coupling: Coupling<T>,
    found: Level,
) -> Result<ConditionedOscillatorState<T>> {
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("drive angle must be finite (got {})", to_f64(phi))));
    }
    let alphas = Alphas::new(w);
    let (initial_norm_sq, initial_offset) = alphas.moments(w.n0);
    let amps = drive_level(i, phi, w, &coupling, &alphas, found);
    Ok(ConditionedOscillatorState { window: *w, found, amps, initial_norm_sq, initial_offset })
}

/// Both levels after the drive, `(up, down)`.
pub(crate) fn drive_both<T: Real>(
    i: &QubitState<T>,
    phi: T,
    w: &OscillatorWindow<T>,
    coupling: Coupling<T>,
) -> (Vec<Complex<T>>, Vec<Complex<T>>, T) {
    let alphas = Alphas::new(w);
    let (norm, _) = alphas.moments(w.n0);
    let up = drive_level(i, phi, w, &coupling, &alphas, Level::Up);
    let down = drive_level(i, phi, w, &coupling, &alphas, Level::Down);
    (up, down, norm)
}

fn drive_level<T: Real>(
    i: &QubitState<T>,
    phi: T,
    w: &OscillatorWindow<T>,
    coupling: &Coupling<T>,
    alphas: &Alphas<T>,
    found: Level,
) -> Vec<Complex<T>> {
    let (iu, id) = (i.amp_up(), i.amp_down());
    let half = phi * lit(0.5);
    (w.n_lo..=w.n_hi)
        .map(|n| {
            let ni = n as i128;
            match found {
                Level::Up => {
                    let x = half * coupling.rate(n + 1);
                    iu * (x.cos() * alphas.get(ni)) - id * (x.sin() * alphas.get(ni + 1))
                }
                Level::Down => {
                    if n == 0 {
                        return id * alphas.get(0);
                    }
                    let x = half * coupling.rate(n);
                    iu * (x.sin() * alphas.get(ni - 1)) + id * (x.cos() * alphas.get(ni))
                }
            }
        })
        .collect()
}
