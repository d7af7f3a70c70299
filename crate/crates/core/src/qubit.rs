//! Two-level-system algebra shared by every measurement model.
//!
//! Basis order is `(|up_z>, |down_z>)`, i.e. excited then ground. `hbar = 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Floor on |<g|i>|^2 below which a post-selection is treated as orthogonal.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Which basis state of the measurement is post-selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    F,
    Perp,
}

impl Outcome {
    pub fn other(self) -> Self {
        match self {
            Outcome::F => Outcome::Perp,
            Outcome::Perp => Outcome::F,
        }
    }

    /// The sigma_z result that selects this outcome in the drive protocols.
    pub fn level(self) -> Level {
        match self {
            Outcome::F => Level::Up,
            Outcome::Perp => Level::Down,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::F => "f",
            Outcome::Perp => "perp",
        }
    }
}

/// An energy eigenstate label of the qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Up,
    Down,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Up => "up",
            Level::Down => "down",
        }
    }

    /// Qubit excitation number of the level.
    pub fn excitation(self) -> u8 {
        match self {
            Level::Up => 1,
            Level::Down => 0,
        }
    }
}

/// Normalized pure qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState<T> {
    up: Complex<T>,
    down: Complex<T>,
}

impl<T: Real> QubitState<T> {
    /// Builds a state from raw amplitudes, normalizing them. The global phase is kept.
    pub fn new(up: Complex<T>, down: Complex<T>) -> Result<Self> {
        let norm_sq = up.norm_sqr() + down.norm_sqr();
        if !norm_sq.is_finite() || norm_sq <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "qubit amplitudes must be finite and not both zero (norm^2 = {})",
                to_f64(norm_sq)
            )));
        }
        let inv = norm_sq.sqrt().recip();
        Ok(Self { up: up * inv, down: down * inv })
    }

    pub fn from_real(up: T, down: T) -> Result<Self> {
        Self::new(Complex::new(up, T::zero()), Complex::new(down, T::zero()))
    }

    /// `cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`.
    pub fn from_bloch(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("Bloch angles must be finite".into()));
        }
        let half = theta * lit(0.5);
        Self::new(Complex::new(half.cos(), T::zero()), Complex::from_polar(half.sin(), phi))
    }

    pub fn basis(level: Level) -> Self {
        match level {
            Level::Up => Self::up_z(),
            Level::Down => Self::down_z(),
        }
    }

    pub fn up_z() -> Self {
        Self { up: Complex::new(T::one(), T::zero()), down: Complex::new(T::zero(), T::zero()) }
    }

    pub fn down_z() -> Self {
        Self { up: Complex::new(T::zero(), T::zero()), down: Complex::new(T::one(), T::zero()) }
    }

    pub fn up_x() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Self { up: Complex::new(r, T::zero()), down: Complex::new(r, T::zero()) }
    }

    pub fn down_x() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Self { up: Complex::new(r, T::zero()), down: Complex::new(-r, T::zero()) }
    }

    pub fn up_y() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Self { up: Complex::new(r, T::zero()), down: Complex::new(T::zero(), r) }
    }

    pub fn down_y() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Self { up: Complex::new(r, T::zero()), down: Complex::new(T::zero(), -r) }
    }

    pub fn amp_up(&self) -> Complex<T> {
        self.up
    }

    pub fn amp_down(&self) -> Complex<T> {
        self.down
    }

    pub fn amp(&self, level: Level) -> Complex<T> {
        match level {
            Level::Up => self.up,
            Level::Down => self.down,
        }
    }

    pub fn norm_sq(&self) -> T {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    /// Equality up to global phase.
    pub fn same_ray(&self, other: &Self, tol: T) -> bool {
        (self.inner(other).norm() - T::one()).abs() <= tol
    }
}

/// The measured basis `{|f>, |f_perp>}` at Bloch angle `theta` in the XZ plane.
///
/// `theta` is stored unreduced: the Jaynes-Cummings shifts depend on the full
/// drive angle, not just on the basis it selects.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis<T> {
    pub theta: T,
    pub f: QubitState<T>,
    pub f_perp: QubitState<T>,
}

impl<T: Real> MeasurementBasis<T> {
    pub fn state(&self, outcome: Outcome) -> &QubitState<T> {
        match outcome {
            Outcome::F => &self.f,
            Outcome::Perp => &self.f_perp,
        }
    }

    /// `(cos(theta/2), sin(theta/2))`.
    pub fn half_angle(&self) -> (T, T) {
        let h = self.theta * lit(0.5);
        (h.cos(), h.sin())
    }
}

/// `f = cos(theta/2)|up> + sin(theta/2)|down>`, `f_perp = -sin(theta/2)|up> + cos(theta/2)|down>`.
pub fn basis_from_angle<T: Real>(theta: T) -> Result<MeasurementBasis<T>> {
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite (got {})", to_f64(theta))));
    }
    let h = theta * lit(0.5);
    let (c, s) = (h.cos(), h.sin());
    let zero = T::zero();
    Ok(MeasurementBasis {
        theta,
        f: QubitState { up: Complex::new(c, zero), down: Complex::new(s, zero) },
        f_perp: QubitState { up: Complex::new(-s, zero), down: Complex::new(c, zero) },
    })
}

/// `H0 = (omega0 / 2) sigma_z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitHamiltonian<T> {
    omega0: T,
}

impl<T: Real> QubitHamiltonian<T> {
    pub fn new(omega0: T) -> Result<Self> {
        if !omega0.is_finite() || omega0 <= T::zero() {
            return Err(Error::InvalidParameter(format!("omega0 must be positive (got {})", to_f64(omega0))));
        }
        Ok(Self { omega0 })
    }

    /// `omega0 = 1`: energies come out in units of the level spacing.
    pub fn unit() -> Self {
        Self { omega0: T::one() }
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    pub fn eigenvalue(&self, level: Level) -> T {
        let half = self.omega0 * lit(0.5);
        match level {
            Level::Up => half,
            Level::Down => -half,
        }
    }

    /// `<a|H0|b>`.
    pub fn matrix_element(&self, a: &QubitState<T>, b: &QubitState<T>) -> Complex<T> {
        (a.up.conj() * b.up - a.down.conj() * b.down) * (self.omega0 * lit(0.5))
    }
}

/// `<s|H0|s> = (omega0/2)(|up|^2 - |down|^2)`.
pub fn energy_expectation<T: Real>(s: &QubitState<T>, h: &QubitHamiltonian<T>) -> T {
    h.omega0 * lit(0.5) * (s.up.norm_sqr() - s.down.norm_sqr())
}

/// Weak value `<f|H0|i> / <f|i>`.
pub fn weak_value<T: Real>(i: &QubitState<T>, f: &QubitState<T>, h: &QubitHamiltonian<T>) -> Result<Complex<T>> {
    let overlap = f.inner(i);
    check_overlap(overlap.norm_sqr())?;
    Ok(h.matrix_element(f, i) / overlap)
}

/// Born probabilities `(|<f|i>|^2, |<f_perp|i>|^2)`.
pub fn outcome_probabilities<T: Real>(i: &QubitState<T>, b: &MeasurementBasis<T>) -> (T, T) {
    (b.f.overlap_sq(i), b.f_perp.overlap_sq(i))
}

pub(crate) fn check_overlap<T: Real>(overlap_sq: T) -> Result<()> {
    if overlap_sq < lit(OVERLAP_FLOOR) || !overlap_sq.is_finite() {
        return Err(Error::OrthogonalPostSelection { overlap_sq: to_f64(overlap_sq) });
    }
    Ok(())
}
