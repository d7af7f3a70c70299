use std::ops::AddAssign;

use num_complex::Complex;
use num_traits::Float;

/// Kahan-Babuska (Neumaier) compensated accumulator.
///
/// Window sums over 10^5..10^6 photon numbers with cancelling `(n - n0)`
/// weights go through this.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Float> NeumaierSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Float> AddAssign<T> for NeumaierSum<T> {
    fn add_assign(&mut self, rhs: T) {
        self.add(rhs);
    }
}

impl<T: Float> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence, in iteration order.
pub fn compensated_sum<T: Float, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<NeumaierSum<T>>().value()
}

/// Complex accumulator: independent compensated real and imaginary parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum<T> {
    re: NeumaierSum<T>,
    im: NeumaierSum<T>,
}

impl<T: Float> ComplexSum<T> {
    pub fn new() -> Self {
        Self { re: NeumaierSum::new(), im: NeumaierSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_next_to_large_ones() {
        let mut s = NeumaierSum::new();
        s += 1e100;
        s += 1.0;
        s += -1e100;
        assert_eq!(s.value(), 1.0);

        let naive: f64 = [1e100, 1.0, -1e100].iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn many_tenths() {
        let n = 1_000_000;
        let s = compensated_sum(std::iter::repeat(0.1f64).take(n));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn complex_parts_are_independent() {
        let mut c = ComplexSum::new();
        c.add(Complex::new(1e20, -3.0));
        c.add(Complex::new(2.0, 1e20));
        c.add(Complex::new(-1e20, -1e20));
        assert_eq!(c.value(), Complex::new(2.0, -3.0));
    }
}
