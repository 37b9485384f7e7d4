//! Compensated summation.
//!
//! Every reduction in the crate runs sequentially in a fixed order through
//! [`Neumaier`], so results do not depend on how the terms were produced.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence in iteration order.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(v), 2.0);
    }

    #[test]
    fn harmonic_tail() {
        let naive: f64 = (1..=1_000_000).map(|k| 1.0 / k as f64).sum();
        let comp = sum((1..=1_000_000).map(|k| 1.0 / k as f64));
        // reference from the reverse-order sum, which loses almost nothing
        let rev: f64 = (1..=1_000_000).rev().map(|k| 1.0 / k as f64).sum();
        assert!((comp - rev).abs() <= (naive - rev).abs());
        assert!((comp - rev).abs() < 1e-13);
    }
}
