//! Compensated summation.
//!
//! All quadrature reductions in this crate sum their terms in a fixed
//! canonical order through [`CompensatedSum`], so results are bit-identical
//! regardless of how the work was scheduled across threads.

/// Neumaier variant of Kahan summation.
///
/// Unlike plain Kahan it also compensates when the incoming term is larger
/// in magnitude than the running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn of<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.total()
    }
}
