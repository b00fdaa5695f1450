//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator. Keeps long Monte Carlo sums accurate to
/// roughly one ulp of the total regardless of the order of additions.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of a sequence.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.total()
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for a single
/// value). Two-pass, compensated.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = sum(values.iter().copied()) / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let ss = sum(values.iter().map(|x| (x - mean) * (x - mean)));
    (mean, libm::sqrt(ss / (n - 1.0)))
}

/// Population standard deviation (n denominator), used to standardize scores.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = sum(values.iter().copied()) / n;
    libm::sqrt(sum(values.iter().map(|x| (x - mean) * (x - mean))) / n)
}

pub(crate) fn clip_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}
