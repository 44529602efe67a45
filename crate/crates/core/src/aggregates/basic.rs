use crate::model::{ProbItem, ProbStream};

/// Running exact COUNT and SUM.
///
/// Both are linear in the items: `COUNT = Σ (1 − p_⊥)` and
/// `SUM = Σ E[X | X ≠ ⊥]·(1 − p_⊥) = Σ Σ_j j·p_j`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CountSum {
    count: f64,
    count_comp: f64,
    sum: f64,
    sum_comp: f64,
}

impl CountSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, item: &ProbItem) {
        neumaier_add(&mut self.count, &mut self.count_comp, item.mass());
        neumaier_add(&mut self.sum, &mut self.sum_comp, item.weighted_sum());
    }

    pub fn count(&self) -> f64 {
        self.count + self.count_comp
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.sum_comp
    }
}

/// Compensated summation step.
pub(crate) fn neumaier_add(total: &mut f64, comp: &mut f64, x: f64) {
    let t = *total + x;
    if total.abs() >= x.abs() {
        *comp += (*total - t) + x;
    } else {
        *comp += (x - t) + *total;
    }
    *total = t;
}

/// Expected number of non-⊥ elements.
pub fn count(stream: &ProbStream) -> f64 {
    let mut cs = CountSum::new();
    stream.items().iter().for_each(|i| cs.push(i));
    cs.count()
}

/// Expected sum of realized values.
pub fn sum(stream: &ProbStream) -> f64 {
    let mut cs = CountSum::new();
    stream.items().iter().for_each(|i| cs.push(i));
    cs.sum()
}
