use crate::model::TruthVector;
use crate::procedures::DecisionSet;

/// Counts for one decision vector against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub rejections: usize,
    pub false_rejections: usize,
    pub true_rejections: usize,
    pub non_nulls: usize,
}

impl Confusion {
    pub fn from_slices(reject: &[bool], theta: &[bool]) -> Self {
        assert_eq!(reject.len(), theta.len(), "decisions and truth differ in length");
        let mut c = Confusion::default();
        for (&r, &t) in reject.iter().zip(theta) {
            c.non_nulls += t as usize;
            if r {
                c.rejections += 1;
                if t {
                    c.true_rejections += 1;
                } else {
                    c.false_rejections += 1;
                }
            }
        }
        c
    }

    /// `Σ(1 - θ)δ / max(Σδ, 1)`.
    pub fn fdp(&self) -> f64 {
        self.false_rejections as f64 / self.rejections.max(1) as f64
    }

    /// `Σθδ / max(Σθ, 1)`.
    pub fn power(&self) -> f64 {
        self.true_rejections as f64 / self.non_nulls.max(1) as f64
    }
}

/// False discovery proportion.
pub fn fdp(decisions: &DecisionSet, truth: &TruthVector) -> f64 {
    Confusion::from_slices(&decisions.reject, &truth.theta).fdp()
}

/// Share of the non-nulls that were rejected.
pub fn average_power(decisions: &DecisionSet, truth: &TruthVector) -> f64 {
    Confusion::from_slices(&decisions.reject, &truth.theta).power()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let c = Confusion::from_slices(&[true, true, false], &[true, false, false]);
        assert_eq!(c.fdp(), 0.5);
        assert_eq!(Confusion::from_slices(&[false, false], &[true, false]).fdp(), 0.0);
        assert_eq!(Confusion::from_slices(&[true, true], &[true, true]).fdp(), 0.0);
        assert_eq!(Confusion::from_slices(&[true, false], &[true, true]).power(), 0.5);
        assert_eq!(Confusion::from_slices(&[true, false], &[false, false]).power(), 0.0);
        assert_eq!(Confusion::from_slices(&[true, false, true], &[true, false, true]).power(), 1.0);
    }

    proptest! {
        #[test]
        fn permutation_invariance(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60), seed in any::<u64>()) {
            let (r, t): (Vec<bool>, Vec<bool>) = pairs.iter().copied().unzip();
            let mut idx: Vec<usize> = (0..pairs.len()).collect();
            let mut s = seed;
            for i in (1..idx.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            let rp: Vec<bool> = idx.iter().map(|&i| r[i]).collect();
            let tp: Vec<bool> = idx.iter().map(|&i| t[i]).collect();
            let a = Confusion::from_slices(&r, &t);
            let b = Confusion::from_slices(&rp, &tp);
            prop_assert_eq!(a.fdp(), b.fdp());
            prop_assert_eq!(a.power(), b.power());
            prop_assert!((0.0..=1.0).contains(&a.fdp()) && (0.0..=1.0).contains(&a.power()));
        }
    }
}
