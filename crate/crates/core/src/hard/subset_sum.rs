use crate::error::{ensure, Error, Result};

/// A subset-sum instance `w`, `W` with `1 <= W <= Σw - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetSumInstance {
    w: Vec<u64>,
    target: u64,
}

impl SubsetSumInstance {
    pub fn new(w: Vec<u64>, target: u64) -> Result<Self> {
        ensure!(!w.is_empty(), "subset sum needs at least one weight");
        ensure!(w.iter().all(|&x| x >= 1), "weights must be positive integers");
        let total = w
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or_else(|| Error::invalid("weights overflow"))?;
        ensure!(
            target >= 1 && target < total,
            "target {target} must lie in [1, {}]",
            total as i128 - 1
        );
        Ok(SubsetSumInstance { w, target })
    }

    pub fn w(&self) -> &[u64] {
        &self.w
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn total(&self) -> u64 {
        self.w.iter().sum()
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }
}

/// Largest number of weights the enumerations accept by default.
pub const DEFAULT_SUBSET_BUDGET: usize = 22;

fn check_budget(w: &[u64], budget: usize) -> Result<()> {
    // Masks are u32 per half.
    if w.len() > budget || w.len() > 64 {
        return Err(Error::BudgetExceeded {
            what: "subset enumeration",
            needed: format!("{} weights", w.len()),
            budget: format!("{budget} weights"),
        });
    }
    Ok(())
}

/// Distinct subset sums with one attaining mask each, sorted by sum.
fn all_sums(w: &[u64]) -> Vec<(u64, u32)> {
    let mut sums = vec![(0u64, 0u32)];
    for (k, &x) in w.iter().enumerate() {
        let n = sums.len();
        for i in 0..n {
            let (s, mask) = sums[i];
            sums.push((s + x, mask | 1 << k));
        }
    }
    sums.sort_unstable();
    sums.dedup_by_key(|e| e.0);
    sums
}

/// Subset sums of the two halves of `w`.
struct Halves {
    split: usize,
    left: Vec<(u64, u32)>,
    right: Vec<(u64, u32)>,
}

impl Halves {
    fn new(w: &[u64], budget: usize) -> Result<Self> {
        check_budget(w, budget)?;
        let split = w.len() / 2;
        let (l, r) = w.split_at(split);
        Ok(Halves {
            split,
            left: all_sums(l),
            right: all_sums(r),
        })
    }

    /// Largest subset sum `<= cap` and a subset attaining it; the empty
    /// set always qualifies.
    fn largest_at_most(&self, cap: u64) -> (u64, Vec<usize>) {
        let mut best = (0, 0u32, 0u32);
        for &(s, lm) in &self.left {
            if s > cap {
                break;
            }
            let k = self.right.partition_point(|&(t, _)| t <= cap - s);
            let (t, rm) = self.right[k - 1];
            if s + t > best.0 {
                best = (s + t, lm, rm);
            }
        }
        let (sum, lm, rm) = best;
        let mut subset: Vec<usize> = (0..self.split).filter(|&i| lm >> i & 1 == 1).collect();
        subset.extend((0..32).filter(|&i| rm >> i & 1 == 1).map(|i| i + self.split));
        (sum, subset)
    }

    /// Smallest subset sum `> floor`, if any.
    fn smallest_above(&self, floor: u64) -> Option<u64> {
        let mut best: Option<u64> = None;
        for &(s, _) in &self.left {
            let need = floor.saturating_sub(s);
            let k = if s > floor {
                0
            } else {
                self.right.partition_point(|&(t, _)| t <= need)
            };
            if let Some(&(t, _)) = self.right.get(k) {
                let v = s + t;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    }
}

/// `max { Σ_{i∈S} w_i : Σ_{i∈S} w_i <= cap }` by meet in the middle.
pub fn largest_subset_sum_at_most(w: &[u64], cap: u64, budget: usize) -> Result<u64> {
    Ok(Halves::new(w, budget)?.largest_at_most(cap).0)
}

/// Like [`largest_subset_sum_at_most`], also returning an attaining subset.
pub fn best_subset_at_most(w: &[u64], cap: u64, budget: usize) -> Result<(u64, Vec<usize>)> {
    Ok(Halves::new(w, budget)?.largest_at_most(cap))
}

/// `min { Σ_{i∈S} w_i : Σ_{i∈S} w_i > floor }`, if any.
pub fn smallest_subset_sum_above(w: &[u64], floor: u64, budget: usize) -> Result<Option<u64>> {
    Ok(Halves::new(w, budget)?.smallest_above(floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(w: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = (0..1u32 << w.len())
            .map(|mask| (0..w.len()).filter(|&i| mask >> i & 1 == 1).map(|i| w[i]).sum())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    #[test]
    fn validation() {
        assert!(SubsetSumInstance::new(vec![1], 1).is_err());
        assert!(SubsetSumInstance::new(vec![1, 2], 3).is_err());
        assert!(SubsetSumInstance::new(vec![1, 2], 0).is_err());
        assert!(SubsetSumInstance::new(vec![0, 2], 1).is_err());
        assert!(SubsetSumInstance::new(vec![], 1).is_err());
        assert_eq!(SubsetSumInstance::new(vec![1, 2], 2).unwrap().total(), 3);
    }

    #[test]
    fn queries_match_enumeration() {
        let w = [3, 5, 7, 11, 2];
        let sums = brute(&w);
        for cap in 0..=30 {
            let expect = *sums.iter().filter(|&&s| s <= cap).max().unwrap();
            assert_eq!(largest_subset_sum_at_most(&w, cap, 22).unwrap(), expect);
            let (sum, subset) = best_subset_at_most(&w, cap, 22).unwrap();
            assert_eq!(subset.iter().map(|&i| w[i]).sum::<u64>(), sum);
            let above = sums.iter().copied().find(|&s| s > cap);
            assert_eq!(smallest_subset_sum_above(&w, cap, 22).unwrap(), above);
        }
    }

    #[test]
    fn budget() {
        assert!(matches!(
            largest_subset_sum_at_most(&[1; 5], 3, 4),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
