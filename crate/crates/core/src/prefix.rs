use num_traits::{One, Zero};

use crate::certain::Items;
use crate::rational::Rational;

/// A follower solution that takes a set of items fully except for one
/// dedicated last item, which is taken with fraction `fraction ∈ (0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FractionalPrefix {
    Empty,
    Prefix {
        /// All items of the prefix, `last` included, in increasing index order.
        items: Vec<usize>,
        last: usize,
        fraction: Rational,
    },
}

impl FractionalPrefix {
    pub(crate) fn new(mut items: Vec<usize>, last: usize, fraction: Rational) -> Self {
        items.sort_unstable();
        debug_assert!(items.binary_search(&last).is_ok());
        debug_assert!(fraction > Rational::zero() && fraction <= Rational::one());
        FractionalPrefix::Prefix {
            items,
            last,
            fraction,
        }
    }

    /// The follower's vector `x` for `n` items.
    pub fn x(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        if let FractionalPrefix::Prefix {
            items,
            last,
            fraction,
        } = self
        {
            for &i in items {
                x[i] = Rational::one();
            }
            x[*last] = fraction.clone();
        }
        x
    }

    fn weighted(&self, coeff: &[Rational]) -> Rational {
        match self {
            FractionalPrefix::Empty => Rational::zero(),
            FractionalPrefix::Prefix {
                items,
                last,
                fraction,
            } => {
                let mut total = Rational::zero();
                for &i in items {
                    if i != *last {
                        total += &coeff[i];
                    }
                }
                total + fraction * &coeff[*last]
            }
        }
    }

    /// Leader's value `d·x`.
    pub fn value(&self, items: &Items) -> Rational {
        self.weighted(items.d())
    }

    /// Capacity used, `a·x`.
    pub fn size(&self, items: &Items) -> Rational {
        self.weighted(items.a())
    }

    pub fn members(&self) -> &[usize] {
        match self {
            FractionalPrefix::Empty => &[],
            FractionalPrefix::Prefix { items, .. } => items,
        }
    }
}
