//! Lazy expansion of per-item option lists into scenarios and the
//! follower orders they induce.

use crate::certain::{Items, TiePolicy};
use crate::rational::Rational;

/// All choices of one option per item, last item varying fastest.
pub(crate) fn choices(options: &[Vec<Rational>]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let mut digits = vec![0usize; options.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let c = digits.clone();
        done = true;
        for i in (0..options.len()).rev() {
            digits[i] += 1;
            if digits[i] < options[i].len() {
                done = false;
                break;
            }
            digits[i] = 0;
        }
        Some(c)
    })
}

pub(crate) fn scenario(options: &[Vec<Rational>], choice: &[usize]) -> Vec<Rational> {
    choice.iter().zip(options).map(|(&k, o)| o[k].clone()).collect()
}

/// Follower orders of all scenarios, sorted by integer ranks of the
/// option ratios and densities computed once up front.
pub(crate) fn ranked_orders<'a>(items: &'a Items, options: &'a [Vec<Rational>], tie: TiePolicy) -> impl Iterator<Item = Vec<usize>> + 'a {
    let ratios: Vec<Vec<Rational>> = options
        .iter()
        .zip(items.a())
        .map(|(o, a)| o.iter().map(|c| c / a).collect())
        .collect();
    let ratio_rank = ranks(&ratios);
    let densities: Vec<Vec<Rational>> = (0..items.len()).map(|i| vec![items.density(i)]).collect();
    let density_rank: Vec<i64> = ranks(&densities)
        .into_iter()
        .map(|r| match tie {
            TiePolicy::Optimistic => -(r[0] as i64),
            TiePolicy::Pessimistic => r[0] as i64,
        })
        .collect();
    choices(options).map(move |choice| {
        let mut order: Vec<usize> = (0..choice.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(ratio_rank[i][choice[i]]), density_rank[i], i));
        order
    })
}

/// Dense ranks of all values of a ragged table.
fn ranks(table: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let mut all: Vec<&Rational> = table.iter().flatten().collect();
    all.sort();
    all.dedup();
    table
        .iter()
        .map(|row| row.iter().map(|v| all.binary_search(&v).expect("value present")).collect())
        .collect()
}
