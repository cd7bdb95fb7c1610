//! Seeded generators for the randomized suites.
//!
//! Every case gets its own ChaCha stream derived from `(seed, suite, case)`,
//! so results do not depend on the order in which cases are run.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{Measure, Mode};
use crate::rational::Rational;
use crate::setalg::{Algebra, GroundSet, PointMap, Subset};

/// The random stream for one case of one suite.
pub fn case_rng(seed: u64, suite: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(case);
    rng
}

/// A random partition of `{0..n}` into at least `min_blocks` blocks
/// (clamped to `n`).
pub fn partition(rng: &mut impl Rng, n: usize, min_blocks: usize) -> Vec<Subset> {
    let min_blocks = min_blocks.clamp(1, n.max(1));
    let blocks = rng.gen_range(min_blocks..=n.max(min_blocks));
    let mut label: Vec<usize> = (0..n).map(|x| if x < blocks { x } else { rng.gen_range(0..blocks) }).collect();
    label.shuffle(rng);
    (0..blocks)
        .map(|b| Subset::from_points(n, (0..n).filter(|x| label[*x] == b)).expect("in range"))
        .collect()
}

pub fn algebra(rng: &mut impl Rng, ground: &GroundSet, min_atoms: usize) -> Algebra {
    let blocks = partition(rng, ground.len(), min_atoms);
    Algebra::from_atoms(ground, blocks).expect("random partition is a partition")
}

/// An algebra on a ground set of random size in `[min_n, max_n]`.
pub fn sized_algebra(rng: &mut impl Rng, min_n: usize, max_n: usize, min_atoms: usize) -> Arc<Algebra> {
    let n = rng.gen_range(min_n.max(1)..=max_n.max(min_n.max(1)));
    let g = GroundSet::range(n);
    Arc::new(algebra(rng, &g, min_atoms))
}

/// Nonnegative weights `c_i / d` summing to one, with `d ≤ max_den`.
pub fn weights(rng: &mut impl Rng, k: usize, max_den: u32) -> Vec<Rational> {
    let d = rng.gen_range(1..=max_den.max(1));
    let mut counts = vec![0u32; k];
    for _ in 0..d {
        counts[rng.gen_range(0..k)] += 1;
    }
    counts.into_iter().map(|c| Rational::new(c.into(), d.into())).collect()
}

/// Weights like [`weights`] but with every entry positive (`d ≥ k` forced).
pub fn positive_weights(rng: &mut impl Rng, k: usize, max_den: u32) -> Vec<Rational> {
    let d = rng.gen_range(k as u32..=max_den.max(k as u32));
    let mut counts = vec![1u32; k];
    for _ in k as u32..d {
        counts[rng.gen_range(0..k)] += 1;
    }
    counts.into_iter().map(|c| Rational::new(c.into(), d.into())).collect()
}

/// A random measure. Cases `0` and `1` of a suite are forced edge cases
/// (uniform, and all mass on one atom).
pub fn measure(rng: &mut impl Rng, alg: &Arc<Algebra>, max_den: u32, mode: Mode, case: u64) -> Measure {
    let k = alg.num_atoms();
    let w = match case {
        0 => return Measure::uniform(alg.clone(), mode),
        1 => {
            let hot = rng.gen_range(0..k);
            (0..k)
                .map(|i| if i == hot { Rational::from_integer(1.into()) } else { Rational::zero() })
                .collect()
        }
        _ => weights(rng, k, max_den),
    };
    Measure::new(alg.clone(), w, mode).expect("generated weights are valid")
}

/// A map `X → Y` constant on the atoms of `dom`, so premeasurable for any
/// algebra on `Y`.
pub fn atomwise_map(rng: &mut impl Rng, dom: &Algebra, cod: &GroundSet) -> PointMap {
    let on_atoms: Vec<usize> = (0..dom.num_atoms()).map(|_| rng.gen_range(0..cod.len())).collect();
    let image = (0..dom.ground().len()).map(|x| on_atoms[dom.atom_of(x)]).collect();
    PointMap::new(dom.ground(), cod, image).expect("in range")
}

/// A random `[0,1]`-valued vector with denominators at most `max_den`.
pub fn unit_values(rng: &mut impl Rng, k: usize, max_den: u32) -> Vec<Rational> {
    (0..k)
        .map(|_| {
            let d = rng.gen_range(1..=max_den.max(1));
            Rational::new(rng.gen_range(0..=d).into(), d.into())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::validate;
    use num_traits::One;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u32> = (0..4).map(|_| case_rng(7, 1, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| case_rng(7, 1, 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(case_rng(7, 1, 3).gen::<u64>(), case_rng(7, 1, 4).gen::<u64>());
        assert_ne!(case_rng(7, 1, 3).gen::<u64>(), case_rng(7, 2, 3).gen::<u64>());
    }

    #[test]
    fn generated_measures_are_valid() {
        for case in 0..50 {
            let mut rng = case_rng(0, 0, case);
            let alg = sized_algebra(&mut rng, 1, 5, 1);
            let p = measure(&mut rng, &alg, 12, Mode::Sigma, case);
            assert!(validate(&p).valid);
            assert!(p.weights().iter().all(|w| w.denom() <= &12.into()));
            let w = positive_weights(&mut rng, 3, 12);
            assert!(w.iter().all(|x| x > &Rational::zero()));
            assert!(w.iter().sum::<Rational>().is_one());
        }
    }

    #[test]
    fn partitions_respect_minimum() {
        for case in 0..50 {
            let mut rng = case_rng(1, 0, case);
            let blocks = partition(&mut rng, 4, 2);
            assert!(blocks.len() >= 2);
            assert_eq!(blocks.iter().map(Subset::len).sum::<usize>(), 4);
        }
    }
}
