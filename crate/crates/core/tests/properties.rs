//! Randomized invariants. Each proptest input is a seed that drives the
//! library's own generators, so shrinking reports the smallest failing seed.

use std::collections::BTreeMap;
use std::sync::Arc;

use giry::codensity::{check_cone_naturality, cone_of_measure, reconstruct_from_cone, standard_family};
use giry::gen;
use giry::integrate::{canonicalize, i_integral, j_integral, j_integral_terms, SimpleFunction};
use giry::lipmetric::{bl_distance_values, random_metric, FiniteMetricSpace};
use giry::measure::{dirac, pushforward, Mode};
use giry::monad::check_monad_laws;
use giry::rational::{int, ratio, Rational};
use giry::report::SuiteConfig;
use giry::represent::{
    caratheodory_extend, check_slab_pair, daniell_stone, reconstruct_measure, slab_intersect, Functional, Slab,
    WeakIntegrationLattice,
};
use giry::setalg::{generate_algebra, is_premeasurable, is_semiring, Algebra, GroundSet, PointMap, SemiRing, Subset, SubsetFamily};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    gen::case_rng(seed, 1000, 0)
}

fn random_family(rng: &mut impl Rng, ground: &GroundSet, max: usize) -> SubsetFamily {
    let n = ground.len();
    let count = rng.gen_range(0..=max);
    let sets = (0..count).map(|_| Subset::from_points(n, (0..n).filter(|_| rng.gen_bool(0.5))).unwrap());
    SubsetFamily::new(ground, sets).unwrap()
}

fn members(a: &Algebra) -> Vec<Subset> {
    a.members().unwrap().members().to_vec()
}

fn atom_values(rng: &mut impl Rng, alg: &Arc<Algebra>) -> SimpleFunction {
    SimpleFunction::from_atom_values(alg, gen::unit_values(rng, alg.num_atoms(), 12)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_a_closure_operator(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = GroundSet::range(r.gen_range(1..=6));
        let f1 = random_family(&mut r, &g, 4);
        let extra = random_family(&mut r, &g, 3);
        let f2 = SubsetFamily::new(&g, f1.members().iter().chain(extra.members()).cloned()).unwrap();
        let a1 = generate_algebra(&g, &f1).unwrap();
        let a2 = generate_algebra(&g, &f2).unwrap();
        prop_assert!(f1.members().iter().all(|s| a1.contains(s)));
        prop_assert!(members(&a1).iter().all(|s| a2.contains(s)));
        let again = generate_algebra(&g, &a1.members().unwrap()).unwrap();
        prop_assert_eq!(again, a1);
    }

    #[test]
    fn algebra_size_and_semiring(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = gen::sized_algebra(&mut r, 1, 6, 1);
        let fam = a.members().unwrap();
        prop_assert_eq!(fam.len(), 1usize << a.num_atoms());
        prop_assert_eq!(is_semiring(a.ground(), &fam).unwrap(), None);
    }

    #[test]
    fn premeasurability_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 4, 1);
        let y = gen::sized_algebra(&mut r, 1, 4, 1);
        let image = (0..x.ground().len()).map(|_| r.gen_range(0..y.ground().len())).collect();
        let f = PointMap::new(x.ground(), y.ground(), image).unwrap();
        let brute = members(&y).iter().all(|b| members(&x).contains(&f.preimage(b)));
        prop_assert_eq!(is_premeasurable(&f, &x, &y), brute);
    }

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 5, 1);
        let y = gen::sized_algebra(&mut r, 1, 5, 1);
        let z = gen::sized_algebra(&mut r, 1, 5, 1);
        let f = gen::atomwise_map(&mut r, &x, y.ground());
        let g = gen::atomwise_map(&mut r, &y, z.ground());
        let p = gen::measure(&mut r, &x, 12, Mode::Sigma, 2);
        let two_steps = pushforward(&pushforward(&p, &f, &y).unwrap(), &g, &z).unwrap();
        let one_step = pushforward(&p, &f.then(&g).unwrap(), &z).unwrap();
        prop_assert_eq!(two_steps, one_step);
        for pt in 0..x.ground().len() {
            let lhs = pushforward(&dirac(pt, &x, Mode::Sigma).unwrap(), &f, &y).unwrap();
            prop_assert_eq!(lhs, dirac(f.apply(pt), &y, Mode::Sigma).unwrap());
        }
    }

    #[test]
    fn evaluate_is_additive_over_disjoint_members(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 5, 1);
        let p = gen::measure(&mut r, &x, 12, Mode::Sigma, 2);
        let ms = members(&x);
        for a in &ms {
            for b in &ms {
                if a.is_disjoint(b) {
                    let lhs = p.evaluate(&a.union(b)).unwrap();
                    prop_assert_eq!(lhs, p.evaluate(a).unwrap() + p.evaluate(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn integral_ignores_representation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 5, 1);
        let p = gen::measure(&mut r, &x, 12, Mode::Sigma, 2);
        let s = atom_values(&mut r, &x);
        // layer-cake form: Σ (v_i - v_{i-1}) · 1{s ≥ v_i}
        let mut levels: Vec<Rational> = s.values().to_vec();
        levels.push(Rational::zero());
        levels.sort();
        levels.dedup();
        let terms = levels
            .windows(2)
            .map(|w| {
                let upper = x.union_of_atoms((0..x.num_atoms()).filter(|a| s.values()[*a] >= w[1]));
                (&w[1] - &w[0], upper)
            })
            .collect();
        let cake = SimpleFunction::from_terms(&x, terms).unwrap();
        prop_assert_eq!(canonicalize(&cake), canonicalize(&s));
        prop_assert_eq!(j_integral_terms(&p, &cake).unwrap(), j_integral_terms(&p, &s).unwrap());
        prop_assert_eq!(i_integral(&p, &s).unwrap(), j_integral(&p, &s).unwrap());
        let rr = ratio(r.gen_range(0..=7), 7);
        prop_assert_eq!(j_integral(&p, &s.scale(&rr).unwrap()).unwrap(), &rr * j_integral(&p, &s).unwrap());
    }

    #[test]
    fn reconstructed_functionals_are_homogeneous_and_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 4, 1);
        let p = gen::measure(&mut r, &x, 12, Mode::Sigma, 2);
        let q = reconstruct_measure(&Functional::integration(&p), &[]).unwrap();
        let i = Functional::integration(&q);
        let f = atom_values(&mut r, &x);
        let g = atom_values(&mut r, &x);
        for num in 0..=6 {
            let rr = ratio(num, 6);
            prop_assert_eq!(i.eval(&f.scale(&rr).unwrap()).unwrap(), &rr * i.eval(&f).unwrap());
        }
        if f.le(&g) {
            prop_assert!(i.eval(&f).unwrap() <= i.eval(&g).unwrap());
        }
        let lower = f.min_const(&ratio(1, 2));
        prop_assert!(i.eval(&lower).unwrap() <= i.eval(&f).unwrap());
    }

    #[test]
    fn slab_formulas_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let slab = |r: &mut ChaCha8Rng| {
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for _ in 0..n {
                let a = ratio(r.gen_range(0..=4), 4);
                let b = ratio(r.gen_range(0..=4), 4);
                lo.push(a.clone().min(b.clone()));
                hi.push(a.max(b));
            }
            Slab::new(lo, hi).unwrap()
        };
        let a = slab(&mut r);
        let b = slab(&mut r);
        prop_assert!(check_slab_pair(&a, &b));
        prop_assert_eq!(slab_intersect(&a, &b), slab_intersect(&b, &a));
    }

    #[test]
    fn daniell_stone_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 3, 1);
        let p = gen::measure(&mut r, &x, 6, Mode::Sigma, 2);
        let l = WeakIntegrationLattice::grid(&x, r.gen_range(1..=2));
        let values: Vec<Rational> = l
            .functions()
            .iter()
            .map(|f| giry::integrate::integrate_nonnegative(&p, f).unwrap())
            .collect();
        prop_assert_eq!(daniell_stone(&l, &values).unwrap().measure, p);
    }

    #[test]
    fn extensions_are_unique(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let g = GroundSet::range(n);
        let w = gen::weights(&mut r, n, 12);
        let mut ms = vec![g.empty_set()];
        for i in 0..n {
            for j in i + 1..=n {
                ms.push(Subset::from_points(n, i..j).unwrap());
            }
        }
        let s = SemiRing::new(SubsetFamily::new(&g, ms.clone()).unwrap()).unwrap();
        let mu: BTreeMap<Subset, Rational> = ms.iter().map(|m| (m.clone(), m.points().map(|x| &w[x]).sum())).collect();
        let ext = caratheodory_extend(&s, &mu).unwrap();
        // moving mass between two atoms changes the value on some member
        for a in 0..ext.weights.len() {
            let mut perturbed = ext.weights.clone();
            perturbed[a] += ratio(1, 13);
            let agrees = ms.iter().all(|m| {
                let atoms = ext.algebra.atoms_in(m).unwrap();
                atoms.iter().map(|i| &perturbed[*i]).sum::<Rational>() == mu[m]
            });
            prop_assert!(!agrees);
        }
    }

    #[test]
    fn monad_laws_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 5, 1);
        for mode in [Mode::Sigma, Mode::FinitelyAdditive] {
            let cfg = SuiteConfig { seed, ..SuiteConfig::default().with_cases(4).with_mode(mode) };
            let report = check_monad_laws(&x, &cfg);
            prop_assert!(report.passed(), "{}", report.to_text());
        }
    }

    #[test]
    fn cones_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gen::sized_algebra(&mut r, 1, 4, 1);
        let p = gen::measure(&mut r, &x, 12, Mode::Sigma, 2);
        let family = standard_family(&x, &mut r, 2, 6);
        let cone = cone_of_measure(&p, &family).unwrap();
        prop_assert!(check_cone_naturality(&cone, 2).holds);
        prop_assert_eq!(reconstruct_from_cone(&cone, Mode::Sigma).unwrap(), p);
    }

    #[test]
    fn bl_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = random_metric(&mut r, n, 6);
        let p = gen::weights(&mut r, n, 8);
        let q = gen::weights(&mut r, n, 8);
        let s = gen::weights(&mut r, n, 8);
        let d = |a: &[Rational], b: &[Rational]| bl_distance_values(a, b, &m).unwrap();
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s));
        prop_assert_eq!(d(&p, &q).is_zero(), p == q);
        prop_assert!(d(&p, &p).is_zero());
    }

    #[test]
    fn bl_is_monotone_in_the_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let small = random_metric(&mut r, n, 6);
        // scaling up by a factor ≥ 1 keeps the triangle inequality
        let factor = ratio(r.gen_range(6..=12), 6);
        let big = FiniteMetricSpace::new(
            small.points(),
            small.matrix().iter().map(|row| row.iter().map(|v| v * &factor).collect()).collect(),
        )
        .unwrap();
        prop_assert!(small.le(&big));
        let p = gen::weights(&mut r, n, 8);
        let q = gen::weights(&mut r, n, 8);
        prop_assert!(bl_distance_values(&p, &q, &small).unwrap() <= bl_distance_values(&p, &q, &big).unwrap());
        let disc = FiniteMetricSpace::discrete(small.points());
        let capped = bl_distance_values(&p, &q, &disc).unwrap();
        prop_assert!(bl_distance_values(&p, &q, &big).unwrap() <= capped);
        let disjoint = p.iter().zip(&q).all(|(a, b)| a.is_zero() || b.is_zero());
        prop_assert!(capped <= int(1));
        prop_assert_eq!(capped.is_one(), disjoint);
    }
}
