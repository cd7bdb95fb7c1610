//! The full verification run: one report per acceptance criterion.
//!
//! Case counts scale with `cfg.cases`; the default of 500 gives the
//! reference counts listed on each runner.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use rand::Rng;
use serde_json::json;

use crate::codensity::{codensity_suite, small_index_sufficiency};
use crate::gen;
use crate::integrate::{
    check_integral_properties, integrate_nonnegative, IntegralCheckConfig, SimpleFunction,
};
use crate::lipmetric::{
    bl_distance_lp, bl_distance_subsets, check_bl_monad_nonexpansive, discrete_identity_suite,
    lipschitz_criteria_exhaustive, FiniteMetricSpace,
};
use crate::measure::Mode;
use crate::monad::{law_suite, SimplexPoint};
use crate::rational::{format_rational, ratio, Rational};
use crate::report::{Check, Report, SuiteConfig};
use crate::represent::{
    caratheodory_extend, check_slab_pair, daniell_stone, reconstruct_charge, reconstruct_measure,
    slab_intersect, slab_subtract, Functional, ReconstructError, Slab, WeakIntegrationLattice,
};
use crate::setalg::{Algebra, GroundSet, SemiRing, Subset, SubsetFamily};

const DEFAULT_CASES: usize = 500;

/// `reference · cfg.cases / 500`, at least one.
fn scaled(cfg: &SuiteConfig, reference: usize) -> usize {
    (reference * cfg.cases).div_ceil(DEFAULT_CASES).max(1)
}

fn weights_json(w: &[Rational]) -> serde_json::Value {
    json!(w.iter().map(format_rational).collect::<Vec<_>>())
}

/// Criterion 1: monad laws, 500 cases in each mode.
pub fn monad_laws(cfg: &SuiteConfig) -> Report {
    let mut r = Report::new("monad_laws");
    for mode in [Mode::Sigma, Mode::FinitelyAdditive] {
        r.parts.push(law_suite(&cfg.with_mode(mode)));
    }
    r
}

/// Criterion 2: codensity bijection, 200 cases on at most four points.
pub fn codensity(cfg: &SuiteConfig) -> Report {
    let c = cfg.with_cases(scaled(cfg, 200)).with_size(cfg.max_ground_size.min(4));
    let mut r = Report::new("codensity");
    r.parts.push(codensity_suite(&c));
    r
}

/// Criterion 3: determination by arrows into sets of size `k`, for
/// `k = 1, 2, 3`, 50 cases each.
pub fn small_index(cfg: &SuiteConfig) -> Report {
    let c = cfg.with_cases(scaled(cfg, 50)).with_size(cfg.max_ground_size.min(4));
    let mut r = Report::new("small_index");
    for k in 1..=3 {
        r.parts.push(small_index_sufficiency(k, &c));
    }
    r
}

/// Criterion 4: discrete-metric identity on 300 pairs with up to eight
/// labels, plus the worked pair.
pub fn bl_identity(cfg: &SuiteConfig) -> Report {
    let mut worked = Check::new("worked_pair");
    let labels = GroundSet::range(3);
    let p = SimplexPoint::new(&labels, vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]).expect("probability");
    let q = SimplexPoint::new(&labels, vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]).expect("probability");
    let lp = bl_distance_lp(&p, &q, &FiniteMetricSpace::discrete(&labels)).expect("valid");
    let sub = bl_distance_subsets(&p, &q).expect("valid");
    worked.record(lp == ratio(1, 3) && sub == ratio(1, 3), || {
        json!({"lp": format_rational(&lp), "subsets": format_rational(&sub)})
    });
    let mut r = Report::with_checks("bl_identity", vec![worked]);
    r.parts.push(discrete_identity_suite(&cfg.with_cases(scaled(cfg, 300)), 8));
    r
}

/// Criterion 5: both Lipschitz criteria agree on every instance with at
/// most three points, three labels and denominators three.
pub fn lipschitz_criteria(_cfg: &SuiteConfig) -> Report {
    let mut r = Report::new("lipschitz_criteria");
    r.parts.push(lipschitz_criteria_exhaustive(3, 3, 3));
    r
}

/// Criterion 6: non-expansiveness on 100 random metric spaces with up to
/// six points.
pub fn nonexpansive(cfg: &SuiteConfig) -> Report {
    let mut r = Report::new("nonexpansive");
    r.parts.push(check_bl_monad_nonexpansive(&cfg.with_cases(scaled(cfg, 100)), 6));
    r
}

const SUITE_RECONSTRUCT: u64 = 7;
const SUITE_ADVERSARIAL: u64 = 8;

fn random_function(rng: &mut impl Rng, alg: &Arc<Algebra>, max_den: u32) -> SimpleFunction {
    let v = gen::unit_values(rng, alg.num_atoms(), max_den);
    SimpleFunction::from_atom_values(alg, v).expect("one value per atom")
}

/// Criterion 7: integration functionals reconstruct their measure (300
/// cases), and a single perturbed indicator value is caught with a witness
/// that involves the perturbed set (50 cases).
pub fn reconstruction(cfg: &SuiteConfig) -> Report {
    let mut round_trip = Check::new("reconstruct_round_trip");
    let mut charge = Check::new("charge_round_trip");
    for case in 0..scaled(cfg, 300) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_RECONSTRUCT, case);
        let alg = gen::sized_algebra(&mut rng, 1, cfg.max_ground_size, 1);
        let p = gen::measure(&mut rng, &alg, cfg.max_denominator, cfg.mode, case);
        let tests: Vec<SimpleFunction> = (0..3).map(|_| random_function(&mut rng, &alg, cfg.max_denominator)).collect();
        let f = Functional::integration(&p);
        let got = reconstruct_measure(&f, &tests);
        round_trip.record(matches!(&got, Ok(q) if q == &p && q.mode() == Mode::Sigma), || {
            json!({"P": weights_json(p.weights()), "result": format!("{got:?}")})
        });
        let got = reconstruct_charge(&f, &tests);
        charge.record(matches!(&got, Ok(q) if q == &p && q.mode() == Mode::FinitelyAdditive), || {
            json!({"P": weights_json(p.weights()), "result": format!("{got:?}")})
        });
    }

    let mut detected = Check::new("violation_detected");
    let mut witness_ok = Check::new("witness_involves_perturbed_set");
    for case in 0..scaled(cfg, 50) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_ADVERSARIAL, case);
        let alg = gen::sized_algebra(&mut rng, 3, cfg.max_ground_size.max(3), 3);
        let p = gen::measure(&mut rng, &alg, cfg.max_denominator, cfg.mode, case);
        let k = alg.num_atoms();
        // a member made of at least two atoms, but not everything
        let mask = loop {
            let m: u64 = rng.gen_range(1..(1u64 << k) - 1);
            if m.count_ones() >= 2 {
                break m;
            }
        };
        let target = alg.member_from_mask(mask);
        let eps = ratio(1, i64::from(cfg.max_denominator) + 1);
        let mut table = Vec::new();
        for (m, set) in alg.members_with_masks().expect("few atoms") {
            let mut v = p.evaluate_mask(m);
            if m == mask {
                v = if v >= eps { v - &eps } else { v + &eps };
            }
            table.push((SimpleFunction::indicator(&alg, &set).expect("member"), v));
        }
        let f = Functional::from_table(&alg, table).expect("same algebra");
        let value = |s: &Subset| f.eval(&SimpleFunction::indicator(&alg, s).expect("member")).expect("in table");
        let witness = || json!({"P": weights_json(p.weights()), "perturbed": target.to_indices()});

        let charge = reconstruct_charge(&f, &[]);
        let ok = match &charge {
            Err(ReconstructError::Additivity { a, b, union_value, sum_value }) => {
                let involves = a == &target || b == &target || a.union(b) == target;
                involves && union_value != sum_value && union_value == &value(&a.union(b)) && sum_value == &(value(a) + value(b))
            }
            _ => false,
        };
        detected.record(charge.is_err(), witness);
        witness_ok.record(ok, witness);

        let sigma = reconstruct_measure(&f, &[]);
        let ok = match &sigma {
            Err(ReconstructError::Decomposition { set, parts, value: v, sum }) => {
                let recomputed: Rational = parts.iter().map(&value).sum();
                set == &target && v == &value(set) && sum == &recomputed && v != sum
            }
            _ => false,
        };
        detected.record(sigma.is_err(), witness);
        witness_ok.record(ok, witness);
    }
    Report::with_checks("reconstruction", vec![round_trip, charge, detected, witness_ok])
}

const SUITE_SLABS: u64 = 9;
const SUITE_CARATHEODORY: u64 = 10;
const SUITE_DANIELL_STONE: u64 = 11;

fn random_slab(rng: &mut impl Rng, n: usize, max_den: u32) -> Slab {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let mut draw = || {
            let d = rng.gen_range(1..=max_den);
            Rational::new(rng.gen_range(0..=d).into(), d.into())
        };
        let (a, b) = (draw(), draw());
        lower.push(a.clone().min(b.clone()));
        upper.push(a.max(b));
    }
    Slab::new(lower, upper).expect("ordered bounds")
}

/// Membership of `(x, t)` at every breakpoint and every midpoint between
/// consecutive breakpoints.
fn slab_semantics_agree(a: &Slab, b: &Slab) -> bool {
    let inter = slab_intersect(a, b);
    let diff = slab_subtract(a, b);
    let mut ts = crate::represent::breakpoints([a, b]);
    let mids: Vec<Rational> = ts.windows(2).map(|w| (&w[0] + &w[1]) / Rational::from_integer(2.into())).collect();
    ts.extend(mids);
    ts.push(ratio(-1, 2));
    ts.push(ratio(3, 2));
    (0..a.width()).all(|x| {
        ts.iter().all(|t| {
            let (in_a, in_b) = (a.contains(x, t), b.contains(x, t));
            let hits = diff.iter().filter(|s| s.contains(x, t)).count();
            inter.contains(x, t) == (in_a && in_b) && hits <= 1 && (hits == 1) == (in_a && !in_b)
        })
    })
}

/// Criterion 8: slab formulas (500 pairs, at most four points,
/// denominators four), Carathéodory extension from singletons and from
/// intervals, and the slab route against indicator reconstruction (100
/// cases, at most three points, grid denominators one or two).
pub fn appendix(cfg: &SuiteConfig) -> Report {
    let mut slabs = Check::new("slab_formulas");
    for case in 0..scaled(cfg, 500) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_SLABS, case);
        let n = rng.gen_range(1..=4);
        let a = random_slab(&mut rng, n, 4);
        let b = if case % 7 == 0 { a.clone() } else { random_slab(&mut rng, n, 4) };
        slabs.record(check_slab_pair(&a, &b) && slab_semantics_agree(&a, &b), || {
            json!({"a": a.to_json(), "b": b.to_json()})
        });
    }

    let mut singletons = Check::new("caratheodory_singletons");
    let mut intervals = Check::new("caratheodory_intervals");
    for case in 0..scaled(cfg, 100) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_CARATHEODORY, case);
        let n = rng.gen_range(1..=cfg.max_ground_size);
        let ground = GroundSet::range(n);
        let w = gen::weights(&mut rng, n, cfg.max_denominator);
        let powerset = Algebra::powerset(&ground);

        let mut members = vec![ground.empty_set()];
        members.extend((0..n).map(|x| Subset::singleton(n, x)));
        let s = SemiRing::new(SubsetFamily::new(&ground, members.clone()).expect("in range")).expect("semi-ring");
        let mu: BTreeMap<Subset, Rational> = members
            .iter()
            .map(|m| (m.clone(), m.points().map(|x| &w[x]).sum()))
            .collect();
        let ext = caratheodory_extend(&s, &mu);
        let ok = matches!(&ext, Ok(e) if *e.algebra == powerset && e.weights == w && e.mass.is_one()
            && ground.powerset().iter().all(|set| e.evaluate(set) == Some(set.points().map(|x| &w[x]).sum())));
        singletons.record(ok, || json!({"weights": weights_json(&w)}));

        let mut members = vec![ground.empty_set()];
        for i in 0..n {
            for j in i + 1..=n {
                members.push(Subset::from_points(n, i..j).expect("in range"));
            }
        }
        let s = SemiRing::new(SubsetFamily::new(&ground, members.clone()).expect("in range")).expect("semi-ring");
        let mu: BTreeMap<Subset, Rational> = members
            .iter()
            .map(|m| (m.clone(), m.points().map(|x| &w[x]).sum()))
            .collect();
        let ok = matches!(caratheodory_extend(&s, &mu), Ok(e) if e.weights == w);
        intervals.record(ok, || json!({"weights": weights_json(&w)}));
    }

    let mut ds = Check::new("daniell_stone_matches_reconstruction");
    for case in 0..scaled(cfg, 100) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_DANIELL_STONE, case);
        let alg = gen::sized_algebra(&mut rng, 1, 3, 1);
        let d = rng.gen_range(1..=2);
        let p = gen::measure(&mut rng, &alg, cfg.max_denominator, cfg.mode, case);
        let lattice = WeakIntegrationLattice::grid(&alg, d);
        let values: Vec<Rational> = lattice
            .functions()
            .iter()
            .map(|f| integrate_nonnegative(&p, f).expect("measurable"))
            .collect();
        let direct = reconstruct_measure(&Functional::integration(&p), &[]);
        let slab = daniell_stone(&lattice, &values);
        let ok = match (&slab, &direct) {
            (Ok(s), Ok(q)) => &s.measure == q && q == &p,
            _ => false,
        };
        ds.record(ok, || {
            json!({"P": weights_json(p.weights()), "d": d, "slab": format!("{:?}", slab.as_ref().map(|s| &s.measure)), "direct": format!("{direct:?}")})
        });
    }
    Report::with_checks("appendix", vec![slabs, singletons, intervals, ds])
}

const SUITE_INTEGRALS: u64 = 12;

/// Criterion 9: the integral properties on 500 triples `(P, f, g)` with
/// `f + g ≤ 1`.
pub fn integrals(cfg: &SuiteConfig) -> Report {
    let icfg = IntegralCheckConfig::default();
    let mut clauses: BTreeMap<&'static str, Check> = BTreeMap::new();
    for case in 0..scaled(cfg, 500) as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_INTEGRALS, case);
        let alg = gen::sized_algebra(&mut rng, 1, cfg.max_ground_size, 1);
        let p = gen::measure(&mut rng, &alg, cfg.max_denominator, cfg.mode, case);
        let k = alg.num_atoms();
        let f = gen::unit_values(&mut rng, k, cfg.max_denominator);
        let g: Vec<Rational> = f
            .iter()
            .map(|v| {
                let room = Rational::one() - v;
                let d = rng.gen_range(1..=cfg.max_denominator);
                room * Rational::new(rng.gen_range(0..=d).into(), d.into())
            })
            .collect();
        let fs = [
            SimpleFunction::from_atom_values(&alg, f).expect("one value per atom"),
            SimpleFunction::from_atom_values(&alg, g).expect("one value per atom"),
        ];
        let report = check_integral_properties(&p, &fs, &icfg).expect("same algebra");
        for c in report.clauses {
            let check = clauses.entry(c.clause).or_insert_with(|| Check::new(format!("clause_{}", c.clause)));
            check.checked += c.checked as u64;
            check.failed += c.failed as u64;
            for w in c.witnesses {
                if check.witnesses.len() < crate::report::MAX_WITNESSES {
                    check.witnesses.push(w);
                }
            }
        }
    }
    Report::with_checks("integrals", clauses.into_values().collect())
}

/// One runner per acceptance criterion, in order.
pub type Runner = fn(&SuiteConfig) -> Report;

pub const CRITERIA: [(&str, Runner); 9] = [
    ("monad laws", monad_laws),
    ("codensity bijection", codensity),
    ("small-index sufficiency", small_index),
    ("bounded Lipschitz identity", bl_identity),
    ("Lipschitz criteria agree", lipschitz_criteria),
    ("non-expansiveness", nonexpansive),
    ("reconstruction", reconstruction),
    ("slabs and extensions", appendix),
    ("integral properties", integrals),
];

/// Every criterion under one report.
pub fn run_all(cfg: &SuiteConfig) -> Report {
    let mut r = Report::new("all");
    for (_, run) in CRITERIA {
        r.parts.push(run(cfg));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        let cfg = SuiteConfig::default().with_cases(10);
        for (name, run) in CRITERIA {
            if name == "Lipschitz criteria agree" {
                continue;
            }
            let r = run(&cfg);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn counts_scale() {
        let cfg = SuiteConfig::default();
        assert_eq!(scaled(&cfg, 300), 300);
        assert_eq!(scaled(&cfg.with_cases(10), 300), 6);
        assert_eq!(scaled(&cfg.with_cases(1), 50), 1);
    }
}
