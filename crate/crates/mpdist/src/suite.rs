//! Named verification suites, one per acceptance criterion.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{approximate_dmp, ratio_report, ApproxPath};
use crate::error::{Error, Result};
use crate::gen::{default_taxa, glued_quartets, reducible_pair};
use crate::kernel::{
    alpha_constant, build_partition, build_quartet_character, degree_excess_count,
    find_conflicting_quartet, irreducible_bound_check, kernel_witness, ALPHA,
};
use crate::oracle::{
    display_graph, exact_dmp, exact_dtbr, exact_treewidth, brute_parsimony,
};
use crate::parsimony::{
    character_distance, parsimony_score, ps_lower_bound_check, Character,
};
use crate::reduction::{lift_character, reduce};
use crate::tree::{enumerate_topologies, random_tree_with_rng, trees_equal};

pub const SUITE_NAMES: [&str; 13] = [
    "alpha-tables",
    "fitch-vs-brute",
    "ps-lower-bound",
    "metric-axioms",
    "reduction-invariance",
    "lifting",
    "glued-quartets",
    "big-partition",
    "tree-degrees",
    "kernel-witness-large",
    "approx-guarantee",
    "ratio-tw-sweep",
    "small-degree-bound",
];

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> Self {
        SuiteReport {
            name: name.to_string(),
            seed,
            assertions: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, label: &str, passed: bool, detail: String) {
        self.passed &= passed;
        self.assertions.push(Assertion {
            label: label.to_string(),
            passed,
            detail,
        });
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "alpha-tables" => suite_alpha_tables(seed),
        "fitch-vs-brute" => suite_fitch_vs_brute(seed),
        "ps-lower-bound" => suite_ps_lower_bound(seed),
        "metric-axioms" => suite_metric_axioms(seed),
        "reduction-invariance" => suite_reduction_invariance(seed),
        "lifting" => suite_lifting(seed),
        "glued-quartets" => suite_glued_quartets(seed),
        "big-partition" => suite_big_partition(seed),
        "tree-degrees" => suite_tree_degrees(seed),
        "kernel-witness-large" => suite_kernel_witness_large(seed),
        "approx-guarantee" => suite_approx_guarantee(seed),
        "ratio-tw-sweep" => suite_ratio_tw_sweep(seed),
        "small-degree-bound" => suite_small_degree_bound(seed),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

// Reference tables for c, the block factor t' and alpha, rows d1 = 2..9,
// columns d2 = 2..9; 0 marks the degenerate (2,2) cell.
const C_TABLE: [[usize; 8]; 8] = [
    [0, 34, 43, 52, 61, 70, 79, 88],
    [34, 43, 52, 61, 70, 79, 88, 97],
    [43, 52, 61, 70, 79, 88, 97, 106],
    [52, 61, 70, 79, 88, 97, 106, 115],
    [61, 70, 79, 88, 97, 106, 115, 124],
    [70, 79, 88, 97, 106, 115, 124, 133],
    [79, 88, 97, 106, 115, 124, 133, 142],
    [88, 97, 106, 115, 124, 133, 142, 151],
];

const T_TABLE: [[usize; 8]; 8] = [
    [0, 14, 9, 8, 7, 6, 6, 6],
    [15, 7, 6, 5, 5, 5, 4, 4],
    [10, 6, 5, 4, 4, 4, 4, 4],
    [9, 5, 5, 4, 4, 4, 4, 4],
    [8, 5, 4, 4, 4, 4, 3, 3],
    [7, 5, 4, 4, 4, 3, 3, 3],
    [7, 5, 4, 4, 4, 3, 3, 3],
    [7, 5, 4, 4, 3, 3, 3, 3],
];

const ALPHA_TABLE: [[usize; 8]; 8] = [
    [0, 952, 774, 832, 854, 840, 948, 1056],
    [1020, 602, 624, 610, 700, 790, 704, 776],
    [860, 624, 610, 560, 632, 704, 776, 848],
    [936, 610, 700, 632, 704, 776, 848, 920],
    [976, 700, 632, 704, 776, 848, 690, 744],
    [980, 790, 704, 776, 848, 690, 744, 798],
    [1106, 880, 776, 848, 920, 744, 798, 852],
    [1232, 970, 848, 920, 744, 798, 852, 906],
];

/// The three constant tables rendered for the CLI.
pub fn alpha_tables_text() -> String {
    let render = |title: &str, table: &[[usize; 8]; 8]| {
        let mut out = format!("{}\nd1\\d2 {:>6}\n", title, (2..=9).map(|d| format!("{:>6}", d)).collect::<String>());
        for (i, row) in table.iter().enumerate() {
            out.push_str(&format!("{:>5} ", i + 2));
            for &v in row {
                if v == 0 {
                    out.push_str(&format!("{:>6}", "-"));
                } else {
                    out.push_str(&format!("{:>6}", v));
                }
            }
            out.push('\n');
        }
        out
    };
    format!(
        "{}\n{}\n{}",
        render("c = 9(d1+d2) - 11", &C_TABLE),
        render("t' = ceil((2 d1 d2 + d1) / (d1 d2 - d1 - d2))", &T_TABLE),
        render("alpha = 2 c t'", &ALPHA_TABLE)
    )
}

fn suite_alpha_tables(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("alpha-tables", seed);
    let mut mismatches = Vec::new();
    let mut min_alpha = usize::MAX;
    let mut argmin = (0, 0);
    for d1 in 2..=9usize {
        for d2 in 2..=9usize {
            let (i, j) = (d1 - 2, d2 - 2);
            match alpha_constant(d1, d2) {
                Ok(p) => {
                    if p.c != C_TABLE[i][j]
                        || p.t_factor != T_TABLE[i][j]
                        || p.alpha != ALPHA_TABLE[i][j]
                    {
                        mismatches.push(format!(
                            "({},{}): got c={} t'={} alpha={}",
                            d1, d2, p.c, p.t_factor, p.alpha
                        ));
                    }
                    if p.alpha < min_alpha {
                        min_alpha = p.alpha;
                        argmin = (d1, d2);
                    }
                }
                Err(_) => {
                    if (d1, d2) != (2, 2) {
                        mismatches.push(format!("({},{}) unexpectedly errored", d1, d2));
                    }
                }
            }
        }
    }
    rep.check(
        "all 63 table entries match, (2,2) errors",
        mismatches.is_empty() && alpha_constant(2, 2).is_err(),
        mismatches.join("; "),
    );
    rep.check(
        "minimum alpha is 560 at (4,5)",
        min_alpha == 560 && argmin == (4, 5),
        format!("min {} at {:?}", min_alpha, argmin),
    );
    Ok(rep)
}

fn suite_fitch_vs_brute(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("fitch-vs-brute", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..500 {
        let n = rng.gen_range(4..=8);
        let taxa = default_taxa(n);
        let t = random_tree_with_rng(&taxa, &mut rng)?;
        let states = rng.gen_range(2..=4);
        let pairs: Vec<(String, usize)> = taxa
            .iter()
            .map(|l| (l.clone(), rng.gen_range(0..states)))
            .collect();
        let chi = Character::from_pairs(&pairs)?;
        let (fitch, phi) = parsimony_score(&t, &chi)?;
        let brute = brute_parsimony(&t, &chi, 4, 8)?;
        if fitch != brute || crate::parsimony::delta(&t, &phi)? != fitch {
            failures += 1;
        }
    }
    rep.check(
        "500 instances: parsimony_score == brute_parsimony",
        failures == 0,
        format!("{} mismatches", failures),
    );
    Ok(rep)
}

fn suite_ps_lower_bound(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("ps-lower-bound", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..300 {
        let n = rng.gen_range(4..=9);
        let taxa = default_taxa(n);
        let t = random_tree_with_rng(&taxa, &mut rng)?;
        let states = rng.gen_range(2..=4);
        let pairs: Vec<(String, usize)> = taxa
            .iter()
            .map(|l| (l.clone(), rng.gen_range(0..states)))
            .collect();
        let chi = Character::from_pairs(&pairs)?;
        let (bound, bicond) = ps_lower_bound_check(&t, &chi)?;
        if !bound || !bicond {
            failures += 1;
        }
    }
    rep.check(
        "300 instances: PS >= t-1 and equality iff spanning-disjoint",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_metric_axioms(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("metric-axioms", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(5..=6);
        let taxa = default_taxa(n);
        let a = random_tree_with_rng(&taxa, &mut rng)?;
        let b = random_tree_with_rng(&taxa, &mut rng)?;
        let c = random_tree_with_rng(&taxa, &mut rng)?;
        let (dab, _) = exact_dmp(&a, &b, 10)?;
        let (dba, _) = exact_dmp(&b, &a, 10)?;
        let (dbc, _) = exact_dmp(&b, &c, 10)?;
        let (dac, _) = exact_dmp(&a, &c, 10)?;
        let symmetric = dab == dba;
        let identity = (dab == 0) == trees_equal(&a, &b)?;
        let triangle = dac <= dab + dbc;
        if !symmetric || !identity || !triangle {
            failures += 1;
        }
    }
    rep.check(
        "100 triples: symmetry, identity of indiscernibles, triangle",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_reduction_invariance(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("reduction-invariance", seed);
    let mut dmp_failures = 0usize;
    let mut empty_traces = 0usize;
    for i in 0..100u64 {
        let n = 6 + (i as usize % 5); // 6..=10
        let (t1, t2) = reducible_pair(n, seed.wrapping_add(i))?;
        let trace = reduce(&t1, &t2)?;
        if trace.steps.is_empty() {
            empty_traces += 1;
        }
        let (before, _) = exact_dmp(&t1, &t2, 10)?;
        let (after, _) = exact_dmp(&trace.reduced.0, &trace.reduced.1, 10)?;
        if before != after {
            dmp_failures += 1;
        }
    }
    rep.check(
        "100 reducible pairs: exact d_MP invariant under reduction",
        dmp_failures == 0 && empty_traces == 0,
        format!("{} mismatches, {} unexpectedly irreducible", dmp_failures, empty_traces),
    );
    let mut dtbr_failures = 0usize;
    for i in 0..50u64 {
        let n = 6 + (i as usize % 2); // 6..=7
        let (t1, t2) = reducible_pair(n, seed.wrapping_add(1000 + i))?;
        let trace = reduce(&t1, &t2)?;
        let (before, _) = exact_dtbr(&t1, &t2, 8)?;
        let (after, _) = exact_dtbr(&trace.reduced.0, &trace.reduced.1, 8)?;
        if before != after {
            dtbr_failures += 1;
        }
    }
    rep.check(
        "50 reducible pairs: exact d_TBR invariant under reduction",
        dtbr_failures == 0,
        format!("{} mismatches", dtbr_failures),
    );
    Ok(rep)
}

fn suite_lifting(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("lifting", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for i in 0..200u64 {
        let n = 6 + (i as usize % 5);
        let (t1, t2) = reducible_pair(n, seed.wrapping_add(7000 + i))?;
        let trace = reduce(&t1, &t2)?;
        let red_taxa = trace.reduced.0.taxa().to_vec();
        let states = rng.gen_range(2..=3);
        let pairs: Vec<(String, usize)> = red_taxa
            .iter()
            .map(|l| (l.clone(), rng.gen_range(0..states)))
            .collect();
        let chi = Character::from_pairs(&pairs)?;
        let lifted = lift_character(&trace, &chi)?;
        let d_orig = character_distance(&t1, &t2, &lifted)?;
        let d_red = character_distance(&trace.reduced.0, &trace.reduced.1, &chi)?;
        if d_orig < d_red {
            failures += 1;
        }
    }
    rep.check(
        "200 reducible pairs: lifted distance >= reduced distance",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_glued_quartets(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("glued-quartets", seed);
    for k in [1usize, 2, 3, 5] {
        let (t1, t2) = glued_quartets(k, seed)?;
        let quartets: Result<Vec<_>> = (1..=k)
            .map(|g| {
                let gadget: Vec<String> = ["a", "b", "c", "d"]
                    .iter()
                    .map(|p| format!("{}_{}", p, g))
                    .collect();
                find_conflicting_quartet(&t1, &t2, &gadget)
            })
            .collect();
        let quartets = quartets?;
        let chi = build_quartet_character(&t1, &t2, &quartets)?;
        let (ps1, _) = parsimony_score(&t1, &chi)?;
        let (ps2, _) = parsimony_score(&t2, &chi)?;
        rep.check(
            &format!("k={}: PS(T1) <= k and PS(T2) >= 2k", k),
            ps1 <= k && ps2 >= 2 * k,
            format!("PS(T1)={} PS(T2)={}", ps1, ps2),
        );
    }
    Ok(rep)
}

fn suite_big_partition(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("big-partition", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..100 {
        let c = rng.gen_range(2..=3usize);
        let t = rng.gen_range(1..=3usize);
        let n = 2 * c * t + rng.gen_range(0..=6);
        let taxa = default_taxa(n);
        let tree = random_tree_with_rng(&taxa, &mut rng)?;
        let p = build_partition(&tree, c, t)?;
        let ok = p.len() == t
            && p.blocks.iter().all(|b| b.len() >= c)
            && p.blocks[..t - 1].iter().all(|b| b.len() < 2 * c)
            && tree.are_spanning_disjoint(&p.blocks)?
            && p.blocks.iter().map(|b| b.len()).sum::<usize>() == n;
        if !ok {
            failures += 1;
        }
    }
    rep.check(
        "100 runs: t blocks, sizes in [c, 2c), spanning-disjoint, covering",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_tree_degrees(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("tree-degrees", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..200 {
        let c = 2usize;
        let t = rng.gen_range(2..=5usize);
        let n = 2 * c * t + rng.gen_range(0..=6);
        let taxa = default_taxa(n);
        let tree = random_tree_with_rng(&taxa, &mut rng)?;
        let p = build_partition(&tree, c, t)?;
        for d in [2usize, 3, 4, 5] {
            if degree_excess_count(&tree, &p, d)? > p.len() / d {
                failures += 1;
            }
        }
    }
    rep.check(
        "200 partitions, d in {2,3,4,5}: excess count <= floor(t/d)",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_kernel_witness_large(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("kernel-witness-large", seed);
    let params = alpha_constant(4, 5)?;
    for i in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
        let taxa = default_taxa(1200);
        let t1 = random_tree_with_rng(&taxa, &mut rng)?;
        let t2 = random_tree_with_rng(&taxa, &mut rng)?;
        let trace = reduce(&t1, &t2)?;
        let (r1, r2) = (&trace.reduced.0, &trace.reduced.1);
        let k = r1.n_taxa() / ALPHA;
        let label = format!("instance {}: kernel {} taxa, k={}", i, r1.n_taxa(), k);
        if k == 0 {
            rep.check(&label, false, "kernel collapsed below alpha".into());
            continue;
        }
        match kernel_witness(r1, r2, k, &params) {
            Ok(chi) => {
                let d = character_distance(r1, r2, &chi)?;
                rep.check(&label, d >= k, format!("verified distance {}", d));
            }
            Err(e) => rep.check(&label, false, format!("pipeline error: {}", e)),
        }
    }
    Ok(rep)
}

fn suite_approx_guarantee(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("approx-guarantee", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut tested = 0usize;
    while tested < 50 {
        let n = rng.gen_range(5..=9);
        let taxa = default_taxa(n);
        let t1 = random_tree_with_rng(&taxa, &mut rng)?;
        let t2 = random_tree_with_rng(&taxa, &mut rng)?;
        if trees_equal(&t1, &t2)? {
            continue;
        }
        tested += 1;
        let res = approximate_dmp(&t1, &t2, 1, 12)?;
        let (dmp, _) = exact_dmp(&t1, &t2, 10)?;
        let ok = res.path == ApproxPath::Exact
            && res.achieved == dmp
            && (dmp as f64) <= 2.0 * ALPHA as f64 * res.achieved as f64;
        if !ok {
            failures += 1;
        }
    }
    rep.check(
        "50 distinct pairs n <= 9, r=1: oracle d_MP <= 1120 x achieved (equality via exact path)",
        failures == 0,
        format!("{} violations", failures),
    );
    Ok(rep)
}

fn suite_ratio_tw_sweep(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("ratio-tw-sweep", seed);
    let mut ratio_failures = 0usize;
    let mut tw_failures = 0usize;
    let mut pairs = 0usize;
    let mut min_ratio = f64::INFINITY;
    for n in 4..=6usize {
        let taxa = default_taxa(n);
        let all = enumerate_topologies(&taxa)?;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                pairs += 1;
                let (t1, t2) = (&all[i], &all[j]);
                let r = ratio_report(t1, t2, 10)?;
                if !r.bound_holds {
                    ratio_failures += 1;
                }
                min_ratio = min_ratio.min(r.dmp as f64 / r.dtbr as f64);
                let g = display_graph(t1, t2)?;
                let (tw, _) = exact_treewidth(&g, 16)?;
                if !(tw <= r.dtbr + 2 && r.dtbr + 2 <= 2 * ALPHA * r.dmp + 2) {
                    tw_failures += 1;
                }
            }
        }
    }
    rep.check(
        "exhaustive distinct pairs n <= 6: 1 <= d_TBR/d_MP <= 1120",
        ratio_failures == 0,
        format!("{} violations over {} pairs", ratio_failures, pairs),
    );
    rep.check(
        "same sweep: tw(display) <= d_TBR + 2 <= 2*560*d_MP + 2",
        tw_failures == 0,
        format!(
            "{} violations; min observed d_MP/d_TBR = {:.3} (no assertion)",
            tw_failures, min_ratio
        ),
    );
    Ok(rep)
}

fn suite_small_degree_bound(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("small-degree-bound", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0usize;
    let mut counterexamples = 0usize;
    while samples < 10_000 {
        let n = rng.gen_range(10..=14);
        let taxa = default_taxa(n);
        let t1 = random_tree_with_rng(&taxa, &mut rng)?;
        let t2 = random_tree_with_rng(&taxa, &mut rng)?;
        if trees_equal(&t1, &t2)? {
            continue;
        }
        let trace = reduce(&t1, &t2)?;
        let (r1, r2) = (&trace.reduced.0, &trace.reduced.1);
        if r1.n_taxa() < 8 {
            continue;
        }
        let pool = r1.taxa().to_vec();
        for _ in 0..50 {
            if samples >= 10_000 {
                break;
            }
            let size = rng.gen_range(4..=pool.len());
            let mut subset = pool.clone();
            for i in 0..size {
                let j = rng.gen_range(i..subset.len());
                subset.swap(i, j);
            }
            subset.truncate(size);
            subset.sort();
            let d1 = r1.set_degree(&subset)?;
            let d2 = r2.set_degree(&subset)?;
            samples += 1;
            if !irreducible_bound_check(r1, r2, &subset, d1, d2)? {
                counterexamples += 1;
            }
        }
    }
    rep.check(
        "10,000 samples: equal induced subtrees imply |S| <= 9(d1+d2)-12",
        counterexamples == 0,
        format!("{} counterexamples", counterexamples),
    );
    Ok(rep)
}
