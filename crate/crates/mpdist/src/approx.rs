//! Constant-factor approximation driver and bound-verification reports.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{alpha_constant, kernel_witness, ALPHA, DEFAULT_D1, DEFAULT_D2};
use crate::oracle::{display_graph, exact_dmp, exact_dtbr, exact_treewidth};
use crate::parsimony::{character_distance, Character};
use crate::reduction::{lift_character, reduce};
use crate::tree::{trees_equal, PhyloTree};

pub const DEFAULT_EXACT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApproxPath {
    /// The kernel was small enough to solve exactly.
    Exact,
    /// The kernel witness pipeline produced the character.
    Kernel,
}

/// Output of the approximation driver; `chi` lives on the original leaf set.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub chi: Character,
    pub achieved: usize,
    pub r: usize,
    /// The guarantee factor (1 + 1/r) * alpha: true d_MP <= factor * achieved.
    pub guarantee_denominator: f64,
    pub path: ApproxPath,
}

/// The (1+1/r)*alpha approximation: reduce, then either solve the kernel
/// exactly (small kernels) or run the witness pipeline, and lift the
/// character back to the original taxa.
pub fn approximate_dmp(
    t1: &PhyloTree,
    t2: &PhyloTree,
    r: usize,
    exact_cap: usize,
) -> Result<ApproxResult> {
    if r < 1 {
        return Err(Error::PreconditionViolated("r must be at least 1".into()));
    }
    if trees_equal(t1, t2)? {
        return Err(Error::IdenticalTrees);
    }
    let trace = reduce(t1, t2)?;
    let (r1, r2) = (&trace.reduced.0, &trace.reduced.1);
    let kernel_size = r1.n_taxa();
    let k = kernel_size / ALPHA;
    let (chi_reduced, floor, path) = if k < r {
        if kernel_size > exact_cap {
            return Err(Error::ExactCapExceeded {
                size: kernel_size,
                cap: exact_cap,
            });
        }
        let (d, chi) = exact_dmp(r1, r2, exact_cap)?;
        (chi, d, ApproxPath::Exact)
    } else {
        let params = alpha_constant(DEFAULT_D1, DEFAULT_D2)?;
        let chi = kernel_witness(r1, r2, k, &params)?;
        (chi, k, ApproxPath::Kernel)
    };
    let chi = lift_character(&trace, &chi_reduced)?;
    let achieved = character_distance(t1, t2, &chi)?;
    if achieved < floor || achieved < 1 {
        return Err(Error::InternalBoundViolation(format!(
            "lifted distance {} below certified floor {}",
            achieved,
            floor.max(1)
        )));
    }
    Ok(ApproxResult {
        chi,
        achieved,
        r,
        guarantee_denominator: (1.0 + 1.0 / r as f64) * ALPHA as f64,
        path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub dmp: usize,
    pub dtbr: usize,
    pub ratio: f64,
    pub bound_holds: bool,
}

/// d_TBR / d_MP with the 1 <= ratio <= 2*alpha assertion.
pub fn ratio_report(t1: &PhyloTree, t2: &PhyloTree, cap: usize) -> Result<RatioReport> {
    if trees_equal(t1, t2)? {
        return Err(Error::IdenticalTrees);
    }
    let (dmp, _) = exact_dmp(t1, t2, cap)?;
    let (dtbr, _) = exact_dtbr(t1, t2, cap)?;
    let ratio = dtbr as f64 / dmp as f64;
    Ok(RatioReport {
        dmp,
        dtbr,
        ratio,
        bound_holds: ratio >= 1.0 && ratio <= (2 * ALPHA) as f64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TreewidthReport {
    pub tw: usize,
    pub dmp: usize,
    pub bound_holds: bool,
}

/// Treewidth of the display graph against 2*alpha*d_MP + 2.
pub fn treewidth_bound_report(
    t1: &PhyloTree,
    t2: &PhyloTree,
    cap: usize,
) -> Result<TreewidthReport> {
    let g = display_graph(t1, t2)?;
    let (tw, _) = exact_treewidth(&g, cap)?;
    let (dmp, _) = exact_dmp(t1, t2, crate::oracle::DMP_CAP)?;
    Ok(TreewidthReport {
        tw,
        dmp,
        bound_holds: tw <= 2 * ALPHA * dmp + 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::oracle::DMP_CAP;
    use crate::tree::random_tree;

    fn qa() -> PhyloTree {
        parse_newick("((a,b),(c,d));").unwrap()
    }

    fn qb() -> PhyloTree {
        parse_newick("((a,c),(b,d));").unwrap()
    }

    #[test]
    fn approx_quartet_pair() {
        let res = approximate_dmp(&qa(), &qb(), 1, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(res.path, ApproxPath::Exact);
        assert_eq!(res.achieved, 1);
        assert!((res.guarantee_denominator - 1120.0).abs() < 1e-9);
    }

    #[test]
    fn approx_identical_rejected() {
        assert!(matches!(
            approximate_dmp(&qa(), &qa(), 1, DEFAULT_EXACT_CAP),
            Err(Error::IdenticalTrees)
        ));
    }

    #[test]
    fn approx_small_random_pairs_take_exact_path() {
        for seed in 0..30u64 {
            let n = 6 + (seed as usize % 4);
            let taxa: Vec<String> = (0..n).map(|i| format!("t{}", i)).collect();
            let t1 = random_tree(&taxa, seed).unwrap();
            let t2 = random_tree(&taxa, seed + 2222).unwrap();
            if trees_equal(&t1, &t2).unwrap() {
                continue;
            }
            let res = approximate_dmp(&t1, &t2, 1, DEFAULT_EXACT_CAP).unwrap();
            assert_eq!(res.path, ApproxPath::Exact);
            let (dmp, _) = exact_dmp(&t1, &t2, DMP_CAP).unwrap();
            // Exact path on a reduction-invariant kernel: equality.
            assert_eq!(res.achieved, dmp);
            assert!(dmp as f64 <= res.guarantee_denominator * res.achieved as f64);
        }
    }

    #[test]
    fn ratio_report_quartets() {
        let r = ratio_report(&qa(), &qb(), DMP_CAP).unwrap();
        assert_eq!((r.dmp, r.dtbr), (1, 1));
        assert!((r.ratio - 1.0).abs() < 1e-9);
        assert!(r.bound_holds);
    }

    #[test]
    fn treewidth_report_small() {
        let same = treewidth_bound_report(&qa(), &qa(), 16).unwrap();
        assert!(same.tw <= 2);
        assert!(same.bound_holds);
        let diff = treewidth_bound_report(&qa(), &qb(), 16).unwrap();
        assert!(diff.tw <= 3);
        assert!(diff.bound_holds);
    }
}
