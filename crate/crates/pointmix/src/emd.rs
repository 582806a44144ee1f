//! Earth mover's distance between equal-cardinality point clouds.
//!
//! The cost of matching two points is the plain L2 norm of their difference,
//! not the squared norm (many transport libraries default to squared cost;
//! this one deliberately does not). The distance is the per-point mean of
//! matched costs under the best bijection.
//!
//! Three solvers share one contract: an exact O(N^3) shortest-augmenting-path
//! solver, an approximate auction solver with epsilon scaling, and a
//! factorial brute-force oracle for tiny instances.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::vec3;

/// Hard ceiling for the brute-force oracle (8! = 40320 bijections).
pub const BRUTEFORCE_CAP: usize = 8;

/// Default ceiling for the exact solver; a config knob, not a correctness
/// boundary.
pub const DEFAULT_EXACT_CAP: usize = 512;

/// A bijection on point indices: `perm[i]` is the index in the second cloud
/// matched to point `i` of the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    perm: Vec<usize>,
}

impl Assignment {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(Error::InvalidArgument(
                    "assignment is not a bijection".into(),
                ));
            }
            seen[j] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        Self { perm: inv }
    }
}

/// Outcome of an EMD solve. `distance` always equals the mean matched cost
/// recomputed from `assignment`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmdResult {
    pub assignment: Assignment,
    pub distance: f64,
    pub exact: bool,
    /// For approximate solves: an upper bound on
    /// `(distance - optimal) / distance`.
    pub gap_bound: Option<f64>,
}

/// Mean matched L2 cost of a given bijection between two clouds.
pub fn assignment_cost(a: &PointCloud, b: &PointCloud, assignment: &Assignment) -> Result<f64> {
    if a.len() != b.len() || assignment.len() != a.len() {
        return Err(Error::InvalidArgument(
            "assignment/cloud cardinality mismatch".into(),
        ));
    }
    let total: f64 = assignment
        .perm()
        .iter()
        .enumerate()
        .map(|(i, &j)| vec3::dist(a.points()[i], b.points()[j]))
        .sum();
    Ok(total / a.len() as f64)
}

struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    fn from_clouds(a: &PointCloud, b: &PointCloud) -> Self {
        let n = a.len();
        let mut data = Vec::with_capacity(n * n);
        for pa in a.points() {
            for pb in b.points() {
                data.push(vec3::dist(*pa, *pb));
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    fn mean_cost(&self, perm: &[usize]) -> f64 {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| self.at(i, j)).sum();
        total / self.n as f64
    }
}

/// Exact min-cost assignment by shortest augmenting paths over dual
/// potentials. Deterministic: scan order breaks cost ties.
fn min_cost_assignment(cost: &CostMatrix) -> Vec<usize> {
    let n = cost.n;
    let none = usize::MAX;
    // Column n is the virtual start of every augmenting path.
    let mut u = vec![0.0f64; n]; // row potentials
    let mut v = vec![0.0f64; n + 1]; // column potentials
    let mut col_row = vec![none; n + 1]; // row assigned to each column
    let mut way = vec![0usize; n + 1];

    for i in 0..n {
        col_row[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let row = cost.row(i0);
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
                if !used[j] {
                    let cur = row[j] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    if col_row[j] != none {
                        u[col_row[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == none {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
            if j0 == n {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 0..n {
        perm[col_row[j]] = j;
    }
    perm
}

/// Exact solve under the default size cap.
pub fn emd_exact(a: &PointCloud, b: &PointCloud) -> Result<EmdResult> {
    emd_exact_capped(a, b, DEFAULT_EXACT_CAP)
}

/// Exact solve with an explicit size cap.
pub fn emd_exact_capped(a: &PointCloud, b: &PointCloud, cap: usize) -> Result<EmdResult> {
    check_cardinality(a, b)?;
    if a.len() > cap {
        return Err(Error::Capacity(format!(
            "N={} exceeds exact-solver cap {cap}; use emd_approx",
            a.len()
        )));
    }
    let cost = CostMatrix::from_clouds(a, b);
    let perm = min_cost_assignment(&cost);
    let distance = cost.mean_cost(&perm);
    Ok(EmdResult {
        assignment: Assignment { perm },
        distance,
        exact: true,
        gap_bound: None,
    })
}

/// Exhaustive minimum over all N! bijections. The independent oracle for the
/// other solvers; refuses N > 8.
pub fn emd_bruteforce(a: &PointCloud, b: &PointCloud) -> Result<EmdResult> {
    check_cardinality(a, b)?;
    let n = a.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::Capacity(format!(
            "N={n} exceeds brute-force cap {BRUTEFORCE_CAP}"
        )));
    }
    let cost = CostMatrix::from_clouds(a, b);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm over index permutations.
    let mut stack = vec![0usize; n];
    let consider = |perm: &[usize], best: &mut Option<(f64, Vec<usize>)>| {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| cost.at(i, j)).sum();
        match best {
            Some((b, _)) if total >= *b => {}
            _ => *best = Some((total, perm.to_vec())),
        }
    };
    consider(&perm, &mut best);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            consider(&perm, &mut best);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    let (total, perm) = best.expect("at least one permutation");
    Ok(EmdResult {
        assignment: Assignment { perm },
        distance: total / n as f64,
        exact: true,
        gap_bound: None,
    })
}

/// How hard the auction solver tries before giving up on a phase.
const AUCTION_PHASE_BID_FACTOR: usize = 600;
const AUCTION_PHASE_BID_BASE: usize = 50_000;

/// Approximate solve by forward auction with epsilon scaling.
///
/// `epsilon` is the absolute tolerance on the total matched cost: the phase
/// schedule starts at max-cost/8, divides by 4 per phase, and stops once the
/// per-bid increment is at most `epsilon / N`, which bounds the total cost
/// gap by `epsilon` and the mean-distance gap by `epsilon / N`.
pub fn emd_approx(a: &PointCloud, b: &PointCloud, epsilon: f64) -> Result<EmdResult> {
    check_cardinality(a, b)?;
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "auction tolerance {epsilon} must be positive"
        )));
    }
    let n = a.len();
    let cost = CostMatrix::from_clouds(a, b);
    let eps_stop = epsilon / n as f64;
    let mut eps = (cost.max() / 8.0).max(eps_stop);
    let mut prices = vec![0.0f64; n];
    let budget = AUCTION_PHASE_BID_BASE + AUCTION_PHASE_BID_FACTOR * n;

    let perm = loop {
        match auction_phase(&cost, &mut prices, eps, budget) {
            Ok(perm) => {
                if eps <= eps_stop {
                    break perm;
                }
            }
            Err(partial) => {
                let distance = cost.mean_cost(&partial);
                return Err(Error::SolverFailure {
                    reason: format!("auction exceeded {budget} bids in a phase (eps={eps:e})"),
                    best: Box::new(EmdResult {
                        assignment: Assignment { perm: partial },
                        distance,
                        exact: false,
                        gap_bound: None,
                    }),
                });
            }
        }
        eps = (eps / 4.0).max(eps_stop);
    };
    let distance = cost.mean_cost(&perm);
    // Epsilon-complementary slackness bounds the total-cost gap by n*eps,
    // hence the mean-distance gap by eps.
    let gap_bound = if distance > 0.0 {
        Some(eps / distance)
    } else {
        Some(0.0)
    };
    Ok(EmdResult {
        assignment: Assignment { perm },
        distance,
        exact: false,
        gap_bound,
    })
}

/// One auction phase at fixed epsilon; assignment starts empty, prices are
/// carried in. Returns the partial row-to-column map (greedily completed to
/// a bijection) on budget exhaustion.
fn auction_phase(
    cost: &CostMatrix,
    prices: &mut [f64],
    eps: f64,
    budget: usize,
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = cost.n;
    let none = usize::MAX;
    let mut row_col = vec![none; n];
    let mut col_row = vec![none; n];
    let mut queue: std::collections::VecDeque<usize> = (0..n).collect();
    let mut bids = 0usize;

    while let Some(i) = queue.pop_front() {
        bids += 1;
        if bids > budget {
            queue.push_front(i);
            complete_greedy(&mut row_col, &mut col_row);
            return Err(row_col);
        }
        let row = cost.row(i);
        let mut best_j = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        let mut second_v = f64::NEG_INFINITY;
        for (j, (&c, &p)) in row.iter().zip(prices.iter()).enumerate() {
            let v = -c - p;
            if v > best_v {
                second_v = best_v;
                best_v = v;
                best_j = j;
            } else if v > second_v {
                second_v = v;
            }
        }
        if second_v == f64::NEG_INFINITY {
            second_v = best_v;
        }
        prices[best_j] += best_v - second_v + eps;
        if col_row[best_j] != none {
            let evicted = col_row[best_j];
            row_col[evicted] = none;
            queue.push_back(evicted);
        }
        col_row[best_j] = i;
        row_col[i] = best_j;
    }
    Ok(row_col)
}

/// Fills the unmatched rows of a partial assignment with the unmatched
/// columns in index order, so a failed solve still reports a bijection.
fn complete_greedy(row_col: &mut [usize], col_row: &mut [usize]) {
    let none = usize::MAX;
    let mut free_cols: Vec<usize> = (0..col_row.len())
        .filter(|&j| col_row[j] == none)
        .collect();
    free_cols.reverse();
    for rc in row_col.iter_mut() {
        if *rc == none {
            *rc = free_cols.pop().expect("free column per free row");
        }
    }
}

/// Solver selection knobs for callers that do not care which solver runs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest N handled by the exact solver.
    pub exact_cap: usize,
    /// Auction tolerance used above the cap (total-cost units).
    pub epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            exact_cap: DEFAULT_EXACT_CAP,
            epsilon: 1e-3,
        }
    }
}

/// Dispatches to the exact solver below the configured cap and to the
/// auction solver above it.
pub fn emd(a: &PointCloud, b: &PointCloud, cfg: &SolverConfig) -> Result<EmdResult> {
    check_cardinality(a, b)?;
    if a.len() <= cfg.exact_cap {
        emd_exact_capped(a, b, cfg.exact_cap)
    } else {
        emd_approx(a, b, cfg.epsilon)
    }
}

/// The scalar distance from the dispatched solver.
pub fn emd_distance(a: &PointCloud, b: &PointCloud, cfg: &SolverConfig) -> Result<f64> {
    emd(a, b, cfg).map(|r| r.distance)
}

fn check_cardinality(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "cardinality mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::new(
            (0..n)
                .map(|_| [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)])
                .collect(),
        )
        .unwrap()
    }

    fn two_point_fixture() -> (PointCloud, PointCloud) {
        (
            PointCloud::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap(),
            PointCloud::new(vec![[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn assignment_must_be_bijection() {
        assert!(Assignment::new(vec![0, 0]).is_err());
        assert!(Assignment::new(vec![0, 2]).is_err());
        let a = Assignment::new(vec![2, 0, 1]).unwrap();
        assert_eq!(a.inverse().perm(), &[1, 2, 0]);
    }

    #[test]
    fn exact_identical_clouds_is_zero() {
        let a = random_cloud(16, 1);
        let r = emd_exact(&a, &a).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(r.exact);
    }

    #[test]
    fn exact_two_point_fixture_is_one() {
        // Straight matching costs (1+1)/2 = 1; crossed costs sqrt(2) ~ 1.414.
        let (a, b) = two_point_fixture();
        let r = emd_exact(&a, &b).unwrap();
        assert_eq!(r.assignment.perm(), &[0, 1]);
        assert!((r.distance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_two_point_fixture_is_one() {
        let (a, b) = two_point_fixture();
        let r = emd_bruteforce(&a, &b).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_single_point() {
        let a = PointCloud::new(vec![[0.0, 0.0, 0.0]]).unwrap();
        let b = PointCloud::new(vec![[3.0, 4.0, 0.0]]).unwrap();
        let r = emd_bruteforce(&a, &b).unwrap();
        assert_eq!(r.assignment.perm(), &[0]);
        assert!((r.distance - 5.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_caps_at_eight() {
        let a = random_cloud(9, 2);
        let b = random_cloud(9, 3);
        assert!(matches!(emd_bruteforce(&a, &b), Err(Error::Capacity(_))));
    }

    #[test]
    fn exact_matches_bruteforce_small_n() {
        for trial in 0..50 {
            let a = random_cloud(7, 100 + trial);
            let b = random_cloud(7, 200 + trial);
            let exact = emd_exact(&a, &b).unwrap();
            let brute = emd_bruteforce(&a, &b).unwrap();
            assert!(
                (exact.distance - brute.distance).abs() <= 1e-12,
                "trial {trial}: {} vs {}",
                exact.distance,
                brute.distance
            );
        }
    }

    #[test]
    fn exact_matches_bruteforce_n6() {
        let a = random_cloud(6, 42);
        let b = random_cloud(6, 43);
        let exact = emd_exact(&a, &b).unwrap();
        let brute = emd_bruteforce(&a, &b).unwrap();
        assert!((exact.distance - brute.distance).abs() <= 1e-12);
    }

    #[test]
    fn exact_rejects_over_cap_and_mismatch() {
        let a = random_cloud(4, 4);
        let b = random_cloud(5, 5);
        assert!(matches!(emd_exact(&a, &b), Err(Error::InvalidArgument(_))));
        let a = random_cloud(10, 6);
        let b = random_cloud(10, 7);
        assert!(matches!(
            emd_exact_capped(&a, &b, 8),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn distance_recomputes_from_assignment() {
        let a = random_cloud(32, 8);
        let b = random_cloud(32, 9);
        let r = emd_exact(&a, &b).unwrap();
        let recomputed = assignment_cost(&a, &b, &r.assignment).unwrap();
        assert!((r.distance - recomputed).abs() <= 1e-12);
    }

    #[test]
    fn distance_is_permutation_invariant() {
        let a = random_cloud(24, 10);
        let b = random_cloud(24, 11);
        let d = emd_exact(&a, &b).unwrap().distance;
        let mut perm: Vec<usize> = (0..24).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in (1..24).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let b_shuffled = b.permuted(&perm).unwrap();
        let d2 = emd_exact(&a, &b_shuffled).unwrap().distance;
        assert!((d - d2).abs() <= 1e-12);
    }

    #[test]
    fn distance_is_symmetric() {
        for trial in 0..20 {
            let a = random_cloud(32, 300 + trial);
            let b = random_cloud(32, 400 + trial);
            let ab = emd_exact(&a, &b).unwrap().distance;
            let ba = emd_exact(&b, &a).unwrap().distance;
            assert!((ab - ba).abs() <= 1e-9);
        }
    }

    #[test]
    fn triangle_inequality_holds() {
        for trial in 0..30 {
            let a = random_cloud(16, 500 + trial);
            let b = random_cloud(16, 600 + trial);
            let c = random_cloud(16, 700 + trial);
            let ab = emd_exact(&a, &b).unwrap().distance;
            let bc = emd_exact(&b, &c).unwrap().distance;
            let ac = emd_exact(&a, &c).unwrap().distance;
            assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn approx_identical_clouds_within_epsilon() {
        let a = random_cloud(64, 13);
        let r = emd_approx(&a, &a, 1e-3).unwrap();
        assert!(r.distance <= 1e-3);
        assert!(!r.exact);
    }

    #[test]
    fn approx_never_beats_exact() {
        for trial in 0..10 {
            let a = random_cloud(48, 800 + trial);
            let b = random_cloud(48, 900 + trial);
            let exact = emd_exact(&a, &b).unwrap().distance;
            let approx = emd_approx(&a, &b, 1e-3).unwrap().distance;
            assert!(approx >= exact - 1e-12, "approx {approx} < exact {exact}");
            assert!((approx - exact) / exact <= 0.03, "gap too large");
        }
    }

    #[test]
    fn approx_handles_duplicate_points() {
        let a = PointCloud::new(vec![[0.0; 3]; 16]).unwrap();
        let b = PointCloud::new(vec![[1.0, 0.0, 0.0]; 16]).unwrap();
        let r = emd_approx(&a, &b, 1e-6).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn approx_large_instance_returns_valid_bijection() {
        let a = random_cloud(1024, 14);
        let b = random_cloud(1024, 15);
        let r = emd_approx(&a, &b, 1e-2).unwrap();
        assert_eq!(r.assignment.len(), 1024);
        assert!(r.gap_bound.is_some());
        // Assignment constructor is bypassed internally; re-validate here.
        assert!(Assignment::new(r.assignment.perm().to_vec()).is_ok());
    }

    #[test]
    fn dispatcher_selects_by_cap() {
        let a = random_cloud(32, 16);
        let b = random_cloud(32, 17);
        let cfg = SolverConfig { exact_cap: 16, epsilon: 1e-4 };
        let r = emd(&a, &b, &cfg).unwrap();
        assert!(!r.exact);
        let cfg = SolverConfig::default();
        let r = emd(&a, &b, &cfg).unwrap();
        assert!(r.exact);
        assert_eq!(emd_distance(&a, &a, &cfg).unwrap(), 0.0);
    }
}
