//! Numerical certificates for the interpolation guarantees.
//!
//! Each check draws a population of random cloud pairs, evaluates a residual
//! per instance, and records the worst case against a fixed tolerance. The
//! optimal-assignment interpolation must certify three facts at
//! machine-level tolerance: the interpolant lies on a shortest path between
//! its sources, the identity map is the optimal assignment between any two
//! interpolants of the same pair, and the distance between interpolants is
//! linear in the ratio gap. Random-assignment mixing is run through the same
//! shortest-path check as a negative control and must fail it; point-sampling
//! mixing must pass a loose approximate version. Solver records round out
//! the report: exact-vs-bruteforce agreement and auction-vs-exact quality.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{normalize_unit_sphere, rotate_cloud, Axis, MixRatio, PointCloud};
use crate::emd::{
    assignment_cost, emd_approx, emd_bruteforce, emd_exact_capped, Assignment, SolverConfig,
};
use crate::error::{Error, Result};
use crate::mix::{mix_oa, mix_ps, mix_ra};
use crate::rng::{substream, Stream};
use crate::shapes::{sample_shape, ShapeKind, ShapeSpec};
use crate::vec3;

/// Relative tolerance for certificates backed by the exact solver.
pub const TOLERANCE_EXACT: f64 = 1e-9;
/// Relative tolerance for approximate-solver and point-sampling claims.
pub const TOLERANCE_APPROX: f64 = 5e-2;

/// One certified check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub n: usize,
    pub instances: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub lambda_grid: Vec<f64>,
    pub solver: String,
    pub population: String,
    pub skipped_degenerate: usize,
    /// Negative controls are expected NOT to pass.
    pub expect_fail: bool,
}

impl CheckRecord {
    /// True when the record behaves as intended: positive checks pass,
    /// negative controls fail.
    pub fn ok(&self) -> bool {
        self.pass != self.expect_fail
    }
}

/// The full report of a verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub master_seed: u64,
    pub records: Vec<CheckRecord>,
}

impl CertificateReport {
    pub fn all_ok(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(CheckRecord::ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat text table, one row per check.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<34} {:<7} {:<9} {:>5} {:>5} {:>5} {:>13} {:>9}  {}\n",
            "check", "solver", "pop", "n", "inst", "skip", "max_residual", "tol", "result"
        ));
        for r in &self.records {
            let result = match (r.pass, r.expect_fail) {
                (true, false) => "pass",
                (false, true) => "fail (expected)",
                (true, true) => "PASS (control broken)",
                (false, false) => "FAIL",
            };
            out.push_str(&format!(
                "{:<34} {:<7} {:<9} {:>5} {:>5} {:>5} {:>13.3e} {:>9.1e}  {}\n",
                r.name,
                r.solver,
                r.population,
                r.n,
                r.instances,
                r.skipped_degenerate,
                r.max_residual,
                r.tolerance,
                result
            ));
        }
        out
    }
}

/// Which solver a certificate runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Approx,
}

impl SolverKind {
    fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Approx => "approx",
        }
    }
}

/// Instance population the pairs are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    /// Unit-sphere-normalized Gaussian blobs.
    Gaussian,
    /// Cross-class pairs of analytic shapes with random headings.
    Shapes,
}

impl Population {
    fn as_str(&self) -> &'static str {
        match self {
            Population::Gaussian => "gaussian",
            Population::Shapes => "shapes",
        }
    }

    fn draw_pair(&self, n: usize, rng: &mut Stream) -> (PointCloud, PointCloud) {
        match self {
            Population::Gaussian => (gaussian_cloud(n, rng), gaussian_cloud(n, rng)),
            Population::Shapes => shape_pair(n, rng),
        }
    }
}

fn gaussian_cloud(n: usize, rng: &mut impl Rng) -> PointCloud {
    let pts = (0..n)
        .map(|_| {
            [
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
            ]
        })
        .collect();
    normalize_unit_sphere(&PointCloud::new(pts).expect("gaussian coordinates are finite"))
}

/// Two different shape classes, random aspect and heading each.
fn shape_pair(n: usize, rng: &mut Stream) -> (PointCloud, PointCloud) {
    let k1 = ShapeKind::ALL[rng.gen_range(0..ShapeKind::ALL.len())];
    let k2 = loop {
        let k = ShapeKind::ALL[rng.gen_range(0..ShapeKind::ALL.len())];
        if k != k1 {
            break k;
        }
    };
    let mut draw = |kind| {
        let spec = ShapeSpec::randomized(kind, rng);
        let cloud = sample_shape(&spec, n, rng).expect("shape sampling succeeds for n >= 1");
        let heading = rng.gen_range(0.0..std::f64::consts::TAU);
        rotate_cloud(&normalize_unit_sphere(&cloud), Axis::Z, heading)
    };
    (draw(k1), draw(k2))
}

/// Everything a single certificate needs.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub instances: usize,
    pub n: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub solver_kind: SolverKind,
    pub solver: SolverConfig,
    pub population: Population,
}

impl CheckConfig {
    fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::InvalidArgument("instance count must be >= 1".into()));
        }
        if self.n < 1 {
            return Err(Error::InvalidArgument("cloud size must be >= 1".into()));
        }
        if self.solver_kind == SolverKind::Exact && self.n > self.solver.exact_cap {
            return Err(Error::Capacity(format!(
                "N={} exceeds exact-solver cap {}; re-run with the approximate solver",
                self.n, self.solver.exact_cap
            )));
        }
        Ok(())
    }

    fn distance(&self, a: &PointCloud, b: &PointCloud) -> Result<f64> {
        match self.solver_kind {
            SolverKind::Exact => Ok(emd_exact_capped(a, b, self.solver.exact_cap)?.distance),
            SolverKind::Approx => Ok(emd_approx(a, b, self.solver.epsilon)?.distance),
        }
    }
}

/// Skip threshold for degenerate source pairs.
const DEGENERATE_DISTANCE: f64 = 1e-12;

struct InstanceOutcome {
    residual: Option<f64>,
}

fn run_instances<F>(cfg: &CheckConfig, salt: u64, per_instance: F) -> Result<(f64, usize)>
where
    F: Fn(&CheckConfig, &mut Stream) -> Result<Option<f64>> + Sync,
{
    let outcomes: Vec<Result<InstanceOutcome>> = (0..cfg.instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(cfg.seed ^ salt, k as u64);
            per_instance(cfg, &mut rng).map(|residual| InstanceOutcome { residual })
        })
        .collect();
    let mut max_residual: f64 = 0.0;
    let mut skipped = 0usize;
    for outcome in outcomes {
        match outcome?.residual {
            Some(r) => max_residual = max_residual.max(r),
            None => skipped += 1,
        }
    }
    Ok((max_residual, skipped))
}

fn record(
    name: &str,
    cfg: &CheckConfig,
    lambda_grid: Vec<f64>,
    max_residual: f64,
    skipped: usize,
    expect_fail: bool,
) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        n: cfg.n,
        instances: cfg.instances,
        max_residual,
        tolerance: cfg.tolerance,
        pass: max_residual <= cfg.tolerance,
        seed: cfg.seed,
        lambda_grid,
        solver: cfg.solver_kind.as_str().to_string(),
        population: cfg.population.as_str().to_string(),
        skipped_degenerate: skipped,
        expect_fail,
    }
}

/// The nine-point ratio grid used by the shortest-path certificates.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Default ratio pairs for the assignment-invariance and linearity
/// certificates.
pub fn default_lambda_pairs() -> Vec<(f64, f64)> {
    vec![(0.0, 1.0), (0.1, 0.3), (0.2, 0.8), (0.4, 0.6), (0.3, 0.9)]
}

/// Shortest-path certificate: for every ratio on the grid, the interpolant's
/// distances to its sources must sum to the source distance, and each leg
/// must not exceed its proportional share. The residual folds all three
/// relative errors together.
pub fn certify_shortest_path(cfg: &CheckConfig, lambda_grid: &[f64]) -> Result<CheckRecord> {
    cfg.validate()?;
    let grid = lambda_grid.to_vec();
    let (max_residual, skipped) = run_instances(cfg, 0x5031, |cfg, rng| {
        let (a, b) = cfg.population.draw_pair(cfg.n, rng);
        let d = cfg.distance(&a, &b)?;
        if d <= DEGENERATE_DISTANCE {
            return Ok(None);
        }
        let mut worst: f64 = 0.0;
        for &l in &grid {
            let lambda = MixRatio::new(l)?;
            let (mid, _) = mix_oa(&a, &b, lambda, &cfg.solver)?;
            let d1 = cfg.distance(&a, &mid)?;
            let d2 = cfg.distance(&mid, &b)?;
            let path = (d1 + d2 - d).abs();
            let bound1 = (d1 - l * d).max(0.0);
            let bound2 = (d2 - (1.0 - l) * d).max(0.0);
            worst = worst.max(path.max(bound1).max(bound2) / d);
        }
        Ok(Some(worst))
    })?;
    Ok(record(
        "shortest_path_oa",
        cfg,
        grid,
        max_residual,
        skipped,
        false,
    ))
}

/// Negative control: the same shortest-path residual evaluated on
/// random-assignment interpolants. This check is expected to fail.
pub fn certify_shortest_path_ra_control(
    cfg: &CheckConfig,
    lambda_grid: &[f64],
) -> Result<CheckRecord> {
    cfg.validate()?;
    let grid = lambda_grid.to_vec();
    let (max_residual, skipped) = run_instances(cfg, 0x5032, |cfg, rng| {
        let (a, b) = cfg.population.draw_pair(cfg.n, rng);
        let d = cfg.distance(&a, &b)?;
        if d <= DEGENERATE_DISTANCE {
            return Ok(None);
        }
        let mut worst: f64 = 0.0;
        for &l in &grid {
            let lambda = MixRatio::new(l)?;
            let mid = mix_ra(&a, &b, lambda, rng)?;
            let d1 = cfg.distance(&a, &mid)?;
            let d2 = cfg.distance(&mid, &b)?;
            worst = worst.max((d1 + d2 - d).abs() / d);
        }
        Ok(Some(worst))
    })?;
    Ok(record(
        "shortest_path_ra_control",
        cfg,
        grid,
        max_residual,
        skipped,
        true,
    ))
}

/// Assignment-invariance certificate: between two interpolants of the same
/// pair, the identity assignment's cost must equal the optimal cost.
pub fn certify_assignment_invariance(
    cfg: &CheckConfig,
    lambda_pairs: &[(f64, f64)],
) -> Result<CheckRecord> {
    cfg.validate()?;
    let pairs = lambda_pairs.to_vec();
    let (max_residual, skipped) = run_instances(cfg, 0x5033, |cfg, rng| {
        let (a, b) = cfg.population.draw_pair(cfg.n, rng);
        let base = emd_exact_capped(&a, &b, cfg.solver.exact_cap)?;
        if base.distance <= DEGENERATE_DISTANCE {
            return Ok(None);
        }
        let mut worst: f64 = 0.0;
        for &(l1, l2) in &pairs {
            let u = blend(&a, &b, &base.assignment, l1);
            let v = blend(&a, &b, &base.assignment, l2);
            let id_cost = assignment_cost(&u, &v, &Assignment::identity(u.len()))?;
            let optimal = cfg.distance(&u, &v)?;
            let denom = optimal.max(DEGENERATE_DISTANCE);
            worst = worst.max((id_cost - optimal).abs() / denom);
        }
        Ok(Some(worst))
    })?;
    Ok(record(
        "assignment_invariance_oa",
        cfg,
        flatten_pairs(&pairs),
        max_residual,
        skipped,
        false,
    ))
}

/// Linearity certificate: the distance between two interpolants must be the
/// ratio gap times the source distance.
pub fn certify_linearity(cfg: &CheckConfig, lambda_pairs: &[(f64, f64)]) -> Result<CheckRecord> {
    cfg.validate()?;
    let pairs = lambda_pairs.to_vec();
    let (max_residual, skipped) = run_instances(cfg, 0x5034, |cfg, rng| {
        let (a, b) = cfg.population.draw_pair(cfg.n, rng);
        let base = emd_exact_capped(&a, &b, cfg.solver.exact_cap)?;
        let d = base.distance;
        if d <= DEGENERATE_DISTANCE {
            return Ok(None);
        }
        let mut worst: f64 = 0.0;
        for &(l1, l2) in &pairs {
            let u = blend(&a, &b, &base.assignment, l1);
            let v = blend(&a, &b, &base.assignment, l2);
            let duv = cfg.distance(&u, &v)?;
            worst = worst.max((duv - (l2 - l1) * d).abs() / d);
        }
        Ok(Some(worst))
    })?;
    Ok(record(
        "linearity_oa",
        cfg,
        flatten_pairs(&pairs),
        max_residual,
        skipped,
        false,
    ))
}

/// Point-sampling linearity, the loose analogue of the exact certificate.
pub fn certify_linearity_ps(cfg: &CheckConfig, lambda_pairs: &[(f64, f64)]) -> Result<CheckRecord> {
    cfg.validate()?;
    let pairs = lambda_pairs.to_vec();
    let (max_residual, skipped) = run_instances(cfg, 0x5035, |cfg, rng| {
        let (a, b) = cfg.population.draw_pair(cfg.n, rng);
        let d = cfg.distance(&a, &b)?;
        if d <= DEGENERATE_DISTANCE {
            return Ok(None);
        }
        let mut worst: f64 = 0.0;
        for &(l1, l2) in &pairs {
            let u = mix_ps(&a, &b, MixRatio::new(l1)?, rng)?;
            let v = mix_ps(&a, &b, MixRatio::new(l2)?, rng)?;
            let duv = cfg.distance(&u, &v)?;
            worst = worst.max((duv - (l2 - l1) * d).abs() / d);
        }
        Ok(Some(worst))
    })?;
    Ok(record(
        "linearity_ps",
        cfg,
        flatten_pairs(&pairs),
        max_residual,
        skipped,
        false,
    ))
}

/// Shortest-path slack statistics for the two baseline interpolations at a
/// single ratio. Returns (ra record, ps record, median-ranking record).
pub fn certify_baseline_slack(
    cfg: &CheckConfig,
    lambda: f64,
) -> Result<(CheckRecord, CheckRecord, CheckRecord)> {
    cfg.validate()?;
    let per_pair: Vec<Result<Option<(f64, f64)>>> = (0..cfg.instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(cfg.seed ^ 0x5036, k as u64);
            let (a, b) = cfg.population.draw_pair(cfg.n, &mut rng);
            let d = cfg.distance(&a, &b)?;
            if d <= DEGENERATE_DISTANCE {
                return Ok(None);
            }
            let l = MixRatio::new(lambda)?;
            let ra = mix_ra(&a, &b, l, &mut rng)?;
            let ps = mix_ps(&a, &b, l, &mut rng)?;
            let slack = |mid: &PointCloud| -> Result<f64> {
                let d1 = cfg.distance(&a, mid)?;
                let d2 = cfg.distance(mid, &b)?;
                Ok((d1 + d2 - d) / d)
            };
            Ok(Some((slack(&ra)?, slack(&ps)?)))
        })
        .collect();

    let mut ra_slacks = Vec::new();
    let mut ps_slacks = Vec::new();
    let mut skipped = 0usize;
    for item in per_pair {
        match item? {
            Some((ra, ps)) => {
                ra_slacks.push(ra);
                ps_slacks.push(ps);
            }
            None => skipped += 1,
        }
    }
    if ra_slacks.is_empty() {
        return Err(Error::InvalidArgument(
            "all baseline-slack instances were degenerate".into(),
        ));
    }

    // RA: the fraction of pairs whose slack fails to be strictly positive
    // must stay under 1%.
    let nonpositive = ra_slacks.iter().filter(|&&s| s <= 0.0).count();
    let ra_record = CheckRecord {
        name: "ra_slack_positive".into(),
        n: cfg.n,
        instances: cfg.instances,
        max_residual: nonpositive as f64 / ra_slacks.len() as f64,
        tolerance: 0.01,
        pass: (nonpositive as f64 / ra_slacks.len() as f64) <= 0.01,
        seed: cfg.seed,
        lambda_grid: vec![lambda],
        solver: cfg.solver_kind.as_str().to_string(),
        population: cfg.population.as_str().to_string(),
        skipped_degenerate: skipped,
        expect_fail: false,
    };

    // PS: worst relative slack must stay under the approximate tolerance.
    let ps_max = ps_slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ps_record = CheckRecord {
        name: "ps_slack".into(),
        n: cfg.n,
        instances: cfg.instances,
        max_residual: ps_max,
        tolerance: cfg.tolerance,
        pass: ps_max <= cfg.tolerance,
        seed: cfg.seed,
        lambda_grid: vec![lambda],
        solver: cfg.solver_kind.as_str().to_string(),
        population: cfg.population.as_str().to_string(),
        skipped_degenerate: skipped,
        expect_fail: false,
    };

    // Ranking: the RA median slack must strictly exceed the PS median.
    let ranking_residual = median(&ps_slacks) - median(&ra_slacks);
    let ranking_record = CheckRecord {
        name: "ra_vs_ps_median_slack".into(),
        n: cfg.n,
        instances: cfg.instances,
        max_residual: ranking_residual,
        tolerance: 0.0,
        pass: ranking_residual < 0.0,
        seed: cfg.seed,
        lambda_grid: vec![lambda],
        solver: cfg.solver_kind.as_str().to_string(),
        population: cfg.population.as_str().to_string(),
        skipped_degenerate: skipped,
        expect_fail: false,
    };

    Ok((ra_record, ps_record, ranking_record))
}

/// Oracle agreement: the exact solver must reproduce the brute-force minimum
/// for every N in `2..=7`.
pub fn certify_exact_vs_bruteforce(seed: u64, pairs_per_n: usize) -> Result<CheckRecord> {
    if pairs_per_n == 0 {
        return Err(Error::InvalidArgument("instance count must be >= 1".into()));
    }
    let sizes: Vec<usize> = (2..=7).collect();
    let worst: Vec<Result<f64>> = sizes
        .par_iter()
        .map(|&n| {
            let mut max_diff: f64 = 0.0;
            for k in 0..pairs_per_n {
                let mut rng = substream(seed ^ 0x5037, (n * 10_000 + k) as u64);
                let a = gaussian_cloud(n, &mut rng);
                let b = gaussian_cloud(n, &mut rng);
                let exact = emd_exact_capped(&a, &b, 8)?;
                let brute = emd_bruteforce(&a, &b)?;
                max_diff = max_diff.max((exact.distance - brute.distance).abs());
            }
            Ok(max_diff)
        })
        .collect();
    let mut max_residual: f64 = 0.0;
    for w in worst {
        max_residual = max_residual.max(w?);
    }
    Ok(CheckRecord {
        name: "exact_matches_bruteforce".into(),
        n: 7,
        instances: pairs_per_n * sizes.len(),
        max_residual,
        tolerance: 1e-12,
        pass: max_residual <= 1e-12,
        seed,
        lambda_grid: vec![],
        solver: "exact".into(),
        population: "gaussian".into(),
        skipped_degenerate: 0,
        expect_fail: false,
    })
}

/// Auction quality against the exact solver: mean and max relative cost
/// error over random pairs.
pub fn certify_approx_quality(
    seed: u64,
    n: usize,
    pairs: usize,
    epsilon: f64,
) -> Result<(CheckRecord, CheckRecord)> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("instance count must be >= 1".into()));
    }
    let errors: Vec<Result<f64>> = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed ^ 0x5038, k as u64);
            let a = gaussian_cloud(n, &mut rng);
            let b = gaussian_cloud(n, &mut rng);
            let exact = emd_exact_capped(&a, &b, n)?.distance;
            let approx = emd_approx(&a, &b, epsilon)?.distance;
            Ok((approx - exact) / exact)
        })
        .collect();
    let mut values = Vec::with_capacity(pairs);
    for e in errors {
        values.push(e?);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let base = |name: &str, residual: f64, tol: f64| CheckRecord {
        name: name.into(),
        n,
        instances: pairs,
        max_residual: residual,
        tolerance: tol,
        pass: residual <= tol,
        seed,
        lambda_grid: vec![],
        solver: "approx".into(),
        population: "gaussian".into(),
        skipped_degenerate: 0,
        expect_fail: false,
    };
    Ok((
        base("approx_mean_error", mean, 0.01),
        base("approx_max_error", max, 0.03),
    ))
}

fn blend(a: &PointCloud, b: &PointCloud, assignment: &Assignment, l: f64) -> PointCloud {
    let points = assignment
        .perm()
        .iter()
        .enumerate()
        .map(|(i, &j)| vec3::lerp(a.points()[i], b.points()[j], l))
        .collect();
    PointCloud::new(points).expect("blend of finite points is finite")
}

fn flatten_pairs(pairs: &[(f64, f64)]) -> Vec<f64> {
    pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite slacks"));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Which subset of certificates to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    ShortestPath,
    AssignmentInvariance,
    Linearity,
    PointSampling,
    RandomAssignment,
}

/// Configuration for a full verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Instances per exact-solver certificate.
    pub instances: usize,
    /// Cloud size for exact-solver certificates.
    pub n: usize,
    /// Instances for the large approximate checks.
    pub large_instances: usize,
    /// Cloud size for the large approximate checks.
    pub large_n: usize,
    pub solver: SolverConfig,
    /// Run property certificates on the approximate solver (needed when
    /// `n` exceeds the exact cap); loosens their tolerance.
    pub approx_ok: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 200,
            n: 64,
            large_instances: 100,
            large_n: 1024,
            solver: SolverConfig::default(),
            approx_ok: false,
        }
    }
}

impl VerifyConfig {
    fn property_check(&self, population: Population) -> CheckConfig {
        let approx = self.approx_ok && self.n > self.solver.exact_cap;
        CheckConfig {
            instances: self.instances,
            n: self.n,
            tolerance: if approx { TOLERANCE_APPROX } else { TOLERANCE_EXACT },
            seed: self.seed,
            solver_kind: if approx { SolverKind::Approx } else { SolverKind::Exact },
            solver: self.solver,
            population,
        }
    }

    fn large_check(&self, tolerance: f64) -> CheckConfig {
        CheckConfig {
            instances: self.large_instances,
            n: self.large_n,
            tolerance,
            seed: self.seed,
            solver_kind: if self.large_n <= self.solver.exact_cap {
                SolverKind::Exact
            } else {
                SolverKind::Approx
            },
            solver: self.solver,
            population: Population::Shapes,
        }
    }
}

/// Runs the requested suite and assembles the report.
pub fn run_suite(cfg: &VerifyConfig, suite: Suite) -> Result<CertificateReport> {
    let mut records = Vec::new();
    let grid = default_lambda_grid();
    let pairs = default_lambda_pairs();

    if matches!(suite, Suite::All | Suite::ShortestPath) {
        records.push(certify_shortest_path(
            &cfg.property_check(Population::Gaussian),
            &grid,
        )?);
        let mut shape_cfg = cfg.property_check(Population::Shapes);
        shape_cfg.instances = (cfg.instances / 4).max(1);
        records.push(with_name(
            certify_shortest_path(&shape_cfg, &grid)?,
            "shortest_path_oa_shapes",
        ));
    }
    if matches!(suite, Suite::All | Suite::AssignmentInvariance) {
        records.push(certify_assignment_invariance(
            &cfg.property_check(Population::Gaussian),
            &pairs,
        )?);
    }
    if matches!(suite, Suite::All | Suite::Linearity) {
        records.push(certify_linearity(
            &cfg.property_check(Population::Gaussian),
            &pairs,
        )?);
    }
    if matches!(suite, Suite::All | Suite::RandomAssignment) {
        let mut control_cfg = cfg.property_check(Population::Gaussian);
        control_cfg.instances = (cfg.instances / 4).max(1);
        records.push(certify_shortest_path_ra_control(&control_cfg, &grid)?);
    }
    if matches!(
        suite,
        Suite::All | Suite::PointSampling | Suite::RandomAssignment
    ) {
        let (ra, ps, ranking) = certify_baseline_slack(&cfg.large_check(TOLERANCE_APPROX), 0.5)?;
        match suite {
            Suite::PointSampling => records.push(ps),
            Suite::RandomAssignment => {
                records.push(ra);
                records.push(ranking);
            }
            _ => {
                records.push(ra);
                records.push(ps);
                records.push(ranking);
            }
        }
    }
    if matches!(suite, Suite::All | Suite::PointSampling) {
        records.push(certify_linearity_ps(
            &cfg.large_check(TOLERANCE_APPROX),
            &pairs,
        )?);
    }
    if suite == Suite::All {
        records.push(certify_exact_vs_bruteforce(cfg.seed, 100)?);
        let (mean, max) = certify_approx_quality(cfg.seed, 128, 50, cfg.solver.epsilon)?;
        records.push(mean);
        records.push(max);
    }

    Ok(CertificateReport {
        master_seed: cfg.seed,
        records,
    })
}

/// Runs every certificate with one master seed.
pub fn run_all(cfg: &VerifyConfig) -> Result<CertificateReport> {
    run_suite(cfg, Suite::All)
}

fn with_name(mut record: CheckRecord, name: &str) -> CheckRecord {
    record.name = name.to_string();
    record
}
