//! Accept/reject ABC over a reference table, and linear regression adjustment
//! of the accepted draws.

mod io;

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::{ceil_tolerant, factor_spd};
use crate::rng::SeedPath;
use crate::summaries::SummaryVector;

pub use io::{read_table_cache, write_table_cache, write_table_csv, CACHE_MAGIC};

/// Retries per table slot before a simulator failure surfaces.
pub const MAX_RETRIES: usize = 100;

/// √Σ wⱼ(uⱼ − vⱼ)², unit weights by default.
pub fn euclidean_distance(u: &[f64], v: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { expected: u.len(), got: v.len() });
    }
    if let Some(w) = weights {
        if w.len() != u.len() {
            return Err(Error::LengthMismatch { expected: u.len(), got: w.len() });
        }
    }
    Ok(distance_unchecked(u, v, weights))
}

#[inline]
fn distance_unchecked(u: &[f64], v: &[f64], weights: Option<&[f64]>) -> f64 {
    let ss: f64 = match weights {
        None => u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum(),
        Some(w) => u.iter().zip(v).zip(w).map(|((a, b), w)| w * (a - b) * (a - b)).sum(),
    };
    ss.sqrt()
}

/// δ = ⌈αN⌉, at least 1.
pub fn accepted_count(alpha: f64, n_rows: usize) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("acceptance fraction must lie in (0, 1], got {alpha}")));
    }
    Ok((ceil_tolerant(alpha * n_rows as f64) as usize).clamp(1, n_rows.max(1)))
}

/// Prior draws and their simulated summaries, stored row-major. Independent
/// of any observed data, so one table can serve many observed datasets.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTable {
    pub k_theta: usize,
    pub k_eta: usize,
    pub draws: Vec<f64>,
    pub summaries: Vec<f64>,
    /// Pseudo-data size each row was simulated at.
    pub n: usize,
    pub seed: SeedPath,
    /// Slots that needed at least one resimulation.
    pub resimulated: usize,
}

impl SimulationTable {
    pub fn n_rows(&self) -> usize {
        self.draws.len().checked_div(self.k_theta).unwrap_or(0)
    }

    pub fn draw(&self, i: usize) -> &[f64] {
        &self.draws[i * self.k_theta..(i + 1) * self.k_theta]
    }

    pub fn summary(&self, i: usize) -> &[f64] {
        &self.summaries[i * self.k_eta..(i + 1) * self.k_eta]
    }
}

/// Draw from the prior, simulate, summarize; slot `i` uses seed path
/// `seed/i`, and its retries `seed/i/attempt`.
fn simulate_slot<M: ModelSpec>(model: &M, n: usize, slot: usize, seed: &SeedPath) -> Result<(Vec<f64>, SummaryVector, bool)> {
    let base = seed.child(slot as u64);
    let mut last = String::new();
    for attempt in 0..=MAX_RETRIES {
        let path = if attempt == 0 { base.clone() } else { base.child(attempt as u64) };
        let mut s = path.stream();
        let theta = model.prior().sample(&mut s);
        match model.simulate_summaries(&theta, n, &mut s) {
            Ok(eta) if eta.is_finite() => return Ok((theta, eta, attempt > 0)),
            Ok(_) => last = "non-finite summaries".into(),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::SimulationFailed { slot, retries: MAX_RETRIES, reason: last })
}

/// Fills an N-row table in parallel. The result does not depend on the
/// number of worker threads.
pub fn simulate_table<M: ModelSpec>(model: &M, n_rows: usize, n: usize, seed: &SeedPath) -> Result<SimulationTable> {
    if n_rows == 0 {
        return Err(Error::InvalidParameter("reference table needs at least one row".into()));
    }
    let (k_theta, k_eta) = (model.k_theta(), model.k_eta());
    const CHUNK: usize = 256;
    let chunks: Vec<(Vec<f64>, Vec<f64>, usize)> = (0..n_rows.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n_rows);
            let mut draws = Vec::with_capacity((hi - lo) * k_theta);
            let mut sums = Vec::with_capacity((hi - lo) * k_eta);
            let mut retried = 0;
            for i in lo..hi {
                let (theta, eta, r) = simulate_slot(model, n, i, seed)?;
                if eta.len() != k_eta {
                    return Err(Error::LengthMismatch { expected: k_eta, got: eta.len() });
                }
                draws.extend_from_slice(&theta);
                sums.extend_from_slice(&eta);
                retried += usize::from(r);
            }
            Ok((draws, sums, retried))
        })
        .collect::<Result<_>>()?;
    let mut table = SimulationTable {
        k_theta,
        k_eta,
        draws: Vec::with_capacity(n_rows * k_theta),
        summaries: Vec::with_capacity(n_rows * k_eta),
        n,
        seed: seed.clone(),
        resimulated: 0,
    };
    for (d, s, r) in chunks {
        table.draws.extend(d);
        table.summaries.extend(s);
        table.resimulated += r;
    }
    Ok(table)
}

/// A simulation table together with each row's distance to the observed
/// summaries.
#[derive(Clone, Debug)]
pub struct ReferenceTable {
    pub sims: Arc<SimulationTable>,
    pub distances: Vec<f64>,
    pub eta_obs: SummaryVector,
    pub alpha: f64,
    pub weights: Option<Vec<f64>>,
}

impl ReferenceTable {
    pub fn new(sims: Arc<SimulationTable>, eta_obs: SummaryVector, alpha: f64, weights: Option<Vec<f64>>) -> Result<Self> {
        if eta_obs.len() != sims.k_eta {
            return Err(Error::LengthMismatch { expected: sims.k_eta, got: eta_obs.len() });
        }
        if let Some(w) = &weights {
            if w.len() != sims.k_eta || w.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::InvalidParameter("distance weights must be positive, one per summary".into()));
            }
        }
        accepted_count(alpha, sims.n_rows())?;
        let distances = distances_to(&sims, &eta_obs, weights.as_deref());
        Ok(Self { sims, distances, eta_obs, alpha, weights })
    }

    pub fn n_rows(&self) -> usize {
        self.distances.len()
    }

    pub fn delta(&self) -> usize {
        accepted_count(self.alpha, self.n_rows()).expect("validated at construction")
    }

    /// Mean distance of all rows to `target`.
    pub fn mean_distance_to(&self, target: &[f64]) -> f64 {
        let w = self.weights.as_deref();
        let total: f64 = (0..self.n_rows()).map(|i| distance_unchecked(self.sims.summary(i), target, w)).sum();
        total / self.n_rows() as f64
    }

    /// The δ rows closest to the observed summaries.
    pub fn accept(&self) -> AcceptedSet {
        let idx = smallest_indices(&self.distances, self.delta());
        AcceptedSet::from_rows(&self.sims, &idx, &self.distances)
    }

    /// The δ rows closest to another target, e.g. a pseudo-observed row.
    pub fn accept_nearest(&self, target: &[f64]) -> AcceptedSet {
        let d = distances_to(&self.sims, target, self.weights.as_deref());
        let idx = smallest_indices(&d, self.delta());
        AcceptedSet::from_rows(&self.sims, &idx, &d)
    }
}

fn distances_to(sims: &SimulationTable, target: &[f64], weights: Option<&[f64]>) -> Vec<f64> {
    (0..sims.n_rows())
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| distance_unchecked(sims.summary(i), target, weights))
        .collect()
}

/// Indices of the `k` smallest values in ascending order, ties to the lower
/// index.
pub fn smallest_indices(values: &[f64], k: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| values[*a].total_cmp(&values[*b]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let k = k.min(values.len());
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Accepted rows, in increasing distance order.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceptedSet {
    /// Row indices into the reference table.
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    /// δ×k_θ
    pub draws: DMatrix<f64>,
    /// δ×k_η
    pub summaries: DMatrix<f64>,
    /// δ×k_θ, present after [`regression_adjust`].
    pub adjusted: Option<DMatrix<f64>>,
    /// k_η×k_θ regression coefficients used for the adjustment.
    pub coefficients: Option<DMatrix<f64>>,
}

impl AcceptedSet {
    pub fn from_rows(sims: &SimulationTable, idx: &[usize], distances: &[f64]) -> Self {
        let draws = DMatrix::from_fn(idx.len(), sims.k_theta, |r, c| sims.draw(idx[r])[c]);
        let summaries = DMatrix::from_fn(idx.len(), sims.k_eta, |r, c| sims.summary(idx[r])[c]);
        Self {
            indices: idx.to_vec(),
            distances: idx.iter().map(|&i| distances[i]).collect(),
            draws,
            summaries,
            adjusted: None,
            coefficients: None,
        }
    }

    /// Builds a set directly from draw and summary matrices (rows aligned).
    pub fn from_matrices(draws: DMatrix<f64>, summaries: DMatrix<f64>) -> Result<Self> {
        if draws.nrows() != summaries.nrows() {
            return Err(Error::LengthMismatch { expected: draws.nrows(), got: summaries.nrows() });
        }
        let d = draws.nrows();
        Ok(Self {
            indices: (0..d).collect(),
            distances: vec![0.0; d],
            draws,
            summaries,
            adjusted: None,
            coefficients: None,
        })
    }

    pub fn delta(&self) -> usize {
        self.draws.nrows()
    }

    /// Adjusted draws if present and requested, raw draws otherwise.
    pub fn selected(&self, use_adjusted: bool) -> Result<&DMatrix<f64>> {
        if use_adjusted {
            self.adjusted.as_ref().ok_or(Error::NoAdjustment)
        } else {
            Ok(&self.draws)
        }
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Simulates an N-row table under `model` at pseudo-data size `n` and keeps
/// the δ = ⌈αN⌉ rows closest to `eta_obs`.
pub fn abc_reject<M: ModelSpec>(
    model: &M,
    eta_obs: &SummaryVector,
    n_rows: usize,
    alpha: f64,
    n: usize,
    seed: &SeedPath,
) -> Result<(ReferenceTable, AcceptedSet)> {
    accepted_count(alpha, n_rows)?;
    let sims = Arc::new(simulate_table(model, n_rows, n, seed)?);
    let table = ReferenceTable::new(sims, eta_obs.clone(), alpha, None)?;
    let accepted = table.accept();
    Ok((table, accepted))
}

/// Column means of the raw or adjusted draws.
pub fn posterior_mean(accepted: &AcceptedSet, use_adjusted: bool) -> Result<Vec<f64>> {
    let m = accepted.selected(use_adjusted)?;
    if m.nrows() == 0 {
        return Err(Error::EmptySample);
    }
    Ok(m.column_iter().map(|c| c.mean()).collect())
}

/// Linear regression adjustment: β̂ = S_ηη⁻¹ S_ηθ from the centered accepted
/// summaries and draws, and θ̃ⁱ = θⁱ + β̂ᵀ(η(y) − η(zⁱ)).
pub fn regression_adjust(accepted: &AcceptedSet, eta_obs: &[f64]) -> Result<AcceptedSet> {
    let (d, k_eta) = accepted.summaries.shape();
    if eta_obs.len() != k_eta {
        return Err(Error::LengthMismatch { expected: k_eta, got: eta_obs.len() });
    }
    if d <= k_eta + 1 {
        return Err(Error::InsufficientData { needed: k_eta + 2, got: d });
    }
    let eta_bar = accepted.summaries.row_mean();
    let theta_bar = accepted.draws.row_mean();
    let mut ce = accepted.summaries.clone();
    for mut r in ce.row_iter_mut() {
        r -= &eta_bar;
    }
    let mut ct = accepted.draws.clone();
    for mut r in ct.row_iter_mut() {
        r -= &theta_bar;
    }
    let scale = 1.0 / d as f64;
    let s_ee = ce.tr_mul(&ce) * scale;
    let s_et = ce.tr_mul(&ct) * scale;
    let f = factor_spd(&s_ee).ok_or(Error::SingularSummaryCovariance)?;
    let beta = f.solve_matrix(&s_et);

    let diff = DMatrix::from_fn(d, k_eta, |r, c| eta_obs[c] - accepted.summaries[(r, c)]);
    let adjusted = &accepted.draws + &diff * &beta;
    let mut out = accepted.clone();
    out.adjusted = Some(adjusted);
    out.coefficients = Some(beta);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::NormalModel;
    use proptest::prelude::*;

    fn table_from(draws: Vec<f64>, summaries: Vec<f64>, k_theta: usize, k_eta: usize) -> Arc<SimulationTable> {
        Arc::new(SimulationTable { k_theta, k_eta, draws, summaries, n: 1, seed: SeedPath::new(0), resimulated: 0 })
    }

    #[test]
    fn distance_examples() {
        assert_eq!(euclidean_distance(&[1.0, 2.0], &[1.0, 2.0], None).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[3.0, 4.0], &[0.0, 0.0], None).unwrap(), 5.0);
        let w = euclidean_distance(&[3.0, 4.0], &[0.0, 0.0], Some(&[1.0, 0.25])).unwrap();
        assert!((w - 13f64.sqrt()).abs() < 1e-15);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0], None).is_err());
    }

    #[test]
    fn accepts_smallest_distance() {
        let sims = table_from(vec![10.0, 20.0, 30.0], vec![0.5, 0.2, 0.9], 1, 1);
        let t = ReferenceTable::new(sims, vec![0.0].into(), 1.0 / 3.0, None).unwrap();
        let a = t.accept();
        assert_eq!(a.indices, vec![1]);
        assert_eq!(a.draws[(0, 0)], 20.0);

        let all = ReferenceTable::new(t.sims.clone(), vec![0.0].into(), 1.0, None).unwrap().accept();
        assert_eq!(all.indices, vec![1, 0, 2]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let sims = table_from(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, -1.0, 1.0, 0.5], 1, 1);
        let t = ReferenceTable::new(sims, vec![0.0].into(), 0.75, None).unwrap();
        assert_eq!(t.accept().indices, vec![3, 0, 1]);
    }

    #[test]
    fn delta_rounding() {
        assert_eq!(accepted_count(0.01, 50_000).unwrap(), 500);
        assert_eq!(accepted_count(0.001, 100_000).unwrap(), 100);
        assert_eq!(accepted_count(0.00025, 500_000).unwrap(), 125);
        assert_eq!(accepted_count(0.3, 10).unwrap(), 3);
        assert_eq!(accepted_count(0.31, 10).unwrap(), 4);
        assert!(accepted_count(0.0, 10).is_err());
    }

    #[test]
    fn posterior_mean_examples() {
        let a = AcceptedSet::from_matrices(
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 4.0]),
            DMatrix::zeros(2, 1),
        )
        .unwrap();
        assert_eq!(posterior_mean(&a, false).unwrap(), vec![1.0, 2.0]);
        assert!(matches!(posterior_mean(&a, true), Err(Error::NoAdjustment)));
    }

    #[test]
    fn adjustment_hand_example() {
        let a = AcceptedSet::from_matrices(
            DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]),
            DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]),
        )
        .unwrap();
        let adj = regression_adjust(&a, &[2.0]).unwrap();
        assert!((adj.coefficients.as_ref().unwrap()[(0, 0)] - 1.0).abs() < 1e-14);
        for v in adj.adjusted.as_ref().unwrap().iter() {
            assert!((v - 2.0).abs() < 1e-14);
        }
        assert_eq!(adj.draws, a.draws);
    }

    #[test]
    fn adjustment_vanishes_at_observed_summaries() {
        let mut s = SeedPath::new(1).stream();
        let draws = DMatrix::from_fn(20, 2, |_, _| s.normal());
        let summaries = DMatrix::from_fn(20, 3, |_, _| s.normal());
        let a = AcceptedSet::from_matrices(draws, summaries).unwrap();
        for r in 0..20 {
            let obs: Vec<f64> = a.summaries.row(r).iter().copied().collect();
            let adj = regression_adjust(&a, &obs).unwrap();
            let row = adj.adjusted.as_ref().unwrap().row(r).clone_owned();
            assert!((row - a.draws.row(r)).norm() < 1e-12);
        }
    }

    /// Independent multi-output least squares: Gauss–Jordan elimination on
    /// the augmented centered normal equations.
    fn oracle_beta(theta: &DMatrix<f64>, eta: &DMatrix<f64>) -> DMatrix<f64> {
        let (d, ke) = eta.shape();
        let kt = theta.ncols();
        let em: Vec<f64> = (0..ke).map(|j| (0..d).map(|i| eta[(i, j)]).sum::<f64>() / d as f64).collect();
        let tm: Vec<f64> = (0..kt).map(|j| (0..d).map(|i| theta[(i, j)]).sum::<f64>() / d as f64).collect();
        let mut aug = vec![vec![0.0; ke + kt]; ke];
        for a in 0..ke {
            for i in 0..d {
                let ea = eta[(i, a)] - em[a];
                for b in 0..ke {
                    aug[a][b] += ea * (eta[(i, b)] - em[b]);
                }
                for c in 0..kt {
                    aug[a][ke + c] += ea * (theta[(i, c)] - tm[c]);
                }
            }
        }
        for col in 0..ke {
            let piv = (col..ke).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs())).unwrap();
            aug.swap(col, piv);
            let p = aug[col][col];
            for v in aug[col].iter_mut() {
                *v /= p;
            }
            for r in 0..ke {
                if r != col {
                    let f = aug[r][col];
                    for c in 0..ke + kt {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
        DMatrix::from_fn(ke, kt, |r, c| aug[r][ke + c])
    }

    #[test]
    fn coefficients_match_oracle_on_random_instances() {
        let mut s = SeedPath::new(7).stream();
        for _ in 0..200 {
            let ke = 1 + s.index(5);
            let kt = 1 + s.index(4);
            let d = ke + 3 + s.index(40);
            let eta = DMatrix::from_fn(d, ke, |_, _| s.normal());
            let theta = DMatrix::from_fn(d, kt, |_, _| s.normal());
            let a = AcceptedSet::from_matrices(theta.clone(), eta.clone()).unwrap();
            let obs: Vec<f64> = (0..ke).map(|_| s.normal()).collect();
            let beta = regression_adjust(&a, &obs).unwrap().coefficients.unwrap();
            let oracle = oracle_beta(&theta, &eta);
            for (x, y) in beta.iter().zip(oracle.iter()) {
                assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn adjustment_residuals_orthogonal_to_summaries() {
        let mut s = SeedPath::new(8).stream();
        let (d, ke, kt) = (60, 4, 2);
        let eta = DMatrix::from_fn(d, ke, |_, _| s.normal());
        let theta = DMatrix::from_fn(d, kt, |r, c| eta[(r, c)] * 0.7 + s.normal());
        let a = AcceptedSet::from_matrices(theta.clone(), eta.clone()).unwrap();
        let beta = regression_adjust(&a, &[0.0; 4]).unwrap().coefficients.unwrap();
        let mut ce = eta.clone();
        let em = eta.row_mean();
        for mut r in ce.row_iter_mut() {
            r -= &em;
        }
        let mut ct = theta.clone();
        let tm = theta.row_mean();
        for mut r in ct.row_iter_mut() {
            r -= &tm;
        }
        let resid = &ct - &ce * &beta;
        let cross = ce.tr_mul(&resid);
        assert!(cross.amax() <= 1e-8 * ce.norm() * ct.norm());
    }

    #[test]
    fn normal_example_delta_and_sanity() {
        let model = NormalModel::default();
        let obs = vec![0.0, 1.0].into();
        let (t, a) = abc_reject(&model, &obs, 50_000, 0.01, 100, &SeedPath::new(11)).unwrap();
        assert_eq!(a.delta(), 500);
        assert_eq!(t.n_rows(), 50_000);
        let m = posterior_mean(&a, false).unwrap()[0];
        let sd = (a.draws.column(0).iter().map(|v| (v - m).powi(2)).sum::<f64>() / 500.0).sqrt();
        assert!(m.abs() < 3.0 * sd);
        // every accepted distance ≤ every rejected one
        let max_acc = a.max_distance();
        let accepted: std::collections::HashSet<_> = a.indices.iter().collect();
        for (i, d) in t.distances.iter().enumerate() {
            if !accepted.contains(&i) {
                assert!(*d >= max_acc);
            }
        }
    }

    #[test]
    fn table_invariant_to_worker_count() {
        let model = NormalModel::default();
        let seed = SeedPath::from_parts(5, &[2]);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| simulate_table(&model, 3000, 50, &seed)).unwrap();
        let b = four.install(|| simulate_table(&model, 3000, 50, &seed)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn acceptance_is_monotone_in_alpha(
            dist in prop::collection::vec(0.0f64..3.0, 5..80),
            a1 in 0.01f64..1.0, a2 in 0.01f64..1.0,
        ) {
            let n = dist.len();
            let sims = table_from((0..n).map(|i| i as f64).collect(), dist.clone(), 1, 1);
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let small = ReferenceTable::new(sims.clone(), vec![0.0].into(), lo, None).unwrap().accept();
            let big = ReferenceTable::new(sims, vec![0.0].into(), hi, None).unwrap().accept();
            let bigset: std::collections::HashSet<_> = big.indices.iter().collect();
            prop_assert!(small.indices.iter().all(|i| bigset.contains(i)));
        }

        #[test]
        fn adjusted_draws_invariant_to_affine_summaries(
            scale in prop::collection::vec(0.2f64..5.0, 3),
            shift in prop::collection::vec(-5.0f64..5.0, 3),
            seed in 0u64..1000,
        ) {
            let mut s = SeedPath::new(seed).stream();
            let eta = DMatrix::from_fn(30, 3, |_, _| s.normal());
            let theta = DMatrix::from_fn(30, 2, |r, c| eta[(r, c)] + 0.5 * s.normal());
            let obs = [0.1, -0.2, 0.3];
            let a = AcceptedSet::from_matrices(theta.clone(), eta.clone()).unwrap();
            let base = regression_adjust(&a, &obs).unwrap().adjusted.unwrap();
            let eta2 = DMatrix::from_fn(30, 3, |r, c| scale[c] * eta[(r, c)] + shift[c]);
            let obs2: Vec<f64> = (0..3).map(|c| scale[c] * obs[c] + shift[c]).collect();
            let b = AcceptedSet::from_matrices(theta, eta2).unwrap();
            let moved = regression_adjust(&b, &obs2).unwrap().adjusted.unwrap();
            prop_assert!((base - moved).amax() < 1e-9);
        }
    }
}
