//! Parametric synthetic distributions and dataset plumbing.
//!
//! These distributions stand in for real member/auxiliary datasets: a member
//! distribution the target generator trains on, and an auxiliary distribution
//! of a similar-but-shifted domain the attacker samples from. Domain
//! similarity is a scalar `shift` knob, overlap is a mixing ratio, and the
//! in/out split is an index-disjoint partition.

use crate::error::{Error, Result};
use crate::rng::{RngSeed, StreamRng};
use serde::{Deserialize, Serialize};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;

/// A parametric data distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    GaussianMixture {
        dim: usize,
        /// Component weights on the simplex (sum to 1 within 1e-12).
        weights: Vec<f64>,
        /// `k` rows of `dim` component means.
        means: Vec<Vec<f64>>,
        /// `k` rows of `dim` per-axis standard deviations, all positive.
        diag_stds: Vec<Vec<f64>>,
    },
    TwoMoons {
        dim: usize,
        noise_std: f64,
        offset: Vec<f64>,
        scale: f64,
    },
    Ring {
        dim: usize,
        noise_std: f64,
        offset: Vec<f64>,
        scale: f64,
    },
}

impl DistributionSpec {
    /// Isotropic Gaussian mixture helper: equal weights, shared std.
    pub fn isotropic_mixture(means: Vec<Vec<f64>>, std: f64) -> Self {
        let k = means.len();
        let dim = means[0].len();
        DistributionSpec::GaussianMixture {
            dim,
            weights: vec![1.0 / k as f64; k],
            diag_stds: vec![vec![std; dim]; k],
            means,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::GaussianMixture { dim, .. }
            | DistributionSpec::TwoMoons { dim, .. }
            | DistributionSpec::Ring { dim, .. } => *dim,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DistributionSpec::GaussianMixture { .. } => "gaussian_mixture",
            DistributionSpec::TwoMoons { .. } => "two_moons",
            DistributionSpec::Ring { .. } => "ring",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(Error::Config(format!(
                "dim {dim} outside supported range {MIN_DIM}..={MAX_DIM}"
            )));
        }
        match self {
            DistributionSpec::GaussianMixture {
                dim,
                weights,
                means,
                diag_stds,
            } => {
                if weights.is_empty() || means.len() != weights.len() || diag_stds.len() != weights.len() {
                    return Err(Error::Config("mixture component counts disagree".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Config(format!("mixture weights sum to {total}, not 1")));
                }
                if weights.iter().any(|&w| w < 0.0) {
                    return Err(Error::Config("negative mixture weight".into()));
                }
                for (mu, sd) in means.iter().zip(diag_stds) {
                    if mu.len() != *dim || sd.len() != *dim {
                        return Err(Error::Config("mixture component dim mismatch".into()));
                    }
                    if sd.iter().any(|&s| s <= 0.0) {
                        return Err(Error::Config("mixture stds must be positive".into()));
                    }
                }
            }
            DistributionSpec::TwoMoons { dim, noise_std, offset, scale }
            | DistributionSpec::Ring { dim, noise_std, offset, scale } => {
                if offset.len() != *dim {
                    return Err(Error::Config("offset dim mismatch".into()));
                }
                if *noise_std < 0.0 {
                    return Err(Error::Config("noise_std must be nonnegative".into()));
                }
                if *scale <= 0.0 {
                    return Err(Error::Config("scale must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Sampled { spec_kind: String, seed: RngSeed },
    Generated { generator_id: String, sampler_ignored: bool },
    Mixed,
}

/// A flat row-major collection of `n` points of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(dim: usize, points: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(Error::ShapeMismatch(format!(
                "flat len {} is not a multiple of dim {dim}",
                points.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite point".into()));
        }
        Ok(Dataset { dim, points, provenance })
    }

    pub fn empty(dim: usize, provenance: Provenance) -> Self {
        Dataset { dim, points: Vec::new(), provenance }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dim)
    }

    pub fn push(&mut self, point: &[f64]) {
        assert_eq!(point.len(), self.dim);
        self.points.extend_from_slice(point);
    }

    /// New dataset from the given row indices (may repeat or reorder).
    pub fn select(&self, indices: &[usize], provenance: Provenance) -> Dataset {
        let mut points = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            points.extend_from_slice(self.point(i));
        }
        Dataset { dim: self.dim, points, provenance }
    }

    /// Per-coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.iter_points() {
            for (a, &x) in m.iter_mut().zip(p) {
                *a += x;
            }
        }
        let n = self.len().max(1) as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// CSV export: header `dim=<d>`, one point per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 12);
        out.push_str(&format!("dim={}\n", self.dim));
        for p in self.iter_points() {
            let row: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse the CSV format written by [`Dataset::to_csv`].
    pub fn from_csv(text: &str) -> Result<Dataset> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty dataset csv".into()))?;
        let dim: usize = header
            .strip_prefix("dim=")
            .ok_or_else(|| Error::Parse(format!("bad dataset header {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad dim: {e}")))?;
        if dim == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let mut points = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
            if row.len() != dim {
                return Err(Error::Parse(format!(
                    "row {}: {} fields, expected {dim}",
                    lineno + 2,
                    row.len()
                )));
            }
            points.extend_from_slice(&row);
        }
        Dataset::new(dim, points, Provenance::Mixed)
    }
}

/// The attacker's auxiliary data, split into disjoint query inputs and
/// training negatives.
#[derive(Debug, Clone)]
pub struct AuxSplit {
    pub aux_in: Dataset,
    pub aux_out: Dataset,
}

/// A (member, auxiliary) distribution pair with its domain-shift magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetPair {
    pub member_spec: DistributionSpec,
    pub aux_spec: DistributionSpec,
    pub shift: f64,
}

/// Draw `n` i.i.d. points. Deterministic in the seed.
pub fn sample(spec: &DistributionSpec, n: usize, seed: RngSeed) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyRequest("sample of size 0".into()));
    }
    spec.validate()?;
    let dim = spec.dim();
    let mut rng = StreamRng::new(seed);
    let mut points = Vec::with_capacity(n * dim);
    match spec {
        DistributionSpec::GaussianMixture { weights, means, diag_stds, .. } => {
            for _ in 0..n {
                let c = rng.categorical(weights);
                for d in 0..dim {
                    points.push(means[c][d] + diag_stds[c][d] * rng.normal());
                }
            }
        }
        DistributionSpec::TwoMoons { noise_std, offset, scale, .. } => {
            for _ in 0..n {
                let theta = rng.uniform() * std::f64::consts::PI;
                let (mut x, mut y) = (theta.cos(), theta.sin());
                if rng.uniform() < 0.5 {
                    x = 1.0 - x;
                    y = 0.5 - y;
                }
                let mut p = vec![0.0; dim];
                p[0] = x * scale;
                p[1] = y * scale;
                for (d, v) in p.iter_mut().enumerate() {
                    *v += offset[d] + noise_std * rng.normal();
                }
                points.extend_from_slice(&p);
            }
        }
        DistributionSpec::Ring { noise_std, offset, scale, .. } => {
            for _ in 0..n {
                let theta = rng.uniform() * std::f64::consts::TAU;
                let mut p = vec![0.0; dim];
                p[0] = theta.cos() * scale;
                p[1] = theta.sin() * scale;
                for (d, v) in p.iter_mut().enumerate() {
                    *v += offset[d] + noise_std * rng.normal();
                }
                points.extend_from_slice(&p);
            }
        }
    }
    Ok(Dataset {
        dim,
        points,
        provenance: Provenance::Sampled {
            spec_kind: spec.kind_name().to_string(),
            seed,
        },
    })
}

/// Log density of a Gaussian mixture at `x`, computed with log-sum-exp.
/// Only mixtures have a tractable density here.
pub fn logpdf(spec: &DistributionSpec, x: &[f64]) -> Result<f64> {
    let DistributionSpec::GaussianMixture { dim, weights, means, diag_stds } = spec else {
        return Err(Error::UnsupportedDensity(format!(
            "{} has no tractable density",
            spec.kind_name()
        )));
    };
    if x.len() != *dim {
        return Err(Error::ShapeMismatch(format!("point dim {} vs spec dim {dim}", x.len())));
    }
    const LN_2PI: f64 = 1.837_877_066_409_345_5;
    let mut comp_logs = Vec::with_capacity(weights.len());
    for ((w, mu), sd) in weights.iter().zip(means).zip(diag_stds) {
        if *w <= 0.0 {
            continue;
        }
        let mut lp = w.ln();
        for d in 0..*dim {
            let z = (x[d] - mu[d]) / sd[d];
            lp -= 0.5 * (z * z + LN_2PI) + sd[d].ln();
        }
        comp_logs.push(lp);
    }
    Ok(log_sum_exp(&comp_logs))
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return f64::NEG_INFINITY;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// Build a (member, auxiliary) pair: the auxiliary spec is the base with all
/// means/offsets translated by a random unit direction times `shift`, and
/// stds perturbed by at most 10%. `shift = 0` returns the base unchanged.
pub fn make_pair(base: &DistributionSpec, shift: f64, seed: RngSeed) -> Result<DatasetPair> {
    if shift < 0.0 {
        return Err(Error::Config("shift must be nonnegative".into()));
    }
    base.validate()?;
    if shift == 0.0 {
        return Ok(DatasetPair {
            member_spec: base.clone(),
            aux_spec: base.clone(),
            shift,
        });
    }
    let dim = base.dim();
    let mut rng = StreamRng::new(seed);
    let dir = random_unit(&mut rng, dim);
    let aux_spec = match base {
        DistributionSpec::GaussianMixture { dim, weights, means, diag_stds } => {
            let means = means
                .iter()
                .map(|mu| mu.iter().zip(&dir).map(|(m, d)| m + shift * d).collect())
                .collect();
            let diag_stds = diag_stds
                .iter()
                .map(|sd| sd.iter().map(|s| s * (1.0 + rng.uniform_in(-0.1, 0.1))).collect())
                .collect();
            DistributionSpec::GaussianMixture {
                dim: *dim,
                weights: weights.clone(),
                means,
                diag_stds,
            }
        }
        DistributionSpec::TwoMoons { dim, noise_std, offset, scale } => DistributionSpec::TwoMoons {
            dim: *dim,
            noise_std: noise_std * (1.0 + rng.uniform_in(-0.1, 0.1)),
            offset: offset.iter().zip(&dir).map(|(o, d)| o + shift * d).collect(),
            scale: *scale,
        },
        DistributionSpec::Ring { dim, noise_std, offset, scale } => DistributionSpec::Ring {
            dim: *dim,
            noise_std: noise_std * (1.0 + rng.uniform_in(-0.1, 0.1)),
            offset: offset.iter().zip(&dir).map(|(o, d)| o + shift * d).collect(),
            scale: *scale,
        },
    };
    Ok(DatasetPair {
        member_spec: base.clone(),
        aux_spec,
        shift,
    })
}

fn random_unit(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Replace `floor(ratio * |aux|)` uniformly chosen aux points with distinct
/// member points. Size is unchanged; a nonzero ratio marks the result mixed.
pub fn mix_overlap(aux: &Dataset, members: &Dataset, ratio: f64, seed: RngSeed) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::Config(format!("overlap ratio {ratio} outside [0, 1]")));
    }
    if aux.dim() != members.dim() {
        return Err(Error::ShapeMismatch(format!(
            "aux dim {} vs members dim {}",
            aux.dim(),
            members.dim()
        )));
    }
    let m = (ratio * aux.len() as f64).floor() as usize;
    if m == 0 {
        return Ok(aux.clone());
    }
    if m > members.len() {
        return Err(Error::InsufficientData(format!(
            "need {m} member points to mix, have {}",
            members.len()
        )));
    }
    let mut rng = StreamRng::new(seed);
    let replace_at = rng.sample_indices(aux.len(), m);
    let take_from = rng.sample_indices(members.len(), m);
    let mut out = aux.clone();
    out.provenance = Provenance::Mixed;
    for (&dst, &src) in replace_at.iter().zip(&take_from) {
        let row = dst * out.dim;
        out.points[row..row + out.dim].copy_from_slice(members.point(src));
    }
    Ok(out)
}

/// Randomly partition `0..n` into parts of the given exact sizes.
pub fn split_counts(n: usize, counts: &[usize], seed: RngSeed) -> Result<Vec<Vec<usize>>> {
    let total: usize = counts.iter().sum();
    if total != n {
        return Err(Error::Config(format!("split counts sum to {total}, dataset has {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = StreamRng::new(seed);
    rng.shuffle(&mut order);
    let mut parts = Vec::with_capacity(counts.len());
    let mut at = 0;
    for &c in counts {
        parts.push(order[at..at + c].to_vec());
        at += c;
    }
    Ok(parts)
}

/// Randomly partition a dataset by fractions summing to 1 (tolerance 1e-9).
/// Part sizes follow the largest-remainder rule, so `[0.5, 0.5]` on 100
/// points yields exactly 50/50.
pub fn split_disjoint(d: &Dataset, fractions: &[f64], seed: RngSeed) -> Result<Vec<Dataset>> {
    if fractions.is_empty() || fractions.iter().any(|&f| f <= 0.0) {
        return Err(Error::Config("fractions must be positive".into()));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("fractions sum to {total}, not 1")));
    }
    if d.len() < fractions.len() {
        return Err(Error::InsufficientData(format!(
            "{} points cannot fill {} parts",
            d.len(),
            fractions.len()
        )));
    }
    let counts = largest_remainder_counts(d.len(), fractions);
    let parts = split_counts(d.len(), &counts, seed)?;
    Ok(parts
        .into_iter()
        .map(|idx| d.select(&idx, d.provenance.clone()))
        .collect())
}

fn largest_remainder_counts(n: usize, fractions: &[f64]) -> Vec<usize> {
    let mut counts: Vec<usize> = fractions.iter().map(|f| (f * n as f64).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = fractions
        .iter()
        .enumerate()
        .map(|(i, f)| (i, f * n as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..(n - assigned) {
        counts[remainders[k % remainders.len()].0] += 1;
    }
    counts
}
