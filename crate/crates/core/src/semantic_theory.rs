//! Semantic information measures on finite world models.
//!
//! A message is informative in proportion to how little of the meaning space
//! it is consistent with. All logarithms are base 2, so entropies and the
//! capacity objective are in bits.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::{Error, Result};

const PROB_TOL: f64 = 1e-9;

/// Largest alphabet accepted by [`capacity_sup`].
pub const MAX_SUP_ALPHABET: usize = 4;
/// Upper bound on the number of grid points [`capacity_sup`] will visit.
pub const MAX_SUP_POINTS: u64 = 5_000_000;

/// Opaque message label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId(pub String);

impl From<&str> for MessageId {
    fn from(s: &str) -> Self {
        MessageId(s.to_string())
    }
}

impl std::fmt::Display for MessageId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of possible worlds with a normalized probability per world,
/// and for each message the set of worlds that satisfy it.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldModel {
    worlds: Vec<String>,
    probs: Vec<f64>,
    satisfaction: BTreeMap<MessageId, BTreeSet<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldModelFile {
    worlds: Vec<WorldEntry>,
    #[serde(default)]
    messages: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldEntry {
    id: String,
    p: f64,
}

impl WorldModel {
    /// Builds a model from `(world id, probability)` pairs and per-message
    /// lists of satisfying world ids.
    pub fn new(
        worlds: Vec<(String, f64)>,
        messages: BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::InvalidInput("world model has no worlds".into()));
        }
        let mut index = BTreeMap::new();
        for (i, (id, p)) in worlds.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "world `{id}` has invalid probability {p}"
                )));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate world `{id}`")));
            }
        }
        let total: f64 = worlds.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Unnormalized(total));
        }

        let mut satisfaction = BTreeMap::new();
        for (msg, sat) in messages {
            let mut set = BTreeSet::new();
            for w in sat {
                let i = index.get(&w).ok_or_else(|| {
                    Error::InvalidInput(format!("message `{msg}` refers to unknown world `{w}`"))
                })?;
                set.insert(*i);
            }
            satisfaction.insert(MessageId(msg), set);
        }

        let (worlds, probs) = worlds.into_iter().unzip();
        Ok(WorldModel {
            worlds,
            probs,
            satisfaction,
        })
    }

    /// Parses the TOML declaration format:
    ///
    /// ```toml
    /// [[worlds]]
    /// id = "sunny"
    /// p = 0.75
    ///
    /// [[worlds]]
    /// id = "rainy"
    /// p = 0.25
    ///
    /// [messages]
    /// dry = ["sunny"]
    /// ```
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let file: WorldModelFile = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        WorldModel::new(
            file.worlds.into_iter().map(|w| (w.id, w.p)).collect(),
            file.messages,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        WorldModel::from_toml_str(&src)
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn messages(&self) -> impl Iterator<Item = &MessageId> {
        self.satisfaction.keys()
    }

    pub fn satisfying(&self, msg: &MessageId) -> Result<&BTreeSet<usize>> {
        self.satisfaction
            .get(msg)
            .ok_or_else(|| Error::UnknownMessage(msg.0.clone()))
    }
}

/// Total probability of the worlds consistent with `msg`.
pub fn logical_probability(model: &WorldModel, msg: &MessageId) -> Result<f64> {
    let total: f64 = model.probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::Unnormalized(total));
    }
    let sat = model.satisfying(msg)?;
    let lp: f64 = sat.iter().map(|&i| model.probs[i]).sum();
    // an empty f64 sum is -0.0
    Ok(if lp > 0.0 { lp.min(1.0) } else { 0.0 })
}

/// `-log2` of the logical probability. A message no world satisfies is an
/// error rather than infinite entropy.
pub fn semantic_entropy(model: &WorldModel, msg: &MessageId) -> Result<f64> {
    let lp = logical_probability(model, msg)?;
    entropy_from_logical_probability(lp).ok_or_else(|| Error::ContradictoryMessage(msg.0.clone()))
}

pub(crate) fn entropy_from_logical_probability(lp: f64) -> Option<f64> {
    if lp <= 0.0 {
        None
    } else {
        // -log2(1) is -0.0; report +0.
        Some((-lp.log2()).max(0.0))
    }
}

/// Source distribution, semantic coding map and end-to-end channel of the
/// Markov chain X -> Z -> X̂, plus a per-symbol semantic entropy table for X̂.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    pub px: Vec<f64>,
    /// Row `x` is p(z | x).
    pub p_z_given_x: Vec<Vec<f64>>,
    /// Row `z` is p(x̂ | z).
    pub p_xhat_given_z: Vec<Vec<f64>>,
    /// H_se of each reconstructed symbol.
    pub h_se: Vec<f64>,
}

/// The three terms of the capacity objective, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityTerms {
    pub mutual_information: f64,
    pub encoding_noise: f64,
    pub expected_semantic_entropy: f64,
}

impl CapacityTerms {
    pub fn objective(&self) -> f64 {
        self.mutual_information - self.encoding_noise + self.expected_semantic_entropy
    }
}

fn check_distribution(name: &str, row: &[f64]) -> Result<()> {
    if row.is_empty() {
        return Err(Error::DimensionMismatch(format!("{name} is empty")));
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidInput(format!(
            "{name} has a negative or non-finite entry"
        )));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidInput(format!(
            "{name} sums to {s}, expected 1"
        )));
    }
    Ok(())
}

fn check_conditional(name: &str, rows: &[Vec<f64>], nrows: usize) -> Result<usize> {
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    let ncols = rows.first().map_or(0, Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::DimensionMismatch(format!(
                "{name} row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        check_distribution(&format!("{name} row {i}"), row)?;
    }
    Ok(ncols)
}

impl DiscreteJoint {
    /// Checks shapes and normalization; returns `(|X|, |Z|, |X̂|)`.
    pub fn validate(&self) -> Result<(usize, usize, usize)> {
        check_distribution("p(x)", &self.px)?;
        let nx = self.px.len();
        let nz = check_conditional("p(z|x)", &self.p_z_given_x, nx)?;
        let nxh = check_conditional("p(x̂|z)", &self.p_xhat_given_z, nz)?;
        if self.h_se.len() != nxh {
            return Err(Error::DimensionMismatch(format!(
                "H_se table has {} entries, reconstruction alphabet has {nxh}",
                self.h_se.len()
            )));
        }
        if self.h_se.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::InvalidInput(
                "H_se entries must be finite and >= 0".into(),
            ));
        }
        Ok((nx, nz, nxh))
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Evaluates I(X;X̂), H(Z|X) and E[H_se(X̂)] for fixed distributions.
pub fn capacity_terms(joint: &DiscreteJoint) -> Result<CapacityTerms> {
    let (nx, nz, nxh) = joint.validate()?;
    Ok(terms_unchecked(
        &joint.px,
        &joint.p_z_given_x,
        &joint.p_xhat_given_z,
        &joint.h_se,
        (nx, nz, nxh),
    ))
}

fn terms_unchecked(
    px: &[f64],
    pzx: &[Vec<f64>],
    pxhz: &[Vec<f64>],
    h_se: &[f64],
    (nx, nz, nxh): (usize, usize, usize),
) -> CapacityTerms {
    // p(x̂ | x) = sum_z p(z|x) p(x̂|z)
    let mut joint = vec![0.0; nx * nxh];
    for x in 0..nx {
        for z in 0..nz {
            let pz = pzx[x][z];
            if pz == 0.0 {
                continue;
            }
            for xh in 0..nxh {
                joint[x * nxh + xh] += px[x] * pz * pxhz[z][xh];
            }
        }
    }
    let mut pxh = vec![0.0; nxh];
    for x in 0..nx {
        for xh in 0..nxh {
            pxh[xh] += joint[x * nxh + xh];
        }
    }
    let mut mi = 0.0;
    for x in 0..nx {
        for xh in 0..nxh {
            let pj = joint[x * nxh + xh];
            if pj > 0.0 {
                mi += pj * (pj / (px[x] * pxh[xh])).log2();
            }
        }
    }
    let noise: f64 = (0..nx)
        .map(|x| -px[x] * pzx[x].iter().copied().map(plogp).sum::<f64>())
        .sum();
    let hse: f64 = pxh.iter().zip(h_se).map(|(p, h)| p * h).sum();
    CapacityTerms {
        mutual_information: mi.max(0.0),
        encoding_noise: noise.max(0.0),
        expected_semantic_entropy: hse,
    }
}

/// I(X;X̂) − H(Z|X) + E[H_se(X̂)] in bits.
pub fn capacity_objective(joint: &DiscreteJoint) -> Result<f64> {
    capacity_terms(joint).map(|t| t.objective())
}

/// Best objective found by [`capacity_sup`] and the coding map attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupResult {
    pub value: f64,
    pub p_z_given_x: Vec<Vec<f64>>,
}

/// All points of the probability simplex in `dim` dimensions whose
/// coordinates are multiples of `1 / (steps - 1)`.
pub fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim - 1, left - k, cur, out);
            cur.pop();
        }
    }
    if dim == 0 || steps < 2 {
        return Vec::new();
    }
    let total = steps - 1;
    let mut raw = Vec::new();
    rec(dim, total, &mut Vec::with_capacity(dim), &mut raw);
    raw.into_iter()
        .map(|v| v.into_iter().map(|k| k as f64 / total as f64).collect())
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Maximizes the capacity objective over coding maps p(z|x) restricted to a
/// simplex grid with `grid_steps` levels per coordinate. The Z alphabet size
/// is the number of rows of `p_xhat_given_z`.
pub fn capacity_sup(
    px: &[f64],
    p_xhat_given_z: &[Vec<f64>],
    h_se: &[f64],
    grid_steps: usize,
) -> Result<SupResult> {
    if grid_steps < 2 {
        return Err(Error::InvalidInput("grid_steps must be >= 2".into()));
    }
    let nx = px.len();
    let nz = p_xhat_given_z.len();
    let nxh = p_xhat_given_z.first().map_or(0, Vec::len);
    if nx > MAX_SUP_ALPHABET || nz > MAX_SUP_ALPHABET || nxh > MAX_SUP_ALPHABET {
        return Err(Error::TooLarge(format!(
            "alphabets ({nx}, {nz}, {nxh}) exceed {MAX_SUP_ALPHABET} symbols"
        )));
    }
    let per_row = binomial((grid_steps - 1 + nz - 1) as u64, (nz - 1) as u64);
    let points = (0..nx).fold(1u64, |acc, _| acc.saturating_mul(per_row));
    if points > MAX_SUP_POINTS {
        return Err(Error::TooLarge(format!(
            "{points} grid points exceed the limit of {MAX_SUP_POINTS}"
        )));
    }

    // Validate shapes once through a representative joint.
    let grid = simplex_grid(nz, grid_steps);
    let probe = DiscreteJoint {
        px: px.to_vec(),
        p_z_given_x: vec![grid[0].clone(); nx],
        p_xhat_given_z: p_xhat_given_z.to_vec(),
        h_se: h_se.to_vec(),
    };
    let dims = probe.validate()?;

    let mut idx = vec![0usize; nx];
    let mut rows: Vec<Vec<f64>> = vec![grid[0].clone(); nx];
    let mut best: Option<SupResult> = None;
    loop {
        let v = terms_unchecked(px, &rows, p_xhat_given_z, h_se, dims).objective();
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(SupResult {
                value: v,
                p_z_given_x: rows.clone(),
            });
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == nx {
                return Ok(best.expect("grid is non-empty"));
            }
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                rows[pos] = grid[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            rows[pos] = grid[0].clone();
            pos += 1;
        }
    }
}

/// Which side of the semantic-noise comparison a system falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Receiver-side semantic entropy covers the encoding noise.
    DecoderOvercomes,
    /// Encoding noise exceeds what the receiver can resolve.
    SemanticAmbiguity,
}

/// Ties go to [`Hypothesis::DecoderOvercomes`].
pub fn hypothesis_classifier(h_z_given_x: f64, h_se_xhat: f64) -> Result<Hypothesis> {
    if !(h_z_given_x >= 0.0) || !(h_se_xhat >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "entropies must be >= 0 (got {h_z_given_x}, {h_se_xhat})"
        )));
    }
    Ok(if h_z_given_x > h_se_xhat {
        Hypothesis::SemanticAmbiguity
    } else {
        Hypothesis::DecoderOvercomes
    })
}
