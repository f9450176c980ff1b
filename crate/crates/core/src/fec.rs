//! Rate-1/2 LDPC coding.
//!
//! Codes are regular with variable degree 3 and check degree 6, built
//! deterministically from a seed. The encoder is systematic: Gaussian
//! elimination of the parity-check matrix over GF(2) picks `m = n/2` pivot
//! columns as parity positions; the remaining columns carry the information
//! bits unchanged.
//!
//! LLR sign convention: positive means bit 0 is more likely.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Bit, Error, Result};

pub const VAR_DEGREE: usize = 3;
pub const CHECK_DEGREE: usize = 6;
pub const MAX_SUB_SEEDS: u64 = 16;
pub const DEFAULT_MAX_ITERS: usize = 20;
pub const DEFAULT_MIN_SUM_OFFSET: f64 = 0.15;

/// Input LLR magnitudes are clamped to this before decoding.
const LLR_CLAMP: f64 = 1e3;
/// Keeps `atanh` of the tanh-rule product finite.
const TANH_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    /// check -> variable adjacency (sparse parity-check matrix rows)
    checks: Vec<Vec<usize>>,
    /// variable -> check adjacency
    vars: Vec<Vec<usize>>,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// Row `i` (packed over the k info bits) gives parity bit `i`.
    parity_rows: Vec<Vec<u64>>,
    construction_seed: u64,
    sub_seed: u64,
}

/// One real per coded bit, positive meaning 0 is more likely.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "LLR at position {i} is {}",
                values[i]
            )));
        }
        Ok(LlrVector(values))
    }

    /// Hard-decision channel LLRs of magnitude `magnitude` for a codeword.
    pub fn from_bits(bits: &[Bit], magnitude: f64) -> Self {
        LlrVector(
            bits.iter()
                .map(|&b| if b == 0 { magnitude } else { -magnitude })
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BpAlgorithm {
    SumProduct,
    /// Offset min-sum with the given offset subtracted from check magnitudes.
    MinSum {
        offset: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub max_iters: usize,
    pub algorithm: BpAlgorithm,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iters: DEFAULT_MAX_ITERS,
            algorithm: BpAlgorithm::SumProduct,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub info: Vec<Bit>,
    pub codeword: Vec<Bit>,
    /// Zero syndrome reached with every posterior LLR non-zero.
    pub converged: bool,
    pub iterations: usize,
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Picks `VAR_DEGREE` checks for each variable in turn, always among the
/// least-filled checks, avoiding length-4 cycles while any such choice exists.
fn connect(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let mut checks: Vec<Vec<usize>> = vec![Vec::with_capacity(CHECK_DEGREE); m];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // marker[v] == stamp when v shares a check with the current variable
    let mut marker = vec![usize::MAX; n];
    let mut candidates = Vec::with_capacity(m);
    for (stamp, &v) in order.iter().enumerate() {
        let mut chosen: Vec<usize> = Vec::with_capacity(VAR_DEGREE);
        for _ in 0..VAR_DEGREE {
            let mut pick = None;
            for avoid_cycles in [true, false] {
                candidates.clear();
                let mut best_deg = usize::MAX;
                for (c, nbrs) in checks.iter().enumerate() {
                    if nbrs.len() >= CHECK_DEGREE || chosen.contains(&c) {
                        continue;
                    }
                    if avoid_cycles && nbrs.iter().any(|&u| marker[u] == stamp) {
                        continue;
                    }
                    match nbrs.len().cmp(&best_deg) {
                        std::cmp::Ordering::Less => {
                            best_deg = nbrs.len();
                            candidates.clear();
                            candidates.push(c);
                        }
                        std::cmp::Ordering::Equal => candidates.push(c),
                        std::cmp::Ordering::Greater => {}
                    }
                }
                if !candidates.is_empty() {
                    pick = Some(candidates[rng.random_range(0..candidates.len())]);
                    break;
                }
            }
            let c = pick?;
            for &u in &checks[c] {
                marker[u] = stamp;
            }
            checks[c].push(v);
            chosen.push(c);
        }
    }
    for nbrs in &mut checks {
        nbrs.sort_unstable();
    }
    Some(checks)
}

struct Systematic {
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    parity_rows: Vec<Vec<u64>>,
}

/// Reduced row echelon form of H over GF(2). `None` when H is rank deficient.
fn systematic_form(n: usize, checks: &[Vec<usize>]) -> Option<Systematic> {
    let m = checks.len();
    let w = words(n);
    let mut rows: Vec<Vec<u64>> = checks
        .iter()
        .map(|nbrs| {
            let mut r = vec![0u64; w];
            for &v in nbrs {
                r[v / 64] ^= 1 << (v % 64);
            }
            r
        })
        .collect();
    let mut pivots = Vec::with_capacity(m);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let (wi, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (r..m).find(|&i| rows[i][wi] & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[wi] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < m {
        return None;
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let k = info_positions.len();
    let parity_rows = rows
        .iter()
        .map(|row| {
            let mut packed = vec![0u64; words(k)];
            for (j, &c) in info_positions.iter().enumerate() {
                if row[c / 64] >> (c % 64) & 1 == 1 {
                    packed[j / 64] |= 1 << (j % 64);
                }
            }
            packed
        })
        .collect();
    Some(Systematic {
        info_positions,
        parity_positions: pivots,
        parity_rows,
    })
}

/// Builds a regular (3,6) code of length `n`. Rank-deficient or unfinishable
/// constructions are retried with the next sub-seed.
pub fn build_code(n: usize, seed: u64) -> Result<LdpcCode> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "LDPC length must be even and >= 8, got {n}"
        )));
    }
    let m = n / 2;
    for sub_seed in 0..MAX_SUB_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sub_seed);
        let Some(checks) = connect(n, m, &mut rng) else {
            continue;
        };
        let Some(sys) = systematic_form(n, &checks) else {
            continue;
        };
        let mut vars = vec![Vec::with_capacity(VAR_DEGREE); n];
        for (c, nbrs) in checks.iter().enumerate() {
            for &v in nbrs {
                vars[v].push(c);
            }
        }
        return Ok(LdpcCode {
            n,
            k: n - m,
            checks,
            vars,
            info_positions: sys.info_positions,
            parity_positions: sys.parity_positions,
            parity_rows: sys.parity_rows,
            construction_seed: seed,
            sub_seed,
        });
    }
    Err(Error::CodeConstruction(format!(
        "no full-rank (3,6) code of length {n} from seed {seed} after {MAX_SUB_SEEDS} attempts"
    )))
}

impl LdpcCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn construction_seed(&self) -> u64 {
        self.construction_seed
    }

    /// Which retry produced this code (0 for the first attempt).
    pub fn sub_seed(&self) -> u64 {
        self.sub_seed
    }

    /// Variable indices of each parity check.
    pub fn check_rows(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn var_columns(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    /// Number of length-4 cycles in the Tanner graph.
    pub fn four_cycles(&self) -> usize {
        let mut count = 0;
        for a in 0..self.checks.len() {
            for b in a + 1..self.checks.len() {
                let shared = self.checks[a]
                    .iter()
                    .filter(|v| self.checks[b].binary_search(v).is_ok())
                    .count();
                count += shared * shared.saturating_sub(1) / 2;
            }
        }
        count
    }

    pub fn syndrome(&self, codeword: &[Bit]) -> Vec<Bit> {
        self.checks
            .iter()
            .map(|nbrs| nbrs.iter().fold(0, |acc, &v| acc ^ (codeword[v] & 1)))
            .collect()
    }

    pub fn is_codeword(&self, codeword: &[Bit]) -> bool {
        codeword.len() == self.n && self.syndrome(codeword).iter().all(|&s| s == 0)
    }

    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        if info.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "LDPC encoder expects {} info bits, got {}",
                self.k,
                info.len()
            )));
        }
        let mut packed = vec![0u64; words(self.k)];
        for (j, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                packed[j / 64] |= 1 << (j % 64);
            }
        }
        let mut cw = vec![0; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            cw[pos] = b & 1;
        }
        for (row, &pos) in self.parity_rows.iter().zip(&self.parity_positions) {
            let ones: u32 = row
                .iter()
                .zip(&packed)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            cw[pos] = (ones & 1) as Bit;
        }
        Ok(cw)
    }

    pub fn extract_info(&self, codeword: &[Bit]) -> Vec<Bit> {
        self.info_positions.iter().map(|&p| codeword[p]).collect()
    }

    /// Belief-propagation decoding with a flooding schedule, stopping as soon
    /// as the hard decision satisfies every check.
    pub fn decode(&self, llrs: &LlrVector, cfg: &DecoderConfig) -> Result<DecodeOutput> {
        if llrs.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "LDPC decoder expects {} LLRs, got {}",
                self.n,
                llrs.len()
            )));
        }
        if cfg.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be >= 1".into()));
        }
        let channel: Vec<f64> = llrs
            .values()
            .iter()
            .map(|v| v.clamp(-LLR_CLAMP, LLR_CLAMP))
            .collect();

        // edges laid out check by check
        let mut edge_var = Vec::with_capacity(self.n * VAR_DEGREE);
        let mut check_start = Vec::with_capacity(self.checks.len() + 1);
        for nbrs in &self.checks {
            check_start.push(edge_var.len());
            edge_var.extend_from_slice(nbrs);
        }
        check_start.push(edge_var.len());

        let mut v2c: Vec<f64> = edge_var.iter().map(|&v| channel[v]).collect();
        let mut c2v = vec![0.0; edge_var.len()];
        let mut posterior = channel.clone();
        let mut hard = vec![0 as Bit; self.n];
        let mut scratch = Vec::with_capacity(CHECK_DEGREE);
        let mut suffix = Vec::with_capacity(CHECK_DEGREE);

        for iter in 1..=cfg.max_iters {
            for c in 0..self.checks.len() {
                let range = check_start[c]..check_start[c + 1];
                match cfg.algorithm {
                    BpAlgorithm::SumProduct => {
                        scratch.clear();
                        scratch.extend(v2c[range.clone()].iter().map(|&x| (0.5 * x).tanh()));
                        suffix.clear();
                        suffix.resize(scratch.len() + 1, 1.0);
                        for i in (0..scratch.len()).rev() {
                            suffix[i] = suffix[i + 1] * scratch[i];
                        }
                        let mut prefix = 1.0;
                        for (i, e) in range.enumerate() {
                            let p = (prefix * suffix[i + 1]).clamp(-TANH_CLAMP, TANH_CLAMP);
                            c2v[e] = 2.0 * p.atanh();
                            prefix *= scratch[i];
                        }
                    }
                    BpAlgorithm::MinSum { offset } => {
                        let mut sign = 1.0;
                        let (mut min1, mut min2, mut arg) =
                            (f64::INFINITY, f64::INFINITY, usize::MAX);
                        for e in range.clone() {
                            let x = v2c[e];
                            if x < 0.0 {
                                sign = -sign;
                            }
                            let a = x.abs();
                            if a < min1 {
                                min2 = min1;
                                min1 = a;
                                arg = e;
                            } else if a < min2 {
                                min2 = a;
                            }
                        }
                        for e in range {
                            let mag = if e == arg { min2 } else { min1 };
                            let s = if v2c[e] < 0.0 { -sign } else { sign };
                            c2v[e] = s * (mag - offset).max(0.0);
                        }
                    }
                }
            }

            posterior.copy_from_slice(&channel);
            for (e, &v) in edge_var.iter().enumerate() {
                posterior[v] += c2v[e];
            }
            for (e, &v) in edge_var.iter().enumerate() {
                v2c[e] = posterior[v] - c2v[e];
            }
            for (h, &l) in hard.iter_mut().zip(&posterior) {
                *h = (l < 0.0) as Bit;
            }
            let decided = posterior.iter().all(|&l| l != 0.0);
            if decided && self.is_codeword(&hard) {
                return Ok(DecodeOutput {
                    info: self.extract_info(&hard),
                    codeword: hard,
                    converged: true,
                    iterations: iter,
                });
            }
        }
        Ok(DecodeOutput {
            info: self.extract_info(&hard),
            codeword: hard,
            converged: false,
            iterations: cfg.max_iters,
        })
    }

    /// Parity-check matrix in MacKay's alist text format (1-based indices,
    /// zero padded to the maximum degree).
    pub fn to_alist(&self) -> String {
        let m = self.checks.len();
        let max_col = self.vars.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.checks.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let join = |xs: &mut dyn Iterator<Item = usize>| {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "{} {}", self.n, m);
        let _ = writeln!(out, "{max_col} {max_row}");
        let _ = writeln!(out, "{}", join(&mut self.vars.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.checks.iter().map(Vec::len)));
        for list in &self.vars {
            let mut it = list
                .iter()
                .map(|c| c + 1)
                .chain(std::iter::repeat(0))
                .take(max_col);
            let _ = writeln!(out, "{}", join(&mut it));
        }
        for list in &self.checks {
            let mut it = list
                .iter()
                .map(|v| v + 1)
                .chain(std::iter::repeat(0))
                .take(max_row);
            let _ = writeln!(out, "{}", join(&mut it));
        }
        out
    }
}

/// Convenience wrapper over [`LdpcCode::decode`] with sum-product and the
/// given iteration limit.
pub fn decode(code: &LdpcCode, llrs: &LlrVector, max_iters: usize) -> Result<DecodeOutput> {
    code.decode(
        llrs,
        &DecoderConfig {
            max_iters,
            algorithm: BpAlgorithm::SumProduct,
        },
    )
}
