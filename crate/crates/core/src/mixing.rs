//! Weak Bernoulli mixing estimates with explicit thresholds.
//!
//! For a stationary chain mu and the symbol partition refined over
//! `n + 1` coordinates, the weak Bernoulli statistic at gap `k` is
//!
//! ```text
//! WB(n, k) = sum_{A, B} | mu(A ∩ sigma^{-(k+n)} B) − mu(A) mu(B) |,
//! ```
//!
//! the total correlation between the first `n + 1` coordinates and the
//! same window restarted `k` steps after it ends. Every intersection
//! mass is a finite matrix expression — aggregate the cylinders of a
//! cell by their final (resp. initial) block, then bridge the gap with
//! the k-step transition matrix — so the table is exact up to rounding,
//! with no sampling anywhere.
//!
//! The threshold machinery mirrors the two-step decay argument:
//!
//! * `find_k_delta` picks the smallest memory `m` at which the
//!   normalized potential's tail variation drops below `delta`, collects
//!   a high-mass family `gamma` of `m`-cylinders, and scans for the
//!   first gap `K` at which `L^k 1_{[c]}`, read at a representative
//!   point of every other member of the family, equals the cylinder
//!   mass to within `e^{±delta}` — stably, over a long run of
//!   consecutive gaps. Chains with a periodic factor never satisfy the
//!   condition and are reported as non-mixing instead of looping.
//! * `step1_pair_bound` evaluates a single pair of equal-length
//!   cylinders with boundary symbols in the certificate's S* set against
//!   the bound `2 sinh(10 delta) mu(A) mu(B)`, valid for gaps beyond
//!   `K(delta)`.
//!
//! Partitions coarser than the full symbol partition are described by a
//! subset of vertices: each listed vertex keeps its own cell and the
//! remaining vertices merge into one complement cell. Coarsening can
//! only decrease the statistic, and for the full partition WB(n, k)
//! collapses to `sum_{a,b} pi(a) |P^k(a,b) − pi(b)|` independently of n.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exact::exact_from_f64;
use crate::gibbs::{phi_star_from_measure, GibbsCertificate};
use crate::measure::MarkovMeasure;

/// Upper end of the admissible `delta` range: below this value,
/// `1 − e^{−t} > t/2` holds on `(0, delta)` with comfortable margin.
pub const DELTA_MAX: f64 = 0.35;

/// How many consecutive gaps the `e^{±delta}` condition must survive
/// before a threshold is accepted.
const STABILITY_RUN: usize = 80;

/// Largest threshold searched before declaring the chain non-mixing.
const SCAN_CAP: usize = 10_000;

/// The weak Bernoulli table for one chain and one partition.
#[derive(Debug, Clone)]
pub struct WeakBernoulliReport {
    v_prime: Vec<String>,
    full_partition: bool,
    n_max: usize,
    k_max: usize,
    delta: f64,
    bound: f64,
    table: BTreeMap<(usize, usize), f64>,
    k_threshold: Option<usize>,
}

impl WeakBernoulliReport {
    /// The vertices keeping their own partition cell, sorted.
    pub fn v_prime(&self) -> &[String] {
        &self.v_prime
    }

    /// Whether the partition separates every vertex.
    pub fn is_full_partition(&self) -> bool {
        self.full_partition
    }

    /// Largest window exponent tabulated.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest gap tabulated.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// The `delta` the bound was formed from.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The decay bound `2 sinh(10 delta) + 4 delta`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// The tabulated statistic, keyed by `(n, k)` with `k > n`.
    pub fn table(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.table
    }

    /// The statistic at one cell, if tabulated.
    pub fn wb(&self, n: usize, k: usize) -> Option<f64> {
        self.table.get(&(n, k)).copied()
    }

    /// Smallest gap from which every tabulated window meets the bound
    /// through `k_max`; `None` if the final gap still misses it.
    pub fn k_threshold(&self) -> Option<usize> {
        self.k_threshold
    }

    /// The table flattened to `(n, k, wb, pass)` rows in `(n, k)` order.
    pub fn rows(&self) -> Vec<(usize, usize, f64, bool)> {
        self.table
            .iter()
            .map(|(&(n, k), &wb)| (n, k, wb, wb < self.bound))
            .collect()
    }
}

/// The memory and gap threshold produced by the `K(delta)` search.
#[derive(Debug, Clone)]
pub struct KDelta {
    m: usize,
    k_raw: usize,
    gamma: Vec<String>,
    gamma_mass: f64,
    delta: f64,
}

impl KDelta {
    /// The selected memory `m(delta)`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The scanned gap threshold before adding the memory.
    pub fn k_raw(&self) -> usize {
        self.k_raw
    }

    /// The threshold `K(delta) = k_raw + m`.
    pub fn k(&self) -> usize {
        self.k_raw + self.m
    }

    /// The high-mass family of `m`-cylinders, as word names.
    pub fn gamma(&self) -> &[String] {
        &self.gamma
    }

    /// The mass the family actually achieved.
    pub fn gamma_mass(&self) -> f64 {
        self.gamma_mass
    }

    /// The `delta` the search ran at.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// One partition cell's cylinder masses, aggregated by the block the
/// cylinder ends with and the block it starts with.
struct CellSums {
    mass: f64,
    by_last: BTreeMap<u32, f64>,
    by_first: BTreeMap<u32, f64>,
}

/// Groups the chain words of length `n + 1` into partition cells.
///
/// A cell is the label vector of the first `n + 1` base symbols: listed
/// vertices label themselves, all others share the complement label.
fn partition_cells(
    mu: &MarkovMeasure,
    keep: &BTreeSet<u32>,
    n: usize,
) -> BTreeMap<Vec<Option<u32>>, CellSums> {
    let bg = mu.block().graph();
    let pi = mu.pi();
    let p = mu.p();
    let mut cells: BTreeMap<Vec<Option<u32>>, CellSums> = BTreeMap::new();
    for chain in bg.admissible_words(n + 1) {
        let mut mass = pi[chain[0] as usize];
        for step in chain.windows(2) {
            mass *= p[step[0] as usize][step[1] as usize];
        }
        let base = mu.block().expand(&chain);
        let label: Vec<Option<u32>> = base[..=n]
            .iter()
            .map(|v| if keep.contains(v) { Some(*v) } else { None })
            .collect();
        let cell = cells.entry(label).or_insert_with(|| CellSums {
            mass: 0.0,
            by_last: BTreeMap::new(),
            by_first: BTreeMap::new(),
        });
        cell.mass += mass;
        *cell.by_last.entry(*chain.last().unwrap()).or_insert(0.0) += mass;
        *cell.by_first.entry(chain[0]).or_insert(0.0) += mass;
    }
    cells
}

/// `sum_{x,y} M(x) (P^k(x,y)/pi(y) − 1) N(y)` — the signed discrepancy
/// `mu(A ∩ B) − mu(A) mu(B)` for one cell pair at gap `k`.
fn pair_discrepancy(
    m_side: &BTreeMap<u32, f64>,
    n_side: &BTreeMap<u32, f64>,
    centered: &[Vec<f64>],
) -> f64 {
    let mut total = 0.0;
    for (&x, &mx) in m_side {
        for (&y, &ny) in n_side {
            total += mx * centered[x as usize][y as usize] * ny;
        }
    }
    total
}

fn matrix_product(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = a.len();
    let mut out = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for l in 0..dim {
            let ail = a[i][l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

/// Tabulates the weak Bernoulli statistic over all windows `n <= n_max`
/// and gaps `n < k <= k_max`, with the decay bound formed from `delta`.
///
/// `v_prime` lists the vertices that keep their own partition cell;
/// passing every vertex gives the full symbol partition.
pub fn weak_bernoulli_report<S: AsRef<str>>(
    mu: &MarkovMeasure,
    v_prime: &[S],
    n_max: usize,
    k_max: usize,
    delta: f64,
) -> Result<WeakBernoulliReport> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(
            "the window exponent n_max must be at least 1".into(),
        ));
    }
    if k_max <= n_max {
        return Err(Error::InvalidParameter(format!(
            "the gap cap k_max = {k_max} must exceed n_max = {n_max}: \
             a gap k <= n overlaps the windows"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(
            "delta must be a positive finite real".into(),
        ));
    }
    let graph = mu.base();
    let mut keep = BTreeSet::new();
    for name in v_prime {
        keep.insert(graph.index_of(name.as_ref())?);
    }
    let full_partition = keep.len() == graph.vertex_count();

    let cells_by_n: Vec<BTreeMap<Vec<Option<u32>>, CellSums>> =
        (1..=n_max).map(|n| partition_cells(mu, &keep, n)).collect();

    let p = mu.p();
    let pi = mu.pi();
    let dim = p.len();
    let bound = 2.0 * (10.0 * delta).sinh() + 4.0 * delta;

    let mut table = BTreeMap::new();
    let mut pk: Vec<Vec<f64>> = p.to_vec();
    for k in 1..=k_max {
        if k > 1 {
            pk = matrix_product(&pk, p);
        }
        let mut centered = vec![vec![0.0; dim]; dim];
        for x in 0..dim {
            for y in 0..dim {
                centered[x][y] = pk[x][y] / pi[y] - 1.0;
            }
        }
        for n in 1..=n_max.min(k - 1) {
            let cells = &cells_by_n[n - 1];
            let mut wb = 0.0;
            for a in cells.values() {
                for b in cells.values() {
                    wb += pair_discrepancy(&a.by_last, &b.by_first, &centered).abs();
                }
            }
            table.insert((n, k), wb);
        }
    }

    let mut k_threshold = None;
    for k in ((n_max + 1)..=k_max).rev() {
        let suffix_passes = table
            .iter()
            .filter(|(&(_, kk), _)| kk == k)
            .all(|(_, &wb)| wb < bound);
        if suffix_passes {
            k_threshold = Some(k);
        } else {
            break;
        }
    }

    Ok(WeakBernoulliReport {
        v_prime: keep.iter().map(|&v| graph.name(v).to_string()).collect(),
        full_partition,
        n_max,
        k_max,
        delta,
        bound,
        table,
        k_threshold,
    })
}

/// Searches for the gap threshold `K(delta)` beyond which iterated
/// transfer of cylinder indicators matches cylinder masses to within
/// `e^{±delta}` on a high-mass family of `m`-cylinders.
///
/// `gamma_mass` is the mass the family must exceed. Returns an error
/// for `delta` outside `(0, DELTA_MAX)` and a non-mixing error when no
/// threshold up to 10^4 survives the stability run.
pub fn find_k_delta(mu: &MarkovMeasure, delta: f64, gamma_mass: f64) -> Result<KDelta> {
    if !(delta > 0.0 && delta < DELTA_MAX) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, {DELTA_MAX})"
        )));
    }
    if !(gamma_mass > 0.0 && gamma_mass < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the target family mass {gamma_mass} must lie in (0, 1)"
        )));
    }

    // Memory selection: smallest m at which every window's tail
    // variation sits below delta. The comparison is exact, and m never
    // exceeds the block length because the variation vanishes once the
    // agreement window covers the potential window.
    let phi_star = phi_star_from_measure(mu)?;
    let kappa = mu.block_len();
    let delta_exact = exact_from_f64(delta).expect("validated finite");
    let mut memory = kappa;
    'search: for m in 1..=kappa {
        for n in 1..=kappa.max(1) {
            let v = phi_star.birkhoff_potential(n)?.var_exact(n + m);
            if v >= delta_exact {
                continue 'search;
            }
        }
        memory = m;
        break;
    }

    // Greedy family: m-cylinders by decreasing mass, lexicographic on
    // ties, until the target mass is strictly exceeded.
    let graph = mu.base();
    let mut ranked: Vec<(Vec<u32>, f64)> = graph
        .admissible_words(memory)
        .into_iter()
        .map(|w| {
            let mass = mu.cylinder_indices(&w);
            (w, mass)
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cylinder masses are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut gamma: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut achieved = 0.0;
    for (word, mass) in ranked {
        if achieved > gamma_mass {
            break;
        }
        achieved += mass;
        gamma.push((word, mass));
    }

    // Column-stochastic transfer weights of the normalized potential on
    // blocks: W(y, z) = pi(y) P(y, z) / pi(z).
    let pi = mu.pi();
    let p = mu.p();
    let dim = p.len();
    let mut weights = vec![vec![0.0; dim]; dim];
    for y in 0..dim {
        for z in 0..dim {
            if p[y][z] > 0.0 {
                weights[y][z] = pi[y] * p[y][z] / pi[z];
            }
        }
    }

    // Indicator of each family member on blocks, and its representative
    // point: the lexicographically least block extending the cylinder.
    let block = mu.block();
    let mut indicators: Vec<Vec<f64>> = Vec::with_capacity(gamma.len());
    let mut representatives: Vec<usize> = Vec::with_capacity(gamma.len());
    for (word, _) in &gamma {
        let mut indicator = vec![0.0; dim];
        let mut least: Option<(Vec<u32>, usize)> = None;
        for (y, slot) in indicator.iter_mut().enumerate() {
            let base = block.word(y as u32);
            if base.len() >= word.len() && base[..word.len()] == word[..] {
                *slot = 1.0;
                if least.as_ref().is_none_or(|(b, _)| base < b.as_slice()) {
                    least = Some((base.to_vec(), y));
                }
            }
        }
        let (_, rep) = least.expect("admissible cylinders extend to blocks");
        indicators.push(indicator);
        representatives.push(rep);
    }

    // Scan gaps: the e^{±delta} condition must hold for every ordered
    // pair of family members through a long run of consecutive gaps.
    let mut run = 0usize;
    for k in 1..=SCAN_CAP + STABILITY_RUN {
        for f in indicators.iter_mut() {
            let mut next = vec![0.0; dim];
            for (y, &fy) in f.iter().enumerate() {
                if fy == 0.0 {
                    continue;
                }
                for z in 0..dim {
                    next[z] += weights[y][z] * fy;
                }
            }
            *f = next;
        }
        let ok = gamma.iter().enumerate().all(|(i, (_, mass))| {
            representatives
                .iter()
                .all(|&rep| (indicators[i][rep] / mass).ln().abs() <= delta)
        });
        if ok {
            run += 1;
            if run == STABILITY_RUN + 1 {
                return Ok(KDelta {
                    m: memory,
                    k_raw: k - STABILITY_RUN,
                    gamma: gamma
                        .iter()
                        .map(|(w, _)| graph.word_name(w))
                        .collect(),
                    gamma_mass: achieved,
                    delta,
                });
            }
        } else {
            run = 0;
        }
    }
    Err(Error::NotMixing { cap: SCAN_CAP })
}

/// Evaluates one cylinder pair against the sharpened decay bound
/// `2 sinh(10 delta) mu(A) mu(B)`.
///
/// `a` and `b` must be admissible words of equal length whose boundary
/// symbols — the last of `a`, the first of `b` — lie in the
/// certificate's S*. The gap `k` must exceed `K(delta)`, searched here
/// with the target family mass `e^{−delta / 2 C*^2}`. Returns
/// `(lhs, rhs) = (|mu(A ∩ B) − mu(A) mu(B)|, bound)`.
pub fn step1_pair_bound<S: AsRef<str>>(
    mu: &MarkovMeasure,
    cert: &GibbsCertificate,
    a: &[S],
    b: &[S],
    delta: f64,
    k: usize,
) -> Result<(f64, f64)> {
    let graph = mu.base();
    let a_word = graph.resolve_word(a)?;
    let b_word = graph.resolve_word(b)?;
    if a_word.is_empty() || a_word.len() != b_word.len() {
        return Err(Error::InvalidParameter(
            "the pair bound needs nonempty cylinders of equal length".into(),
        ));
    }
    let a_last = graph.name(*a_word.last().unwrap());
    let b_first = graph.name(b_word[0]);
    if !cert.s_star().iter().any(|s| s == a_last) {
        return Err(Error::InvalidParameter(format!(
            "the last symbol {a_last} of the first cylinder is outside S*"
        )));
    }
    if !cert.s_star().iter().any(|s| s == b_first) {
        return Err(Error::InvalidParameter(format!(
            "the first symbol {b_first} of the second cylinder is outside S*"
        )));
    }

    let c_star = cert.c_star();
    let target = (-delta / (2.0 * c_star * c_star)).exp();
    let threshold = find_k_delta(mu, delta, target)?;
    if k <= threshold.k() {
        return Err(Error::InvalidParameter(format!(
            "the gap k = {k} must exceed K(delta) = {}",
            threshold.k()
        )));
    }

    // Aggregate each cylinder's chain words by boundary block, then
    // bridge the k-step gap exactly.
    let n = a_word.len() - 1;
    let bg = mu.block().graph();
    let pi = mu.pi();
    let p = mu.p();
    let mut m_side: BTreeMap<u32, f64> = BTreeMap::new();
    let mut n_side: BTreeMap<u32, f64> = BTreeMap::new();
    for chain in bg.admissible_words(n + 1) {
        let base = mu.block().expand(&chain);
        let mut mass = pi[chain[0] as usize];
        for step in chain.windows(2) {
            mass *= p[step[0] as usize][step[1] as usize];
        }
        if base[..=n] == a_word[..] {
            *m_side.entry(*chain.last().unwrap()).or_insert(0.0) += mass;
        }
        if base[..=n] == b_word[..] {
            *n_side.entry(chain[0]).or_insert(0.0) += mass;
        }
    }

    let mut pk: Vec<Vec<f64>> = p.to_vec();
    for _ in 1..k {
        pk = matrix_product(&pk, p);
    }
    let mut intersection = 0.0;
    for (&x, &mx) in &m_side {
        for (&y, &ny) in &n_side {
            intersection += mx * pk[x as usize][y as usize] * ny / pi[y as usize];
        }
    }

    let mu_a = mu.cylinder_indices(&a_word);
    let mu_b = mu.cylinder_indices(&b_word);
    let lhs = (intersection - mu_a * mu_b).abs();
    let rhs = 2.0 * (10.0 * delta).sinh() * mu_a * mu_b;
    Ok((lhs, rhs))
}
