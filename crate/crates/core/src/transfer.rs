//! The weighted transfer operator and its leading eigendata.
//!
//! For a one-sided potential phi, the transfer operator acts on functions
//! by summing over preimages: `(L F)(x) = sum_{sigma y = x} e^{phi(y)} F(y)`.
//! After recoding to blocks of length `k = max(r, 1)` the potential reads
//! a single recoded edge, so L is the transpose action of the weighted
//! adjacency matrix `B(A, B) = A(A, B) e^{phi(A, B)}` on block-symbol
//! functions. The Perron data of B carries all the thermodynamics:
//!
//! - `lambda`, the spectral radius: `log lambda` is the pressure;
//! - `h > 0` with `L h = lambda h` (equivalently `B^T h = lambda h`);
//! - `nu > 0` with `B nu = lambda nu`, the eigenmeasure's cylinder
//!   weights, scaled so `sum nu(A) h(A) = 1`;
//! - the normalized potential
//!   `phi*(A, B) = phi(A, B) + log h(A) - log h(B) - log lambda`,
//!   which satisfies `L_{phi*} 1 = 1` and generates the equilibrium
//!   Markov chain.
//!
//! Eigenvectors come from power iteration on `B + I`: adding the identity
//! shifts the spectrum by one, keeps every eigenvector, and makes the
//! matrix primitive even when the graph is periodic, so the iteration
//! converges for every transitive graph. The solver also records the
//! empirical decay of `|| lambda^{-n} L^n 1_{[A]} - nu[A] h ||_inf`,
//! the pointwise convergence behind the whole construction; the rate is
//! reported, not asserted.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::exact_from_f64;
use crate::graph::{higher_block, BlockGraph, DirectedGraph};
use crate::potential::LocallyConstantPotential;
use crate::sinai::sinai_reduce;
use crate::word::Sidedness;

/// How far the convergence profile is tracked.
const PROFILE_LEN: usize = 50;

/// A function of the first `len` symbols of a point.
#[derive(Debug, Clone)]
pub struct WordFunction {
    graph: Arc<DirectedGraph>,
    len: usize,
    values: BTreeMap<Vec<u32>, f64>,
}

impl WordFunction {
    /// The constant function, read through words of the given length.
    pub fn constant(graph: &Arc<DirectedGraph>, len: usize, value: f64) -> Result<Self> {
        if len < 1 {
            return Err(Error::InvalidParameter("word functions need length >= 1".into()));
        }
        let values = graph
            .admissible_words(len)
            .into_iter()
            .map(|w| (w, value))
            .collect();
        Ok(WordFunction { graph: Arc::clone(graph), len, values })
    }

    /// The indicator of the cylinder through `word`.
    pub fn indicator<S: AsRef<str>>(graph: &Arc<DirectedGraph>, word: &[S]) -> Result<Self> {
        let target = graph.resolve_word(word)?;
        let len = target.len();
        let values = graph
            .admissible_words(len)
            .into_iter()
            .map(|w| {
                let hit = if w == target { 1.0 } else { 0.0 };
                (w, hit)
            })
            .collect();
        Ok(WordFunction { graph: Arc::clone(graph), len, values })
    }

    pub(crate) fn from_values(
        graph: &Arc<DirectedGraph>,
        len: usize,
        values: BTreeMap<Vec<u32>, f64>,
    ) -> Self {
        WordFunction { graph: Arc::clone(graph), len, values }
    }

    /// The number of symbols the function reads.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; the length is at least 1.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The underlying graph.
    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    /// Value on exactly one window word.
    pub fn value(&self, word: &[u32]) -> Result<f64> {
        if word.len() != self.len {
            return Err(Error::InvalidParameter(format!(
                "word function reads {} symbols, got {}",
                self.len,
                word.len()
            )));
        }
        self.values.get(word).copied().ok_or_else(|| {
            Error::InadmissibleWord(self.graph.word_name(word), String::new(), String::new())
        })
    }

    /// Value read through the first symbols of a longer word.
    pub fn eval_prefix(&self, word: &[u32]) -> Result<f64> {
        if word.len() < self.len {
            return Err(Error::InvalidParameter(format!(
                "word function reads {} symbols, got {}",
                self.len,
                word.len()
            )));
        }
        self.value(&word[..self.len])
    }

    /// Entries as `(space-joined names, value)`, sorted by word.
    pub fn entries(&self) -> Vec<(String, f64)> {
        self.values
            .iter()
            .map(|(w, v)| (self.graph.word_name(w), *v))
            .collect()
    }

    /// Largest absolute difference on the common refinement.
    pub fn max_abs_diff(&self, other: &WordFunction) -> Result<f64> {
        let len = self.len.max(other.len);
        let mut worst: f64 = 0.0;
        for w in self.graph.admissible_words(len) {
            let d = (self.eval_prefix(&w)? - other.eval_prefix(&w)?).abs();
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

/// `L^n F` by literal n-fold preimage summation.
///
/// Kept independent of the matrix route so the two can be checked against
/// each other. Requires a one-sided potential.
pub fn apply_transfer(
    phi: &LocallyConstantPotential,
    f: &WordFunction,
    n: usize,
) -> Result<WordFunction> {
    if phi.sidedness() != Sidedness::OneSided {
        return Err(Error::SidednessMismatch(
            "the transfer operator needs a one-sided potential; reduce first".into(),
        ));
    }
    if !Arc::ptr_eq(f.graph(), phi.graph()) && f.graph().as_ref() != phi.graph().as_ref() {
        return Err(Error::GraphMismatch);
    }
    let graph = phi.graph();
    let (l, r) = phi.window();
    let mut current = f.clone();
    for _ in 0..n {
        let out_len = (r as usize).max(current.len - 1).max(1);
        let mut values = BTreeMap::new();
        for word in graph.admissible_words(out_len) {
            let mut sum = 0.0;
            let mut preimage = Vec::with_capacity(out_len + 1);
            for &a in graph.predecessors(word[0]) {
                preimage.clear();
                preimage.push(a);
                preimage.extend_from_slice(&word);
                let weight = phi.value(&preimage[l as usize..=r as usize])?;
                sum += weight.exp() * current.value(&preimage[..current.len])?;
            }
            values.insert(word, sum);
        }
        current = WordFunction::from_values(graph, out_len, values);
    }
    Ok(current)
}

/// The weighted adjacency matrix of a one-sided potential on its
/// block recoding.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    base: Arc<DirectedGraph>,
    block: BlockGraph,
    /// weights[i][j] = B(i, j), zero off the block edges.
    weights: Vec<Vec<f64>>,
}

impl TransferMatrix {
    /// Assembles B on blocks of length `max(r, min_len, 1)`.
    pub fn new(phi: &LocallyConstantPotential, min_len: usize) -> Result<Self> {
        if phi.sidedness() != Sidedness::OneSided {
            return Err(Error::SidednessMismatch(
                "the transfer matrix needs a one-sided potential; reduce first".into(),
            ));
        }
        let (l, r) = phi.window();
        let k = (r as usize).max(min_len).max(1);
        let block = higher_block(phi.graph(), k)?;
        let dim = block.graph().vertex_count();
        let mut weights = vec![vec![0.0; dim]; dim];
        for (i, j) in block.graph().edges() {
            let merged = block.expand(&[i, j]);
            let value = phi.value(&merged[l as usize..=r as usize])?;
            weights[i as usize][j as usize] = value.exp();
        }
        Ok(TransferMatrix { base: Arc::clone(phi.graph()), block, weights })
    }

    /// The block recoding the matrix lives on.
    pub fn block(&self) -> &BlockGraph {
        &self.block
    }

    /// Matrix dimension (number of blocks).
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// The entry B(i, j).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    /// `B v` (right action, eigenmeasure side).
    pub fn apply_right(&self, v: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| row.iter().zip(v).map(|(w, x)| w * x).sum())
            .collect()
    }

    /// `B^T f`: one application of the transfer operator to a
    /// block-symbol function.
    pub fn apply_left(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (row, &weight_in) in self.weights.iter().zip(f) {
            for (slot, w) in out.iter_mut().zip(row) {
                *slot += w * weight_in;
            }
        }
        out
    }

    /// Reads a word function (of length at most the block length) as a
    /// vector over blocks.
    pub fn lift(&self, f: &WordFunction) -> Result<Vec<f64>> {
        let k = self.block.block_len();
        if f.len() > k {
            return Err(Error::InvalidParameter(format!(
                "cannot lift a function of {} symbols onto {k}-blocks",
                f.len()
            )));
        }
        (0..self.dim())
            .map(|i| f.eval_prefix(self.block.word(i as u32)))
            .collect()
    }

    /// Writes a block vector back as a word function on block-length words.
    pub fn lower(&self, v: &[f64]) -> WordFunction {
        let values = (0..self.dim())
            .map(|i| (self.block.word(i as u32).to_vec(), v[i]))
            .collect();
        WordFunction::from_values(&self.base, self.block.block_len(), values)
    }
}

/// Stopping rules for the eigenvector iteration.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative sup-norm residual at which the iteration stops.
    pub tolerance: f64,
    /// Hard cap on iterations before giving up.
    pub max_iterations: usize,
    /// Starting vector for the eigenfunction side (uniform if absent).
    pub initial_h: Option<Vec<f64>>,
    /// Starting vector for the eigenmeasure side (uniform if absent).
    pub initial_nu: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-13,
            max_iterations: 100_000,
            initial_h: None,
            initial_nu: None,
        }
    }
}

/// Leading eigendata of the transfer operator.
#[derive(Debug, Clone)]
pub struct RpfSolution {
    base: Arc<DirectedGraph>,
    matrix: TransferMatrix,
    lambda: f64,
    h: Vec<f64>,
    nu: Vec<f64>,
    phi_star: LocallyConstantPotential,
    iterations: usize,
    residual: f64,
    convergence: Vec<f64>,
}

impl RpfSolution {
    /// The dominant eigenvalue.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `log lambda`, the pressure of the potential.
    pub fn pressure(&self) -> f64 {
        self.lambda.ln()
    }

    /// The graph the input potential lived on.
    pub fn base_graph(&self) -> &Arc<DirectedGraph> {
        &self.base
    }

    /// The weighted matrix and its block recoding.
    pub fn matrix(&self) -> &TransferMatrix {
        &self.matrix
    }

    /// The block recoding used internally.
    pub fn block(&self) -> &BlockGraph {
        self.matrix.block()
    }

    /// The eigenfunction (max entry 1), indexed by blocks.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// The eigenmeasure's 1-block weights, scaled so `sum nu h = 1`.
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Eigenfunction keyed by block vertex name.
    pub fn h_map(&self) -> BTreeMap<String, f64> {
        self.keyed(&self.h)
    }

    /// Eigenmeasure weights keyed by block vertex name.
    pub fn nu_map(&self) -> BTreeMap<String, f64> {
        self.keyed(&self.nu)
    }

    fn keyed(&self, v: &[f64]) -> BTreeMap<String, f64> {
        let g = self.block().graph();
        (0..v.len()).map(|i| (g.name(i as u32).to_string(), v[i])).collect()
    }

    /// The normalized potential, window `(0, block length)` on the
    /// original graph: `L_{phi*} 1 = 1` and its Birkhoff sums measure
    /// log cylinder masses of the equilibrium chain.
    pub fn phi_star(&self) -> &LocallyConstantPotential {
        &self.phi_star
    }

    /// Iterations the eigenvector solve took.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Final relative residual of the slower of the two eigenvector sides.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max_A || lambda^{-n} L^n 1_{[A]} - nu[A] h ||_inf` for n = 1..=50.
    ///
    /// Reported, not asserted: the decay rate depends on the spectral gap.
    pub fn convergence_profile(&self) -> &[f64] {
        &self.convergence
    }
}

/// Solves for the Perron data of a one-sided potential.
pub fn solve_rpf(phi: &LocallyConstantPotential) -> Result<RpfSolution> {
    solve_rpf_with(phi, &SolverOptions::default())
}

/// As [`solve_rpf`], with explicit stopping rules or starting vectors.
pub fn solve_rpf_with(
    phi: &LocallyConstantPotential,
    options: &SolverOptions,
) -> Result<RpfSolution> {
    if !phi.graph().is_transitive() {
        return Err(Error::NotTransitive);
    }
    let matrix = TransferMatrix::new(phi, 1)?;
    let dim = matrix.dim();

    let start = |given: &Option<Vec<f64>>, side: &str| -> Result<Vec<f64>> {
        match given {
            None => Ok(vec![1.0 / dim as f64; dim]),
            Some(v) => {
                if v.len() != dim || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "{side} starting vector must have {dim} positive entries"
                    )));
                }
                Ok(v.clone())
            }
        }
    };
    let mut h = start(&options.initial_h, "eigenfunction")?;
    let mut nu = start(&options.initial_nu, "eigenmeasure")?;

    // Power iteration on B + I: primitive for every transitive graph, same
    // eigenvectors as B, eigenvalue shifted by exactly one.
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < options.max_iterations {
        iterations += 1;
        let mut next_h = matrix.apply_left(&h);
        let mut next_nu = matrix.apply_right(&nu);
        for i in 0..dim {
            next_h[i] += h[i];
            next_nu[i] += nu[i];
        }
        let rho_h: f64 = next_h.iter().sum();
        let rho_nu: f64 = next_nu.iter().sum();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            worst = worst.max((next_h[i] - rho_h * h[i]).abs() / rho_h);
            worst = worst.max((next_nu[i] - rho_nu * nu[i]).abs() / rho_nu);
            next_h[i] /= rho_h;
            next_nu[i] /= rho_nu;
        }
        h = next_h;
        nu = next_nu;
        residual = worst;
        if residual < options.tolerance {
            break;
        }
    }
    if residual >= options.tolerance {
        return Err(Error::NoConvergence {
            tolerance: options.tolerance,
            max_iterations: options.max_iterations,
            last_residual: residual,
        });
    }

    // lambda from the bilinear quotient nu . (B^T h) / nu . h, which is
    // insensitive to first-order eigenvector error.
    let bth = matrix.apply_left(&h);
    let num: f64 = (0..dim).map(|i| bth[i] * nu[i]).sum();
    let den: f64 = (0..dim).map(|i| h[i] * nu[i]).sum();
    let lambda = num / den;

    // Normalize: max h = 1, then sum nu h = 1.
    let h_max = h.iter().cloned().fold(f64::MIN, f64::max);
    for x in &mut h {
        *x /= h_max;
    }
    let mass: f64 = (0..dim).map(|i| nu[i] * h[i]).sum();
    for x in &mut nu {
        *x /= mass;
    }

    let phi_star = build_phi_star(phi, &matrix, &h, lambda)?;
    let convergence = convergence_profile(&matrix, &h, &nu, lambda);

    Ok(RpfSolution {
        base: Arc::clone(phi.graph()),
        matrix,
        lambda,
        h,
        nu,
        phi_star,
        iterations,
        residual,
        convergence,
    })
}

fn build_phi_star(
    phi: &LocallyConstantPotential,
    matrix: &TransferMatrix,
    h: &[f64],
    lambda: f64,
) -> Result<LocallyConstantPotential> {
    let graph = phi.graph();
    let (l, r) = phi.window();
    let block = matrix.block();
    let k = block.block_len();
    let log_lambda = lambda.ln();
    let mut table = BTreeMap::new();
    for word in graph.admissible_words(k + 1) {
        let a = block.block_index(&word[..k]).expect("prefix block exists");
        let b = block.block_index(&word[1..]).expect("suffix block exists");
        let value = phi.value(&word[l as usize..=r as usize])?
            + h[a as usize].ln()
            - h[b as usize].ln()
            - log_lambda;
        let exact = exact_from_f64(value)
            .ok_or_else(|| Error::InvalidPotential("normalized value overflowed".into()))?;
        table.insert(word, exact);
    }
    LocallyConstantPotential::from_exact_table(graph, (0, k as i64), table, None)
}

fn convergence_profile(
    matrix: &TransferMatrix,
    h: &[f64],
    nu: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let dim = matrix.dim();
    let mut profile = vec![0.0f64; PROFILE_LEN];
    for a in 0..dim {
        let mut f = vec![0.0; dim];
        f[a] = 1.0;
        let mut scale = 1.0;
        for slot in profile.iter_mut() {
            f = matrix.apply_left(&f);
            scale *= lambda;
            for b in 0..dim {
                let dev = (f[b] / scale - nu[a] * h[b]).abs();
                if dev > *slot {
                    *slot = dev;
                }
            }
        }
    }
    profile
}

/// Pressures along an increasing chain of transitive subgraphs.
///
/// The potential is restricted to each graph; a two-sided potential is
/// reduced to a one-sided one per graph before solving. Pressure is
/// monotone under support inclusion, so the returned list is
/// nondecreasing.
pub fn truncation_pressure_sequence(
    graphs: &[Arc<DirectedGraph>],
    phi: &LocallyConstantPotential,
) -> Result<Vec<f64>> {
    if graphs.is_empty() {
        return Err(Error::InvalidParameter("no graphs to truncate over".into()));
    }
    for pair in graphs.windows(2) {
        if !pair[0].is_subgraph_of(&pair[1]) {
            return Err(Error::NotNested(format!(
                "graph with vertices {:?} is not a subgraph of its successor",
                pair[0].vertices()
            )));
        }
    }
    let mut pressures = Vec::with_capacity(graphs.len());
    for g in graphs {
        if !g.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let restricted = phi.restrict(g)?;
        let one_sided = match restricted.sidedness() {
            Sidedness::OneSided => restricted,
            Sidedness::TwoSided => sinai_reduce(&restricted)?.phi().clone(),
        };
        pressures.push(solve_rpf(&one_sided)?.pressure());
    }
    Ok(pressures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{cycle, full_shift, golden_mean};

    fn golden_ratio() -> f64 {
        // Positive root of x^2 - x - 1, the characteristic polynomial of
        // the golden-mean adjacency matrix.
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn seeded_potential(
        graph: &Arc<DirectedGraph>,
        window: (i64, i64),
        seed: u64,
    ) -> LocallyConstantPotential {
        let span = (window.1 - window.0 + 1) as usize;
        let words = graph.admissible_words(span);
        let entries: Vec<(String, f64)> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let v = ((i as u64).wrapping_mul(6364136223846793005).wrapping_add(seed)
                    >> 33) as f64;
                (graph.word_name(w), (v % 997.0) / 499.0 - 1.0)
            })
            .collect();
        let refs: Vec<(&str, f64)> = entries.iter().map(|(s, v)| (s.as_str(), *v)).collect();
        LocallyConstantPotential::from_table(graph, window, &refs, None).unwrap()
    }

    #[test]
    fn transfer_of_one_counts_preimages() {
        let g = golden_mean();
        let phi = LocallyConstantPotential::zero(&g);
        let one = WordFunction::constant(&g, 1, 1.0).unwrap();
        let lf = apply_transfer(&phi, &one, 1).unwrap();
        let a = g.index_of("a").unwrap();
        let b = g.index_of("b").unwrap();
        assert_eq!(lf.value(&[a]).unwrap(), 2.0);
        assert_eq!(lf.value(&[b]).unwrap(), 1.0);
    }

    #[test]
    fn full_shift_doubles_under_each_application() {
        let g = full_shift(2);
        let phi = LocallyConstantPotential::zero(&g);
        let one = WordFunction::constant(&g, 1, 1.0).unwrap();
        for n in 1..=6 {
            let lnf = apply_transfer(&phi, &one, n).unwrap();
            for (_, v) in lnf.entries() {
                assert_eq!(v, (2.0f64).powi(n as i32));
            }
        }
    }

    #[test]
    fn transfer_rejects_two_sided_potentials() {
        let g = full_shift(2);
        let psi = seeded_potential(&g, (-1, 1), 9);
        let one = WordFunction::constant(&g, 1, 1.0).unwrap();
        assert!(matches!(
            apply_transfer(&psi, &one, 1),
            Err(Error::SidednessMismatch(_))
        ));
        assert!(matches!(TransferMatrix::new(&psi, 1), Err(Error::SidednessMismatch(_))));
    }

    #[test]
    fn preimage_route_matches_matrix_powers() {
        let g = golden_mean();
        let phi = seeded_potential(&g, (0, 2), 21);
        let matrix = TransferMatrix::new(&phi, 2).unwrap();
        let f = WordFunction::indicator(&g, &["a", "b"]).unwrap();
        let mut v = matrix.lift(&f).unwrap();
        for n in 1..=6usize {
            let by_preimage = apply_transfer(&phi, &f, n).unwrap();
            v = matrix.apply_left(&v);
            let by_matrix = matrix.lower(&v);
            let diff = by_preimage.max_abs_diff(&by_matrix).unwrap();
            assert!(diff <= 1e-12, "n={n}: routes differ by {diff}");
        }
    }

    #[test]
    fn full_shift_with_zero_potential_has_pressure_log_two() {
        let g = full_shift(2);
        let sol = solve_rpf(&LocallyConstantPotential::zero(&g)).unwrap();
        assert!((sol.lambda() - 2.0).abs() < 1e-12);
        assert!((sol.pressure() - (2.0f64).ln()).abs() < 1e-12);
        for &x in sol.h() {
            assert!((x - 1.0).abs() < 1e-12);
        }
        for &x in sol.nu() {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_mean_eigendata_matches_the_characteristic_root() {
        let g = golden_mean();
        let sol = solve_rpf(&LocallyConstantPotential::zero(&g)).unwrap();
        let phi_g = golden_ratio();
        assert!((sol.lambda() - phi_g).abs() < 1e-10);
        let h = sol.h_map();
        assert!((h["a"] / h["b"] - phi_g).abs() < 1e-10);
    }

    #[test]
    fn bernoulli_weights_give_lambda_one() {
        let g = full_shift(2);
        let p = 0.3f64;
        let phi = LocallyConstantPotential::from_table(
            &g,
            (0, 1),
            &[
                ("a a", p.ln()),
                ("a b", p.ln()),
                ("b a", (1.0 - p).ln()),
                ("b b", (1.0 - p).ln()),
            ],
            None,
        )
        .unwrap();
        let sol = solve_rpf(&phi).unwrap();
        assert!((sol.lambda() - 1.0).abs() < 1e-12);
        assert!(sol.pressure().abs() < 1e-12);
    }

    #[test]
    fn eigen_residuals_hold_on_both_sides() {
        let g = full_shift(3);
        let phi = seeded_potential(&g, (0, 1), 5);
        let sol = solve_rpf(&phi).unwrap();
        let m = sol.matrix();
        let bh = m.apply_left(sol.h());
        let bnu = m.apply_right(sol.nu());
        let hn = sol.h().iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        let nn = sol.nu().iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..m.dim() {
            assert!((bh[i] - sol.lambda() * sol.h()[i]).abs() <= 1e-10 * hn);
            assert!((bnu[i] - sol.lambda() * sol.nu()[i]).abs() <= 1e-10 * nn);
        }
        let mass: f64 = (0..m.dim()).map(|i| sol.nu()[i] * sol.h()[i]).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_potential_sums_to_one_over_preimages() {
        let g = golden_mean();
        let phi = seeded_potential(&g, (0, 2), 13);
        let sol = solve_rpf(&phi).unwrap();
        let star = sol.phi_star();
        let k = sol.block().block_len();
        // L_{phi*} 1 = 1: for every k-word w, the weights of its one-step
        // extensions to the left sum to one.
        for w in g.admissible_words(k) {
            let mut sum = 0.0;
            let mut y = Vec::with_capacity(k + 1);
            for &a in g.predecessors(w[0]) {
                y.clear();
                y.push(a);
                y.extend_from_slice(&w);
                sum += star.value(&y).unwrap().exp();
            }
            assert!((sum - 1.0).abs() < 1e-10, "word {:?}", g.word_name(&w));
        }
    }

    #[test]
    fn periodic_graphs_converge_via_the_identity_shift() {
        let g = cycle(3);
        let sol = solve_rpf(&LocallyConstantPotential::zero(&g)).unwrap();
        assert!((sol.lambda() - 1.0).abs() < 1e-12);
        assert!(sol.pressure().abs() < 1e-12);
        for &x in sol.h() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn different_starting_vectors_reach_the_same_eigendata() {
        let g = golden_mean();
        let phi = seeded_potential(&g, (0, 1), 3);
        let a = solve_rpf(&phi).unwrap();
        let opts = SolverOptions {
            initial_h: Some(vec![0.9, 0.1]),
            initial_nu: Some(vec![0.2, 0.8]),
            ..SolverOptions::default()
        };
        let b = solve_rpf_with(&phi, &opts).unwrap();
        assert!((a.lambda() - b.lambda()).abs() < 1e-10);
        for i in 0..a.h().len() {
            assert!((a.h()[i] - b.h()[i]).abs() < 1e-10);
            assert!((a.nu()[i] - b.nu()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn convergence_profile_decays_for_gapped_graphs() {
        let g = golden_mean();
        let sol = solve_rpf(&LocallyConstantPotential::zero(&g)).unwrap();
        let profile = sol.convergence_profile();
        assert_eq!(profile.len(), 50);
        for n in 5..20 {
            assert!(profile[n] <= profile[n - 1] + 1e-15);
        }
        assert!(profile[49] < 1e-6);
    }

    #[test]
    fn pressure_grows_along_nested_graphs() {
        let loop_graph = Arc::new(DirectedGraph::new(&["a"], &[("a", "a")]).unwrap());
        let gm = golden_mean();
        let full = full_shift(2);
        let phi = LocallyConstantPotential::zero(&full);
        let ps =
            truncation_pressure_sequence(&[loop_graph, gm, full.clone()], &phi).unwrap();
        assert!(ps[0].abs() < 1e-12);
        assert!((ps[1] - golden_ratio().ln()).abs() < 1e-10);
        assert!((ps[2] - (2.0f64).ln()).abs() < 1e-12);
        assert!(ps[0] < ps[1] && ps[1] < ps[2]);
    }

    #[test]
    fn truncation_rejects_non_nested_chains() {
        let gm = golden_mean();
        let c = cycle(2);
        let phi = LocallyConstantPotential::zero(&gm);
        assert!(matches!(
            truncation_pressure_sequence(&[c, gm.clone()], &phi),
            Err(Error::NotNested(_))
        ));
    }
}
