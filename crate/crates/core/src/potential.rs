//! Locally constant potentials: windows, variations, Birkhoff sums.
//!
//! A potential here reads a fixed window of coordinates `l..=r` and is
//! constant on cylinders of that shape, so it is determined by a finite
//! table over admissible window words. The n-th variation
//! `var_n(phi) = sup { phi(x) - phi(y) }` over points agreeing on the
//! first n coordinates (one-sided) or on `-(n-1)..=n-1` (two-sided) is
//! then an exact finite maximum: group the window words by their
//! restriction to the agreement range intersected with the window and
//! take the largest in-group spread. Variations vanish once the
//! agreement range covers the window, which is the finite-range analogue
//! of exponentially decaying variations `var_n < C theta^n`.
//!
//! Birkhoff sums `phi(x) + phi(sigma x) + ... + phi(sigma^{n-1} x)` read a
//! longer window and are again locally constant, which gives the key
//! distortion inequality
//! `var_{n+m}(sum_{j<n} phi o sigma^j) <= sum_{j>m} var_j(phi)`:
//! both sides are computed here as exact rationals.
//!
//! All table arithmetic is exact; values round to f64 only when returned.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{exact_from_f64, exact_to_f64, exact_zero, Exact};
use crate::graph::DirectedGraph;
use crate::word::{Sidedness, Word};

/// A potential constant on cylinders of window shape `(l, r)`.
#[derive(Debug, Clone)]
pub struct LocallyConstantPotential {
    graph: Arc<DirectedGraph>,
    window: (i64, i64),
    table: BTreeMap<Vec<u32>, Exact>,
    declared_theta: Option<f64>,
}

impl LocallyConstantPotential {
    /// Builds a potential from `(window word, value)` entries.
    ///
    /// Keys are space-separated vertex names. The table must cover every
    /// admissible window word exactly once; values must be finite; a
    /// declared decay rate, if any, must lie in (0, 1).
    pub fn from_table<S: AsRef<str>>(
        graph: &Arc<DirectedGraph>,
        window: (i64, i64),
        entries: &[(S, f64)],
        declared_theta: Option<f64>,
    ) -> Result<Self> {
        let span = window_span(window)?;
        let mut table: BTreeMap<Vec<u32>, Exact> = BTreeMap::new();
        for (key, value) in entries {
            let names: Vec<&str> = key.as_ref().split_whitespace().collect();
            if names.len() != span {
                return Err(Error::InvalidPotential(format!(
                    "table key {:?} has {} symbols, window {:?} needs {}",
                    key.as_ref(),
                    names.len(),
                    window,
                    span
                )));
            }
            let word = graph.resolve_word(&names)?;
            let exact = exact_from_f64(*value).ok_or_else(|| {
                Error::InvalidPotential(format!(
                    "value for {:?} is not finite",
                    key.as_ref()
                ))
            })?;
            if table.insert(word, exact).is_some() {
                return Err(Error::InvalidPotential(format!(
                    "duplicate table key {:?}",
                    key.as_ref()
                )));
            }
        }
        Self::from_exact_table(graph, window, table, declared_theta)
    }

    /// Builds a potential taking the same value everywhere.
    pub fn constant(graph: &Arc<DirectedGraph>, window: (i64, i64), value: f64) -> Result<Self> {
        let span = window_span(window)?;
        let exact = exact_from_f64(value)
            .ok_or_else(|| Error::InvalidPotential("constant value is not finite".into()))?;
        let table = graph
            .admissible_words(span)
            .into_iter()
            .map(|w| (w, exact.clone()))
            .collect();
        Self::from_exact_table(graph, window, table, None)
    }

    /// The zero potential, whose equilibrium state is the measure of
    /// maximal entropy.
    pub fn zero(graph: &Arc<DirectedGraph>) -> Self {
        Self::constant(graph, (0, 0), 0.0).expect("zero potential on a valid graph")
    }

    /// Builds a potential from an exact table keyed by vertex indices.
    pub(crate) fn from_exact_table(
        graph: &Arc<DirectedGraph>,
        window: (i64, i64),
        table: BTreeMap<Vec<u32>, Exact>,
        declared_theta: Option<f64>,
    ) -> Result<Self> {
        let span = window_span(window)?;
        if let Some(theta) = declared_theta {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::InvalidPotential(format!(
                    "declared decay rate {theta} is outside (0, 1)"
                )));
            }
        }
        for word in graph.admissible_words(span) {
            if !table.contains_key(&word) {
                return Err(Error::MissingTableEntry(graph.word_name(&word)));
            }
        }
        for word in table.keys() {
            if word.len() != span || !graph.is_admissible(word) {
                return Err(Error::InvalidPotential(format!(
                    "table key {:?} is not an admissible window word",
                    graph.word_name(word)
                )));
            }
        }
        Ok(LocallyConstantPotential {
            graph: Arc::clone(graph),
            window,
            table,
            declared_theta,
        })
    }

    /// The graph whose shift this potential lives on.
    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    /// The coordinate window `(l, r)` the potential reads.
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    /// Number of symbols in a window word.
    pub fn span(&self) -> usize {
        (self.window.1 - self.window.0 + 1) as usize
    }

    /// One-sided when the window never looks at negative coordinates.
    pub fn sidedness(&self) -> Sidedness {
        if self.window.0 >= 0 {
            Sidedness::OneSided
        } else {
            Sidedness::TwoSided
        }
    }

    /// The declared variation decay rate, if one was provided.
    pub fn declared_theta(&self) -> Option<f64> {
        self.declared_theta
    }

    /// Read-only view of the exact table.
    pub(crate) fn table(&self) -> &BTreeMap<Vec<u32>, Exact> {
        &self.table
    }

    /// Table entries as `(space-joined names, value)`, sorted by word.
    pub fn entries(&self) -> Vec<(String, f64)> {
        self.table
            .iter()
            .map(|(w, v)| (self.graph.word_name(w), exact_to_f64(v)))
            .collect()
    }

    /// The largest table value (`sup phi`).
    pub fn sup_value(&self) -> f64 {
        exact_to_f64(self.table.values().max().expect("table is nonempty"))
    }

    /// The value on a window word given by vertex indices.
    pub fn value(&self, word: &[u32]) -> Result<f64> {
        self.value_exact(word).map(exact_to_f64)
    }

    /// The value on a window word given by vertex names.
    pub fn value_by_names<S: AsRef<str>>(&self, word: &[S]) -> Result<f64> {
        let resolved = self.graph.resolve_word(word)?;
        self.value(&resolved)
    }

    pub(crate) fn value_exact(&self, word: &[u32]) -> Result<&Exact> {
        if word.len() != self.span() {
            return Err(Error::InvalidParameter(format!(
                "window word needs {} symbols, got {}",
                self.span(),
                word.len()
            )));
        }
        match self.table.get(word) {
            Some(v) => Ok(v),
            None => Err(Error::InadmissibleWord(
                self.graph.word_name(word),
                String::new(),
                String::new(),
            )),
        }
    }

    /// `phi(sigma^j x)` for any point `x` through the word `w`.
    ///
    /// Requires `w` to determine coordinates `j+l ..= j+r`.
    pub fn eval(&self, w: &Word, j: i64) -> Result<f64> {
        self.eval_exact(w, j).map(|v| exact_to_f64(&v))
    }

    pub(crate) fn eval_exact(&self, w: &Word, j: i64) -> Result<Exact> {
        self.check_same_graph(w)?;
        let (l, r) = self.window;
        match w.slice(j + l, j + r) {
            Some(s) => Ok(self.value_exact(s)?.clone()),
            None => Err(self.too_short(w, j + l, j + r)),
        }
    }

    /// The n-th variation: largest spread of values over window words that
    /// agree on the visible part of the agreement range.
    pub fn var(&self, n: usize) -> f64 {
        exact_to_f64(&self.var_exact(n))
    }

    pub(crate) fn var_exact(&self, n: usize) -> Exact {
        let (l, r) = self.window;
        let n = n as i64;
        let (a_lo, a_hi) = match self.sidedness() {
            Sidedness::OneSided => (0, n - 1),
            Sidedness::TwoSided => (-(n - 1), n - 1),
        };
        let lo = a_lo.max(l);
        let hi = a_hi.min(r);
        let mut spread: BTreeMap<&[u32], (&Exact, &Exact)> = BTreeMap::new();
        for (word, value) in &self.table {
            let key: &[u32] = if lo > hi {
                &[]
            } else {
                &word[(lo - l) as usize..=(hi - l) as usize]
            };
            spread
                .entry(key)
                .and_modify(|(min, max)| {
                    if value < *min {
                        *min = value;
                    }
                    if value > *max {
                        *max = value;
                    }
                })
                .or_insert((value, value));
        }
        spread
            .values()
            .map(|(min, max)| *max - *min)
            .max()
            .unwrap_or_else(exact_zero)
    }

    /// Smallest n beyond which every variation vanishes.
    pub fn variation_reach(&self) -> usize {
        let (l, r) = self.window;
        (l.unsigned_abs().max(r.unsigned_abs()) + 1) as usize
    }

    /// The envelope `(C, theta)` with `var_n <= C theta^n`, using the
    /// declared rate; `None` when no rate was declared.
    pub fn variation_envelope(&self) -> Option<(f64, f64)> {
        let theta = self.declared_theta?;
        let mut c: f64 = 0.0;
        for n in 1..=self.variation_reach() {
            c = c.max(self.var(n) / theta.powi(n as i32));
        }
        Some((c, theta))
    }

    /// `phi(x) + phi(sigma x) + ... + phi(sigma^{n-1} x)` along `w`.
    ///
    /// The word must determine coordinates `l ..= r+n-1`. Exact internally,
    /// so sums that cancel algebraically (coboundaries around a cycle)
    /// return exactly equal f64s.
    pub fn birkhoff_sum(&self, w: &Word, n: usize) -> Result<f64> {
        self.birkhoff_sum_exact(w, n).map(|v| exact_to_f64(&v))
    }

    pub(crate) fn birkhoff_sum_exact(&self, w: &Word, n: usize) -> Result<Exact> {
        self.check_same_graph(w)?;
        let (l, r) = self.window;
        if n > 0 {
            let need_to = r + n as i64 - 1;
            if w.slice(l, need_to).is_none() {
                return Err(self.too_short(w, l, need_to));
            }
        }
        let mut sum = exact_zero();
        for j in 0..n as i64 {
            sum += self.eval_exact(w, j)?;
        }
        Ok(sum)
    }

    /// The Birkhoff sum as a potential: window `(l, r+n-1)`.
    pub fn birkhoff_potential(&self, n: usize) -> Result<LocallyConstantPotential> {
        if n < 1 {
            return Err(Error::InvalidParameter(
                "a Birkhoff-sum potential needs n >= 1".into(),
            ));
        }
        let (l, r) = self.window;
        let span = self.span();
        let window = (l, r + n as i64 - 1);
        let mut table = BTreeMap::new();
        for word in self.graph.admissible_words(span + n - 1) {
            let mut sum = exact_zero();
            for j in 0..n {
                sum += self.value_exact(&word[j..j + span])?;
            }
            table.insert(word, sum);
        }
        Self::from_exact_table(&self.graph, window, table, self.declared_theta)
    }

    /// Both sides of the distortion inequality
    /// `var_{n+m}(Birkhoff sum of length n) <= sum_{j=m+1}^inf var_j`.
    ///
    /// Exact on both sides; the right side is a finite sum because
    /// variations vanish beyond the window reach.
    pub fn variation_inequality_check(&self, n: usize, m: usize) -> Result<(f64, f64)> {
        if n < 1 || m < 1 {
            return Err(Error::InvalidParameter(
                "variation inequality needs n, m >= 1".into(),
            ));
        }
        let lhs = self.birkhoff_potential(n)?.var_exact(n + m);
        let mut rhs = exact_zero();
        for j in (m + 1)..=self.variation_reach().max(m + 1) {
            rhs += self.var_exact(j);
        }
        Ok((exact_to_f64(&lhs), exact_to_f64(&rhs)))
    }

    /// The same potential on a subgraph (values looked up by vertex name).
    pub fn restrict(&self, sub: &Arc<DirectedGraph>) -> Result<LocallyConstantPotential> {
        if !sub.is_subgraph_of(&self.graph) {
            return Err(Error::NotNested(
                "restriction target is not a subgraph of the potential's graph".into(),
            ));
        }
        let span = self.span();
        let mut table = BTreeMap::new();
        for word in sub.admissible_words(span) {
            let here: Vec<u32> = word
                .iter()
                .map(|&v| self.graph.index_of(sub.name(v)))
                .collect::<Result<_>>()?;
            table.insert(word, self.value_exact(&here)?.clone());
        }
        Self::from_exact_table(sub, self.window, table, self.declared_theta)
    }

    fn check_same_graph(&self, w: &Word) -> Result<()> {
        if !Arc::ptr_eq(w.graph(), &self.graph) && w.graph().as_ref() != self.graph.as_ref() {
            return Err(Error::GraphMismatch);
        }
        Ok(())
    }

    fn too_short(&self, w: &Word, need_from: i64, need_to: i64) -> Error {
        Error::WordTooShort {
            have_from: w.anchor(),
            have_to: w.last_coord(),
            need_from,
            need_to,
            required_len: (need_to - w.anchor().min(need_from) + 1) as usize,
        }
    }
}

fn window_span(window: (i64, i64)) -> Result<usize> {
    let (l, r) = window;
    if l > r {
        return Err(Error::InvalidPotential(format!(
            "window ({l}, {r}) is empty"
        )));
    }
    Ok((r - l + 1) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{full_shift, golden_mean};

    fn edge_potential(
        graph: &Arc<DirectedGraph>,
        entries: &[(&str, f64)],
    ) -> LocallyConstantPotential {
        LocallyConstantPotential::from_table(graph, (0, 1), entries, None).unwrap()
    }

    #[test]
    fn loader_rejects_incomplete_or_malformed_tables() {
        let g = golden_mean();
        // Missing "b a".
        let missing = LocallyConstantPotential::from_table(
            &g,
            (0, 1),
            &[("a a", 0.0), ("a b", 1.0)],
            None,
        );
        assert!(matches!(missing, Err(Error::MissingTableEntry(_))));
        // Inadmissible key.
        let bad = LocallyConstantPotential::from_table(
            &g,
            (0, 1),
            &[("a a", 0.0), ("a b", 1.0), ("b a", 0.0), ("b b", 0.0)],
            None,
        );
        assert!(matches!(bad, Err(Error::InadmissibleWord(..))));
        // Wrong key length.
        let short = LocallyConstantPotential::from_table(&g, (0, 1), &[("a", 0.0)], None);
        assert!(matches!(short, Err(Error::InvalidPotential(_))));
        // Duplicate key.
        let dup = LocallyConstantPotential::from_table(
            &g,
            (0, 1),
            &[("a a", 0.0), ("a a", 1.0), ("a b", 0.0), ("b a", 0.0)],
            None,
        );
        assert!(matches!(dup, Err(Error::InvalidPotential(_))));
        // Decay rate outside (0, 1).
        let theta = LocallyConstantPotential::constant(&g, (0, 1), 0.0)
            .and_then(|_| LocallyConstantPotential::from_table(
                &g,
                (0, 1),
                &[("a a", 0.0), ("a b", 0.0), ("b a", 0.0)],
                Some(1.5),
            ));
        assert!(matches!(theta, Err(Error::InvalidPotential(_))));
    }

    #[test]
    fn var_one_groups_words_by_first_symbol() {
        let g = full_shift(2);
        let phi = edge_potential(&g, &[("a a", 0.0), ("a b", 1.0), ("b a", 0.0), ("b b", 0.0)]);
        assert_eq!(phi.var(1), 1.0);
        assert_eq!(phi.var(2), 0.0);
        assert_eq!(phi.var(7), 0.0);
    }

    #[test]
    fn constant_potentials_have_zero_variations() {
        let g = golden_mean();
        let phi = LocallyConstantPotential::constant(&g, (-1, 2), 2.5).unwrap();
        for n in 1..=8 {
            assert_eq!(phi.var(n), 0.0);
        }
    }

    #[test]
    fn two_sided_variations_vanish_once_the_window_is_covered() {
        let g = full_shift(2);
        // Window (-1, 1): reads one past and one future coordinate.
        let words = g.admissible_words(3);
        let entries: Vec<(String, f64)> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (g.word_name(w), i as f64))
            .collect();
        let refs: Vec<(&str, f64)> = entries.iter().map(|(s, v)| (s.as_str(), *v)).collect();
        let phi = LocallyConstantPotential::from_table(&g, (-1, 1), &refs, None).unwrap();
        // n = 1 ties only coordinate 0; n = 2 ties -1..=1, the whole window.
        assert!(phi.var(1) > 0.0);
        assert_eq!(phi.var(2), 0.0);
        assert_eq!(phi.variation_reach(), 2);
    }

    #[test]
    fn variations_are_nonincreasing() {
        let g = full_shift(3);
        let words = g.admissible_words(2);
        let entries: Vec<(String, f64)> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (g.word_name(w), ((i * 31) % 7) as f64 / 3.0))
            .collect();
        let refs: Vec<(&str, f64)> = entries.iter().map(|(s, v)| (s.as_str(), *v)).collect();
        let phi = LocallyConstantPotential::from_table(&g, (0, 1), &refs, None).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=5 {
            let v = phi.var(n);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn birkhoff_sum_matches_hand_count_on_the_golden_mean() {
        let g = golden_mean();
        let phi = edge_potential(&g, &[("a a", 1.0), ("a b", 2.0), ("b a", 3.0)]);
        let w = Word::new(&g, &["a", "b", "a", "b", "a"], 0, Sidedness::OneSided).unwrap();
        // ab + ba + ab + ba = 2 + 3 + 2 + 3.
        assert_eq!(phi.birkhoff_sum(&w, 4).unwrap(), 10.0);
    }

    #[test]
    fn birkhoff_sum_reports_the_required_length() {
        let g = golden_mean();
        let phi = edge_potential(&g, &[("a a", 1.0), ("a b", 2.0), ("b a", 3.0)]);
        let w = Word::new(&g, &["a", "b"], 0, Sidedness::OneSided).unwrap();
        match phi.birkhoff_sum(&w, 4) {
            Err(Error::WordTooShort { required_len, need_to, .. }) => {
                assert_eq!(need_to, 4);
                assert_eq!(required_len, 5);
            }
            other => panic!("expected a too-short error, got {other:?}"),
        }
    }

    #[test]
    fn birkhoff_sums_satisfy_the_cocycle_identity_exactly() {
        let g = golden_mean();
        let phi = edge_potential(&g, &[("a a", 0.1), ("a b", 0.2), ("b a", 0.3)]);
        let w = Word::periodic(&g, &["a", "a", "b"], 0, 9, Sidedness::OneSided).unwrap();
        let whole = phi.birkhoff_sum(&w, 6).unwrap();
        let head = phi.birkhoff_sum(&w, 2).unwrap();
        // Tail starts at coordinate 2; rebuild the shifted word explicitly.
        let shifted = Word::from_indices(
            w.graph(),
            w.symbols()[2..].to_vec(),
            0,
            Sidedness::OneSided,
        )
        .unwrap();
        let tail = phi.birkhoff_sum(&shifted, 4).unwrap();
        // Each side is exact before its final rounding; the two roundings
        // can differ by at most one ulp of the sum.
        assert!((whole - (head + tail)).abs() < 1e-14);
    }

    #[test]
    fn coboundary_sums_vanish_exactly_on_periodic_orbits() {
        let g = full_shift(2);
        let u = edge_potential(&g, &[("a a", 0.1), ("a b", 0.7), ("b a", -0.3), ("b b", 0.2)]);
        // phi = u - u o sigma, window (0, 2).
        let mut table = BTreeMap::new();
        for word in g.admissible_words(3) {
            let v = u.value_exact(&word[0..2]).unwrap() - u.value_exact(&word[1..3]).unwrap();
            table.insert(word, v);
        }
        let phi =
            LocallyConstantPotential::from_exact_table(&g, (0, 2), table, None).unwrap();
        let w = Word::periodic(&g, &["a", "b", "b"], 0, 10, Sidedness::OneSided).unwrap();
        // Sum over one full period telescopes to u(x) - u(sigma^3 x) = 0.
        assert_eq!(phi.birkhoff_sum(&w, 3).unwrap(), 0.0);
    }

    #[test]
    fn variation_inequality_holds_with_exact_sides() {
        let g = full_shift(2);
        let phi = edge_potential(&g, &[("a a", 0.0), ("a b", 1.0), ("b a", 0.5), ("b b", 0.25)]);
        for n in 1..=4 {
            for m in 1..=4 {
                let (lhs, rhs) = phi.variation_inequality_check(n, m).unwrap();
                assert!(lhs <= rhs, "n={n} m={m}: {lhs} > {rhs}");
            }
        }
        // m beyond the window reach: both sides vanish.
        let (lhs, rhs) = phi.variation_inequality_check(3, 2).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
        let c = LocallyConstantPotential::constant(&g, (0, 1), 4.0).unwrap();
        assert_eq!(c.variation_inequality_check(2, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn restriction_keeps_values_and_rejects_non_subgraphs() {
        let big = full_shift(2);
        let phi = edge_potential(&big, &[("a a", 1.0), ("a b", 2.0), ("b a", 3.0), ("b b", 4.0)]);
        let small = golden_mean();
        let restricted = phi.restrict(&small).unwrap();
        assert_eq!(restricted.value_by_names(&["a", "b"]).unwrap(), 2.0);
        assert_eq!(restricted.value_by_names(&["b", "a"]).unwrap(), 3.0);
        assert!(restricted.value_by_names(&["b", "b"]).is_err());
        // The other direction is not nested.
        let back = restricted.restrict(&big);
        assert!(matches!(back, Err(Error::NotNested(_))));
    }

    #[test]
    fn envelope_dominates_every_variation() {
        let g = full_shift(2);
        let phi = LocallyConstantPotential::from_table(
            &g,
            (0, 1),
            &[("a a", 0.0), ("a b", 1.0), ("b a", 0.5), ("b b", 0.25)],
            Some(0.5),
        )
        .unwrap();
        let (c, theta) = phi.variation_envelope().unwrap();
        assert_eq!(theta, 0.5);
        for n in 1..=6 {
            assert!(phi.var(n) <= c * theta.powi(n as i32) + 1e-15);
        }
        let bare = edge_potential(&g, &[("a a", 0.0), ("a b", 1.0), ("b a", 0.5), ("b b", 0.0)]);
        assert!(bare.variation_envelope().is_none());
    }
}
