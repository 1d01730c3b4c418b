//! Finite words with coordinates, and the metric they induce.
//!
//! A point of a shift space is a walk on the presenting graph, indexed
//! either by the naturals (one-sided) or by the integers (two-sided). A
//! finite word stands for the cylinder of all points that agree with it on
//! a block of coordinates, so a word here carries an *anchor*: the
//! coordinate of its first symbol. One-sided words are always anchored at
//! coordinate 0; two-sided words may start at any integer, negative
//! anchors describing constraints on the past.
//!
//! The natural metric compares two points coordinate by coordinate:
//! `d(x, y) = exp(-min { |i| : x_i != y_i })`, and `0` when no coordinate
//! separates them. On finite words the minimum runs over the coordinates
//! both words determine; two words whose index ranges do not overlap are
//! at distance 0 because no common coordinate distinguishes them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Whether a word (or potential) lives on the one-sided or two-sided shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    /// Coordinates run over 0, 1, 2, ...
    OneSided,
    /// Coordinates run over all integers.
    TwoSided,
}

/// An admissible finite word together with the coordinates it occupies.
#[derive(Debug, Clone)]
pub struct Word {
    graph: Arc<DirectedGraph>,
    symbols: Vec<u32>,
    anchor: i64,
    sidedness: Sidedness,
}

impl Word {
    /// Builds a word from vertex names, checking admissibility.
    ///
    /// `anchor` is the coordinate of the first symbol. One-sided words
    /// must be anchored at 0.
    pub fn new<S: AsRef<str>>(
        graph: &Arc<DirectedGraph>,
        symbols: &[S],
        anchor: i64,
        sidedness: Sidedness,
    ) -> Result<Self> {
        let resolved = graph.resolve_word(symbols)?;
        Self::from_indices(graph, resolved, anchor, sidedness)
    }

    /// Builds a word from vertex indices, checking admissibility.
    pub fn from_indices(
        graph: &Arc<DirectedGraph>,
        symbols: Vec<u32>,
        anchor: i64,
        sidedness: Sidedness,
    ) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("a word needs at least one symbol".into()));
        }
        if sidedness == Sidedness::OneSided && anchor != 0 {
            return Err(Error::SidednessMismatch(format!(
                "one-sided words are anchored at coordinate 0, got anchor {anchor}"
            )));
        }
        if !graph.is_admissible(&symbols) {
            return Err(Error::InadmissibleWord(
                graph.word_name(&symbols),
                String::new(),
                String::new(),
            ));
        }
        Ok(Word { graph: Arc::clone(graph), symbols, anchor, sidedness })
    }

    /// Builds the restriction of a periodic point to `from..=to`.
    ///
    /// `cycle` must be a closed walk (including the wrap-around edge); the
    /// resulting word has `w_i = cycle[i mod len]`, so it is the
    /// restriction of the bi-infinite periodic point through `cycle`.
    pub fn periodic<S: AsRef<str>>(
        graph: &Arc<DirectedGraph>,
        cycle: &[S],
        from: i64,
        to: i64,
        sidedness: Sidedness,
    ) -> Result<Self> {
        let cyc = graph.resolve_word(cycle)?;
        if cyc.is_empty() {
            return Err(Error::InvalidParameter("a cycle needs at least one vertex".into()));
        }
        let last = cyc[cyc.len() - 1];
        if !graph.has_edge(last, cyc[0]) {
            return Err(Error::InadmissibleWord(
                graph.word_name(&cyc),
                graph.name(last).to_string(),
                graph.name(cyc[0]).to_string(),
            ));
        }
        if to < from {
            return Err(Error::InvalidParameter(format!(
                "empty coordinate range {from}..={to}"
            )));
        }
        let len = cyc.len() as i64;
        let symbols: Vec<u32> =
            (from..=to).map(|i| cyc[(i.rem_euclid(len)) as usize]).collect();
        Self::from_indices(graph, symbols, from, sidedness)
    }

    /// The graph this word is a walk on.
    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    /// The symbols as vertex indices.
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// The coordinate of the first symbol.
    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    /// The coordinate of the last symbol.
    pub fn last_coord(&self) -> i64 {
        self.anchor + self.symbols.len() as i64 - 1
    }

    /// One-sided or two-sided.
    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false: words carry at least one symbol.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The symbol at coordinate `i`, if this word determines it.
    pub fn symbol_at(&self, i: i64) -> Option<u32> {
        if i < self.anchor || i > self.last_coord() {
            None
        } else {
            Some(self.symbols[(i - self.anchor) as usize])
        }
    }

    /// The symbols over `from..=to`, if fully determined.
    pub fn slice(&self, from: i64, to: i64) -> Option<&[u32]> {
        if from > to || from < self.anchor || to > self.last_coord() {
            None
        } else {
            let a = (from - self.anchor) as usize;
            let b = (to - self.anchor) as usize;
            Some(&self.symbols[a..=b])
        }
    }

    /// Space-separated vertex names.
    pub fn name(&self) -> String {
        self.graph.word_name(&self.symbols)
    }
}

/// The coordinate range on which both words are determined, if any.
pub fn comparison_range(x: &Word, y: &Word) -> Option<(i64, i64)> {
    let lo = x.anchor().max(y.anchor());
    let hi = x.last_coord().min(y.last_coord());
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Distance `exp(-min |i|)` over coordinates where the words differ.
///
/// The minimum runs over the coordinates both words determine; if they
/// agree everywhere there (or determine no common coordinate), the
/// distance is 0. Errors if the words live on different graphs or mix
/// sidedness.
pub fn natural_distance(x: &Word, y: &Word) -> Result<f64> {
    if !Arc::ptr_eq(x.graph(), y.graph()) && x.graph().as_ref() != y.graph().as_ref() {
        return Err(Error::GraphMismatch);
    }
    if x.sidedness() != y.sidedness() {
        return Err(Error::SidednessMismatch(
            "cannot compare a one-sided word with a two-sided word".into(),
        ));
    }
    let Some((lo, hi)) = comparison_range(x, y) else {
        return Ok(0.0);
    };
    let mut best: Option<i64> = None;
    for i in lo..=hi {
        if x.symbol_at(i) != y.symbol_at(i) {
            let a = i.abs();
            best = Some(match best {
                None => a,
                Some(b) => b.min(a),
            });
        }
    }
    match best {
        None => Ok(0.0),
        Some(b) => Ok((-(b as f64)).exp()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{full_shift, golden_mean};

    #[test]
    fn construction_checks_admissibility_and_anchor() {
        let g = golden_mean();
        assert!(Word::new(&g, &["a", "b", "a"], 0, Sidedness::OneSided).is_ok());
        assert!(matches!(
            Word::new(&g, &["b", "b"], 0, Sidedness::OneSided),
            Err(Error::InadmissibleWord(..))
        ));
        assert!(matches!(
            Word::new(&g, &["a"], 1, Sidedness::OneSided),
            Err(Error::SidednessMismatch(_))
        ));
        let w = Word::new(&g, &["a", "b"], -3, Sidedness::TwoSided).unwrap();
        assert_eq!(w.anchor(), -3);
        assert_eq!(w.last_coord(), -2);
        assert_eq!(w.symbol_at(-2), Some(g.index_of("b").unwrap()));
        assert_eq!(w.symbol_at(0), None);
    }

    #[test]
    fn periodic_word_wraps_the_cycle() {
        let g = golden_mean();
        // Period-2 orbit a b a b ... restricted to -2..=3.
        let w = Word::periodic(&g, &["a", "b"], -2, 3, Sidedness::TwoSided).unwrap();
        assert_eq!(w.name(), "a b a b a b");
        // The wrap-around edge must exist: the fixed point through b needs
        // the loop b -> b, which the golden mean graph lacks.
        assert!(Word::periodic(&g, &["b"], 0, 2, Sidedness::OneSided).is_err());
    }

    #[test]
    fn distance_uses_least_absolute_differing_coordinate() {
        let g = full_shift(2);
        let x = Word::new(&g, &["a", "a", "a", "a", "a"], -2, Sidedness::TwoSided).unwrap();
        let y = Word::new(&g, &["a", "b", "a", "a", "b"], -2, Sidedness::TwoSided).unwrap();
        // Differences at coordinates -1 and 2; the closest to the origin is -1.
        let d = natural_distance(&x, &y).unwrap();
        assert!((d - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn distance_is_zero_on_agreement_or_disjoint_ranges() {
        let g = full_shift(2);
        let x = Word::new(&g, &["a", "b"], 0, Sidedness::OneSided).unwrap();
        let y = Word::new(&g, &["a", "b", "a"], 0, Sidedness::OneSided).unwrap();
        assert_eq!(natural_distance(&x, &y).unwrap(), 0.0);
        let far = Word::new(&g, &["b", "b"], 5, Sidedness::TwoSided).unwrap();
        let near = Word::new(&g, &["a", "a"], 0, Sidedness::TwoSided).unwrap();
        assert_eq!(natural_distance(&far, &near).unwrap(), 0.0);
    }

    #[test]
    fn distance_rejects_mixed_sidedness() {
        let g = full_shift(2);
        let x = Word::new(&g, &["a"], 0, Sidedness::OneSided).unwrap();
        let y = Word::new(&g, &["a"], 0, Sidedness::TwoSided).unwrap();
        assert!(matches!(natural_distance(&x, &y), Err(Error::SidednessMismatch(_))));
    }

    #[test]
    fn one_sided_distance_weights_coordinate_zero_most() {
        let g = full_shift(2);
        let x = Word::new(&g, &["b", "a", "a"], 0, Sidedness::OneSided).unwrap();
        let y = Word::new(&g, &["a", "a", "b"], 0, Sidedness::OneSided).unwrap();
        // First difference at coordinate 0: distance exp(0) = 1.
        assert_eq!(natural_distance(&x, &y).unwrap(), 1.0);
    }
}
