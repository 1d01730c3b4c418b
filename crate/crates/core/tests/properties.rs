//! Randomized invariants: structural laws that must hold on every
//! admissible input, exercised over generated graphs, potentials, and
//! partitions.

use std::sync::Arc;

use proptest::prelude::*;

use thermoshift::{
    solve_rpf, solve_rpf_with, weak_bernoulli_report, DirectedGraph, LocallyConstantPotential,
    Sidedness, SolverOptions, Word,
};

/// Spanning cycle plus a self-loop at the first vertex (so the graph is
/// always transitive and aperiodic), plus any subset of further edges.
fn graph_from_choices(n: usize, extras: &[bool]) -> Arc<DirectedGraph> {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((names[i].clone(), names[(i + 1) % n].clone()));
    }
    edges.push((names[0].clone(), names[0].clone()));
    let mut flip = extras.iter().cycle();
    for i in 0..n {
        for j in 0..n {
            let candidate = (names[i].clone(), names[j].clone());
            if !edges.contains(&candidate) && *flip.next().unwrap() {
                edges.push(candidate);
            }
        }
    }
    Arc::new(DirectedGraph::new(&names, &edges).expect("generated graph"))
}

/// Fills the admissible window words with values cycled from `values`.
fn potential_from_choices(
    g: &Arc<DirectedGraph>,
    window: (i64, i64),
    values: &[f64],
) -> LocallyConstantPotential {
    let span = (window.1 - window.0 + 1) as usize;
    let mut supply = values.iter().cycle();
    let entries: Vec<(String, f64)> = g
        .admissible_words(span)
        .into_iter()
        .map(|w| (g.word_name(&w), *supply.next().unwrap()))
        .collect();
    LocallyConstantPotential::from_table(g, window, &entries, None).expect("generated potential")
}

/// A word long enough to determine coordinates `lo ..= hi`, built by a
/// choice-driven walk on the graph.
fn walk_word(
    g: &Arc<DirectedGraph>,
    lo: i64,
    hi: i64,
    start: usize,
    steps: &[usize],
) -> Word {
    let len = (hi - lo + 1) as usize;
    let mut symbols = vec![(start % g.vertex_count()) as u32];
    let mut supply = steps.iter().cycle();
    while symbols.len() < len {
        let here = *symbols.last().unwrap();
        let succ = g.successors(here);
        symbols.push(succ[supply.next().unwrap() % succ.len()]);
    }
    Word::from_indices(g, symbols, lo, Sidedness::TwoSided).expect("walk word")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variation_never_increases_with_the_agreement_depth(
        n in 2usize..=4,
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
        l in -2i64..=0,
        r in 1i64..=2,
    ) {
        let g = graph_from_choices(n, &extras);
        let phi = potential_from_choices(&g, (l, r), &values);
        for depth in 0..8usize {
            prop_assert!(phi.var(depth + 1) <= phi.var(depth) + 1e-15);
        }
    }

    #[test]
    fn birkhoff_sums_compose_along_the_orbit(
        n in 2usize..=4,
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
        steps in prop::collection::vec(0usize..8, 24),
        start in 0usize..4,
        split in 1usize..=5,
        total in 2usize..=6,
    ) {
        prop_assume!(split < total);
        let g = graph_from_choices(n, &extras);
        let phi = potential_from_choices(&g, (0, 1), &values);
        let (l, r) = phi.window();
        let w = walk_word(&g, l, r + total as i64 - 1, start, &steps);
        let whole = phi.birkhoff_sum(&w, total).unwrap();
        let head = phi.birkhoff_sum(&w, split).unwrap();
        // The tail starts split steps later: same symbols, shifted anchor.
        let shifted = Word::from_indices(
            &g,
            w.symbols().to_vec(),
            w.anchor() - split as i64,
            Sidedness::TwoSided,
        )
        .unwrap();
        let tail = phi.birkhoff_sum(&shifted, total - split).unwrap();
        prop_assert!((whole - (head + tail)).abs() <= 1e-13 * (1.0 + whole.abs()));
    }

    #[test]
    fn lumping_cells_together_cannot_increase_the_statistic(
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
        mask in prop::collection::vec(any::<bool>(), 4),
    ) {
        let g = graph_from_choices(3, &extras);
        let phi = potential_from_choices(&g, (0, 1), &values);
        let mu = thermoshift::equilibrium_measure(&solve_rpf(&phi).unwrap());
        let everyone: Vec<String> =
            (0..g.vertex_count() as u32).map(|v| g.name(v).to_string()).collect();
        let kept: Vec<String> = everyone
            .iter()
            .zip(mask.iter().cycle())
            .filter(|(_, &keep)| keep)
            .map(|(name, _)| name.clone())
            .collect();
        let fine = weak_bernoulli_report(&mu, &everyone, 2, 6, 0.1).unwrap();
        let coarse = weak_bernoulli_report(&mu, &kept, 2, 6, 0.1).unwrap();
        for ((n, k, fine_wb, _), (_, _, coarse_wb, _)) in
            fine.rows().into_iter().zip(coarse.rows())
        {
            prop_assert!(coarse_wb <= fine_wb + 1e-12, "cell ({n}, {k})");
        }
    }

    #[test]
    fn the_variation_inequality_holds_for_every_depth_pair(
        n in 2usize..=3,
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
        l in -1i64..=0,
        r in 1i64..=2,
    ) {
        let g = graph_from_choices(n, &extras);
        let phi = potential_from_choices(&g, (l, r), &values);
        for sum_len in 1..=6usize {
            for depth in 1..=6usize {
                let (lhs, rhs) = phi.variation_inequality_check(sum_len, depth).unwrap();
                prop_assert!(lhs <= rhs + 1e-12, "n = {sum_len}, m = {depth}");
            }
        }
    }

    #[test]
    fn birkhoff_suprema_are_subadditive(
        n in 2usize..=4,
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
    ) {
        let g = graph_from_choices(n, &extras);
        let phi = potential_from_choices(&g, (0, 1), &values);
        for len in 1..=5usize {
            let summed = phi.birkhoff_potential(len).unwrap();
            prop_assert!(
                summed.sup_value() <= len as f64 * phi.sup_value() + 1e-12
            );
        }
    }

    #[test]
    fn the_eigendata_does_not_depend_on_the_starting_vector(
        n in 2usize..=4,
        extras in prop::collection::vec(any::<bool>(), 16),
        values in prop::collection::vec(-1.0..1.0f64, 32),
        seeds in prop::collection::vec(0.1..2.0f64, 8),
    ) {
        let g = graph_from_choices(n, &extras);
        let phi = potential_from_choices(&g, (0, 1), &values);
        let reference = solve_rpf(&phi).unwrap();
        let dim = g.vertex_count();
        let start_h: Vec<f64> = seeds.iter().cycle().take(dim).copied().collect();
        let start_nu: Vec<f64> = seeds.iter().rev().cycle().take(dim).copied().collect();
        let options = SolverOptions {
            initial_h: Some(start_h),
            initial_nu: Some(start_nu),
            ..SolverOptions::default()
        };
        let other = solve_rpf_with(&phi, &options).unwrap();
        prop_assert!((reference.lambda() - other.lambda()).abs() <= 1e-9);
        for (a, b) in reference.h().iter().zip(other.h()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        for (a, b) in reference.nu().iter().zip(other.nu()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }
}
