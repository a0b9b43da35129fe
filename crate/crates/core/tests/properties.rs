use proptest::prelude::*;
use rvb_core::entanglement::ppt_min_eigenvalue;
use rvb_core::{
    concurrence, eof_two_qubit, extract_werner_p, gas_monogamy_bound, is_separable_werner, monogamy_bound,
    telecloning_bound, werner_state, Boundary, DensityMatrix, LatticeSpec,
};
use std::collections::VecDeque;

fn grid() -> impl Strategy<Value = LatticeSpec> {
    (1usize..=6, 1usize..=6, any::<bool>()).prop_filter_map("valid grid", |(r, c, periodic)| {
        let b = if periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        LatticeSpec::square(2 * r, 2 * c, b).ok()
    })
}

/// Torus distances by BFS over explicit coordinates.
fn torus_bfs(rows: usize, cols: usize, start: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; rows * cols];
    dist[start] = 0;
    let mut q = VecDeque::from([start]);
    while let Some(s) = q.pop_front() {
        let (r, c) = (s / cols, s % cols);
        for (nr, nc) in [
            ((r + 1) % rows, c),
            ((r + rows - 1) % rows, c),
            (r, (c + 1) % cols),
            (r, (c + cols - 1) % cols),
        ] {
            let t = nr * cols + nc;
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                q.push_back(t);
            }
        }
    }
    dist
}

proptest! {
    #[test]
    fn neighbours_are_symmetric_and_alternate(l in grid()) {
        for s in 0..l.site_count() {
            for t in l.neighbors(s).unwrap() {
                prop_assert!(l.neighbors(t).unwrap().contains(&s));
                prop_assert_ne!(l.sublattice_of(s).unwrap(), l.sublattice_of(t).unwrap());
            }
        }
    }

    #[test]
    fn shells_partition_the_lattice(l in grid(), seed in any::<usize>()) {
        let site = seed % l.site_count();
        let far = *l.distances_from(site).unwrap().iter().max().unwrap();
        let total: usize = (0..=far).map(|r| l.shell_size(site, r).unwrap()).sum();
        prop_assert_eq!(total, l.site_count());
    }

    #[test]
    fn torus_distances_match_bfs(r in 1usize..=8, c in 1usize..=8, seed in any::<usize>()) {
        let l = LatticeSpec::square(2 * r, 2 * c, Boundary::Periodic).unwrap();
        let start = seed % l.site_count();
        prop_assert_eq!(l.distances_from(start).unwrap(), torus_bfs(2 * r, 2 * c, start));
    }

    #[test]
    fn werner_fit_recovers_p(p in -1.0f64 / 3.0..=1.0) {
        let rho = DensityMatrix::new(vec![0, 1], werner_state(p)).unwrap();
        let fit = extract_werner_p(&rho).unwrap();
        prop_assert!((fit.p - p).abs() < 1e-13);
        prop_assert!(fit.residual < 1e-13);
    }

    #[test]
    fn ppt_agrees_with_werner_threshold(p in -1.0f64 / 3.0..=1.0) {
        prop_assume!((p - 1.0 / 3.0).abs() > 1e-6);
        let m = werner_state(p);
        let ppt = ppt_min_eigenvalue(&m) >= -1e-12;
        prop_assert_eq!(ppt, is_separable_werner(p).unwrap());
        let c = concurrence(&DensityMatrix::new(vec![0, 1], m).unwrap()).unwrap();
        prop_assert_eq!(c <= 1e-9, ppt);
    }

    #[test]
    fn eof_increases_with_p(a in 1.0f64 / 3.0..1.0, b in 1.0f64 / 3.0..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let e = |p| eof_two_qubit(&DensityMatrix::new(vec![0, 1], werner_state(p)).unwrap()).unwrap();
        prop_assert!(e(lo) <= e(hi) + 1e-15);
    }

    #[test]
    fn bounds_are_ordered_and_decreasing(r in 1usize..10_000) {
        let (m, t) = (monogamy_bound(r).unwrap(), telecloning_bound(r).unwrap());
        prop_assert!(t <= m + 1e-15);
        prop_assert!(monogamy_bound(r + 1).unwrap() <= m);
        prop_assert!(telecloning_bound(r + 1).unwrap() <= t);
        prop_assert!(gas_monogamy_bound(r + 1).unwrap() <= gas_monogamy_bound(r).unwrap());
        prop_assert!(t > 1.0 / 3.0);
    }
}

#[test]
fn bounds_approach_separability_threshold() {
    let big = 100_000_000;
    for v in [
        monogamy_bound(big).unwrap(),
        telecloning_bound(big).unwrap(),
        gas_monogamy_bound(big).unwrap(),
    ] {
        assert!(v - 1.0 / 3.0 < 1e-3);
    }
}
