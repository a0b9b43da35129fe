//! Cross-checks against brute-force reference computations that share no code
//! with the library paths they test.

use approx::assert_abs_diff_eq;
use rvb_core::{
    assemble, enumerate_gas, enumerate_liquid, extract_werner_p, loop_formula_p, singlet_product,
    tangle_two_qubit, tangle_werner, werner_state, Boundary, DensityMatrix, LatticeSpec,
};

/// Counts perfect matchings of the nearest-neighbour graph by trying every
/// partner for the lowest free site. Deliberately naive.
fn count_matchings(adj: &[Vec<bool>], free: u64) -> usize {
    if free == 0 {
        return 1;
    }
    let i = free.trailing_zeros() as usize;
    let rest = free & !(1 << i);
    (0..adj.len())
        .filter(|&j| rest >> j & 1 == 1 && adj[i][j])
        .map(|j| count_matchings(adj, rest & !(1 << j)))
        .sum()
}

fn grid_adjacency(rows: usize, cols: usize) -> Vec<Vec<bool>> {
    let n = rows * cols;
    let mut adj = vec![vec![false; n]; n];
    for r in 0..rows {
        for c in 0..cols {
            let s = r * cols + c;
            if c + 1 < cols {
                adj[s][s + 1] = true;
                adj[s + 1][s] = true;
            }
            if r + 1 < rows {
                adj[s][s + cols] = true;
                adj[s + cols][s] = true;
            }
        }
    }
    adj
}

#[test]
fn liquid_counts_match_brute_force() {
    for (rows, cols) in [(2, 2), (2, 3), (2, 4), (4, 4)] {
        let l = LatticeSpec::square(rows, cols, Boundary::Open).unwrap();
        let brute = count_matchings(&grid_adjacency(rows, cols), (1u64 << (rows * cols)) - 1);
        assert_eq!(enumerate_liquid(&l).unwrap().len(), brute, "{rows}x{cols}");
    }
}

#[test]
fn gas_counts_are_factorials() {
    let mut fact = 1;
    for n in 1..=6 {
        fact *= n;
        let l = LatticeSpec::complete_bipartite(n).unwrap();
        assert_eq!(enumerate_gas(&l).unwrap().len(), fact);
    }
}

/// Singlet product built directly from the definition, one basis state at a
/// time: the amplitude is the product over dimers of ⟨s_a s_b|singlet⟩.
fn naive_singlet_product(n: usize, pairs: &[(usize, usize)]) -> Vec<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (0..1usize << n)
        .map(|idx| {
            pairs
                .iter()
                .map(|&(a, b)| match (idx >> a & 1, idx >> b & 1) {
                    (0, 1) => h,
                    (1, 0) => -h,
                    _ => 0.0,
                })
                .product()
        })
        .collect()
}

#[test]
fn singlet_products_match_definition() {
    let l = LatticeSpec::square(2, 4, Boundary::Open).unwrap();
    for c in enumerate_liquid(&l).unwrap().coverings() {
        let fast = singlet_product(c);
        let slow = naive_singlet_product(8, c.pairs());
        for (a, b) in fast.amplitudes().iter().zip(&slow) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }
}

#[test]
fn covering_overlaps_are_loop_powers() {
    // ⟨c_k|c_l⟩ = 2^{L − N} with L the number of transition-graph loops.
    let l = LatticeSpec::complete_bipartite(4).unwrap();
    let gas = enumerate_gas(&l).unwrap();
    for a in gas.coverings() {
        let va = singlet_product(a);
        for b in gas.coverings() {
            let vb = singlet_product(b);
            let ov = va.inner(&vb).unwrap();
            let loops = rvb_core::build_transition_graph(a, b).unwrap().loop_count();
            assert_abs_diff_eq!(ov, 2f64.powi(loops as i32 - 4), epsilon = 1e-14);
        }
    }
}

/// Two-site reduced state computed from amplitudes with no reshaping tricks.
fn naive_pair_rdm(amps: &[f64], n: usize, i: usize, j: usize) -> [[f64; 4]; 4] {
    let mut rho = [[0.0; 4]; 4];
    let clear = !((1usize << i) | (1usize << j));
    for idx in 0..1usize << n {
        let r = (idx >> i & 1) << 1 | (idx >> j & 1);
        let base = idx & clear;
        for (c, entry) in rho[r].iter_mut().enumerate() {
            let other = base | (c >> 1) << i | (c & 1) << j;
            *entry += amps[idx] * amps[other];
        }
    }
    rho
}

#[test]
fn pair_rdm_matches_naive_trace() {
    let l = LatticeSpec::square(2, 3, Boundary::Open).unwrap();
    let s = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            if i == j {
                continue;
            }
            let fast = s.reduced_density_matrix(&[i, j]).unwrap();
            let slow = naive_pair_rdm(s.amplitudes(), 6, i, j);
            for (r, row) in slow.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    assert_abs_diff_eq!(fast.matrix()[(r, c)].re, *v, epsilon = 1e-14);
                    assert_abs_diff_eq!(fast.matrix()[(r, c)].im, 0.0, epsilon = 1e-14);
                }
            }
        }
    }
}

/// ⟨S_i·S_j⟩ from its action on basis states, then p = −(4/3)⟨S_i·S_j⟩.
fn heisenberg_p(amps: &[f64], i: usize, j: usize) -> f64 {
    let mut e = 0.0;
    for (idx, &a) in amps.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let (si, sj) = (idx >> i & 1, idx >> j & 1);
        if si == sj {
            e += 0.25 * a * a;
        } else {
            e -= 0.25 * a * a;
            let flipped = idx ^ (1 << i) ^ (1 << j);
            e += 0.5 * a * amps[flipped];
        }
    }
    -4.0 / 3.0 * e
}

#[test]
fn werner_p_matches_spin_correlator() {
    for l in [
        LatticeSpec::square(2, 4, Boundary::Open).unwrap(),
        LatticeSpec::square(4, 4, Boundary::Open).unwrap(),
    ] {
        let s = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 5), (0, 7), (2, 4)] {
            let fit = extract_werner_p(&s.reduced_density_matrix(&[i, j]).unwrap()).unwrap();
            assert_abs_diff_eq!(fit.p, heisenberg_p(s.amplitudes(), i, j), epsilon = 1e-12);
        }
    }
}

#[test]
fn loop_formula_matches_spin_correlator_on_gas() {
    let l = LatticeSpec::complete_bipartite(4).unwrap();
    let gas = enumerate_gas(&l).unwrap();
    let s = assemble(&gas).unwrap();
    for i in 0..8 {
        for j in i + 1..8 {
            let p = loop_formula_p(&gas, i, j).unwrap();
            assert_abs_diff_eq!(p, heisenberg_p(s.amplitudes(), i, j), epsilon = 1e-12);
        }
    }
}

#[test]
fn werner_tangle_closed_form_matches_concurrence() {
    for k in 0..=300 {
        let p = -1.0 / 3.0 + k as f64 * (4.0 / 3.0) / 300.0;
        let rho = DensityMatrix::new(vec![0, 1], werner_state(p)).unwrap();
        assert_abs_diff_eq!(
            tangle_two_qubit(&rho).unwrap(),
            tangle_werner(p).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn complement_entropies_agree() {
    let l = LatticeSpec::square(2, 4, Boundary::Open).unwrap();
    let s = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
    for subset in [vec![0], vec![0, 1], vec![1, 2, 5], vec![0, 3, 4, 7]] {
        let rest: Vec<usize> = (0..8).filter(|x| !subset.contains(x)).collect();
        let a = s.reduced_density_matrix(&subset).unwrap().entropy();
        let b = s.reduced_density_matrix(&rest).unwrap().entropy();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
}

#[test]
fn nested_partial_traces_agree() {
    let l = LatticeSpec::square(2, 3, Boundary::Open).unwrap();
    let s = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
    let four = s.reduced_density_matrix(&[5, 0, 2, 3]).unwrap();
    let via = four.partial_trace(&[2, 5]).unwrap();
    let direct = s.reduced_density_matrix(&[2, 5]).unwrap();
    assert!(via.distance(direct.matrix()).unwrap() < 1e-14);
}

#[test]
fn gas_pairs_are_permutation_symmetric() {
    let l = LatticeSpec::complete_bipartite(4).unwrap();
    let s = assemble(&enumerate_gas(&l).unwrap()).unwrap();
    let a = l.sites_of(rvb_core::Sublattice::A);
    let b = l.sites_of(rvb_core::Sublattice::B);
    let reference = s.reduced_density_matrix(&[a[0], b[0]]).unwrap();
    for &i in &a {
        for &j in &b {
            let rho = s.reduced_density_matrix(&[i, j]).unwrap();
            assert!(rho.distance(reference.matrix()).unwrap() < 1e-13);
        }
    }
}

#[test]
fn liquid_coverings_are_gas_coverings() {
    let l = LatticeSpec::square(2, 4, Boundary::Open).unwrap();
    let liquid = enumerate_liquid(&l).unwrap();
    let k = LatticeSpec::complete_bipartite(4).unwrap();
    let gas = enumerate_gas(&k).unwrap();
    // Relabel grid sites so that A sites map to 0..4 and B sites to 4..8.
    let a = l.sites_of(rvb_core::Sublattice::A);
    let b = l.sites_of(rvb_core::Sublattice::B);
    let relabel = |s: usize| {
        a.iter()
            .position(|&x| x == s)
            .map(|p| k.sites_of(rvb_core::Sublattice::A)[p])
            .or_else(|| {
                b.iter()
                    .position(|&x| x == s)
                    .map(|p| k.sites_of(rvb_core::Sublattice::B)[p])
            })
            .unwrap()
    };
    for c in liquid.coverings() {
        let mapped: Vec<(usize, usize)> = c.pairs().iter().map(|&(x, y)| (relabel(x), relabel(y))).collect();
        let mapped = rvb_core::DimerCovering::new(&k, &mapped, 1.0).unwrap();
        assert!(gas.coverings().iter().any(|g| g.same_dimers(&mapped)));
    }
}

#[test]
fn enumeration_is_deterministic() {
    let l = LatticeSpec::square(4, 4, Boundary::Open).unwrap();
    assert_eq!(
        enumerate_liquid(&l).unwrap().to_json(),
        enumerate_liquid(&l).unwrap().to_json()
    );
    let a = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
    let b = assemble(&enumerate_liquid(&l).unwrap()).unwrap();
    assert!(a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .all(|(x, y)| x.to_bits() == y.to_bits()));
}
