//! Property tests over randomly generated graphs, partitions and point sets.

use cutsdp::certify::{build_certificate, gw_check, lambda_k1_full, proximity_check};
use cutsdp::datagen::gen_sbm;
use cutsdp::kernel_graph::{
    build_graph, laplacian, normalized_laplacian, random_walk_matrix, KernelSpec, PointSet, WeightedGraph,
};
use cutsdp::linalg::{frob_inner, sym_eigenvalues};
use cutsdp::partition::{
    brute_force_min_cut, cut_value, ground_truth_x, normalized_cut, phi_vector, ratio_cut, split, Partition, Variant,
};
use cutsdp::rng::SplitMix64;
use cutsdp::sdp::{make_problem, solve, FeasibilityGaps, SolverOptions};
use cutsdp::spectral::{kmeans, kmeans_objective_at};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Symmetric weights with zero diagonal; `density` of the pairs are nonzero.
fn weights(n: usize, density: f64, seed: u64) -> DMatrix<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.bernoulli(density) {
                let v = 0.05 + rng.next_f64();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    w
}

/// Graph whose degrees are all positive (self-loops of weight 1, as the heat kernel gives).
fn graph(n: usize, density: f64, seed: u64) -> WeightedGraph {
    WeightedGraph::from_weights(weights(n, density, seed) + DMatrix::identity(n, n)).unwrap()
}

/// Balanced labels `i mod k`, shuffled.
fn partition(n: usize, k: usize, seed: u64) -> Partition {
    let mut rng = SplitMix64::new(seed ^ 0xabcdef);
    let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.next_below(i as u64 + 1) as usize);
    }
    Partition::new(labels, k).unwrap()
}

/// `k` dense blocks with light cross weights.
fn planted(n: usize, k: usize, leak: f64, seed: u64) -> (WeightedGraph, Partition) {
    let mut rng = SplitMix64::new(seed);
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let mut w = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = if labels[i] == labels[j] { 0.5 + 0.5 * rng.next_f64() } else { leak * rng.next_f64() };
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    (WeightedGraph::from_weights(w).unwrap(), Partition::new(labels, k).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

fn components(n: usize, adj: impl Fn(usize, usize) -> bool) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if adj(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_quadratic_form(n in 2usize..25, density in 0.1f64..1.0, seed: u64, vseed: u64) {
        let g = graph(n, density, seed);
        let l = laplacian(&g);
        let mut rng = SplitMix64::new(vseed);
        let v = DVector::from_fn(n, |_, _| 2.0 * rng.next_f64() - 1.0);
        let mut expect = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                expect += g.weights()[(i, j)] * (v[i] - v[j]).powi(2);
            }
        }
        prop_assert!((v.dot(&(&l * &v)) - expect).abs() <= 1e-10 * expect.max(1.0));
    }

    #[test]
    fn laplacians_are_psd_and_walk_rows_sum_to_one(n in 2usize..25, density in 0.1f64..1.0, seed: u64) {
        let g = graph(n, density, seed);
        let l = laplacian(&g);
        prop_assert!(sym_eigenvalues(&l)[0] >= -1e-10 * l.amax().max(1.0));
        let ls = normalized_laplacian(&g).unwrap();
        let ev = sym_eigenvalues(&ls);
        prop_assert!(ev[0] >= -1e-10 && ev[n - 1] <= 2.0 + 1e-10);
        let (p, l_rw) = random_walk_matrix(&g).unwrap();
        for r in p.row_iter() {
            prop_assert!((r.sum() - 1.0).abs() <= 1e-12);
        }
        prop_assert!((DMatrix::identity(n, n) - &p - l_rw).amax() == 0.0);
    }

    #[test]
    fn zero_eigenvalues_count_components(
        coords in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..20),
        sigma in 0.05f64..0.6,
    ) {
        let pts = PointSet::new(coords.iter().map(|&(x, y)| vec![x, y]).collect()).unwrap();
        let g = build_graph(&pts, &KernelSpec::threshold(sigma).unwrap()).unwrap();
        let n = pts.len();
        let expected = components(n, |i, j| g.weights()[(i, j)] > 0.0);
        let zeros = sym_eigenvalues(&laplacian(&g)).iter().filter(|&&x| x.abs() < 1e-8).count();
        prop_assert_eq!(zeros, expected);
    }

    #[test]
    fn split_is_additive_and_cuts_are_inner_products(
        n in 3usize..20, k in 1usize..4, density in 0.2f64..1.0, seed: u64,
    ) {
        prop_assume!(k <= n);
        let g = graph(n, density, seed);
        let p = partition(n, k, seed);
        let s = split(&g, &p).unwrap();
        prop_assert!((&s.w_iso + &s.w_delta - g.weights()).amax() <= 1e-12);
        prop_assert!((&s.d_iso + &s.d_delta - g.degrees()).amax() <= 1e-12);
        prop_assert!((&s.l_iso + &s.l_delta - laplacian(&g)).amax() <= 1e-12);

        // absolute tolerance: with k = 1 both sides are zero up to rounding
        let l = laplacian(&g);
        let xr = ground_truth_x(&g, &p, Variant::RatioCut).unwrap().x;
        prop_assert!((ratio_cut(&g, &p).unwrap() - frob_inner(&l, &xr)).abs() <= 1e-12 * l.amax() * n as f64);
        let xn = ground_truth_x(&g, &p, Variant::NCut).unwrap().x;
        let ls = normalized_laplacian(&g).unwrap();
        prop_assert!((normalized_cut(&g, &p).unwrap() - frob_inner(&ls, &xn)).abs() <= 1e-12 * n as f64);

        for (x, variant) in [(xr, Variant::RatioCut), (xn, Variant::NCut)] {
            prop_assert!((&x * &x - &x).amax() <= 1e-12);
            prop_assert!((x.trace() - k as f64).abs() <= 1e-12 * k as f64);
            let phi = phi_vector(&g, variant).unwrap();
            prop_assert!((&x * &phi - &phi).amax() <= 1e-12 * phi.amax());
        }
    }

    #[test]
    fn brute_force_is_permutation_invariant(n in 3usize..8, k in 2usize..4, seed: u64) {
        prop_assume!(k <= n);
        let g = graph(n, 0.7, seed);
        let mut rng = SplitMix64::new(seed.wrapping_add(1));
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.next_below(i as u64 + 1) as usize);
        }
        let wp = DMatrix::from_fn(n, n, |i, j| g.weights()[(perm[i], perm[j])]);
        let gp = WeightedGraph::from_weights(wp).unwrap();
        for variant in [Variant::RatioCut, Variant::NCut] {
            let (best, val) = brute_force_min_cut(&g, k, variant).unwrap();
            let (best_p, val_p) = brute_force_min_cut(&gp, k, variant).unwrap();
            prop_assert!(rel(val, val_p) <= 1e-10);
            // mapping the permuted optimum back is still optimal on the original graph
            let mut labels = vec![0; n];
            for i in 0..n {
                labels[perm[i]] = best_p.label(i);
            }
            let back = Partition::new(labels, k).unwrap();
            prop_assert!(rel(cut_value(&g, &back, variant).unwrap(), val) <= 1e-10);
            prop_assert!(cut_value(&g, &best, variant).unwrap() <= val + 1e-12);
        }
    }

    #[test]
    fn lloyd_is_monotone_and_rotation_invariant(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6..40),
        k in 2usize..4,
        angle in 0.0f64..std::f64::consts::TAU,
        seed: u64,
    ) {
        let rows = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { pts[i].0 } else { pts[i].1 });
        let a = kmeans(&rows, k, seed, 3).unwrap();
        for w in a.history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        }
        let (c, s) = (angle.cos(), angle.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let rotated = &rows * &rot;
        let b = kmeans(&rotated, k, seed, 3).unwrap();
        // rotating the centroids of one run scores identically on the rotated data
        let ca = DMatrix::from_fn(k, 2, |r, j| a.centroids[r][j]);
        prop_assert!(rel(kmeans_objective_at(&rotated, &(&ca * &rot)), a.objective) <= 1e-9);
        // seeding and Lloyd steps see only distances, so the same seed finds the same objective
        prop_assert!(rel(a.objective, b.objective) <= 1e-9);
    }

    #[test]
    fn proximity_block_and_full_spectra_agree(n in 4usize..24, k in 2usize..4, leak in 0.0f64..0.3, seed: u64) {
        prop_assume!(n >= 2 * k);
        let (g, p) = planted(n, k, leak, seed);
        for variant in [Variant::RatioCut, Variant::NCut] {
            let r = proximity_check(&g, &p, variant).unwrap();
            let full = lambda_k1_full(&g, &p, variant).unwrap();
            prop_assert!((r.lambda_k1 - full).abs() <= 1e-9 * full.abs().max(1.0));
        }
    }

    #[test]
    fn ratiocut_condition_is_scale_covariant(n in 4usize..20, leak in 0.0f64..0.5, c in 0.01f64..100.0, seed: u64) {
        let (g, p) = planted(n, 2, leak, seed);
        let gc = g.scaled(c).unwrap();
        let a = proximity_check(&g, &p, Variant::RatioCut).unwrap();
        let b = proximity_check(&gc, &p, Variant::RatioCut).unwrap();
        prop_assert_eq!(a.holds, b.holds);
        prop_assert!(rel(c * a.lhs, b.lhs) <= 1e-9 && rel(c * a.rhs, b.rhs) <= 1e-9);
        let a = proximity_check(&g, &p, Variant::NCut).unwrap();
        let b = proximity_check(&gc, &p, Variant::NCut).unwrap();
        prop_assert_eq!(a.holds, b.holds);
        prop_assert!(rel(a.lhs, b.lhs) <= 1e-9 && rel(a.rhs, b.rhs) <= 1e-9);
    }

    #[test]
    fn certificate_lives_in_the_right_subspaces(
        n in 4usize..20, k in 2usize..4, leak in 0.0f64..0.5, z in -2.0f64..0.0, seed: u64,
    ) {
        prop_assume!(n >= 2 * k);
        let (g, p) = planted(n, k, leak, seed);
        for variant in [Variant::RatioCut, Variant::NCut] {
            let cert = build_certificate(&g, &p, variant, Some(z)).unwrap();
            let x = ground_truth_x(&g, &p, variant).unwrap().x;
            let proj = DMatrix::identity(n, n) - &x;
            prop_assert!((&x * &cert.q).norm() <= 1e-8 * cert.q.norm().max(1e-12));
            prop_assert!((&proj * &cert.b * &proj).norm() <= 1e-8 * cert.b.norm().max(1e-12));
        }
    }

    #[test]
    fn prng_ranges(seed: u64, bound in 1u64..1000) {
        let mut r = SplitMix64::new(seed);
        for _ in 0..100 {
            let x = r.next_f64();
            prop_assert!((0.0..1.0).contains(&x));
            prop_assert!(r.next_below(bound) < bound);
        }
        let mut a = SplitMix64::substream(seed, 3);
        let mut b = SplitMix64::substream(seed, 3);
        prop_assert_eq!(a.next_u64(), b.next_u64());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sdp_is_feasible_and_beats_every_partition(n in 6usize..22, k in 2usize..4, leak in 0.0f64..1.0, seed: u64) {
        prop_assume!(n >= 2 * k);
        let (g, truth) = planted(n, k, leak, seed);
        for variant in [Variant::RatioCut, Variant::NCut] {
            let prob = make_problem(&g, k, variant).unwrap();
            let sol = solve(&prob, &SolverOptions::default()).unwrap();
            prop_assert!(sol.converged);
            let f = FeasibilityGaps::of(&sol.z, &prob.phi, k);
            prop_assert!(f.min_eigenvalue >= -1e-6 * sol.z.norm());
            prop_assert!(f.min_entry >= -1e-6);
            prop_assert!(f.trace_gap <= 1e-6 * k as f64);
            prop_assert!(f.phi_gap <= 1e-6 * prob.phi.amax());
            for p in [truth.clone(), partition(n, k, seed)] {
                let ax = frob_inner(&prob.a, &ground_truth_x(&g, &p, variant).unwrap().x);
                prop_assert!(sol.objective <= ax + 1e-5 * (1.0 + ax.abs()));
            }
        }
    }

    #[test]
    fn gw_sufficient_condition_implies_eigen_test(n in 10usize..60, alpha in 2.0f64..12.0, beta in 0.0f64..2.0, seed: u64) {
        let cap = (2 * n) as f64 / ((2 * n) as f64).ln();
        prop_assume!(alpha < cap);
        let s = gen_sbm(n, alpha, beta.min(alpha), seed).unwrap();
        let r = gw_check(&s.graph().unwrap(), &s.truth).unwrap();
        prop_assert!(r.implication_holds, "{:?}", r);
    }
}

/// Edge counts in each block pattern stay within 3 binomial standard deviations.
#[test]
fn sbm_densities_match_probabilities() {
    let n = 200;
    let big_n = 400.0f64;
    for (alpha, beta, seed) in [(20.0, 2.0, 1u64), (30.0, 5.0, 2), (8.0, 8.0, 3)] {
        let s = gen_sbm(n, alpha, beta, seed).unwrap();
        assert!((s.p - alpha * big_n.ln() / big_n).abs() < 1e-12);
        let (mut within, mut across) = (0.0, 0.0);
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                if (i < n) == (j < n) {
                    within += s.w[(i, j)];
                } else {
                    across += s.w[(i, j)];
                }
            }
        }
        let pairs_within = 2.0 * (n * (n - 1) / 2) as f64;
        let pairs_across = (n * n) as f64;
        let z = |count: f64, pairs: f64, prob: f64| (count - pairs * prob) / (pairs * prob * (1.0 - prob)).sqrt();
        assert!(z(within, pairs_within, s.p).abs() < 3.0, "within z={}", z(within, pairs_within, s.p));
        assert!(z(across, pairs_across, s.q).abs() < 3.0, "across z={}", z(across, pairs_across, s.q));
        if alpha == beta {
            let diff = within / pairs_within - across / pairs_across;
            let se = (s.p * (1.0 - s.p) * (1.0 / pairs_within + 1.0 / pairs_across)).sqrt();
            assert!((diff / se).abs() < 3.0, "two-sample z={}", diff / se);
        }
    }
}
