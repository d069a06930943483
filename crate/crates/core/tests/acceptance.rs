//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them).

mod common;

use common::{ops_for, perturbed_graph, random_locations, reference_sdr_objective, rigid_edges};
use lineloc::bench::{
    align_and_nrmse, apply_noise, gen_locations, run_table, DegreeTarget, NoiseCell, NoiseSpec,
    SdrConfigEcho, Solver, TableSpec,
};
use lineloc::camera::{
    build_line_graph, epipolar_samples, evm_rotations, sreaper_line, RelativeRotationGraph,
    RotationEdge,
};
use lineloc::distributed::{
    register_pair, solve_distributed, stitch, sync_signs, PatchDecomposition,
};
use lineloc::graph::{connected_components, LocationSet};
use lineloc::operators::CostOperators;
use lineloc::rigidity::{
    count_laman_certificate, extract_max_rigid_components, is_parallel_rigid,
};
use lineloc::rng::{derive_rng, derive_seed};
use lineloc::sdr::{
    adm_solve, btilde_adjoint, btilde_apply, least_squares_solve, relaxation_error, rounded_error,
    rounded_stability_bound, stability_bound, SdrConfig,
};
use lineloc::Formation;
use nalgebra::{DVector, Matrix3, Vector2, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

/// Configuration used for the benchmark-scale solves: the measured-NRMSE
/// criteria stabilize long before the full KKT certificate does, so these
/// runs trade certificate digits for wall-clock time.
fn bench_sdr() -> SdrConfigEcho {
    SdrConfigEcho { mu: 10.0, max_iters: 1500, tol: 1e-5 }
}

#[test]
fn criterion_1_exact_recovery_noiseless() {
    let start = std::time::Instant::now();
    let cfg = SdrConfig::default();
    let mut count = 0usize;
    let mut worst_nrmse = 0.0f64;
    let mut worst_gap = 1.0f64;
    for (instance, &n) in [5usize, 5, 5, 5, 5, 5, 5, 10, 10, 10, 10, 10, 10, 10, 20, 20, 20, 20, 20, 20]
        .iter()
        .enumerate()
    {
        let seed = 1000 + instance as u64;
        let edges = rigid_edges(n, 3, if n <= 5 { 0.9 } else { 0.5 }, seed);
        let truth = random_locations(n, 3, seed);
        let graph = apply_noise(&truth, &edges, &NoiseSpec { sigma: 0.0, p: 0.0, seed }).unwrap();
        let sol = adm_solve(&ops_for(graph), &cfg, seed).unwrap();
        let nrmse = align_and_nrmse(&sol.rounded, &truth).unwrap();
        assert!(
            nrmse <= 1e-4,
            "instance {instance} (n={n}): NRMSE {nrmse} above 1e-4"
        );
        assert!(
            sol.spectral_gap >= 1.0 - 1e-6,
            "instance {instance} (n={n}): spectral gap {}",
            sol.spectral_gap
        );
        worst_nrmse = worst_nrmse.max(nrmse);
        worst_gap = worst_gap.min(sol.spectral_gap);
        count += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(count, 20);
    assert!(elapsed < 60.0, "exact-recovery suite took {elapsed:.1}s, budget 60s");
    println!(
        "ACCEPTANCE 1 (exact recovery): PASS - 20 instances, worst NRMSE {worst_nrmse:.2e}, \
         worst spectral gap {worst_gap:.9}, {elapsed:.1}s"
    );
}

#[test]
fn criterion_2_table2_trend() {
    let spec = TableSpec {
        n: 100,
        d: 3,
        target: DegreeTarget::AvgMin { avg: 25.0, min: 3 },
        cells: vec![
            NoiseCell { sigma: 0.01, p: 0.0 },
            NoiseCell { sigma: 0.05, p: 0.0 },
            NoiseCell { sigma: 0.0, p: 0.05 },
        ],
        trials: 10,
        solvers: vec![Solver::Sdr, Solver::Ls],
        seed: 2024,
        fixed_graph: true,
        n_max: 70,
        sdr: bench_sdr(),
    };
    let report = run_table(&spec).unwrap();
    let sdr_low = report.cell_mean(Solver::Sdr, 0.01, 0.0).unwrap();
    let sdr_mid = report.cell_mean(Solver::Sdr, 0.05, 0.0).unwrap();
    let ls_mid = report.cell_mean(Solver::Ls, 0.05, 0.0).unwrap();
    let sdr_out = report.cell_mean(Solver::Sdr, 0.0, 0.05).unwrap();
    assert!(sdr_low <= 0.05, "SDR mean at sigma=0.01: {sdr_low}");
    assert!(sdr_mid <= 0.15, "SDR mean at sigma=0.05: {sdr_mid}");
    assert!(
        ls_mid >= 5.0 * sdr_mid,
        "LS mean {ls_mid} is not 5x the SDR mean {sdr_mid}"
    );
    assert!(sdr_out <= 0.40, "SDR mean at p=0.05: {sdr_out}");
    println!(
        "ACCEPTANCE 2 (Table-2 trend): PASS - SDR sigma=0.01: {sdr_low:.4}, sigma=0.05: \
         {sdr_mid:.4} (LS {ls_mid:.4}), p=0.05: {sdr_out:.4}"
    );
}

#[test]
fn criterion_3_spectral_gap_sweep() {
    let spec = TableSpec {
        n: 50,
        d: 3,
        target: DegreeTarget::Theta(0.5),
        cells: vec![
            NoiseCell { sigma: 1e-3, p: 0.0 },
            NoiseCell { sigma: 1e-2, p: 0.0 },
            NoiseCell { sigma: 1e-1, p: 0.0 },
        ],
        trials: 10,
        solvers: vec![Solver::Sdr],
        seed: 33,
        fixed_graph: true,
        n_max: 70,
        sdr: SdrConfigEcho { mu: 10.0, max_iters: 3000, tol: 1e-5 },
    };
    let report = run_table(&spec).unwrap();
    let gaps: Vec<f64> = [1e-3, 1e-2, 1e-1]
        .iter()
        .map(|&s| {
            report
                .cells
                .iter()
                .find(|c| c.solver == "sdr" && c.sigma == s)
                .and_then(|c| c.mean_spectral_gap)
                .unwrap()
        })
        .collect();
    assert!(gaps[0] >= 0.999, "mean spectral gap at sigma=1e-3: {}", gaps[0]);
    assert!(
        gaps[0] >= gaps[1] && gaps[1] >= gaps[2],
        "spectral gaps not monotone non-increasing: {gaps:?}"
    );
    println!(
        "ACCEPTANCE 3 (spectral-gap sweep): PASS - mean gaps {:.6}, {:.6}, {:.6}",
        gaps[0], gaps[1], gaps[2]
    );
}

#[test]
fn criterion_4_stability_bounds() {
    let cfg = SdrConfig { mu: 10.0, max_iters: 8000, ..SdrConfig::with_tol(1e-5) };
    let mut checked = 0usize;
    let mut worst_margin = f64::INFINITY;
    for trial in 0..20u64 {
        let n = 10 + 5 * (trial as usize % 5);
        let seed = 4100 + trial;
        let edges = rigid_edges(n, 3, 0.55, seed);
        let truth = random_locations(n, 3, seed);
        let mut rng = derive_rng(seed, "stability-eps", 0);
        let epsilon = 0.01 + 0.09 * rng.random::<f64>();
        let graph = perturbed_graph(&truth, &edges, epsilon, seed);
        let sol = adm_solve(&ops_for(graph), &cfg, seed).unwrap();

        let bound = stability_bound(&truth, &edges, epsilon).unwrap();
        let delta = relaxation_error(&sol.t_star, &truth);
        assert!(
            delta <= bound,
            "trial {trial} (n={n}, eps={epsilon:.3}): delta {delta:.4} above bound {bound:.4}"
        );
        let loc_bound = rounded_stability_bound(&truth, &edges, epsilon).unwrap();
        let loc_err = rounded_error(&sol.rounded, &truth);
        assert!(
            loc_err <= loc_bound,
            "trial {trial}: rounded error {loc_err:.4} above bound {loc_bound:.4}"
        );
        worst_margin = worst_margin.min((bound - delta) / bound.max(1e-300));
        checked += 1;
    }
    assert_eq!(checked, 20);
    println!(
        "ACCEPTANCE 4 (stability bounds): PASS - 20 trials, zero violations, smallest relative \
         margin {worst_margin:.3}"
    );
}

#[test]
fn criterion_5_adm_vs_oracle_and_operator_identity() {
    // Lemma identity: B B^T equals d M^T M + 2 d I entrywise, verified
    // through the operator compositions on basis vectors.
    let mut rng = derive_rng(55, "lemma-graphs", 0);
    for trial in 0..10 {
        let n = 4 + trial % 5;
        let d = 2 + trial % 3;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.6 {
                    edges.push((i, j));
                }
            }
        }
        if edges.is_empty() {
            edges.push((0, 1));
        }
        let p = random_locations(n, d, 5500 + trial as u64);
        let formation = Formation::from_locations(&p, &edges);
        let formation = match formation {
            Ok(f) => f,
            Err(_) => continue,
        };
        let ops = CostOperators::build(&formation);
        let m = ops.edge_count();
        for l in 0..m {
            let mut e = DVector::zeros(m);
            e[l] = 1.0;
            let col = btilde_apply(&ops, &btilde_adjoint(&ops, &e));
            for k in 0..m {
                let (ik, jk) = ops.edges()[k];
                let (il, jl) = ops.edges()[l];
                let shared = [ik, jk].iter().filter(|v| **v == il || **v == jl).count();
                let expected = if k == l {
                    4.0 * d as f64
                } else {
                    d as f64 * shared as f64
                };
                assert!(
                    (col[k] - expected).abs() <= 1e-10,
                    "BB^T entry ({k}, {l}) = {} expected {expected}",
                    col[k]
                );
            }
        }
    }

    // ADM against the independent augmented-Lagrangian reference on n = 8.
    let cfg = SdrConfig { mu: 10.0, ..SdrConfig::default() };
    let mut worst_rel = 0.0f64;
    for trial in 0..10u64 {
        let n = 8;
        let seed = 5600 + trial;
        let edges = rigid_edges(n, 3, 0.7, seed);
        let truth = random_locations(n, 3, seed);
        let graph = apply_noise(
            &truth,
            &edges,
            &NoiseSpec { sigma: 0.05, p: 0.0, seed },
        )
        .unwrap();
        let ops = ops_for(graph);
        let sol = adm_solve(&ops, &cfg, seed).unwrap();
        assert!(
            sol.trace_h_max <= 1e-8,
            "trial {trial}: Tr(H T) drifted to {}",
            sol.trace_h_max
        );
        let (_, ref_obj) = reference_sdr_objective(&ops, 1.0);
        let rel = (sol.objective - ref_obj).abs() / ref_obj.abs().max(1e-9);
        assert!(
            rel <= 1e-3,
            "trial {trial}: ADM objective {} vs reference {} (relative {rel:.2e})",
            sol.objective,
            ref_obj
        );
        worst_rel = worst_rel.max(rel);
    }
    println!(
        "ACCEPTANCE 5 (ADM vs oracle): PASS - operator identity to 1e-10, objective within \
         {worst_rel:.2e} of the reference, Tr(H T) within 1e-8"
    );
}

/// All connected labeled graphs on exactly `n` nodes, as edge lists.
fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &e)| e)
            .collect();
        if connected_components(n, &edges).len() == 1 {
            out.push(edges);
        }
    }
    out
}

#[test]
fn criterion_6_rigidity_matches_certificate() {
    let mut tested = 0usize;
    for n in 2..=6usize {
        for edges in connected_graphs(n) {
            for d in [2usize, 3] {
                let fast = is_parallel_rigid(n, &edges, d, 60 + tested as u64).unwrap();
                let cert = count_laman_certificate(n, &edges, d).unwrap();
                assert_eq!(
                    fast, cert,
                    "disagreement on n={n} d={d} edges={edges:?}"
                );
                tested += 1;
            }
        }
    }

    // curated cases: two triangles sharing a vertex, the linked variant,
    // and the four-cycle
    let two_triangles = vec![(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)];
    assert!(!is_parallel_rigid(5, &two_triangles, 2, 7).unwrap());
    let comps = extract_max_rigid_components(5, &two_triangles, 2, 7).unwrap();
    assert_eq!(comps, vec![vec![0, 1, 2], vec![2, 3, 4]]);
    let mut linked = two_triangles.clone();
    linked.push((0, 3));
    assert!(is_parallel_rigid(5, &linked, 2, 7).unwrap());
    assert!(is_parallel_rigid(5, &linked, 3, 7).unwrap());
    let four_cycle = vec![(0, 1), (1, 2), (2, 3), (0, 3)];
    assert!(is_parallel_rigid(4, &four_cycle, 3, 7).unwrap());
    assert!(!is_parallel_rigid(4, &four_cycle, 2, 7).unwrap());

    println!(
        "ACCEPTANCE 6 (rigidity vs certificate): PASS - {tested} connected graph/dimension \
         pairs agree, curated cases hold"
    );
}

#[test]
fn criterion_7_distributed_matches_full() {
    let cfg = SdrConfig { mu: 10.0, max_iters: 1200, ..SdrConfig::with_tol(1e-5) };
    let n = 200;
    let mut full_sum = 0.0;
    let mut dist_sum = 0.0;
    for trial in 0..5u64 {
        let seed = 7000 + trial;
        let edges = lineloc::bench::gen_graph(
            n,
            DegreeTarget::AvgMin { avg: 50.0, min: 6 },
            3,
            seed,
        )
        .unwrap();
        let mut rng = derive_rng(seed, "criterion7-locs", 0);
        let truth = gen_locations(n, 3, &mut rng);
        let graph = apply_noise(
            &truth,
            &edges,
            &NoiseSpec { sigma: 0.01, p: 0.01, seed: derive_seed(seed, "noise", 0) },
        )
        .unwrap();

        let full = adm_solve(&ops_for(graph.clone()), &cfg, seed).unwrap();
        let full_nrmse = align_and_nrmse(&full.rounded, &truth).unwrap();

        let dist = solve_distributed(&graph, &cfg, 70, seed).unwrap();
        let sub_truth = LocationSet::new(
            3,
            dist.covered_nodes.iter().map(|&k| truth.point(k).clone()).collect(),
        )
        .unwrap();
        let dist_nrmse = align_and_nrmse(&dist.locations, &sub_truth).unwrap();
        assert!(dist.patches.len() >= 2, "trial {trial}: expected a real decomposition");
        full_sum += full_nrmse;
        dist_sum += dist_nrmse;
    }
    let full_mean = full_sum / 5.0;
    let dist_mean = dist_sum / 5.0;
    assert!(
        dist_mean <= 1.25 * full_mean,
        "distributed mean NRMSE {dist_mean:.4} not within 25% of full {full_mean:.4}"
    );

    // exact recovery from noiseless local coordinates (random gauges with
    // |c| >= 0.5, arbitrary translations and signs)
    let mut recovered = 0usize;
    for trial in 0..6u64 {
        let mut rng = derive_rng(7100 + trial, "criterion7-exact", 0);
        let n = 18;
        let truth = gen_locations(n, 3, &mut rng);
        let patches: Vec<Vec<usize>> =
            vec![(0..7).collect(), (5..13).collect(), (11..18).collect()];
        let scales: Vec<f64> = (0..3)
            .map(|_| {
                let mag = 0.5 + 1.5 * rng.random::<f64>();
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let shifts: Vec<DVector<f64>> = (0..3)
            .map(|_| DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let locals: Vec<LocationSet> = patches
            .iter()
            .zip(&scales)
            .zip(&shifts)
            .map(|((p, &c), t)| {
                LocationSet::new(3, p.iter().map(|&k| (truth.point(k) - t) / c).collect()).unwrap()
            })
            .collect();
        let patch_edges = vec![(0usize, 1usize), (1, 2)];
        let mut z_pairs = Vec::new();
        for &(i, j) in &patch_edges {
            let overlap: Vec<(usize, usize)> = patches[i]
                .iter()
                .enumerate()
                .filter_map(|(a, &g)| {
                    patches[j].iter().position(|&h| h == g).map(|b| (a, b))
                })
                .collect();
            let (_, _, z) = register_pair(&locals[i], &locals[j], &overlap).unwrap();
            z_pairs.push(z);
        }
        let signs = sync_signs(3, &patch_edges, &z_pairs).unwrap();
        // synchronized signs must match the gauge signs up to a global flip
        let true_signs: Vec<i8> = scales.iter().map(|&c| if c >= 0.0 { 1 } else { -1 }).collect();
        let flip = signs[0] * true_signs[0];
        assert!(
            signs.iter().zip(&true_signs).all(|(s, t)| s * flip == *t),
            "trial {trial}: sign sync failed: {signs:?} vs {true_signs:?}"
        );
        let decomp = PatchDecomposition {
            d: 3,
            patches,
            patch_edges,
            local_estimates: locals,
            signs,
            pairwise: Vec::new(),
            dropped_nodes: Vec::new(),
            dropped_patches: 0,
        };
        let result = stitch(&decomp).unwrap();
        let nrmse = align_and_nrmse(&result.locations, &truth).unwrap();
        assert!(nrmse <= 1e-4, "trial {trial}: stitched NRMSE {nrmse}");
        recovered += 1;
    }
    println!(
        "ACCEPTANCE 7 (distributed): PASS - full mean NRMSE {full_mean:.4}, distributed \
         {dist_mean:.4}; exact recovery on {recovered}/6 noiseless gauges"
    );
}

/// Synthetic scene shared by the camera criterion.
struct Scene {
    rotations: Vec<Matrix3<f64>>,
    locations: Vec<Vector3<f64>>,
    graph: RelativeRotationGraph,
}

fn camera_scene(n: usize, n_points: usize, pairs_per_edge: usize, seed: u64) -> Scene {
    let mut rng = derive_rng(seed, "acceptance-scene", 0);
    let random_rotation = |rng: &mut rand_chacha::ChaCha8Rng| {
        let axis = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
        .normalize();
        let angle = rng.random::<f64>() * std::f64::consts::PI;
        nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle)
            .into_inner()
    };
    let rotations: Vec<Matrix3<f64>> = (0..n).map(|_| random_rotation(&mut rng)).collect();
    let locations: Vec<Vector3<f64>> = (0..n)
        .map(|_| {
            Vector3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ) * 3.0
        })
        .collect();
    let focal: Vec<f64> = (0..n).map(|_| 1.2 + 0.6 * rng.random::<f64>()).collect();
    let points: Vec<Vector3<f64>> = (0..n_points)
        .map(|_| {
            let dir = Vector3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
            .normalize();
            dir * (25.0 + 10.0 * rng.random::<f64>())
        })
        .collect();
    let project = |cam: usize, p: &Vector3<f64>| -> Option<Vector2<f64>> {
        let local = rotations[cam].transpose() * (p - locations[cam]);
        if local.z <= 0.1 {
            return None;
        }
        Some(Vector2::new(local.x, local.y) * (focal[cam] / local.z))
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut pairs = Vec::new();
            for p in &points {
                if pairs.len() >= pairs_per_edge {
                    break;
                }
                if let (Some(qi), Some(qj)) = (project(i, p), project(j, p)) {
                    pairs.push((qi, qj));
                }
            }
            if pairs.len() >= pairs_per_edge / 2 {
                edges.push(RotationEdge {
                    i,
                    j,
                    rot: rotations[i].transpose() * rotations[j],
                    pairs,
                });
            }
        }
    }
    let graph = RelativeRotationGraph::new(n, focal, edges).unwrap();
    Scene { rotations, locations, graph }
}

#[test]
fn criterion_8_camera_front_end() {
    // Noiseless end to end: 30 cameras, 500 scene points.
    let scene = camera_scene(30, 500, 24, 88);
    assert!(scene.graph.is_connected());
    let rots = evm_rotations(&scene.graph).unwrap();
    let nodes: Vec<usize> = (0..30).collect();
    let (line_graph, report) = build_line_graph(&scene.graph, &rots, &nodes).unwrap();
    assert!(report.dropped_edges.is_empty(), "dropped {:?}", report.dropped_edges);
    let cfg = SdrConfig { mu: 10.0, ..SdrConfig::default() };
    let sol = adm_solve(&ops_for(line_graph), &cfg, 8).unwrap();
    // locations come out in camera 1's frame
    let gauge = scene.rotations[0].transpose();
    let truth = LocationSet::new(
        3,
        scene
            .locations
            .iter()
            .map(|t| DVector::from_column_slice((gauge * t).as_slice()))
            .collect(),
    )
    .unwrap();
    let nrmse = align_and_nrmse(&sol.rounded, &truth).unwrap();
    assert!(nrmse <= 1e-3, "end-to-end NRMSE {nrmse}");

    // 30% outlier correspondences per edge: the robust subspace estimate
    // must beat PCA per edge and in the error-tail fraction.
    let mut rng = derive_rng(89, "acceptance-outliers", 0);
    let mut sreaper_better = 0usize;
    let mut total = 0usize;
    let mut sreaper_tail = 0usize;
    let mut pca_tail = 0usize;
    for e in &scene.graph.edges {
        let mut pairs = e.pairs.clone();
        let n_out = (0.3 * pairs.len() as f64).round() as usize;
        for pair in pairs.iter_mut().take(n_out) {
            *pair = (
                Vector2::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0),
                Vector2::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0),
            );
        }
        let samples = epipolar_samples(
            &scene.rotations[e.i],
            &scene.rotations[e.j],
            &pairs,
            scene.graph.focal[e.i],
            scene.graph.focal[e.j],
        );
        if samples.samples.len() < 4 {
            continue;
        }
        let line = sreaper_line(&samples.samples).unwrap();
        // plain PCA on the same samples
        let mut cov = Matrix3::<f64>::zeros();
        for s in &samples.samples {
            cov += s * s.transpose();
        }
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let pca_dir = eig.eigenvectors.column(order[0]).into_owned();

        let baseline = (scene.locations[e.i] - scene.locations[e.j]).normalize();
        let ang = |v: &Vector3<f64>| v.dot(&baseline).abs().clamp(0.0, 1.0).acos();
        let err_sr = ang(&line.direction);
        let err_pca = ang(&pca_dir);
        total += 1;
        if err_sr < err_pca {
            sreaper_better += 1;
        }
        if err_sr > std::f64::consts::PI / 8.0 {
            sreaper_tail += 1;
        }
        if err_pca > std::f64::consts::PI / 8.0 {
            pca_tail += 1;
        }
    }
    assert!(
        sreaper_better * 10 >= total * 9,
        "S-REAPER beat PCA on only {sreaper_better}/{total} edges"
    );
    assert!(
        sreaper_tail <= pca_tail,
        "S-REAPER tail {sreaper_tail}/{total} vs PCA tail {pca_tail}/{total}"
    );
    println!(
        "ACCEPTANCE 8 (camera front-end): PASS - noiseless end-to-end NRMSE {nrmse:.2e}; with \
         30% outliers S-REAPER beat PCA on {sreaper_better}/{total} edges, tails \
         {sreaper_tail} vs {pca_tail}"
    );
}

#[test]
fn least_squares_collapses_where_sdr_does_not() {
    // Companion check to the Table-2 criterion at a smaller scale: at
    // sigma = 0.05 the least-squares estimate degrades by an order of
    // magnitude while the relaxation stays accurate.
    let seed = 909;
    let edges =
        lineloc::bench::gen_graph(60, DegreeTarget::AvgMin { avg: 15.0, min: 2 }, 3, seed)
            .unwrap();
    let truth = random_locations(60, 3, seed);
    let graph =
        apply_noise(&truth, &edges, &NoiseSpec { sigma: 0.05, p: 0.0, seed }).unwrap();
    let ops = ops_for(graph);
    let sdr = adm_solve(
        &ops,
        &SdrConfig { mu: 10.0, max_iters: 2000, ..SdrConfig::with_tol(1e-5) },
        seed,
    )
    .unwrap();
    let ls = least_squares_solve(&ops).unwrap();
    let sdr_err = align_and_nrmse(&sdr.rounded, &truth).unwrap();
    let ls_err = align_and_nrmse(&ls, &truth).unwrap();
    assert!(sdr_err < 0.2, "SDR NRMSE {sdr_err}");
    assert!(ls_err > 2.0 * sdr_err, "LS {ls_err} vs SDR {sdr_err}");
}
