use lineloc::bench::{apply_noise, gen_graph, gen_locations, align_and_nrmse, DegreeTarget, NoiseSpec};
use lineloc::operators::CostOperators;
use lineloc::rng::{derive_rng, derive_seed};
use lineloc::sdr::{adm_solve, least_squares_solve, SdrConfig};
use lineloc::Formation;

fn main() {
    let n = 100;
    let edges = gen_graph(n, DegreeTarget::AvgMin { avg: 25.0, min: 3 }, 3, 2024).unwrap();
    // replicate the table's per-trial rng derivation (cell index 1 = sigma 0.05)
    for trial in 0..10u64 {
        let tag = 10 + trial; // cell_idx * trials + trial
        let mut loc_rng = derive_rng(2024, "trial-locs", tag);
        let truth = gen_locations(n, 3, &mut loc_rng);
        let noise = NoiseSpec { sigma: 0.05, p: 0.0, seed: derive_seed(2024, "trial-noise", tag) };
        let graph = apply_noise(&truth, &edges, &noise).unwrap();
        let ops = CostOperators::build(&Formation::from_graph(graph));
        let s1500 = adm_solve(&ops, &SdrConfig { mu: 10.0, max_iters: 1500, ..SdrConfig::with_tol(1e-5) }, derive_seed(2024, "trial-solve", tag)).unwrap();
        let s4000 = adm_solve(&ops, &SdrConfig { mu: 10.0, max_iters: 4000, ..SdrConfig::with_tol(1e-5) }, derive_seed(2024, "trial-solve", tag)).unwrap();
        let ls = least_squares_solve(&ops).unwrap();
        println!("trial {trial}: sdr1500 {:.4} (res {:.0e}/{:.0e}/{:.0e} mu {}) sdr4000 {:.4} ls {:.4}",
            align_and_nrmse(&s1500.rounded, &truth).unwrap(),
            s1500.residuals[0], s1500.residuals[1], s1500.residuals[2], s1500.mu_final,
            align_and_nrmse(&s4000.rounded, &truth).unwrap(),
            align_and_nrmse(&ls, &truth).unwrap());
    }
}
