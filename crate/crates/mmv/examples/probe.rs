use mmv::montecarlo::*;
use mmv::solvers::SolverOptions;
use std::time::Instant;

fn main() {
    let opts = SolverOptions { max_iterations: 2000, tolerance: 1e-6, ..SolverOptions::default() };
    for (label, ens, model, k, l) in [
        ("alltop k5 L4", EnsembleSpec::AlltopGabor{n:29}, CoefficientSpec::model_two(), 5usize, 4usize),
        ("alltop k6 L1", EnsembleSpec::AlltopGabor{n:29}, CoefficientSpec::model_two(), 6, 1),
        ("sph k8 L4", EnsembleSpec::Spherical{n:32, cols:256}, CoefficientSpec::model_one(), 8, 4),
        ("sph k10 L1", EnsembleSpec::Spherical{n:32, cols:256}, CoefficientSpec::model_one(), 10, 1),
    ] {
        let a = ens.build(42).unwrap();
        let t0 = Instant::now();
        let trials = 10;
        let mut succ = 0;
        for t in 0..trials {
            if run_trial(&a, k, l, AlgorithmKind::L21, &model, &opts, 1e-4, 3000 + t).success { succ += 1; }
        }
        println!("{label}: {:.3} s/trial, {succ}/{trials}", t0.elapsed().as_secs_f64()/trials as f64);
    }
}
