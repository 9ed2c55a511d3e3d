use rayon::prelude::*;
use sausage_core::diffusion::{BmStepper, RngSpec};
use sausage_core::measure::SausageAccumulator;

fn mean_std(dim: usize, t: f64, dt: f64, eps: f64, h: f64, n: u64, seed: u64) -> (f64, f64) {
    let vals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let one = |_: &[f64]| 1.0;
            let stepper = BmStepper::new(dim, dt);
            let mut rng = RngSpec::new(seed, i).stream();
            let mut acc = SausageAccumulator::new(dim, eps, h).unwrap();
            let mut x = [0.0f64; 6];
            acc.observe(&x[..dim], &one).unwrap();
            for _ in 0..(t / dt) as usize {
                stepper.step(&mut x[..dim], &mut rng);
                acc.observe(&x[..dim], &one).unwrap();
            }
            acc.flush(&one).unwrap();
            acc.weight()
        })
        .collect();
    let m = vals.iter().sum::<f64>() / n as f64;
    let v = vals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
    (m, v.sqrt())
}

fn main() {
    println!("d=3 eps=1 h=0.125 t=20:");
    for dt in [1e-3, 2.5e-4, 6.25e-5] {
        let (m, s) = mean_std(3, 20.0, dt, 1.0, 0.125, 200, 7);
        println!("  dt={dt:.2e}: mean/t={:.4} (2pi={:.4}) std={:.3}", m / 20.0, std::f64::consts::TAU, s);
    }
    println!("d=6 eps=1 h=0.25 t=10:");
    for dt in [1e-3, 2.5e-4, 6.25e-5] {
        let (m, s) = mean_std(6, 10.0, dt, 1.0, 0.25, 60, 8);
        println!("  dt={dt:.2e}: mean/t={:.4} (cap={:.4}) std={:.3}", m / 10.0, 2.0 * std::f64::consts::PI.powi(3), s);
    }
}
