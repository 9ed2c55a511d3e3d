use sausage_core::diffusion::{BmStepper, RngSpec};
use sausage_core::measure::SausageAccumulator;
use std::time::Instant;

fn main() {
    let (dim, t, dt, eps, h) = (6usize, 40.0, 1e-3, 1.0, 0.25);
    let one = |_: &[f64]| 1.0;
    let start = Instant::now();
    let stepper = BmStepper::new(dim, dt);
    let mut rng = RngSpec::new(42, 0).stream();
    let mut acc = SausageAccumulator::new(dim, eps, h).unwrap();
    let mut x = [0.0f64; 6];
    acc.observe(&x[..dim], &one).unwrap();
    let steps = (t / dt) as usize;
    for _ in 0..steps {
        stepper.step(&mut x[..dim], &mut rng);
        acc.observe(&x[..dim], &one).unwrap();
    }
    acc.flush(&one).unwrap();
    println!(
        "steps={steps} cells={} weight={:.3} weight/t={:.4} elapsed={:?}",
        acc.occupied(),
        acc.weight(),
        acc.weight() / t,
        start.elapsed()
    );
}
