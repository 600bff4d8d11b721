// Sign variation along x(i+1) = A(i) x(i) with totally positive steps.
//
// ```bash
// cargo run --example linear_systems
// ```

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signreg::dynamics::{monitor_lemma1, monitor_thm5, monitor_thm6, simulate_linear, LinearTimeVaryingSystem};
use signreg::fixtures::random_tp;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let steps: Vec<_> = (0..3)
        .map(|_| {
            let a = random_tp(4, &mut rng);
            a.scale(1.0 / a.norm_inf())
        })
        .collect::<Result<_, _>>()?;
    let sys = LinearTimeVaryingSystem::periodic(steps)?;

    let run = simulate_linear(&sys, &[1.0, -1.0, 1.0, -1.0], 12)?;
    for (i, a) in run.record.annotations.iter().enumerate().take(6) {
        println!("i = {i}: s^- = {}, s^+ = {}, in V = {}", a.s_minus, a.s_plus, a.in_v);
    }
    println!("{:?}", monitor_thm5(&run)?.status());

    let run = simulate_linear(&sys, &[1.0, 2.0, -1.0, -3.0], 12)?;
    println!("bounded variation, k = 2: {:?}", monitor_lemma1(&run, 2)?.status());

    let out = monitor_thm6(&sys, &[1.0, 0.0, 0.0, -1.0], &[0.0, 1.0, 0.0, 0.0], 60)?;
    let rel = if out.sign > 0 { '>' } else { '<' };
    println!("x_1(i) {rel} xbar_1(i) for all i >= {}", out.onset);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
