// Searching for inputs whose sign variation grows under a matrix.
//
// ```bash
// cargo run --example variation_diminishing
// ```

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signreg::fixtures::{pascal, ssr3_example};
use signreg::vdp::{check_cyclic_vdp, check_odd_vdp, check_order_k_vdp, structured_order_k_search};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = ssr3_example();

    let r = check_order_k_vdp(&a, 3, 5000, &mut rng)?;
    println!("order 3: {} samples, {} violations, SSR_3 {}", r.samples_run, r.violation_count, r.minor_condition);

    // not SSR_2, so some x with s^-(x) <= 1 must map to s^+(Ax) >= 2
    let r = structured_order_k_search(&a, 2, &mut rng)?;
    if let Some(w) = r.violations.first() {
        println!("order 2 witness: x = {:.4?}, Ax = {:.4?} ({:?})", w.x, w.ax, w.source);
    }

    let r = check_cyclic_vdp(&a, 2000, &mut rng)?;
    println!("cyclic: {} violations (odd orders all SSR: {})", r.violation_count, r.minor_condition);

    let r = check_odd_vdp(&pascal(4), 2000, &mut rng)?;
    println!("odd, Pascal 4: pass {}", r.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
