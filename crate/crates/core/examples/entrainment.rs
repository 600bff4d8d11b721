// A periodically forced saturating system settles onto a period-4 orbit;
// with frozen coefficients it settles onto an equilibrium.
//
// ```bash
// cargo run --example entrainment > /dev/null
// cargo run --example entrainment -- trajectory.csv
// ```

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signreg::dynamics::{
    check_assumption1, check_cor4, check_entrainment, detect_periodicity, simulate_nonlinear, Example3,
    NonlinearSystem,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!("period {:?}, domain {:?}", sys.period(), sys.domain());

    let a1 = check_assumption1(&sys, 1000, &mut rng)?;
    println!("averaged Jacobians TP on 1000 samples: {:?}", a1.status());

    let out = check_entrainment(&sys, &[5.0, 6.0], 500, 1e-6, &mut rng)?;
    println!(
        "periodic from step {:?}, residual {:e}",
        out.periodicity.onset, out.periodicity.residual
    );
    for x in &out.limit_cycle {
        println!("  ({:.6}, {:.6})", x[0], x[1]);
    }

    let frozen = sys.frozen(0);
    let eq = check_cor4(&frozen, &[5.0, 6.0], 500, 1e-8, &mut rng)?;
    println!("frozen coefficients: equilibrium {:.6?}, residual {:e}", eq.point, eq.residual);

    let record = simulate_nonlinear(&sys, &[5.0, 6.0], 60)?;
    let p = detect_periodicity(&record, 4, 1e-6, 8)?;
    println!("after 60 steps: converged {}, divisor residuals {:?}", p.converged, p.divisor_residuals);
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, record.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
