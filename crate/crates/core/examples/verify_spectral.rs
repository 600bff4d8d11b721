// Checking the spectral structure that sign regularity forces.
//
// ```bash
// cargo run --example verify_spectral
// ```

use std::error::Error;

use signreg::fixtures::{pascal, ssr3_example};
use signreg::report::Report;
use signreg::spectral::{verify_cor2, verify_cor3, verify_ssr_spectrum, verify_thm2, verify_thm3, VerifyOptions};

fn show(report: &Report) {
    println!("{} -> {:?}", report.subject, report.status());
    for c in &report.checks {
        println!("  {:<24} {:?}", c.name, c.status);
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let opts = VerifyOptions { samples: 500, seed: 1, ..VerifyOptions::default() };

    show(&verify_thm2(&ssr3_example(), 3, &opts)?);

    let p = pascal(5);
    show(&verify_cor2(&p, 2, &opts)?);
    show(&verify_ssr_spectrum(&p, &opts)?);
    show(&verify_thm3(&p, &opts)?);
    show(&verify_cor3(&p, &opts)?);

    // the hypotheses are checked first
    match verify_thm3(&ssr3_example(), &opts) {
        Err(e) => println!("4x4 example: {e}"),
        Ok(r) => show(&r),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
