// The compound matrix of an SSR_k matrix has a Perron vector formed by the
// k x k minors of the leading eigenvectors.
//
// ```bash
// cargo run --example compound_perron
// ```

use std::error::Error;

use signreg::fixtures::ssr3_example;
use signreg::spectral::{compound_spectrum_error, verify_compound_perron, VerifyOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = ssr3_example();
    let report = verify_compound_perron(&a, 3, &VerifyOptions::default())?;
    println!("{} -> {:?}", report.subject, report.status());
    let turns = &report.get("quarter_turns").expect("check present").witness;
    println!("q = j^{} w", turns["quarter_turns"]);
    if let Some(w) = turns["w"].as_array() {
        let w: Vec<f64> = w.iter().filter_map(|x| x.as_f64()).collect();
        let scale = 1.7049 / w[0];
        println!("w rescaled to the first entry 1.7049: {:.4?}", w.iter().map(|x| x * scale).collect::<Vec<_>>());
    }

    for k in 1..=4 {
        println!("k = {k}: compound spectrum vs eigenvalue products, rel. error {:e}", compound_spectrum_error(&a, k)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
