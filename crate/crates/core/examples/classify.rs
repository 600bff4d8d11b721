// Sign-regularity classes of a few matrices.
//
// ```bash
// cargo run --example classify
// ```

use std::error::Error;

use signreg::fixtures::{ones_plus_identity, pascal, ssr3_example};
use signreg::sign_regularity::{classify, ssr_k_test, MinorTolerance};
use signreg::DenseMatrix;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cases: Vec<(&str, DenseMatrix)> = vec![
        ("4x4 example", ssr3_example()),
        ("Pascal 5", pascal(5)),
        ("J + I, n = 3", ones_plus_identity(3, 1.0)),
        ("J + I, n = 4", ones_plus_identity(4, 1.0)),
    ];
    for (name, a) in &cases {
        let report = classify(a, MinorTolerance::default())?;
        let orders: Vec<String> = report
            .per_k
            .iter()
            .map(|v| match v.epsilon_k {
                Some(e) => format!("k={}:{}", v.k, if e > 0 { '+' } else { '-' }),
                None => format!("k={}:x", v.k),
            })
            .collect();
        println!("{name:>14}  {}  {:?}", orders.join(" "), report.flags);
    }

    // an absolute threshold for a single order
    let v = ssr_k_test(&ssr3_example(), 3, Some(1e-9))?;
    println!("order 3 with absolute tol: SSR {} eps {:?} min |minor| {}", v.is_ssr, v.epsilon_k, v.min_abs_minor);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
