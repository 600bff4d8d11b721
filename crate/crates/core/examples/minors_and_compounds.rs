// Minors, the multiplicative compound, the unsigned adjugate and the Jacobi
// identity for the inverse.
//
// ```bash
// cargo run --example minors_and_compounds
// ```

use std::error::Error;

use signreg::fixtures::ssr3_example;
use signreg::minors::{all_minors, jacobi_identity_check, minor, multiplicative_compound, unsigned_adjugate};
use signreg::IndexSet;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = ssr3_example();
    println!("A =\n{}", a.to_text());

    let rows = IndexSet::new(vec![1, 3])?;
    let cols = IndexSet::new(vec![2, 4])?;
    println!("A({rows} | {cols}) = {}", minor(&a, &rows, &cols)?);

    let table = all_minors(&a, 3)?;
    for (r, c, m) in table.iter().take(4) {
        println!("A({r} | {c}) = {m:.4}");
    }
    println!("... {} order-3 minors, smallest |m| = {:.4}", table.len(), table.min_abs());

    let c2 = multiplicative_compound(&a, 2)?;
    println!("A^(2) is {}x{}", c2.rows(), c2.cols());
    let b = a.matmul(&a)?;
    let lhs = multiplicative_compound(&b, 2)?;
    let rhs = c2.matmul(&c2)?;
    let gap = lhs.entries().iter().zip(rhs.entries()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("max |(A A)^(2) - A^(2) A^(2)| = {gap:e}");

    println!("unsigned adjugate:\n{}", unsigned_adjugate(&a)?.to_text());

    let jac = jacobi_identity_check(&a, 2, 1e-9)?;
    println!("Jacobi identity, p = 2: {} pairs, max discrepancy {:e}, pass {}", jac.pairs_checked, jac.max_abs_discrepancy, jac.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
