// Counting sign changes: s^-, s^+, the cyclic and odd variants, and the set V.
//
// ```bash
// cargo run --example sign_variation
// ```

use std::error::Error;
use std::f64::consts::PI;

use signreg::sign_variation::{oscillate_same_way, SignVector, Variant};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let y = SignVector::new(vec![1.0, -1.0, 0.0, -PI])?;
    println!("y = {:?}", y.entries());
    println!("  s^-(y) = {}, s^+(y) = {}", y.s_minus(), y.s_plus());
    assert_eq!((y.s_minus(), y.s_plus()), (1, 3));

    let c = SignVector::new(vec![0.0, -1.0, 0.0, 2.0, 0.0, 3.0])?;
    println!("cyclic counts of {:?}: ({}, {})", c.entries(), c.s_minus_cyclic()?, c.s_plus_cyclic()?);
    println!(
        "odd counts: s_o^- = {}, s_o^+ = {}",
        c.s_odd(Variant::Minus),
        c.s_odd(Variant::Plus)
    );

    // zeros flanked by opposite signs do not change the count
    for v in [vec![1.0, 0.0, -1.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 2.0]] {
        let sv = SignVector::new(v)?;
        println!("{:?} in V: {}", sv.entries(), sv.in_v());
    }

    // entries below a relative threshold count as zero
    let noisy = SignVector::relative(vec![1.0, 1e-14, -2.0], 1e-9)?;
    println!("{:?} reads as signs {:?}", noisy.entries(), noisy.signs());

    let a = SignVector::new(vec![1.0, -2.0, 3.0])?;
    let b = SignVector::new(vec![0.5, -0.1, 7.0])?;
    println!("{:?} and {:?} oscillate the same way: {}", a.entries(), b.entries(), oscillate_same_way(&a, &b)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
