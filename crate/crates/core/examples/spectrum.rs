// Ordered eigen-decomposition, the real basis and real combinations of
// eigenvectors.
//
// ```bash
// cargo run --example spectrum
// ```

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signreg::fixtures::ssr3_example;
use signreg::sign_variation::SignVector;
use signreg::spectral::{combine, eigen, random_matching};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = ssr3_example();
    let spec = eigen(&a, None)?;
    for (i, (l, kind)) in spec.eigenvalues.iter().zip(&spec.kinds).enumerate() {
        println!("lambda_{} = {:.4} {:+.4}j  |{:.4}|  {:?}", i + 1, l.re, l.im, l.norm(), kind);
    }
    println!("eigenvector condition number {:.3}", spec.eigvec_condition);
    for (i, u) in spec.real_basis.iter().enumerate() {
        println!("u^{} = {:?}", i + 1, u.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>());
    }

    // the last eigenvector oscillates the most
    let last = SignVector::relative(spec.real_basis[3].clone(), 1e-9)?;
    println!("s^-(v^4) = {}", last.s_minus());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coeffs = random_matching(&spec, 1, 3, &mut rng)?;
    let (x, imag) = combine(&spec, &coeffs);
    let sv = SignVector::relative(x.clone(), 1e-9)?;
    println!("c_1 v^1 + c_2 v^2 + c_3 v^3 = {x:.4?} (imaginary residue {imag:e}), s^+ = {}", sv.s_plus());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
