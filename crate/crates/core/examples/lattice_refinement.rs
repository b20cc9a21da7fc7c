//! Passes to a sublattice on which every member is divisible by `k`, and picks
//! a coset of a fixed sublattice that keeps the family jointly solvable.

use intersective::lattice::{coset_refine, divisibility_sublattice, AffineLattice};
use intersective::poly::parse_poly;
use num_bigint::BigInt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fam = [parse_poly("x^2 + y^2 - 2", &["x", "y"])?, parse_poly("x - y", &["x", "y"])?];
    let full = AffineLattice::full(2);
    let (sub, proof) = divisibility_sublattice(&fam, &full, 6, 50)?;
    println!("divisible by 6 on offset {:?} with index {}", sub.offset(), sub.index());
    println!("  residue {:?}, verified to {}", proof.residue, proof.verified_bound);
    for q in &proof.quotients {
        println!("  quotient {}", q.render(&["x", "y"]));
    }

    // on 4Z the value is always odd; the coset 4Z + 1 keeps the root n = 5
    let p = parse_poly("(n - 5)*(n^2 + 1)", &["n"])?;
    let sub = AffineLattice::new(1, &[vec![BigInt::from(4)]], &[BigInt::from(0)])?;
    let choice = coset_refine(&[p], &AffineLattice::full(1), &sub, 100)?;
    println!("coset 4Z + {:?}: {} (verified to {})", choice.offset, choice.restricted[0], choice.verified_bound);
    Ok(())
}
