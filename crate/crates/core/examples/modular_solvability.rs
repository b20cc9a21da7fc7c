//! Common roots modulo `k` and the least failing prime power of a family.

use intersective::intersect::{jointly_intersective_up_to, solvable_mod, JointVerdict, DEFAULT_BUDGET};
use intersective::poly::{parse_poly, IntPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_poly("n^2 + 1", &["n"])?;
    for k in [5, 10, 25, 3, 9] {
        let r = solvable_mod(std::slice::from_ref(&p), k, DEFAULT_BUDGET)?;
        match (&r.witness, r.obstruction) {
            (Some(w), _) => println!("n^2+1 mod {k}: root n = {}", w[0]),
            (None, Some(q)) => println!("n^2+1 mod {k}: no root, obstruction at {q}"),
            (None, None) => println!("n^2+1 mod {k}: no root"),
        }
    }

    let xy = ["x", "y"];
    scan("x^2 + y^2 - 1", &[parse_poly("x^2 + y^2 - 1", &xy)?])?;
    scan("x^2 + y^2 + 1", &[parse_poly("x^2 + y^2 + 1", &xy)?])?;
    scan("{n^2 - 2, n^2 - 3}", &[parse_poly("n^2 - 2", &["n"])?, parse_poly("n^2 - 3", &["n"])?])?;
    Ok(())
}

fn scan(name: &str, fam: &[IntPoly]) -> Result<(), Box<dyn std::error::Error>> {
    match jointly_intersective_up_to(fam, 200, DEFAULT_BUDGET)? {
        JointVerdict::SolvableAllModuli { bound } => println!("{name}: common root modulo every k <= {bound}"),
        JointVerdict::Counterexample { modulus, certificate } => {
            let kind = certificate.as_ref().map_or("none", |c| c.evidence.kind());
            println!("{name}: no common root modulo {modulus} (certificate {kind})");
        }
    }
    Ok(())
}
