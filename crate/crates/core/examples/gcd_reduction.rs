//! Reduces joint intersectivity of a one-variable family to its GCD.

use intersective::cert::verify;
use intersective::intersect::{reduce_joint_to_gcd, DEFAULT_BUDGET};
use intersective::poly::parse_poly;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let families: [&[&str]; 3] = [
        &["2*n^2 + 3*n + 1", "4*n^2 + 4*n + 1"],
        &["(n - 3)*(n^2 + 1)", "(n - 3)*(n + 5)"],
        &["n^2 - 2", "n^2 - 3"],
    ];
    for texts in families {
        let fam = texts.iter().map(|t| parse_poly(t, &["n"])).collect::<Result<Vec<_>, _>>()?;
        let red = reduce_joint_to_gcd(&fam, 100, 12, DEFAULT_BUDGET)?;
        let cofactors: Vec<String> = red.bezout.cofactors.iter().map(|h| h.to_string()).collect();
        println!("family {texts:?}");
        println!("  gcd {} with scale {}, cofactors [{}]", red.bezout.gcd, red.bezout.scale, cofactors.join(", "));
        println!("  identity holds: {}", red.bezout.verify(&fam));
        println!("  gcd {:?}, family {:?}", red.gcd_verdict, red.family_verdict);
        println!("  certificate {}: {:?}", red.certificate.evidence.kind(), verify(&red.certificate).is_ok());
    }
    Ok(())
}
