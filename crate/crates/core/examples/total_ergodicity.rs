//! Averages of `μ(A ∩ (A − p(n)α))` for an arc `A` under an irrational rotation.

use intersective::numeric::Irrational;
use intersective::poly::parse_poly;
use intersective::recurrence::{uc_average_circle, IntervalUnion};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = Irrational::parse("sqrt(2)")?;
    let arc = IntervalUnion::interval(0.0, 0.3)?;
    for text in ["n", "n^2", "n^3 + n"] {
        let p = parse_poly(text, &["n"])?;
        for n in [1_000, 100_000] {
            let r = uc_average_circle(&arc, &alpha, std::slice::from_ref(&p), &[(0, n)])?;
            println!("{text:<8} over [0, {n}): {:.6} (reference {:.6})", r.average, r.reference);
        }
    }

    let pair = [parse_poly("n", &["n"])?, parse_poly("2*n", &["n"])?];
    let r = uc_average_circle(&arc, &alpha, &pair, &[(0, 20_000)])?;
    println!("triple intersection average {:.6} ({})", r.average, r.reference_kind);
    Ok(())
}
