//! Decides intersectivity of single polynomials and re-checks each certificate
//! with the standalone verifier, including after a round trip through JSON.

use intersective::cert::{verify, Certificate};
use intersective::intersect::{hensel_sweep, intersective_decide_1var, DEFAULT_BUDGET};
use intersective::poly::parse_poly;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        "(n^2 - 5)*(n^2 - 41)*(n^2 - 205)",
        "(n^2 - 13)*(n^2 - 17)*(n^2 - 221)",
        "n^3 - 8",
        "n^2 + 1",
        "2*n + 1",
        "(n^3 - 19)*(n^2 + n + 1)",
    ];
    for text in cases {
        let p = parse_poly(text, &["n"])?;
        let (verdict, cert) = intersective_decide_1var(&p, 200, 12, DEFAULT_BUDGET)?;
        let back = Certificate::from_json(&cert.to_json())?;
        let check = verify(&back).map(|_| "accepted").unwrap_or("rejected");
        println!("{text:<36} {verdict:?} via {} ({check})", cert.evidence.kind());
    }

    let p = parse_poly("(n^3 - 19)*(n^2 + n + 1)", &["n"])?;
    let sweep = hensel_sweep(&p, 100, 12)?;
    println!("local roots at every prime up to 100: {}", sweep.all_certified());
    for (q, outcome) in sweep.results.iter().take(5) {
        println!("  {q}: {outcome:?}");
    }
    Ok(())
}
