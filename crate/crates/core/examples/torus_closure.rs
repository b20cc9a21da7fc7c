//! Exact closure of a polynomial orbit on a torus, checked by sampling.

use intersective::lattice::AffineLattice;
use intersective::poly::parse_poly;
use intersective::torus::{
    closure_with_zero, component_closure, normalize_form, sample_verify, sum_closures, LinearForm, SampleOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // n·(α, 2α) + n^2·(β, 0) + (n^2 − n)·(1/2, 0)
    let polys = [parse_poly("n", &["n"])?, parse_poly("n^2", &["n"])?, parse_poly("n^2 - n", &["n"])?];
    let labels = ["alpha", "beta"];
    let vectors = [["alpha", "2*alpha"], ["beta", "0"], ["1/2", "0"]]
        .iter()
        .map(|row| row.iter().map(|t| LinearForm::parse(t, &labels)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    let declared = vec![
        ("alpha".to_string(), Some("sqrt(2)".to_string())),
        ("beta".to_string(), Some("sqrt(3)".to_string())),
    ];
    let t = normalize_form(&polys, &vectors, &declared, &AffineLattice::full(1))?;

    let parts = t
        .parts()
        .iter()
        .map(|p| component_closure(&p.label, &p.b, &p.divisor, t.domain()))
        .collect::<Result<Vec<_>, _>>()?;
    for (p, c) in t.parts().iter().zip(&parts) {
        println!("label {}: closure of dimension {}", p.label, c.rank());
    }
    let total = sum_closures(&parts)?;
    println!("irrational closure has dimension {} in T^{}", total.rank(), total.dim());

    let opts = SampleOptions { box_radius: 2000, ..SampleOptions::default() };
    let rep = sample_verify(&t, &total, &opts)?;
    println!(
        "sampled {} points: residual {:.2e}, empirical dimension {}",
        rep.samples, rep.max_membership_residual, rep.empirical_dimension
    );

    let z = closure_with_zero(&t, 30)?;
    println!(
        "on the sublattice with offset {:?} and index {}, zero in closure: {}",
        z.lattice.offset(),
        z.lattice.index(),
        z.certificate.zero_in_closure
    );
    Ok(())
}
