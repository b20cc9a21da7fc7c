//! Densities of polynomial configurations inside a set, and the residue-class
//! obstruction for a family with no common root modulo `k`.

use intersective::numeric::Irrational;
use intersective::poly::parse_poly;
use intersective::recurrence::{good_set_scan, obstruction_demo, partition_scan, WindowSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beta = Irrational::parse("sqrt(3)")?;
    let set = WindowSet::bohr(0, 100_000, &beta, 0.0, 0.2)?;
    let fam = [parse_poly("n^2 - 1", &["n"])?];
    let rep = good_set_scan(&set, &fam, 50, None)?;
    println!(
        "Bohr set of density {}: average {}, {} good shifts of {}, max gap {:?}",
        rep.set_density,
        rep.average,
        rep.good.len(),
        rep.entries.len(),
        rep.max_gap
    );

    let cells: Vec<WindowSet> = (0..3).map(|r| WindowSet::residues(0, 30_000, 3, &[r])).collect::<Result<_, _>>()?;
    let part = partition_scan(&cells, &fam, 60, None, None)?;
    for c in &part.cells {
        println!("cell {}: {} good shifts, longest run {:?}", c.index, c.good.len(), c.longest_run);
    }

    let obs = obstruction_demo(&[parse_poly("n^2 + 1", &["n"])?], 3, (0, 3000), 40)?;
    println!("n^2 + 1 mod 3: every cell free of configurations: {}", obs.all_confirmed);
    Ok(())
}
