//! Short arcs whose triple intersections along `n` and `2n+1` stay empty.

use intersective::numeric::Irrational;
use intersective::recurrence::empty_triple_check;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let golden = Irrational::parse("golden")?;
    for h in [0.01, 0.1, 0.9] {
        let r = empty_triple_check(&golden, h, 1, 10_000)?;
        println!("h = {h}: empty for all n: {}, first violation {:?}", r.all_empty, r.first_violation);
    }
    let r = empty_triple_check(&golden, 0.01, 1, 10_000)?;
    println!("every h below {:.6} passes on [1, 10^4]", r.largest_h_passing);
    Ok(())
}
