//! Two noise levels, sigma in {1, 3}. HART sets a separate z cutoff in each
//! group; a single z threshold cannot.

use hart::procedures::Procedure;
use hart::sim::{presets, run_experiment};

fn show(c: Option<f64>) -> String {
    c.map_or("inf".into(), |v| format!("{v:.3}"))
}

fn main() -> hart::Result<()> {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let run = run_experiment(&presets::two_group(5000, reps))?;
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "rep", "cut a", "cut b", "fitted a", "fitted b");
    for r in run.records_for(Procedure::Hart) {
        let c = r.cutoffs.expect("two-group cutoffs");
        println!("{:>4} {:>10} {:>10} {:>10} {:>10}", r.rep, show(c.realized_a), show(c.realized_b), show(c.fitted_a), show(c.fitted_b));
    }
    for s in &run.procedures {
        println!("{:<8} fdr {:.3}  ap {:.4}", s.procedure.tag(), s.fdr, s.ap);
    }
    Ok(())
}
