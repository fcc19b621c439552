//! The uniform-scale design: FDR and average power of HART, BH, AZ and the
//! two oracles. Usage: `desk_simulation [m] [reps]`.

use hart::sim::{presets, run_experiment};

fn main() -> hart::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let m = args.next().flatten().unwrap_or(5000);
    let reps = args.next().flatten().unwrap_or(10);
    let run = run_experiment(&presets::uniform_scale(m, reps))?;
    println!("m = {m}, reps = {reps}, alpha = {}", run.config.alpha);
    println!("{:<8} {:>7} {:>7} {:>7} {:>7} {:>9}", "proc", "fdr", "se", "ap", "se", "rejected");
    for s in &run.procedures {
        println!("{:<8} {:>7.3} {:>7.3} {:>7.4} {:>7.4} {:>9.1}", s.procedure.tag(), s.fdr, s.fdr_se, s.ap, s.ap_se, s.mean_rejections);
    }
    Ok(())
}
