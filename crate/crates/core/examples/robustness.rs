//! The robustness designs: mixture effects, estimated sigma, banded and AR(1)
//! dependence, t5 noise, and a narrow null with an empirical-null fit.
//! Usage: `robustness [m] [reps]`.

use hart::sim::{presets, run_experiment};

fn main() -> hart::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let m = args.next().flatten().unwrap_or(2000);
    let reps = args.next().flatten().unwrap_or(5);
    let scenarios = [
        ("mixture effects", presets::gaussian_mixture_effects(m, reps)),
        ("estimated sigma", presets::estimated_sigma(m, reps)),
        ("banded", presets::banded_dependence(m, reps)),
        ("ar1", presets::ar1_dependence(m, reps)),
        ("t5 noise", presets::heavy_tails(m, reps)),
        ("narrow null", presets::narrow_null(m, reps)),
    ];
    for (name, cfg) in scenarios {
        let run = run_experiment(&cfg)?;
        let line: Vec<String> = run.procedures.iter().map(|s| format!("{} {:.3}/{:.3}", s.procedure.tag(), s.fdr, s.ap)).collect();
        println!("{name:<16} fdr/ap: {}", line.join("  "));
        for d in &run.diagnostics {
            println!("  note: {d}");
        }
    }
    Ok(())
}
