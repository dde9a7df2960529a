use becseg::cli::{parse_config, usage};
use becseg::run::run;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (config, warnings) = match parse_config(&args) {
        Ok(parsed) => parsed,
        Err(err) => {
            eprintln!("{err}");
            eprintln!("{}", usage());
            std::process::exit(2);
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match run(&config) {
        Ok(report) => {
            println!(
                "{}: {} checks, {} passed, {:.2}s",
                report.command,
                report.checks.len(),
                report.checks.iter().filter(|c| c.passed).count(),
                report.duration_seconds
            );
            for check in &report.checks {
                println!(
                    "  [{}] {} (measured {:.6e}, tolerance {:.6e}){}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.measured,
                    check.tolerance,
                    if check.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" — {}", check.detail)
                    }
                );
            }
            for (name, value) in &report.values {
                println!("  {name} = {value:.12}");
            }
            println!("  outputs in {}", config.output_dir.display());
            if !report.all_passed() {
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
