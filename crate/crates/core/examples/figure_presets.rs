//! Resolves every figure preset and summarizes the panels it produces,
//! without writing files. `dho <subcommand> --preset figN --out f.csv`
//! writes the same data.

use dho::cli::presets::{resolve, Preset};
use dho::cli::{compute, SeriesArgs};

fn main() {
    for preset in Preset::ALL {
        let args = SeriesArgs {
            preset: Some(preset),
            precision: 12,
            ..Default::default()
        };
        let cfg = match resolve(preset.command(), &args) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{}: {e}", preset.name());
                continue;
            }
        };
        match compute(&cfg) {
            Ok(panels) => {
                for p in panels {
                    println!(
                        "{:<5} {:<13} {:<8} {:>6} rows  [{}]",
                        preset.name(),
                        preset.subcommand(),
                        p.name.as_deref().unwrap_or("-"),
                        p.rows.len(),
                        p.columns.join(",")
                    );
                }
            }
            Err(e) => eprintln!("{}: {e}", preset.name()),
        }
    }
}
