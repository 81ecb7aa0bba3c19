//! The declarative end-to-end run: index, augment, retrieve, fuse and
//! evaluate from a TOML file. A second run finds every stage up to date.
//!
//!     cargo run -p gar --example pipeline -- [config.toml]

use std::path::{Path, PathBuf};

use gar::config::{load_config, Overrides};
use gar::pipeline::run_pipeline;
use gar::report::summary_tsv;

fn main() -> gar::Result<()> {
    let config_path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy/pipeline.toml"));
    let overrides = Overrides {
        output_dir: Some(std::env::temp_dir().join("gar-example-pipeline")),
        ..Overrides::default()
    };
    let config = load_config(Some(&config_path), &overrides)?;
    print!("{}", config.describe());

    for attempt in ["first run", "second run"] {
        let outcome = run_pipeline(&config)?;
        let ran: Vec<&str> = outcome
            .stages
            .iter()
            .filter(|s| s.ran)
            .map(|s| s.name.as_str())
            .collect();
        println!(
            "\n{attempt}: {} of {} stages ran {ran:?}",
            ran.len(),
            outcome.stages.len()
        );
        if attempt == "first run" {
            print!("{}", summary_tsv(&outcome.reports));
        }
        println!("report: {}", outcome.report_path.display());
    }
    Ok(())
}
