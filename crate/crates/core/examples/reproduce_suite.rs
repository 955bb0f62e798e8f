//! Runs the full comparison suite and writes its files to the directory given
//! as first argument (default `reproduce`). Takes a minute or two.

use std::path::PathBuf;

use onoc_xbar::reproduce::{reproduce, ReproduceOptions};

fn main() -> onoc_xbar::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "reproduce".into()),
    );
    onoc_xbar::analysis::init_threads()?;
    let r = reproduce(&ReproduceOptions::default())?;
    std::fs::create_dir_all(&dir)?;
    for (name, body) in &r.files {
        std::fs::write(dir.join(name), body)?;
    }
    for s in &r.skipped {
        println!(
            "skipped {} {}x{} {}: {}",
            s.topology, s.grid_n, s.grid_n, s.param_set, s.reason
        );
    }
    let summary = r
        .files
        .iter()
        .find(|(n, _)| n == "summary.md")
        .map(|(_, b)| b.as_str())
        .unwrap_or("");
    print!("{summary}");
    Ok(())
}
