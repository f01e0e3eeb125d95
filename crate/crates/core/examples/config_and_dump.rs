// Writes an experiment config, reads it back and dumps one link draw.

use optical_dfts::harness::dump::ChannelDump;
use optical_dfts::harness::{channel_dump, parse_config, write_config, ExperimentConfig};

pub fn run_example() -> optical_dfts::Result<()> {
    let dir = std::env::temp_dir().join(format!("optical-dfts-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("link.cfg");

    let cfg = ExperimentConfig {
        n_subcarriers: 8,
        clip_cr_db: 3.0,
        ..ExperimentConfig::default()
    };
    write_config(&cfg, &path)?;
    print!("{}", std::fs::read_to_string(&path)?);
    let back = parse_config(&path)?;
    assert_eq!(back, cfg);

    let text = channel_dump(&back, 7)?;
    print!("{text}");
    let dump = ChannelDump::parse(&text, back.n_spans)?;
    println!("parsed {} spans, {} tones", dump.spans.len(), dump.tones.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example()
}
