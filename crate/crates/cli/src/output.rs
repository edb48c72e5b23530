use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::json;

use temposum_core::frame::Frame;
use temposum_core::provenance::{chart_for, chart_for_group, render_svg, write_chart, ChartSpec};
use temposum_core::{RunConfig, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Table,
}

pub struct Emitter {
    sink: Box<dyn Write>,
    format: Format,
    provenance_dir: Option<PathBuf>,
    svg: bool,
    count: usize,
}

impl Emitter {
    pub fn new(sink: Box<dyn Write>, format: Format, provenance_dir: Option<PathBuf>, svg: bool) -> Self {
        Self {
            sink,
            format,
            provenance_dir,
            svg,
            count: 0,
        }
    }

    pub fn individual(&mut self, s: &Summary, frame: &Frame, config: &RunConfig) -> io::Result<()> {
        let chart = self.provenance_dir.is_some().then(|| chart_for(s, frame, config));
        self.emit(s, chart)
    }

    pub fn group(&mut self, s: &Summary, users: &[String]) -> io::Result<()> {
        let chart = self.provenance_dir.is_some().then(|| chart_for_group(s, users));
        self.emit(s, chart)
    }

    fn emit(&mut self, s: &Summary, chart: Option<ChartSpec>) -> io::Result<()> {
        self.count += 1;
        let path = match (&self.provenance_dir, chart) {
            (Some(dir), Some(chart)) => {
                let path = dir.join(format!("{:04}-{}.json", self.count, s.kind));
                write_chart(&chart, &path)?;
                if self.svg {
                    fs::write(path.with_extension("svg"), render_svg(&chart))?;
                }
                Some(path.to_string_lossy().into_owned())
            }
            _ => None,
        };
        match self.format {
            Format::Jsonl => {
                let line = json!({
                    "type": s.kind,
                    "attributes": s.attributes,
                    "text": s.text,
                    "metrics": s.metrics,
                    "provenance_path": path,
                });
                writeln!(self.sink, "{line}")
            }
            Format::Table => {
                if self.count == 1 {
                    writeln!(self.sink, "{:<22} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6}  text", "type", "T1", "T2", "T3", "T4", "T5", "T6")?;
                }
                let m = s.metrics.as_array().map(|v| v.display());
                writeln!(
                    self.sink,
                    "{:<22} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6}  {}",
                    s.kind.name(),
                    m[0],
                    m[1],
                    m[2],
                    m[3],
                    m[4],
                    m[5],
                    s.text
                )
            }
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.sink.flush()
    }
}
