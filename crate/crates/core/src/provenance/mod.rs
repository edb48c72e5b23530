//! Chart specifications showing where each summary comes from.

mod svg;

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discretize::WindowSpan;
use crate::frame::{Frame, Track};
use crate::model::RunConfig;
use crate::protoforms::{ProtoformType, Summary, SupportUnit};

pub use svg::render_svg;

/// Horizontal axis. Points sit at day positions; ticks mark window starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XAxis {
    pub label: String,
    pub ticks: Vec<Tick>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub x: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub date: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub attribute: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub attribute: String,
    pub label: String,
    pub y_lo: f64,
    pub y_hi: f64,
    /// "summarizer" for the band named in the summary, else "band".
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMark {
    pub x_lo: f64,
    pub x_hi: f64,
    /// "focus" or "comparison".
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub attribute: String,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y: f64,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalLine {
    pub attribute: String,
    pub y: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub title: String,
    #[serde(rename = "type")]
    pub kind: ProtoformType,
    pub x_axis: XAxis,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    pub windows: Vec<WindowMark>,
    /// Indices into the points of every series.
    pub highlighted_points: Vec<usize>,
    pub segments: Vec<Segment>,
    pub goal_lines: Vec<GoalLine>,
}

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn window_mark(w: &WindowSpan, role: &str) -> WindowMark {
    WindowMark {
        x_lo: round6(w.start as f64 - 0.5),
        x_hi: round6(w.end as f64 - 0.5),
        role: role.to_string(),
    }
}

fn mean_segment(t: &Track, w: &WindowSpan, role: &str) -> Segment {
    Segment {
        attribute: t.attribute.clone(),
        x_lo: round6(w.start as f64 - 0.5),
        x_hi: round6(w.end as f64 - 0.5),
        y: round6(t.window_mean(w.range())),
        role: role.to_string(),
    }
}

/// Bands from the raw-unit breakpoints, stretched to cover the data.
fn bands_for(t: &Track, named: &[&str]) -> Vec<Band> {
    let lo = t.raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t.raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let edges = &t.band_edges;
    let first = edges.first().map_or(lo, |&e| lo.min(e));
    let last = edges.last().map_or(hi, |&e| hi.max(e));
    let mut bounds = vec![first];
    bounds.extend(edges.iter().copied());
    bounds.push(last);
    bounds
        .windows(2)
        .enumerate()
        .map(|(i, b)| {
            let label = t.scheme.labels()[i].clone();
            Band {
                attribute: t.attribute.clone(),
                role: if named.contains(&label.as_str()) {
                    "summarizer"
                } else {
                    "band"
                }
                .to_string(),
                label,
                y_lo: round6(b[0]),
                y_hi: round6(b[1]),
            }
        })
        .collect()
}

/// Day indices behind the summary's supporting points.
fn highlighted_days(s: &Summary, frame: &Frame) -> Vec<usize> {
    let mut days: Vec<usize> = match s.support_unit {
        SupportUnit::Days => s.supporting_points.clone(),
        SupportUnit::DayPairs => s
            .supporting_points
            .iter()
            .flat_map(|&i| [i, i + 1])
            .collect(),
        SupportUnit::Occurrences => {
            let len = s
                .rule
                .as_ref()
                .map_or(1, |r| r.prefix.len() + r.suffix.len());
            s.supporting_points
                .iter()
                .flat_map(|&i| i..i + len)
                .collect()
        }
        SupportUnit::Windows => s
            .supporting_points
            .iter()
            .filter_map(|&w| frame.complete_window(w))
            .flat_map(|w| w.range())
            .collect(),
        SupportUnit::Users => Vec::new(),
    };
    days.sort_unstable();
    days.dedup();
    days.retain(|&i| i < frame.len());
    days
}

/// Chart for an individual summary over the frame it came from.
pub fn chart_for(summary: &Summary, frame: &Frame, config: &RunConfig) -> ChartSpec {
    use ProtoformType::*;
    let ticks = frame
        .windows
        .iter()
        .map(|w| Tick {
            x: round6(w.start as f64 - 0.5),
            label: format!("{} {}", frame.granularity.window_noun(), w.ordinal),
        })
        .collect();
    let series = frame
        .tracks
        .iter()
        .map(|t| Series {
            attribute: t.attribute.clone(),
            points: t
                .raw
                .iter()
                .enumerate()
                .map(|(i, &y)| Point {
                    x: i as f64,
                    y: round6(y),
                    date: frame.dates[i].to_string(),
                })
                .collect(),
        })
        .collect();
    let named: Vec<&str> = summary
        .conditions
        .iter()
        .chain(&summary.conclusions)
        .map(|c| c.label.as_str())
        .chain(summary.description.iter().flatten().map(String::as_str))
        .collect();
    let bands = frame.tracks.iter().flat_map(|t| bands_for(t, &named)).collect();

    let mut windows = Vec::new();
    let mut segments = Vec::new();
    let mut goal_lines = Vec::new();
    let focus = summary
        .query_window
        .and_then(|w| frame.complete_window(w));
    if let Some(w) = focus {
        windows.push(window_mark(w, "focus"));
    }
    match summary.kind {
        StandardEvalTW | GoalAssistance => {
            if let Some(w) = focus {
                segments.extend(frame.tracks.iter().map(|t| mean_segment(t, w, "window-mean")));
            }
        }
        Comparison | GoalComparison | ClusterBasedPattern | StandardPattern => {
            let others: Vec<usize> = match summary.kind {
                ClusterBasedPattern => summary.supporting_points.clone(),
                _ => summary.comparison_window.into_iter().collect(),
            };
            for o in others {
                if let Some(w) = frame.complete_window(o) {
                    windows.push(window_mark(w, "comparison"));
                }
            }
            for w in frame.complete_windows() {
                segments.extend(frame.tracks.iter().map(|t| mean_segment(t, w, "window-mean")));
            }
        }
        DayBasedPattern => {
            if let Some(d) = summary.weekday {
                for i in (0..frame.len()).filter(|&i| frame.weekday(i) == d) {
                    for t in &frame.tracks {
                        segments.push(Segment {
                            attribute: t.attribute.clone(),
                            x_lo: round6(i as f64 - 0.4),
                            x_hi: round6(i as f64 + 0.4),
                            y: round6(t.raw[i]),
                            role: "weekday".to_string(),
                        });
                    }
                }
            }
        }
        IfThenPattern | DayIfThenPattern => {
            let len = summary
                .rule
                .as_ref()
                .map_or(1, |r| r.prefix.len() + r.suffix.len());
            for &start in &summary.supporting_points {
                let end = (start + len).min(frame.len());
                for t in &frame.tracks {
                    let span = &t.raw[start..end];
                    segments.push(Segment {
                        attribute: t.attribute.clone(),
                        x_lo: round6(start as f64 - 0.5),
                        x_hi: round6(end as f64 - 0.5),
                        y: round6(span.iter().sum::<f64>() / span.len() as f64),
                        role: "occurrence".to_string(),
                    });
                }
            }
        }
        _ => {}
    }
    if matches!(summary.kind, GoalEvaluation | GoalComparison) {
        for t in &frame.tracks {
            if let Some(g) = config.goal_for(&t.attribute) {
                goal_lines.extend(g.comparator.thresholds().into_iter().map(|y| GoalLine {
                    attribute: t.attribute.clone(),
                    y: round6(y),
                    label: "goal".to_string(),
                }));
            }
        }
    }
    if summary.kind == GoalAssistance {
        if let Some(guide) = &config.diet_guideline {
            for t in &frame.tracks {
                if let Some(r) = guide.targets.get(&t.attribute) {
                    for (y, label) in [(r.min, "guideline minimum"), (r.max, "guideline maximum")] {
                        if let Some(y) = y {
                            goal_lines.push(GoalLine {
                                attribute: t.attribute.clone(),
                                y: round6(y),
                                label: label.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    let highlighted_points = match summary.kind {
        StandardEvalTW | GoalAssistance | Comparison | GoalComparison => Vec::new(),
        _ => highlighted_days(summary, frame),
    };
    ChartSpec {
        title: summary.text.clone(),
        kind: summary.kind,
        x_axis: XAxis {
            label: frame.granularity.window_noun().to_string(),
            ticks,
        },
        series,
        bands,
        windows,
        highlighted_points,
        segments,
        goal_lines,
    }
}

/// Chart for a group summary: one point per user, 1 when the user supports it.
pub fn chart_for_group(summary: &Summary, users: &[String]) -> ChartSpec {
    let points = users
        .iter()
        .enumerate()
        .map(|(i, u)| Point {
            x: i as f64,
            y: if summary.supporting_points.contains(&i) { 1.0 } else { 0.0 },
            date: u.clone(),
        })
        .collect();
    ChartSpec {
        title: summary.text.clone(),
        kind: summary.kind,
        x_axis: XAxis {
            label: "participant".to_string(),
            ticks: users
                .iter()
                .enumerate()
                .map(|(i, u)| Tick {
                    x: i as f64,
                    label: u.clone(),
                })
                .collect(),
        },
        series: vec![Series {
            attribute: "supports summary".to_string(),
            points,
        }],
        bands: Vec::new(),
        windows: Vec::new(),
        highlighted_points: summary.supporting_points.clone(),
        segments: Vec::new(),
        goal_lines: Vec::new(),
    }
}

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
pub fn to_canonical_json(spec: &ChartSpec) -> String {
    let value = serde_json::to_value(spec).expect("chart serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

/// Writes the chart, creating parent directories.
pub fn write_chart(spec: &ChartSpec, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_canonical_json(spec))
}

pub fn read_chart(path: &Path) -> io::Result<ChartSpec> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round6(1.23456789), 1.234568);
        assert_eq!(round6(-0.0000001), 0.0);
        let x = round6(2.0 / 3.0);
        let back: f64 = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(x, back);
    }
}
