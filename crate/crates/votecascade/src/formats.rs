//! Line-oriented text formats for networks, partitions and electorates.
//!
//! All three accept `#` comments and blank lines, use plain decimal numbers,
//! and report malformed input with its line number. Reals are written with
//! the shortest representation that parses back to the same value, so saving
//! and loading is lossless.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use votecascade_core::graph::{Edge, Partition, SocialNetwork};
use votecascade_core::model::{Candidate, Electorate, ViewMatrix, Voter};

use crate::error::{HarnessError, Result};

/// Probability given to edges listed without one.
pub const DEFAULT_EDGE_PROBABILITY: f64 = 1.0;

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Non-blank lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| HarnessError::parse(path, line, format!("invalid {what} `{token}`")))
}

/// Parse an edge list. Each `u v [p]` line adds both `u -> v` and `v -> u`
/// unless a `# directed` line is present. A `# nodes N` line fixes the node
/// count; otherwise it is one more than the largest id. Repeated edges keep
/// their first probability.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<SocialNetwork> {
    let mut directed = false;
    let mut declared: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let Some(comment) = raw.trim().strip_prefix('#') else { continue };
        let mut words = comment.split_whitespace();
        match words.next() {
            Some("directed") => directed = true,
            Some("nodes") => {
                let token = words.next().unwrap_or("");
                declared = Some(parse_field(path, i + 1, token, "node count")?);
            }
            _ => {}
        }
    }

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id = None;
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(HarnessError::parse(path, line, "expected `u v` or `u v p`"));
        }
        let u: usize = parse_field(path, line, fields[0], "node id")?;
        let v: usize = parse_field(path, line, fields[1], "node id")?;
        let p = match fields.get(2) {
            Some(t) => parse_field(path, line, t, "probability")?,
            None => DEFAULT_EDGE_PROBABILITY,
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(HarnessError::parse(path, line, format!("probability {p} outside [0, 1]")));
        }
        if u == v {
            return Err(HarnessError::parse(path, line, format!("self-loop on node {u}")));
        }
        if let Some(n) = declared {
            if u.max(v) >= n {
                return Err(HarnessError::parse(path, line, format!("node {} outside 0..{n}", u.max(v))));
            }
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        let mut push = |source: usize, target: usize| {
            if seen.insert((source, target)) {
                edges.push(Edge { source, target, probability: p });
            }
        };
        push(u, v);
        if !directed {
            push(v, u);
        }
    }
    let n = declared.unwrap_or(max_id.map_or(0, |m| m + 1));
    Ok(SocialNetwork::from_edges(n, &edges)?)
}

pub fn load_edge_list(path: &Path) -> Result<SocialNetwork> {
    parse_edge_list(&read_file(path)?, path)
}

/// Directed edge list with an explicit node count.
pub fn format_edge_list(net: &SocialNetwork) -> String {
    let mut out = format!("# directed\n# nodes {}\n", net.n());
    for e in net.edges() {
        let _ = writeln!(out, "{} {} {}", e.source, e.target, e.probability);
    }
    out
}

pub fn save_edge_list(net: &SocialNetwork, path: &Path) -> Result<()> {
    write_file(path, &format_edge_list(net))
}

/// Parse `node community` lines covering nodes `0..n`. Community labels are
/// arbitrary integers, renumbered densely in ascending order.
pub fn parse_partition(text: &str, n: usize, path: &Path) -> Result<Partition> {
    let mut pairs = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(HarnessError::parse(path, line, "expected `node community`"));
        }
        let node: usize = parse_field(path, line, fields[0], "node id")?;
        let label: u64 = parse_field(path, line, fields[1], "community")?;
        if node >= n {
            return Err(HarnessError::parse(path, line, format!("node {node} outside 0..{n}")));
        }
        pairs.push((node, label));
    }
    Partition::from_pairs(n, &pairs).map_err(|e| HarnessError::parse(path, text.lines().count(), e.to_string()))
}

pub fn load_partition(path: &Path, n: usize) -> Result<Partition> {
    parse_partition(&read_file(path)?, n, path)
}

pub fn format_partition(partition: &Partition) -> String {
    let mut out = String::new();
    for (v, l) in partition.labels().iter().enumerate() {
        let _ = writeln!(out, "{v} {l}");
    }
    out
}

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    path: &'a Path,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expecting: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(HarnessError::parse(
                self.path,
                self.last + 1,
                format!("unexpected end of file, expected {expecting}"),
            )),
        }
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let (line, content) = self.next(keyword)?;
        let mut words = content.split_whitespace();
        if words.next() != Some(keyword) {
            return Err(HarnessError::parse(self.path, line, format!("expected `{keyword} <count>`")));
        }
        let count = words.next().unwrap_or("");
        parse_field(self.path, line, count, "count")
    }

    fn records(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let mut positions = Vec::with_capacity(count);
        for expected in 0..count {
            let (line, content) = self.next(what)?;
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(HarnessError::parse(self.path, line, format!("expected `id position` for a {what}")));
            }
            let id: usize = parse_field(self.path, line, fields[0], "id")?;
            if id != expected {
                return Err(HarnessError::parse(self.path, line, format!("expected {what} id {expected}, found {id}")));
            }
            positions.push(parse_field(self.path, line, fields[1], "position")?);
        }
        Ok(positions)
    }
}

/// Parse an electorate:
///
/// ```text
/// candidates 2
/// 0 -0.5
/// 1 0.5
/// voters 1
/// 0 0.1
/// views          # optional: one row of candidate views per voter
/// -0.4 0.6
/// target 1
/// ```
pub fn parse_electorate(text: &str, path: &Path) -> Result<Electorate> {
    let mut lines = Lines { inner: Box::new(content_lines(text)), path, last: 0 };
    let m = lines.header("candidates")?;
    let candidate_positions = lines.records(m, "candidate")?;
    let n = lines.header("voters")?;
    let voter_positions = lines.records(n, "voter")?;

    let (mut line, mut content) = lines.next("`views` or `target`")?;
    let mut views = None;
    if content == "views" {
        let mut entries = Vec::with_capacity(n * m);
        for _ in 0..n {
            let (l, row) = lines.next("a row of views")?;
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != m {
                return Err(HarnessError::parse(path, l, format!("expected {m} views, found {}", fields.len())));
            }
            for f in fields {
                entries.push(parse_field(path, l, f, "view")?);
            }
        }
        views =
            Some(ViewMatrix::from_entries(n, m, entries).map_err(|e| HarnessError::parse(path, line, e.to_string()))?);
        (line, content) = lines.next("`target`")?;
    }
    let mut words = content.split_whitespace();
    if words.next() != Some("target") {
        return Err(HarnessError::parse(path, line, "expected `target <id>`"));
    }
    let target: usize = parse_field(path, line, words.next().unwrap_or(""), "target id")?;
    if let Ok((extra, _)) = lines.next("") {
        return Err(HarnessError::parse(path, extra, "unexpected content after `target`"));
    }

    let candidates =
        candidate_positions.iter().enumerate().map(|(id, &position)| Candidate { id, position }).collect::<Vec<_>>();
    let voters = voter_positions.iter().enumerate().map(|(id, &position)| Voter { id, position }).collect::<Vec<_>>();
    let views = views.unwrap_or_else(|| ViewMatrix::exact(&candidates, n));
    Electorate::new(candidates, voters, views, target).map_err(|e| HarnessError::parse(path, line, e.to_string()))
}

pub fn load_electorate(path: &Path) -> Result<Electorate> {
    parse_electorate(&read_file(path)?, path)
}

/// The electorate in the format read by [`parse_electorate`]. Views are
/// written only when they differ from the true positions.
pub fn format_electorate(e: &Electorate) -> String {
    let mut out = format!("candidates {}\n", e.n_candidates());
    for c in e.candidates() {
        let _ = writeln!(out, "{} {}", c.id, c.position);
    }
    let _ = writeln!(out, "voters {}", e.n_voters());
    for v in e.voters() {
        let _ = writeln!(out, "{} {}", v.id, v.position);
    }
    if *e.views() != ViewMatrix::exact(e.candidates(), e.n_voters()) {
        out.push_str("views\n");
        for v in 0..e.n_voters() {
            let row: Vec<String> = e.views().row(v).iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    let _ = writeln!(out, "target {}", e.target());
    out
}

pub fn save_electorate(e: &Electorate, path: &Path) -> Result<()> {
    write_file(path, &format_electorate(e))
}
