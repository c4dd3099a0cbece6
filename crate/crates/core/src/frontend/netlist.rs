//! Line-oriented netlists.
//!
//! ```text
//! component read read.mdl
//! env src out 1 (: read_color: {fname: string} :)
//! edge src.1 -> read.1
//! ```
//!
//! Component paths are resolved against the directory of the netlist.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use super::parser::Parser;
use super::{parse_interface, ComponentInterface, FrontendError};
use crate::mdl::Term;

/// An environment endpoint: `out` channels feed the network, `in` channels
/// receive from it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnvVertex {
    pub name: String,
    pub out_channels: BTreeMap<u32, Term>,
    pub in_channels: BTreeMap<u32, Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: String,
    pub src_channel: u32,
    pub dst: String,
    pub dst_channel: u32,
    pub line: usize,
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "edge {}.{} -> {}.{}", self.src, self.src_channel, self.dst, self.dst_channel)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetGraph {
    pub components: Vec<ComponentInterface>,
    pub envs: Vec<EnvVertex>,
    pub edges: Vec<Edge>,
    /// non-fatal findings, such as a disconnected graph
    pub warnings: Vec<String>,
}

impl NetGraph {
    fn channels(&self, vertex: &str, out: bool) -> Option<&BTreeMap<u32, Term>> {
        if let Some(c) = self.components.iter().find(|c| c.name == vertex) {
            return Some(if out { &c.out_channels } else { &c.in_channels });
        }
        self.envs
            .iter()
            .find(|e| e.name == vertex)
            .map(|e| if out { &e.out_channels } else { &e.in_channels })
    }
}

pub fn load_netlist(path: &Path) -> Result<NetGraph, FrontendError> {
    let text = std::fs::read_to_string(path).map_err(|e| FrontendError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_netlist(&text, base).map_err(|e| match e {
        FrontendError::InFile { .. } | FrontendError::Io { .. } => e,
        other => FrontendError::InFile {
            path: path.to_path_buf(),
            source: Box::new(other),
        },
    })
}

/// Whitespace-separated words with their 1-based columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, w)| (line[..s].chars().count() + 1, w))
        .collect()
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> FrontendError {
    FrontendError::Parse { line, col, msg: msg.into() }
}

fn endpoint(text: &str, line: usize, col: usize) -> Result<(String, u32), FrontendError> {
    let (name, n) = text
        .trim()
        .rsplit_once('.')
        .ok_or_else(|| parse_err(line, col, format!("expected `vertex.channel`, found `{}`", text.trim())))?;
    let n = n
        .parse()
        .map_err(|_| parse_err(line, col, format!("bad channel number in `{}`", text.trim())))?;
    Ok((name.to_string(), n))
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_netlist(text: &str, base_dir: &Path) -> Result<NetGraph, FrontendError> {
    let mut g = NetGraph::default();
    let mut names = BTreeSet::new();
    let mut envs: BTreeMap<String, EnvVertex> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let ws = words(line);
        let Some(&(col, keyword)) = ws.first() else { continue };
        match keyword {
            "component" => {
                let [_, (ncol, name), (_, path)] = ws[..] else {
                    return Err(parse_err(line_no, col, "expected `component <name> <path>`"));
                };
                if !valid_name(name) {
                    return Err(parse_err(line_no, ncol, format!("invalid vertex name `{name}`")));
                }
                if !names.insert(name.to_string()) {
                    return Err(parse_err(line_no, ncol, format!("vertex `{name}` declared twice")));
                }
                let path = base_dir.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| FrontendError::Io {
                    path: path.clone(),
                    msg: e.to_string(),
                })?;
                let mut iface = parse_interface(&text).map_err(|e| FrontendError::InFile {
                    path: PathBuf::from(&path),
                    source: Box::new(e),
                })?;
                iface.name = name.to_string();
                g.components.push(iface);
            }
            "env" => {
                if ws.len() < 5 {
                    return Err(parse_err(line_no, col, "expected `env <name> out|in <N> <term>`"));
                }
                let (ncol, name) = ws[1];
                if !valid_name(name) {
                    return Err(parse_err(line_no, ncol, format!("invalid vertex name `{name}`")));
                }
                let out = match ws[2].1 {
                    "out" => true,
                    "in" => false,
                    other => return Err(parse_err(line_no, ws[2].0, format!("expected `out` or `in`, found `{other}`"))),
                };
                let n: u32 = ws[3]
                    .1
                    .parse()
                    .map_err(|_| parse_err(line_no, ws[3].0, "expected a channel number"))?;
                let tcol = ws[4].0;
                let offset = line.char_indices().nth(tcol - 1).map_or(line.len(), |(b, _)| b);
                let mut p = Parser::new_at(&line[offset..], line_no, tcol)?;
                let term = p.term()?;
                p.expect_eof()?;
                if !term.is_choice() {
                    return Err(FrontendError::Sort {
                        line: line_no,
                        col: tcol,
                        msg: "environment channels carry choices".into(),
                    });
                }
                if !envs.contains_key(name) && !names.insert(name.to_string()) {
                    return Err(parse_err(line_no, ncol, format!("vertex `{name}` declared twice")));
                }
                let env = envs.entry(name.to_string()).or_insert_with(|| EnvVertex {
                    name: name.to_string(),
                    ..EnvVertex::default()
                });
                let chans = if out { &mut env.out_channels } else { &mut env.in_channels };
                if chans.insert(n, term).is_some() {
                    return Err(parse_err(line_no, ws[3].0, format!("channel {name}.{n} declared twice")));
                }
            }
            "edge" => {
                let rest_col = ws.get(1).map_or(col + 4, |w| w.0);
                let rest: String = ws[1..].iter().map(|w| w.1).collect::<Vec<_>>().join(" ");
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| parse_err(line_no, rest_col, "expected `a.N -> b.M`"))?;
                let (src, src_channel) = endpoint(a, line_no, rest_col)?;
                let (dst, dst_channel) = endpoint(b, line_no, rest_col)?;
                g.edges.push(Edge { src, src_channel, dst, dst_channel, line: line_no });
            }
            other => return Err(parse_err(line_no, col, format!("unknown directive `{other}`"))),
        }
    }
    g.envs = envs.into_values().collect();

    for e in &g.edges {
        for (vertex, n, out) in [(&e.src, e.src_channel, true), (&e.dst, e.dst_channel, false)] {
            let chans = g.channels(vertex, out).ok_or_else(|| FrontendError::UnknownVertex {
                line: e.line,
                name: vertex.clone(),
            })?;
            if !chans.contains_key(&n) {
                return Err(FrontendError::UnknownChannel {
                    line: e.line,
                    name: format!("{vertex}.{n} ({})", if out { "out" } else { "in" }),
                });
            }
        }
    }
    if !connected(&g, &names) {
        g.warnings.push("network graph is not weakly connected".into());
    }
    Ok(g)
}

fn connected(g: &NetGraph, names: &BTreeSet<String>) -> bool {
    let Some(first) = names.iter().next() else { return true };
    let mut seen = BTreeSet::from([first.as_str()]);
    let mut grew = true;
    while grew {
        grew = false;
        for e in &g.edges {
            let (a, b) = (e.src.as_str(), e.dst.as_str());
            if seen.contains(a) != seen.contains(b) {
                seen.insert(a);
                seen.insert(b);
                grew = true;
            }
        }
    }
    seen.len() == names.len()
}
