//! Plain-text instance files and seeded instance generators.
//!
//! ```text
//! p momst <n> <m> <d> <root>
//! # comment
//! e <u> <v> <c1> ... <cd>
//! ```
//!
//! Nodes are 1-indexed in files and 0-indexed in memory.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::cost::{CostError, CostVector, MAX_DIM};
use crate::graph::{Edge, GraphError, MultiGraph, MAX_NODES};

pub const MAX_COST: u64 = 100;
const NOISE: i64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("header declares {declared} edges, found {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("{0} nodes exceeds the supported maximum of {MAX_NODES}")]
    TooManyNodes(usize),
    #[error("line {line}, column {column}: negative cost {value}")]
    NegativeCost { line: usize, column: usize, value: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: GraphError },
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            match (ch.is_ascii_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    items.push((s + 1, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            items.push((s + 1, &text[s..]));
        }
        Tokens { line, items, at: 0 }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, column, message: message.into() }
    }

    fn end_column(&self) -> usize {
        self.items.last().map_or(1, |(c, t)| c + t.len())
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let tok = self.items.get(self.at).copied().ok_or_else(|| self.error(self.end_column(), format!("expected {what}")))?;
        self.at += 1;
        Ok(tok)
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let (col, tok) = self.next(&format!("`{word}`"))?;
        if tok != word {
            return Err(self.error(col, format!("expected `{word}`, found `{tok}`")));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<(usize, u64), ParseError> {
        let (col, tok) = self.next(what)?;
        tok.parse::<u64>().map(|v| (col, v)).map_err(|_| self.error(col, format!("expected {what}, found `{tok}`")))
    }

    fn cost(&mut self) -> Result<u64, ParseError> {
        let (col, tok) = self.next("cost")?;
        if let Some(rest) = tok.strip_prefix('-') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseError::NegativeCost { line: self.line, column: col, value: tok.to_string() });
            }
        }
        tok.parse::<u64>().map_err(|_| self.error(col, format!("expected cost, found `{tok}`")))
    }

    fn node(&mut self, n: usize) -> Result<usize, ParseError> {
        let (col, v) = self.number("node")?;
        if v == 0 || v > n as u64 {
            return Err(self.error(col, format!("node {v} outside 1..={n}")));
        }
        Ok(v as usize - 1)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.items.get(self.at) {
            Some((col, tok)) => Err(self.error(*col, format!("unexpected `{tok}`"))),
            None => Ok(()),
        }
    }
}

fn significant(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('#')
    })
}

/// Parses an instance file. Duplicate edge lines become parallel edges.
pub fn parse_instance(text: &str) -> Result<MultiGraph, ParseError> {
    let mut lines = significant(text);
    let (line_no, header) = lines.next().ok_or(ParseError::Syntax { line: 1, column: 1, message: "missing header".into() })?;
    let mut t = Tokens::new(line_no, header);
    t.keyword("p")?;
    t.keyword("momst")?;
    let (n_col, n) = t.number("node count")?;
    let (_, m) = t.number("edge count")?;
    let (d_col, d) = t.number("dimension")?;
    let (r_col, root) = t.number("root")?;
    t.finish()?;
    let n = n as usize;
    if n > MAX_NODES {
        return Err(ParseError::TooManyNodes(n));
    }
    if n < 2 {
        return Err(t.error(n_col, "an instance needs at least two nodes"));
    }
    if d == 0 || d as usize > MAX_DIM {
        return Err(t.error(d_col, format!("dimension must be in 1..={MAX_DIM}")));
    }
    if root == 0 || root as usize > n {
        return Err(t.error(r_col, format!("root {root} outside 1..={n}")));
    }
    let d = d as usize;
    let m = m as usize;

    let mut edges = Vec::with_capacity(m.min(1 << 16));
    let mut edge_lines = Vec::new();
    for (line_no, text) in lines {
        let mut t = Tokens::new(line_no, text);
        t.keyword("e")?;
        let u = t.node(n)?;
        let v = t.node(n)?;
        let mut costs = [0u64; MAX_DIM];
        for c in costs.iter_mut().take(d) {
            *c = t.cost()?;
        }
        t.finish()?;
        if u == v {
            return Err(t.error(1, "self-loop"));
        }
        let cost = CostVector::from_slice(&costs[..d]).map_err(|e| ParseError::Invalid { line: line_no, source: e.into() })?;
        edges.push(Edge { u, v, cost });
        edge_lines.push(line_no);
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount { declared: m, found: edges.len() });
    }
    MultiGraph::new(n, root as usize - 1, d, edges).map_err(|e| match e {
        GraphError::Disconnected => ParseError::Disconnected,
        GraphError::TooManyNodes(n) => ParseError::TooManyNodes(n),
        GraphError::SelfLoop { edge } | GraphError::NodeOutOfRange { edge, .. } | GraphError::DimensionMismatch { edge, .. } => {
            ParseError::Invalid { line: edge_lines[edge], source: e }
        }
        other => ParseError::Invalid { line: line_no, source: other },
    })
}

/// Writes `graph` in the instance format with the given comment lines.
pub fn write_instance(graph: &MultiGraph, comments: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p momst {} {} {} {}",
        graph.node_count(),
        graph.edge_count(),
        graph.dim(),
        graph.root() + 1
    );
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for e in graph.edges() {
        let _ = write!(out, "e {} {}", e.u + 1, e.v + 1);
        for c in e.cost.as_slice() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

pub fn serialize(graph: &MultiGraph) -> String {
    write_instance(graph, &[])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete { n: usize },
    Grid { rows: usize, cols: usize },
    /// A random spanning tree plus uniform extra edges, `edge_factor * n`
    /// edges in total. Parallel edges may occur.
    RandomSparse { n: usize, edge_factor: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::Grid { .. } => "grid",
            Family::RandomSparse { .. } => "random_sparse",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Family::Complete { n } | Family::RandomSparse { n, .. } => n,
            Family::Grid { rows, cols } => rows * cols,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correlation {
    #[default]
    Uncorrelated,
    Correlated,
    Anticorrelated,
}

impl Correlation {
    pub fn name(self) -> &'static str {
        match self {
            Correlation::Uncorrelated => "uncorrelated",
            Correlation::Correlated => "correlated",
            Correlation::Anticorrelated => "anticorrelated",
        }
    }
}

impl FromStr for Correlation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uncorrelated" => Ok(Correlation::Uncorrelated),
            "correlated" => Ok(Correlation::Correlated),
            "anticorrelated" => Ok(Correlation::Anticorrelated),
            _ => Err(format!("unknown correlation `{s}`")),
        }
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub family: Family,
    pub dim: usize,
    pub correlation: Correlation,
    pub seed: u64,
}

impl InstanceSpec {
    /// Short identifier, usable as a file stem.
    pub fn id(&self) -> String {
        let shape = match self.family {
            Family::Complete { n } => format!("complete-n{n}"),
            Family::Grid { rows, cols } => format!("grid-{rows}x{cols}"),
            Family::RandomSparse { n, edge_factor } => format!("sparse-n{n}-i{edge_factor}"),
        };
        format!("{shape}-d{}-{}-s{}", self.dim, self.correlation, self.seed)
    }

    /// `key=value` form accepted by [`InstanceSpec::from_str`].
    pub fn spec_string(&self) -> String {
        let shape = match self.family {
            Family::Complete { n } => format!("family=complete n={n}"),
            Family::Grid { rows, cols } => format!("family=grid rows={rows} cols={cols}"),
            Family::RandomSparse { n, edge_factor } => format!("family=random_sparse n={n} edge_factor={edge_factor}"),
        };
        format!("{shape} d={} correlation={} seed={}", self.dim, self.correlation, self.seed)
    }

    /// Header comment recorded in generated files.
    pub fn describe(&self) -> String {
        format!("generator: splitmix64 {}", self.spec_string())
    }
}

impl FromStr for InstanceSpec {
    type Err = String;

    /// Parses whitespace-separated `key=value` pairs. Keys: `family`, `n`,
    /// `rows`, `cols`, `edge_factor`, `d`, `correlation`, `seed`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut fields = std::collections::BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, found `{tok}`"))?;
            if fields.insert(k, v).is_some() {
                return Err(format!("`{k}` given twice"));
            }
        }
        let mut take_num = |k: &str| -> Result<Option<u64>, String> {
            fields.remove(k).map(|v| v.parse::<u64>().map_err(|_| format!("`{k}` must be a nonnegative integer, found `{v}`"))).transpose()
        };
        let n = take_num("n")?;
        let rows = take_num("rows")?;
        let cols = take_num("cols")?;
        let edge_factor = take_num("edge_factor")?;
        let dim = take_num("d")?.unwrap_or(2) as usize;
        let seed = take_num("seed")?.unwrap_or(0);
        let need = |v: Option<u64>, k: &str| v.map(|x| x as usize).ok_or_else(|| format!("missing `{k}`"));
        let family = match fields.remove("family").unwrap_or("complete") {
            "complete" => Family::Complete { n: need(n, "n")? },
            "grid" => Family::Grid { rows: need(rows, "rows")?, cols: need(cols, "cols")? },
            "random_sparse" => Family::RandomSparse { n: need(n, "n")?, edge_factor: need(edge_factor, "edge_factor")? },
            other => return Err(format!("unknown family `{other}`")),
        };
        let correlation = fields.remove("correlation").map_or(Ok(Correlation::Uncorrelated), str::parse)?;
        if let Some(k) = fields.keys().next() {
            return Err(format!("unknown key `{k}`"));
        }
        Ok(InstanceSpec { family, dim, correlation, seed })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid instance spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

fn topology(family: Family, rng: &mut SplitMix64) -> Vec<(usize, usize)> {
    match family {
        Family::Complete { n } => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        Family::Grid { rows, cols } => {
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let x = r * cols + c;
                    if c + 1 < cols {
                        pairs.push((x, x + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((x, x + cols));
                    }
                }
            }
            pairs
        }
        Family::RandomSparse { n, edge_factor } => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut pairs = Vec::with_capacity(n * edge_factor);
            for k in 1..n {
                let parent = order[rng.random_range(0..k)];
                pairs.push((parent.min(order[k]), parent.max(order[k])));
            }
            while pairs.len() < n * edge_factor {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n - 1);
                let v = if v >= u { v + 1 } else { v };
                pairs.push((u.min(v), u.max(v)));
            }
            pairs
        }
    }
}

fn costs(dim: usize, correlation: Correlation, rng: &mut SplitMix64) -> [u64; MAX_DIM] {
    let mut out = [0u64; MAX_DIM];
    let base = rng.random_range(0..=MAX_COST);
    out[0] = base;
    for c in out.iter_mut().take(dim).skip(1) {
        *c = match correlation {
            Correlation::Uncorrelated => rng.random_range(0..=MAX_COST),
            Correlation::Correlated => {
                (base as i64 + rng.random_range(-NOISE..=NOISE)).clamp(0, MAX_COST as i64) as u64
            }
            Correlation::Anticorrelated => {
                (MAX_COST as i64 - base as i64 + rng.random_range(-NOISE..=NOISE)).clamp(0, MAX_COST as i64) as u64
            }
        };
    }
    out
}

/// Deterministic instance for `spec`. Root is node 0. The topology is drawn
/// first, then the costs edge by edge.
pub fn generate(spec: &InstanceSpec) -> Result<MultiGraph, GenerateError> {
    let n = spec.family.node_count();
    if n < 2 {
        return Err(GenerateError::Spec(format!("{} nodes, need at least 2", n)));
    }
    if n > MAX_NODES {
        return Err(GraphError::TooManyNodes(n).into());
    }
    if spec.dim == 0 || spec.dim > MAX_DIM {
        return Err(CostError::BadDimension(spec.dim).into());
    }
    if let Family::RandomSparse { edge_factor, .. } = spec.family {
        if edge_factor * n < n - 1 {
            return Err(GenerateError::Spec(format!("{} edges cannot connect {n} nodes", edge_factor * n)));
        }
    }
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let pairs = topology(spec.family, &mut rng);
    let mut edges = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let c = costs(spec.dim, spec.correlation, &mut rng);
        edges.push(Edge { u, v, cost: CostVector::from_slice(&c[..spec.dim])? });
    }
    Ok(MultiGraph::new(n, 0, spec.dim, edges)?)
}

/// [`generate`] rendered as a file, with the spec in a header comment.
pub fn generate_text(spec: &InstanceSpec) -> Result<String, GenerateError> {
    Ok(write_instance(&generate(spec)?, &[spec.describe()]))
}
