//! Graph density measures and min/max combinations of them.
//!
//! Every value is an exact rational so that thresholds, covers and density
//! indices compare without tolerance.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::mincut::edge_connectivity_value;

/// Largest clique size accepted by [`k_clique_density`]; counting cost grows
/// as C(n, k).
pub const MAX_CLIQUE_K: usize = 6;

/// A non-negative exact density value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DensityValue(Ratio<i64>);

impl DensityValue {
    pub const ZERO: DensityValue = DensityValue(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom > 0 && numer >= 0, "density must be a non-negative ratio");
        DensityValue(Ratio::new(numer, denom))
    }

    pub fn integer(v: i64) -> Self {
        DensityValue::new(v, 1)
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for DensityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Accepts integers, fractions `a/b`, and finite decimals such as `1.25`.
impl FromStr for DensityValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("invalid density value {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a < 0 || b <= 0 {
                return Err(bad());
            }
            return Ok(DensityValue::new(a, b));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.starts_with('-') || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 12 {
            return Err(bad());
        }
        let denom = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let numer = int.checked_mul(denom).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Ok(DensityValue::new(numer, denom))
    }
}

impl Serialize for DensityValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.numer())
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

impl From<i64> for DensityValue {
    fn from(v: i64) -> Self {
        DensityValue::integer(v)
    }
}

/// The five leaf measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// |E(S)| / |V(S)|
    EdgeDensity,
    /// minimum degree inside S
    MinDegree,
    /// number of k-cliques / |V(S)|
    KCliqueDensity(usize),
    /// sum of squared degrees / |V(S)|
    SquaredDegree,
    /// edge connectivity λ(S)
    EdgeConnectivity,
}

impl Measure {
    /// Whether every value of this measure is an integer.
    pub fn is_integer_valued(&self) -> bool {
        matches!(self, Measure::MinDegree | Measure::EdgeConnectivity)
    }

    pub fn eval(&self, s: &Graph) -> Result<DensityValue> {
        match *self {
            Measure::EdgeDensity => edge_density(s),
            Measure::MinDegree => min_degree(s),
            Measure::KCliqueDensity(k) => k_clique_density(s, k),
            Measure::SquaredDegree => squared_degree_density(s),
            Measure::EdgeConnectivity => edge_connectivity(s),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::EdgeDensity => write!(f, "edge"),
            Measure::MinDegree => write!(f, "mindeg"),
            Measure::KCliqueDensity(k) => write!(f, "kclique:{k}"),
            Measure::SquaredDegree => write!(f, "sqdeg"),
            Measure::EdgeConnectivity => write!(f, "conn"),
        }
    }
}

/// A density measure: a leaf, or the min/max of two or more sub-measures.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeasureExpr {
    Leaf(Measure),
    Min(Vec<MeasureExpr>),
    Max(Vec<MeasureExpr>),
}

impl MeasureExpr {
    pub fn leaf(m: Measure) -> Self {
        MeasureExpr::Leaf(m)
    }

    pub fn min(children: Vec<MeasureExpr>) -> Result<Self> {
        check_arity(&children)?;
        Ok(MeasureExpr::Min(children))
    }

    pub fn max(children: Vec<MeasureExpr>) -> Result<Self> {
        check_arity(&children)?;
        Ok(MeasureExpr::Max(children))
    }

    pub fn leaves(&self) -> Vec<Measure> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Measure>) {
        match self {
            MeasureExpr::Leaf(m) => out.push(*m),
            MeasureExpr::Min(c) | MeasureExpr::Max(c) => c.iter().for_each(|e| e.collect_leaves(out)),
        }
    }

    pub fn is_integer_valued(&self) -> bool {
        self.leaves().iter().all(Measure::is_integer_valued)
    }

    pub fn depth(&self) -> usize {
        match self {
            MeasureExpr::Leaf(_) => 0,
            MeasureExpr::Min(c) | MeasureExpr::Max(c) => 1 + c.iter().map(|e| e.depth()).max().unwrap_or(0),
        }
    }

    /// Checks structural invariants (arity, clique size bounds).
    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureExpr::Leaf(Measure::KCliqueDensity(k)) if *k < 2 || *k > MAX_CLIQUE_K => {
                Err(Error::CliqueSizeOutOfRange { k: *k, max: MAX_CLIQUE_K })
            }
            MeasureExpr::Leaf(_) => Ok(()),
            MeasureExpr::Min(c) | MeasureExpr::Max(c) => {
                check_arity(c)?;
                c.iter().try_for_each(|e| e.validate())
            }
        }
    }
}

fn check_arity(children: &[MeasureExpr]) -> Result<()> {
    if children.len() < 2 {
        return Err(Error::Measure("min/max need at least two arguments".into()));
    }
    Ok(())
}

impl From<Measure> for MeasureExpr {
    fn from(m: Measure) -> Self {
        MeasureExpr::Leaf(m)
    }
}

impl fmt::Display for MeasureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, c: &[MeasureExpr]| {
            write!(f, "{name}(")?;
            for (i, e) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        };
        match self {
            MeasureExpr::Leaf(m) => write!(f, "{m}"),
            MeasureExpr::Min(c) => list(f, "min", c),
            MeasureExpr::Max(c) => list(f, "max", c),
        }
    }
}

impl Serialize for MeasureExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for MeasureExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        expr.validate()?;
        Ok(expr)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Measure(format!("{what} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).to_ascii_lowercase()
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok().and_then(|s| s.parse().ok()).ok_or_else(|| self.error("expected integer"))
    }

    fn expr(&mut self) -> Result<MeasureExpr> {
        let start = self.pos;
        let name = self.ident();
        match name.as_str() {
            "min" | "max" => {
                if !self.eat(b'(') {
                    return Err(self.error("expected '('"));
                }
                let mut children = vec![self.expr()?];
                while self.eat(b',') {
                    children.push(self.expr()?);
                }
                if !self.eat(b')') {
                    return Err(self.error("expected ')' or ','"));
                }
                if name == "min" {
                    MeasureExpr::min(children)
                } else {
                    MeasureExpr::max(children)
                }
            }
            "edge" => Ok(Measure::EdgeDensity.into()),
            "mindeg" => Ok(Measure::MinDegree.into()),
            "sqdeg" => Ok(Measure::SquaredDegree.into()),
            "conn" => Ok(Measure::EdgeConnectivity.into()),
            "kclique" => {
                if !self.eat(b':') {
                    return Err(self.error("expected ':' after kclique"));
                }
                Ok(Measure::KCliqueDensity(self.number()?).into())
            }
            "" => Err(self.error("expected measure")),
            other => {
                self.pos = start;
                Err(Error::Measure(format!("unknown measure {other:?} at offset {start}")))
            }
        }
    }
}

fn nonempty(s: &Graph) -> Result<()> {
    if s.is_empty() {
        Err(Error::EmptyGraph)
    } else {
        Ok(())
    }
}

/// |E(S)| / |V(S)|, half the average degree.
pub fn edge_density(s: &Graph) -> Result<DensityValue> {
    nonempty(s)?;
    Ok(DensityValue::new(s.edge_count() as i64, s.node_count() as i64))
}

pub fn min_degree(s: &Graph) -> Result<DensityValue> {
    nonempty(s)?;
    let d = s.nodes().map(|v| s.degree(v)).min().unwrap_or(0);
    Ok(DensityValue::integer(d as i64))
}

/// Number of k-cliques divided by |V(S)|.
pub fn k_clique_density(s: &Graph, k: usize) -> Result<DensityValue> {
    nonempty(s)?;
    if !(2..=MAX_CLIQUE_K).contains(&k) {
        return Err(Error::CliqueSizeOutOfRange { k, max: MAX_CLIQUE_K });
    }
    Ok(DensityValue::new(count_k_cliques(s, k) as i64, s.node_count() as i64))
}

/// Counts k-cliques by extending each clique only with higher-ranked
/// common neighbours, where rank orders nodes by (degree, index).
pub fn count_k_cliques(s: &Graph, k: usize) -> u64 {
    let n = s.node_count();
    let mut order: Vec<NodeId> = s.nodes().collect();
    order.sort_by_key(|&v| (s.degree(v), v));
    let mut rank = vec![0usize; n];
    for (r, v) in order.iter().enumerate() {
        rank[v.0] = r;
    }
    let forward: Vec<Vec<NodeId>> = s.nodes().map(|v| s.neighbors(v).iter().copied().filter(|w| rank[w.0] > rank[v.0]).collect()).collect();

    fn extend(forward: &[Vec<NodeId>], candidates: &[NodeId], remaining: usize) -> u64 {
        if remaining == 0 {
            return 1;
        }
        if candidates.len() < remaining {
            return 0;
        }
        let mut total = 0;
        for &v in candidates {
            let next: Vec<NodeId> = forward[v.0].iter().copied().filter(|w| candidates.contains(w)).collect();
            total += extend(forward, &next, remaining - 1);
        }
        total
    }

    s.nodes().map(|v| extend(&forward, &forward[v.0], k - 1)).sum()
}

/// Sum of squared degrees divided by |V(S)|.
pub fn squared_degree_density(s: &Graph) -> Result<DensityValue> {
    nonempty(s)?;
    let sum: usize = s.nodes().map(|v| s.degree(v) * s.degree(v)).sum();
    Ok(DensityValue::new(sum as i64, s.node_count() as i64))
}

/// λ(S); 0 for a single node or a disconnected graph.
pub fn edge_connectivity(s: &Graph) -> Result<DensityValue> {
    nonempty(s)?;
    Ok(DensityValue::integer(edge_connectivity_value(s) as i64))
}

pub fn eval_measure(m: &MeasureExpr, s: &Graph) -> Result<DensityValue> {
    match m {
        MeasureExpr::Leaf(leaf) => leaf.eval(s),
        MeasureExpr::Min(children) => {
            let mut best: Option<DensityValue> = None;
            for c in children {
                let v = eval_measure(c, s)?;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
            best.ok_or_else(|| Error::Measure("empty min".into()))
        }
        MeasureExpr::Max(children) => {
            let mut best: Option<DensityValue> = None;
            for c in children {
                let v = eval_measure(c, s)?;
                best = Some(best.map_or(v, |b| b.max(v)));
            }
            best.ok_or_else(|| Error::Measure("empty max".into()))
        }
    }
}
