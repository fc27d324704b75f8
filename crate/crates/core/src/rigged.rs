//! Rigged configurations: quantum space, layers of rows with riggings,
//! vacancy numbers and validity, nested restriction, and exhaustive
//! enumeration for the cross-checking harness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a layer `μ^(a)` with its rigging.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Row {
    pub length: usize,
    pub rigging: i64,
}

impl Row {
    pub fn new(length: usize, rigging: i64) -> Self {
        Row { length, rigging }
    }
}

/// An `sl_n` rigged configuration.
///
/// `quantum` is an ordered composition; its stored order is the processing
/// order of the bijection (rightmost row first). `layers[a - 1]` holds the
/// rows of `μ^(a)` for `a = 1..n-1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RiggedConfiguration {
    n: usize,
    quantum: Vec<usize>,
    layers: Vec<Vec<Row>>,
}

/// A rule of the definition that a configuration breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NegativeVacancy {
        layer: usize,
        row: usize,
        vacancy: i64,
    },
    RiggingOutOfRange {
        layer: usize,
        row: usize,
        rigging: i64,
        vacancy: i64,
    },
    RiggingOrder {
        layer: usize,
        row: usize,
    },
    EmptyRow {
        layer: usize,
        row: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeVacancy {
                layer,
                row,
                vacancy,
            } => {
                write!(f, "layer {layer} row {row}: vacancy {vacancy} < 0")
            }
            Violation::RiggingOutOfRange {
                layer,
                row,
                rigging,
                vacancy,
            } => {
                write!(
                    f,
                    "layer {layer} row {row}: rigging {rigging} outside 0..={vacancy}"
                )
            }
            Violation::RiggingOrder { layer, row } => write!(
                f,
                "layer {layer} row {row}: riggings of equal-length rows must weakly increase"
            ),
            Violation::EmptyRow { layer, row } => write!(f, "layer {layer} row {row}: zero length"),
        }
    }
}

impl RiggedConfiguration {
    /// Builds a configuration without checking validity. Missing trailing
    /// layers are treated as empty.
    pub fn new(n: usize, quantum: Vec<usize>, mut layers: Vec<Vec<Row>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("alphabet size must be positive".into()));
        }
        if layers.len() > n - 1 {
            return Err(Error::Invalid(format!(
                "{} layers given for sl_{n} (at most {})",
                layers.len(),
                n - 1
            )));
        }
        if quantum.contains(&0) {
            return Err(Error::Invalid("quantum space rows must be positive".into()));
        }
        layers.resize(n - 1, Vec::new());
        Ok(RiggedConfiguration { n, quantum, layers })
    }

    /// Shorthand for tests and literals: `layers[a-1] = [(length, rigging), ...]`.
    pub fn from_parts(n: usize, quantum: &[usize], layers: &[&[(usize, i64)]]) -> Result<Self> {
        let layers = layers
            .iter()
            .map(|rows| rows.iter().map(|&(l, r)| Row::new(l, r)).collect())
            .collect();
        RiggedConfiguration::new(n, quantum.to_vec(), layers)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quantum(&self) -> &[usize] {
        &self.quantum
    }

    /// Rows of `μ^(a)`, `1 <= a <= n-1`.
    pub fn layer(&self, a: usize) -> &[Row] {
        assert!(
            a >= 1 && a < self.n,
            "layer index {a} outside 1..{}",
            self.n
        );
        &self.layers[a - 1]
    }

    pub fn layers(&self) -> &[Vec<Row>] {
        &self.layers
    }

    /// Row lengths of `μ^(a)`, with `a = 0` the quantum space.
    pub fn shape(&self, a: usize) -> Vec<usize> {
        if a == 0 {
            self.quantum.clone()
        } else if a < self.n {
            self.layers[a - 1].iter().map(|r| r.length).collect()
        } else {
            Vec::new()
        }
    }

    /// `Q^(a)_j = Σ_k min(j, μ^(a)_k)`; zero for `a >= n`.
    pub fn q_value(&self, a: usize, j: usize) -> i64 {
        q_of(self.shape_iter(a), j)
    }

    fn shape_iter(&self, a: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        if a == 0 {
            Box::new(self.quantum.iter().copied())
        } else if a < self.n {
            Box::new(self.layers[a - 1].iter().map(|r| r.length))
        } else {
            Box::new(std::iter::empty())
        }
    }

    /// Vacancy number `p^(a)_j = Q^(a-1)_j - 2 Q^(a)_j + Q^(a+1)_j`.
    pub fn vacancy(&self, a: usize, j: usize) -> i64 {
        assert!(a >= 1 && a < self.n, "vacancy needs 1 <= a < n");
        self.q_value(a - 1, j) - 2 * self.q_value(a, j) + self.q_value(a + 1, j)
    }

    /// True if row `i` of layer `a` has rigging equal to its vacancy number.
    pub fn is_singular(&self, a: usize, i: usize) -> bool {
        let row = self.layer(a)[i];
        row.rigging == self.vacancy(a, row.length)
    }

    /// First violated rule, scanning layers bottom-up and rows in storage order.
    pub fn first_violation(&self) -> Option<Violation> {
        for a in 1..self.n {
            let rows = self.layer(a);
            for (i, row) in rows.iter().enumerate() {
                if row.length == 0 {
                    return Some(Violation::EmptyRow { layer: a, row: i });
                }
                let p = self.vacancy(a, row.length);
                if p < 0 {
                    return Some(Violation::NegativeVacancy {
                        layer: a,
                        row: i,
                        vacancy: p,
                    });
                }
                if row.rigging < 0 || row.rigging > p {
                    return Some(Violation::RiggingOutOfRange {
                        layer: a,
                        row: i,
                        rigging: row.rigging,
                        vacancy: p,
                    });
                }
            }
            if let Some(i) = rigging_order_violation(rows) {
                return Some(Violation::RiggingOrder { layer: a, row: i });
            }
        }
        None
    }

    pub fn validate(&self) -> Result<()> {
        match self.first_violation() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(v.to_string())),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Sorts any layer whose equal-length rows carry decreasing riggings by
    /// (length desc, rigging asc). Returns the layers that were touched.
    pub fn normalize(&mut self) -> Vec<usize> {
        let mut touched = Vec::new();
        for (idx, rows) in self.layers.iter_mut().enumerate() {
            if rigging_order_violation(rows).is_some() {
                rows.sort_by(|x, y| y.length.cmp(&x.length).then(x.rigging.cmp(&y.rigging)));
                touched.push(idx + 1);
            }
        }
        touched
    }

    /// `RC^(a)`: drops layers below `a` and makes `μ^(a)` the quantum space of
    /// an `sl_{n-a}` configuration. The riggings of `μ^(a)` are available via
    /// [`RiggedConfiguration::layer`] on the original.
    pub fn restrict(&self, a: usize) -> RiggedConfiguration {
        assert!(a < self.n, "restrict needs a < n");
        if a == 0 {
            return self.clone();
        }
        RiggedConfiguration {
            n: self.n - a,
            quantum: self.shape(a),
            layers: self.layers[a..].to_vec(),
        }
    }

    /// Same layers, different quantum space.
    pub fn with_quantum(&self, quantum: Vec<usize>) -> Result<Self> {
        RiggedConfiguration::new(self.n, quantum, self.layers.clone())
    }

    /// Exchanges quantum rows `i` and `i + 1`.
    pub fn swap_quantum(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.quantum.swap(i, i + 1);
        out
    }

    /// Copy with one rigging replaced.
    pub fn with_rigging(&self, a: usize, i: usize, rigging: i64) -> Self {
        let mut out = self.clone();
        out.layers[a - 1][i].rigging = rigging;
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RcJson::from(self)).expect("serializable")
    }

    /// Parses the JSON document and normalizes rigging order; returns the
    /// layers that needed normalization alongside the configuration.
    pub fn from_json(s: &str) -> std::result::Result<(Self, Vec<usize>), JsonError> {
        let raw: RcJson = serde_json::from_str(s).map_err(JsonError::Syntax)?;
        let mut rc = raw.into_rc().map_err(JsonError::Content)?;
        let touched = rc.normalize();
        Ok((rc, touched))
    }
}

/// Failure to read a configuration document.
#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON at line {}, column {}: {0}", .0.line(), .0.column())]
    Syntax(serde_json::Error),
    #[error("{0}")]
    Content(Error),
}

fn q_of(lengths: impl Iterator<Item = usize>, j: usize) -> i64 {
    lengths.map(|l| l.min(j) as i64).sum()
}

fn rigging_order_violation(rows: &[Row]) -> Option<usize> {
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.length == b.length && a.rigging > b.rigging {
                return Some(i);
            }
        }
    }
    None
}

impl fmt::Display for RiggedConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[derive(Serialize, Deserialize)]
struct LayerJson {
    rows: Vec<(usize, i64)>,
}

#[derive(Serialize, Deserialize)]
struct RcJson {
    n: usize,
    quantum: Vec<usize>,
    layers: Vec<LayerJson>,
}

impl From<&RiggedConfiguration> for RcJson {
    fn from(rc: &RiggedConfiguration) -> Self {
        RcJson {
            n: rc.n,
            quantum: rc.quantum.clone(),
            layers: rc
                .layers
                .iter()
                .map(|rows| LayerJson {
                    rows: rows.iter().map(|r| (r.length, r.rigging)).collect(),
                })
                .collect(),
        }
    }
}

impl RcJson {
    fn into_rc(self) -> Result<RiggedConfiguration> {
        let layers = self
            .layers
            .into_iter()
            .map(|l| {
                l.rows
                    .into_iter()
                    .map(|(len, r)| Row::new(len, r))
                    .collect()
            })
            .collect();
        RiggedConfiguration::new(self.n, self.quantum, layers)
    }
}

/// Default ceiling on the number of configurations `enumerate_rcs` will produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 2_000_000;

/// Every valid configuration whose quantum space is a composition of total
/// `1..=max_quantum_boxes` with all rows (quantum and layer) at most
/// `max_row_len` long. Layers are stored as partitions (longest row first,
/// riggings weakly increasing within equal lengths). The order is
/// deterministic: by quantum total, then composition, then layer shapes,
/// then riggings.
pub fn enumerate_rcs(
    n: usize,
    max_quantum_boxes: usize,
    max_row_len: usize,
    cap: usize,
) -> Result<Vec<RiggedConfiguration>> {
    if n == 0 {
        return Err(Error::Invalid("alphabet size must be positive".into()));
    }
    let mut out = Vec::new();
    for total in 1..=max_quantum_boxes {
        for quantum in compositions(total, max_row_len) {
            let mut shapes: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
            shape_rec(n, &quantum, max_row_len, &mut shapes, &mut |shapes| {
                push_riggings(n, &quantum, shapes, &mut out, cap)
            })?;
        }
    }
    Ok(out)
}

/// Compositions of `total` with parts in `1..=max_part`, lexicographic.
pub fn compositions(total: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in 1..=left.min(max_part) {
            cur.push(p);
            rec(left - p, max_part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, max_part, &mut Vec::new(), &mut out);
    out
}

/// Partitions with every part `<= max_part` and size `<= max_size`,
/// including the empty partition. Parts are non-increasing.
pub fn partitions_up_to(max_size: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for p in (1..=left.min(max_part)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(max_size, max_part, &mut Vec::new(), &mut out);
    out
}

fn vacancy_from_shapes(lower: &[usize], this: &[usize], upper: &[usize], j: usize) -> i64 {
    let q = |s: &[usize]| q_of(s.iter().copied(), j);
    q(lower) - 2 * q(this) + q(upper)
}

fn layer_nonnegative(lower: &[usize], this: &[usize], upper: &[usize]) -> bool {
    this.iter()
        .all(|&l| vacancy_from_shapes(lower, this, upper, l) >= 0)
}

/// Chooses layer shapes bottom-up. A layer's vacancies are fixed once the
/// layer above it is chosen, so a negative one prunes right there.
fn shape_rec(
    n: usize,
    quantum: &[usize],
    max_row_len: usize,
    shapes: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]) -> Result<()>,
) -> Result<()> {
    let a = shapes.len() + 1;
    let below = |shapes: &Vec<Vec<usize>>, idx: usize| -> Vec<usize> {
        if idx == 0 {
            quantum.to_vec()
        } else {
            shapes[idx - 1].clone()
        }
    };
    if a == n {
        // top layer: its vacancies see an empty layer above
        if let Some(top) = shapes.last() {
            let lower = below(shapes, shapes.len() - 1);
            if !layer_nonnegative(&lower, top, &[]) {
                return Ok(());
            }
        }
        return emit(shapes);
    }
    let prev = below(shapes, a - 1);
    let prev_size: usize = prev.iter().sum();
    for cand in partitions_up_to(prev_size, max_row_len) {
        if a >= 2 {
            let lower = below(shapes, a - 2);
            if !layer_nonnegative(&lower, &prev, &cand) {
                continue;
            }
        }
        let empty = cand.is_empty();
        shapes.push(cand);
        if empty {
            // nothing can sit above an empty layer
            let mut filled = shapes.clone();
            filled.resize(n - 1, Vec::new());
            emit(&filled)?;
        } else {
            shape_rec(n, quantum, max_row_len, shapes, emit)?;
        }
        shapes.pop();
    }
    Ok(())
}

fn push_riggings(
    n: usize,
    quantum: &[usize],
    shapes: &[Vec<usize>],
    out: &mut Vec<RiggedConfiguration>,
    cap: usize,
) -> Result<()> {
    // per layer: groups of equal lengths with their vacancy
    let mut choices: Vec<Vec<Vec<i64>>> = Vec::new();
    for a in 1..n {
        let lower: &[usize] = if a == 1 { quantum } else { &shapes[a - 2] };
        let this = &shapes[a - 1];
        let upper: &[usize] = if a + 1 < n { &shapes[a] } else { &[] };
        let mut groups: BTreeMap<std::cmp::Reverse<usize>, usize> = BTreeMap::new();
        for &l in this {
            *groups.entry(std::cmp::Reverse(l)).or_default() += 1;
        }
        for (std::cmp::Reverse(l), m) in groups {
            let p = vacancy_from_shapes(lower, this, upper, l);
            debug_assert!(p >= 0);
            choices.push(weakly_increasing(m, p));
        }
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut riggings = idx
            .iter()
            .zip(&choices)
            .flat_map(|(&i, c)| c[i].iter().copied());
        let layers: Vec<Vec<Row>> = shapes
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&l| Row::new(l, riggings.next().unwrap()))
                    .collect()
            })
            .collect();
        if out.len() >= cap {
            return Err(Error::Resource(format!(
                "more than {cap} rigged configurations"
            )));
        }
        out.push(RiggedConfiguration {
            n,
            quantum: quantum.to_vec(),
            layers,
        });
        // odometer
        let mut k = choices.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Weakly increasing sequences of length `m` with entries in `0..=p`.
fn weakly_increasing(m: usize, p: i64) -> Vec<Vec<i64>> {
    fn rec(m: usize, lo: i64, p: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in lo..=p {
            cur.push(v);
            rec(m, v, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, 0, p, &mut Vec::new(), &mut out);
    out
}
