//! The forward KKR bijection, box-removal traces, and the peeling extraction
//! of scattering data from the enlarged quantum space.

use serde::Serialize;

use crate::crystal::AffineFactor;
use crate::error::{Error, Result};
use crate::rigged::RiggedConfiguration;
use crate::tableau::{Tableau, TensorWord};

/// How the shortest-row choice breaks ties between equally short singular rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    SmallestIndex,
    LargestIndex,
}

/// A box taken out of layer `layer` (absolute numbering), from the row with
/// storage id `row`, at column `col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RemovedBox {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
}

/// One quantum-space box removal: the chain `α^(1), α^(2), ...` and the
/// letter it produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxStep {
    pub quantum_col: usize,
    pub letter: usize,
    pub chain: Vec<RemovedBox>,
}

/// Removal of a whole quantum-space row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowRemoval {
    /// Storage index of the quantum row (or of the layer row it mirrors in
    /// a peeling run).
    pub quantum_row: usize,
    pub tableau: String,
    pub boxes: Vec<BoxStep>,
}

impl RowRemoval {
    pub fn letters(&self) -> Vec<usize> {
        self.boxes.iter().map(|b| b.letter).collect()
    }

    /// `ΔQ^(layer)_j`: removed boxes of `layer` sitting in columns `<= j`.
    pub fn delta_q(&self, layer: usize, j: usize) -> usize {
        self.boxes
            .iter()
            .flat_map(|b| &b.chain)
            .filter(|x| x.layer == layer && x.col <= j)
            .count()
    }

    /// Columns hit in `layer`, in removal order.
    pub fn columns(&self, layer: usize) -> Vec<usize> {
        self.boxes
            .iter()
            .filter_map(|b| b.chain.iter().find(|x| x.layer == layer).map(|x| x.col))
            .collect()
    }
}

/// Full record of a KKR run, rightmost quantum row first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct KkrTrace {
    pub removals: Vec<RowRemoval>,
}

impl KkrTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Checks the column monotonicity properties of every chain: weakly
    /// increasing up the layers within one box removal, strictly
    /// decreasing across successive boxes of one row in a fixed layer.
    pub fn check_columns(&self) -> std::result::Result<(), String> {
        for rem in &self.removals {
            for b in &rem.boxes {
                if b.chain.windows(2).any(|w| w[0].col > w[1].col) {
                    return Err(format!(
                        "row {}: chain columns decrease {:?}",
                        rem.quantum_row, b.chain
                    ));
                }
            }
            let max_layer = rem
                .boxes
                .iter()
                .flat_map(|b| &b.chain)
                .map(|x| x.layer)
                .max();
            for layer in 1..=max_layer.unwrap_or(0) {
                let cols = rem.columns(layer);
                if cols.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(format!(
                        "row {}: layer {layer} columns not strictly decreasing {cols:?}",
                        rem.quantum_row
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `ΔQ^(layer)_j` for the `k`-th row removal of a trace.
pub fn delta_q(trace: &KkrTrace, layer: usize, j: usize, k: usize) -> usize {
    trace.removals[k].delta_q(layer, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct WorkRow {
    id: usize,
    length: usize,
    rigging: i64,
}

/// Mutable working copy of a configuration during box removal.
///
/// Letters are produced as `base + depth`, where depth is the number of
/// layers the chain reached; removed boxes are reported in layer
/// `layer_offset + i`.
#[derive(Clone, Debug)]
struct KkrState {
    quantum: Vec<(usize, usize)>,
    ones: usize,
    layers: Vec<Vec<WorkRow>>,
    base: usize,
    out_n: usize,
    layer_offset: usize,
    tie: TieBreak,
}

impl KkrState {
    fn new(rc: &RiggedConfiguration, base: usize, out_n: usize, layer_offset: usize) -> Self {
        KkrState {
            quantum: rc.quantum().iter().copied().enumerate().collect(),
            ones: 0,
            layers: rc
                .layers()
                .iter()
                .map(|rows| {
                    rows.iter()
                        .enumerate()
                        .map(|(id, r)| WorkRow {
                            id,
                            length: r.length,
                            rigging: r.rigging,
                        })
                        .collect()
                })
                .collect(),
            base,
            out_n,
            layer_offset,
            tie: TieBreak::default(),
        }
    }

    fn q(&self, a: usize, j: usize) -> i64 {
        if a == 0 {
            let rows: usize = self.quantum.iter().map(|&(_, l)| l.min(j)).sum();
            let ones = if j >= 1 { self.ones } else { 0 };
            (rows + ones) as i64
        } else if a <= self.layers.len() {
            self.layers[a - 1]
                .iter()
                .map(|r| r.length.min(j) as i64)
                .sum()
        } else {
            0
        }
    }

    fn vacancy(&self, a: usize, j: usize) -> i64 {
        self.q(a - 1, j) - 2 * self.q(a, j) + self.q(a + 1, j)
    }

    fn singular(&self, a: usize, r: &WorkRow) -> bool {
        r.rigging == self.vacancy(a, r.length)
    }

    /// Removes one box from quantum row at position `qpos`. `prefer` names
    /// a layer-1 row id that wins ties between shortest rows.
    fn remove_box(&mut self, qpos: usize, prefer: Option<usize>) -> BoxStep {
        let quantum_col = self.quantum[qpos].1;
        let mut col = quantum_col;
        let mut picks: Vec<(usize, usize)> = Vec::new();
        for a in 1..=self.layers.len() {
            let mut best: Option<usize> = None;
            for (idx, r) in self.layers[a - 1].iter().enumerate() {
                if r.length < col || !self.singular(a, r) {
                    continue;
                }
                best = match best {
                    None => Some(idx),
                    Some(b) => {
                        let cur = &self.layers[a - 1][b];
                        let better = r.length < cur.length
                            || (r.length == cur.length
                                && ((a == 1 && prefer == Some(r.id) && prefer != Some(cur.id))
                                    || (self.tie == TieBreak::LargestIndex
                                        && !(a == 1 && prefer == Some(cur.id)))));
                        Some(if better { idx } else { b })
                    }
                };
            }
            match best {
                Some(idx) => {
                    col = self.layers[a - 1][idx].length;
                    picks.push((a, idx));
                }
                None => break,
            }
        }
        let depth = picks.len();
        let chain: Vec<RemovedBox> = picks
            .iter()
            .map(|&(a, idx)| {
                let r = &self.layers[a - 1][idx];
                RemovedBox {
                    layer: a + self.layer_offset,
                    row: r.id,
                    col: r.length,
                }
            })
            .collect();
        self.quantum[qpos].1 -= 1;
        for &(a, idx) in &picks {
            self.layers[a - 1][idx].length -= 1;
        }
        for &(a, idx) in &picks {
            let len = self.layers[a - 1][idx].length;
            let p = self.vacancy(a, len);
            self.layers[a - 1][idx].rigging = p;
        }
        for rows in &mut self.layers {
            rows.retain(|r| r.length > 0);
        }
        BoxStep {
            quantum_col,
            letter: self.base + depth,
            chain,
        }
    }

    /// Removes the whole quantum row at position `qpos`.
    fn remove_row(&mut self, qpos: usize, prefer: Option<usize>) -> (Tableau, RowRemoval) {
        let id = self.quantum[qpos].0;
        let mut boxes = Vec::new();
        while self.quantum[qpos].1 > 0 {
            boxes.push(self.remove_box(qpos, prefer));
        }
        self.quantum.remove(qpos);
        let letters: Vec<usize> = boxes.iter().map(|b| b.letter).collect();
        let t = Tableau::from_letters(self.out_n, &letters).expect("letters within alphabet");
        let removal = RowRemoval {
            quantum_row: id,
            tableau: t.to_string(),
            boxes,
        };
        (t, removal)
    }

    /// Removes one unit row of the enlarged quantum space.
    fn remove_unit(&mut self) -> usize {
        self.quantum.push((usize::MAX, 1));
        self.ones -= 1;
        let qpos = self.quantum.len() - 1;
        let step = self.remove_box(qpos, None);
        self.quantum.pop();
        step.letter
    }

    fn singular_first_layer(&self) -> Vec<WorkRow> {
        match self.layers.first() {
            Some(rows) => rows
                .iter()
                .filter(|r| self.singular(1, r))
                .copied()
                .collect(),
            None => Vec::new(),
        }
    }

    fn mode_formula(&self) -> Option<ModeMax> {
        let rows = self.layers.first()?;
        let vals: Vec<(usize, i64)> = rows
            .iter()
            .map(|r| (r.id, self.q(1, r.length) - self.q(2, r.length) + r.rigging))
            .collect();
        let value = vals.iter().map(|v| v.1).max()?;
        let rows = vals.iter().filter(|v| v.1 == value).map(|v| v.0).collect();
        Some(ModeMax { value, rows })
    }
}

/// The forward bijection: rigged configuration to highest path.
pub fn kkr_forward(rc: &RiggedConfiguration) -> Result<(TensorWord, KkrTrace)> {
    kkr_forward_with(rc, TieBreak::SmallestIndex)
}

pub fn kkr_forward_with(rc: &RiggedConfiguration, tie: TieBreak) -> Result<(TensorWord, KkrTrace)> {
    rc.validate()?;
    let n = rc.n();
    Ok(run_forward(rc, 0, n, tie))
}

/// KKR image with every letter raised by `shift`, embedded in `{1..out_n}`.
/// Used for restricted configurations, whose own letters start at 1.
pub fn kkr_forward_shifted(
    rc: &RiggedConfiguration,
    shift: usize,
    out_n: usize,
) -> Result<(TensorWord, KkrTrace)> {
    rc.validate()?;
    if rc.n() + shift > out_n {
        return Err(Error::Alphabet {
            left: rc.n() + shift,
            right: out_n,
        });
    }
    Ok(run_forward(rc, shift, out_n, TieBreak::SmallestIndex))
}

fn run_forward(
    rc: &RiggedConfiguration,
    shift: usize,
    out_n: usize,
    tie: TieBreak,
) -> (TensorWord, KkrTrace) {
    let mut st = KkrState::new(rc, 1 + shift, out_n, shift);
    st.tie = tie;
    let mut factors = Vec::with_capacity(rc.quantum().len());
    let mut trace = KkrTrace::default();
    while !st.quantum.is_empty() {
        let (t, rem) = st.remove_row(st.quantum.len() - 1, None);
        factors.push(t);
        trace.removals.push(rem);
    }
    assert!(
        st.layers.iter().all(|l| l.is_empty()),
        "layers left over after emptying the quantum space"
    );
    factors.reverse();
    (TensorWord::new(factors).expect("uniform alphabet"), trace)
}

/// Maximum of `Q^(a)_{μ_i} - Q^(a+1)_{μ_i} + r_i` and the rows attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeMax {
    pub value: i64,
    pub rows: Vec<usize>,
}

/// Mode formula evaluated on a configuration for layer `a`; `None` when the
/// layer is empty. Row ids are storage indices of layer `a`.
pub fn mode_formula(rc: &RiggedConfiguration, a: usize) -> Option<ModeMax> {
    let rows = rc.layer(a);
    let vals: Vec<(usize, i64)> = rows
        .iter()
        .enumerate()
        .map(|(id, r)| {
            (
                id,
                rc.q_value(a, r.length) - rc.q_value(a + 1, r.length) + r.rigging,
            )
        })
        .collect();
    let value = vals.iter().map(|v| v.1).max()?;
    let rows = vals.iter().filter(|v| v.1 == value).map(|v| v.0).collect();
    Some(ModeMax { value, rows })
}

/// One extracted factor of a peeling run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringStep {
    /// Storage id of the layer-`a` row consumed.
    pub row: usize,
    pub tableau: Tableau,
    pub mode: i64,
    /// Mode formula on the state just before this factor was extracted.
    pub mode_max: ModeMax,
    /// Unit boxes peeled (each giving letter `a`) before a row became singular.
    pub peeled: usize,
    pub removal: RowRemoval,
}

/// A complete peeling run at level `a`, steps in extraction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringRun {
    pub level: usize,
    pub n: usize,
    pub steps: Vec<ScatteringStep>,
}

impl ScatteringRun {
    /// Factors in display order: first extracted is rightmost.
    pub fn factors(&self) -> Vec<AffineFactor> {
        self.steps
            .iter()
            .rev()
            .map(|s| AffineFactor::new(s.tableau.clone(), s.mode))
            .collect()
    }

    /// Modes in extraction order `d_1, d_2, ...`.
    pub fn modes(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.mode).collect()
    }

    pub fn row_order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.row).collect()
    }

    /// The same peeling data as a trace, one removal per extracted row.
    pub fn trace(&self) -> KkrTrace {
        KkrTrace {
            removals: self.steps.iter().map(|s| s.removal.clone()).collect(),
        }
    }
}

/// A singular row offered to a peeling chooser.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub id: usize,
    pub length: usize,
    pub rigging: i64,
}

/// Peeling run at level `a` with the default choice: longest singular row, then
/// smallest storage index.
pub fn kkr_scattering(rc: &RiggedConfiguration, a: usize) -> Result<ScatteringRun> {
    kkr_scattering_with(rc, a, &mut |c: &[Candidate]| {
        let mut best = 0;
        for (i, x) in c.iter().enumerate() {
            let b = &c[best];
            if x.length > b.length || (x.length == b.length && x.id < b.id) {
                best = i;
            }
        }
        best
    })
}

/// Peeling run where `choose` picks among the simultaneously singular rows
/// (sorted by id) and returns an index into the slice.
pub fn kkr_scattering_with(
    rc: &RiggedConfiguration,
    a: usize,
    choose: &mut dyn FnMut(&[Candidate]) -> usize,
) -> Result<ScatteringRun> {
    let mut st = peeling_state(rc, a)?;
    let mut steps = Vec::new();
    loop {
        let cands = match peel(&mut st)? {
            None => break,
            Some(c) => c,
        };
        let pick = cands.1[choose(&cands.1)];
        steps.push(extract(&mut st, pick.id, cands.0, cands.2)?);
    }
    Ok(ScatteringRun {
        level: a,
        n: rc.n(),
        steps,
    })
}

/// Every peeling run over all choices of singular rows. Rows with equal
/// length and rigging are interchangeable and explored once. Fails when
/// more than `cap` runs would be produced.
pub fn kkr_scattering_all(
    rc: &RiggedConfiguration,
    a: usize,
    cap: usize,
) -> Result<Vec<ScatteringRun>> {
    let st = peeling_state(rc, a)?;
    let mut out = Vec::new();
    explore(st, Vec::new(), a, rc.n(), cap, &mut out)?;
    Ok(out)
}

fn explore(
    mut st: KkrState,
    steps: Vec<ScatteringStep>,
    a: usize,
    n: usize,
    cap: usize,
    out: &mut Vec<ScatteringRun>,
) -> Result<()> {
    let (peeled, cands, mm) = match peel(&mut st)? {
        None => {
            if out.len() >= cap {
                return Err(Error::Resource(format!("more than {cap} scattering runs")));
            }
            out.push(ScatteringRun { level: a, n, steps });
            return Ok(());
        }
        Some(x) => x,
    };
    let mut seen: Vec<(usize, i64)> = Vec::new();
    for c in &cands {
        if seen.contains(&(c.length, c.rigging)) {
            continue;
        }
        seen.push((c.length, c.rigging));
        let mut next = st.clone();
        let step = extract(&mut next, c.id, peeled, mm.clone())?;
        let mut s = steps.clone();
        s.push(step);
        explore(next, s, a, n, cap, out)?;
    }
    Ok(())
}

fn peeling_state(rc: &RiggedConfiguration, a: usize) -> Result<KkrState> {
    rc.validate()?;
    let n = rc.n();
    if a == 0 || a >= n {
        return Err(Error::Invalid(format!("level {a} outside 1..{}", n - 1)));
    }
    // μ^(a-1) has already been removed: it only yields letter a and leaves
    // the layers untouched while the unit part is large.
    let upper = rc.restrict(a - 1);
    let mut st = KkrState::new(&upper, a, n, a - 1);
    st.quantum = rc
        .layer(a)
        .iter()
        .enumerate()
        .map(|(id, r)| (id, r.length))
        .collect();
    if let Some(mm) = st.mode_formula() {
        st.ones = usize::try_from(mm.value + 1)
            .map_err(|_| Error::Invalid(format!("negative mode {} at level {a}", mm.value)))?;
    }
    Ok(st)
}

/// Peels unit boxes until a first-layer row is singular. Returns the
/// number peeled, the singular rows and the mode formula on the state
/// before peeling, or `None` when the layer is exhausted.
fn peel(st: &mut KkrState) -> Result<Option<(usize, Vec<Candidate>, ModeMax)>> {
    let mm = match st.mode_formula() {
        None => {
            if st.quantum.is_empty() {
                return Ok(None);
            }
            return Err(Error::Invalid(
                "quantum rows left with an empty layer".into(),
            ));
        }
        Some(m) => m,
    };
    let a = st.base;
    let mut peeled = 0;
    loop {
        let sing = st.singular_first_layer();
        if !sing.is_empty() {
            let mut ids: Vec<usize> = sing.iter().map(|r| r.id).collect();
            ids.sort_unstable();
            if st.ones as i64 != mm.value || ids != mm.rows {
                return Err(Error::Invalid(format!(
                    "mode formula {mm:?} disagrees with peeling (ones {}, singular {ids:?})",
                    st.ones
                )));
            }
            let mut cands: Vec<Candidate> = sing
                .iter()
                .map(|r| Candidate {
                    id: r.id,
                    length: r.length,
                    rigging: r.rigging,
                })
                .collect();
            cands.sort_by_key(|c| c.id);
            return Ok(Some((peeled, cands, mm)));
        }
        if st.ones == 0 {
            return Err(Error::Invalid(
                "unit part exhausted before any row became singular".into(),
            ));
        }
        let letter = st.remove_unit();
        debug_assert_eq!(letter, a);
        peeled += 1;
    }
}

fn extract(
    st: &mut KkrState,
    id: usize,
    peeled: usize,
    mode_max: ModeMax,
) -> Result<ScatteringStep> {
    let qpos = st
        .quantum
        .iter()
        .position(|&(q, _)| q == id)
        .ok_or_else(|| Error::Invalid(format!("row {id} not in quantum space")))?;
    let mode = st.ones as i64;
    let (tableau, removal) = st.remove_row(qpos, Some(id));
    if st.layers[0].iter().any(|r| r.id == id) {
        return Err(Error::Invalid(format!(
            "row {id} was not consumed with its quantum copy"
        )));
    }
    if tableau.min_letter().is_some_and(|m| m <= st.base) {
        return Err(Error::Invalid(format!(
            "extracted tableau {tableau} contains letter {}",
            st.base
        )));
    }
    Ok(ScatteringStep {
        row: id,
        tableau,
        mode,
        mode_max,
        peeled,
        removal,
    })
}
