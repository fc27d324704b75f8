//! Scattering data: modes from riggings, the affine R orbit and its normal
//! ordered form, the word `c`, the operator `Φ^(a)`, and the composition
//! that rebuilds a KKR image level by level.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::crystal::{affine_r, energy, r_matrix, reorder_to_shape, AffineFactor};
use crate::error::{Error, Result};
use crate::kkr::{kkr_forward_shifted, kkr_scattering, kkr_scattering_all, ScatteringRun};
use crate::rigged::RiggedConfiguration;
use crate::tableau::{Tableau, TensorWord};

/// Default ceiling on orbit sizes.
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// `b_1[d_1] ⊗ ... ⊗ b_N[d_N]` at level `a`, in display order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScatteringData {
    pub level: usize,
    pub factors: Vec<AffineFactor>,
}

impl ScatteringData {
    pub fn new(level: usize, factors: Vec<AffineFactor>) -> Self {
        ScatteringData { level, factors }
    }

    /// Parses `"222[4]*2233[5]*4[5]"`; the empty string is the empty product.
    pub fn parse(s: &str, n: usize, level: usize) -> Result<Self> {
        let s = s.trim();
        let factors = if s.is_empty() {
            Vec::new()
        } else {
            s.split('*')
                .map(|f| AffineFactor::parse(f, n))
                .collect::<Result<_>>()?
        };
        Ok(ScatteringData { level, factors })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn modes(&self) -> Vec<i64> {
        self.factors.iter().map(|f| f.mode).collect()
    }

    pub fn classical(&self) -> Vec<Tableau> {
        self.factors.iter().map(|f| f.tableau.clone()).collect()
    }

    /// Copy with every mode reduced by `by`.
    pub fn shift_modes(&self, by: i64) -> Self {
        let factors = self
            .factors
            .iter()
            .map(|f| AffineFactor::new(f.tableau.clone(), f.mode - by))
            .collect();
        ScatteringData {
            level: self.level,
            factors,
        }
    }

    fn with_factors(&self, factors: Vec<AffineFactor>) -> Self {
        ScatteringData {
            level: self.level,
            factors,
        }
    }
}

impl fmt::Display for ScatteringData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl From<&ScatteringRun> for ScatteringData {
    fn from(run: &ScatteringRun) -> Self {
        ScatteringData::new(run.level, run.factors())
    }
}

/// Attaches modes to a level-`a` path: `d_i = r_i + Σ_{l<i} H(b_l ⊗ b_i^{(l+1)})`
/// where `b_i` is carried leftward through `b_{i-1}, ..., b_1` by R and
/// `b_0 = (a+1)^{max k}`.
pub fn modes_from_riggings(
    path: &TensorWord,
    riggings: &[i64],
    a: usize,
) -> Result<ScatteringData> {
    let f = path.factors();
    if f.len() != riggings.len() {
        return Err(Error::Length(format!(
            "{} factors but {} riggings",
            f.len(),
            riggings.len()
        )));
    }
    let Some(n) = path.n() else {
        return Ok(ScatteringData::new(a, Vec::new()));
    };
    let kmax = f.iter().map(Tableau::len).max().unwrap_or(0);
    let b0 = Tableau::uniform(n, a + 1, kmax)?;
    let mut out = Vec::with_capacity(f.len());
    for (i, bi) in f.iter().enumerate() {
        let mut d = riggings[i];
        let mut cur = bi.clone();
        for l in (0..i).rev() {
            let img = r_matrix(&f[l], &cur)?;
            d += img.energy as i64;
            cur = img.left;
        }
        d += energy(&b0, &cur)? as i64;
        out.push(AffineFactor::new(bi.clone(), d));
    }
    Ok(ScatteringData::new(a, out))
}

/// Closure of `s` under affine R on adjacent factors, in BFS order.
pub fn orbit(s: &ScatteringData, cap: usize) -> Result<Vec<ScatteringData>> {
    let mut seen: HashSet<Vec<AffineFactor>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(s.factors.clone());
    queue.push_back(s.factors.clone());
    while let Some(cur) = queue.pop_front() {
        for i in 0..cur.len().saturating_sub(1) {
            let (l, r) = affine_r(&cur[i], &cur[i + 1])?;
            let mut next = cur.clone();
            next[i] = l;
            next[i + 1] = r;
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::Resource(format!("orbit exceeds {cap} elements")));
                }
                queue.push_back(next);
            }
        }
        order.push(s.with_factors(cur));
    }
    Ok(order)
}

/// `S_1`: orbit elements surviving the filter that keeps, for positions
/// from the rightmost inward, only those with maximal mode there. Sorted
/// by serialization.
pub fn normal_ordered_set(s: &ScatteringData, cap: usize) -> Result<Vec<ScatteringData>> {
    let mut set = orbit(s, cap)?;
    for i in (0..s.len()).rev() {
        let best = set
            .iter()
            .map(|x| x.factors[i].mode)
            .max()
            .expect("orbit is nonempty");
        set.retain(|x| x.factors[i].mode == best);
    }
    set.sort_by_key(|x| x.to_string());
    Ok(set)
}

/// Normal ordered form: the lexicographically smallest member of `S_1`.
pub fn normal_order(s: &ScatteringData) -> Result<ScatteringData> {
    let set = normal_ordered_set(s, DEFAULT_ORBIT_CAP)?;
    Ok(set.into_iter().next().expect("S_1 is nonempty"))
}

/// Gap criterion: `m_{j+1} - m_j >= H(f_j ⊗ f_{j+1})` for adjacent factors.
pub fn is_normal_ordered(s: &ScatteringData) -> Result<bool> {
    for w in s.factors.windows(2) {
        let h = energy(&w[0].tableau, &w[1].tableau)? as i64;
        if w[1].mode - w[0].mode < h {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a^{m_1} ⊗ f_1 ⊗ a^{m_2 - m_1} ⊗ f_2 ⊗ ...` with single-box `a` factors.
pub fn build_c(s: &ScatteringData, n: usize) -> Result<TensorWord> {
    let a = s.level;
    let unit = Tableau::uniform(n, a, 1)?;
    let mut out = Vec::new();
    let mut prev = 0i64;
    for f in &s.factors {
        if f.mode < prev {
            return Err(Error::NotNormalOrdered(format!(
                "modes must be non-negative and weakly increasing, got {}",
                s
            )));
        }
        for _ in prev..f.mode {
            out.push(unit.clone());
        }
        if f.tableau.n() != n {
            return Err(Error::Alphabet {
                left: f.tableau.n(),
                right: n,
            });
        }
        out.push(f.tableau.clone());
        prev = f.mode;
    }
    TensorWord::new(out)
}

/// `Φ^(a)`: pushes `c` through the columns `a^{l_1} ⊗ ... ⊗ a^{l_m}` by R
/// (rightmost factor of `c` first) and returns the transformed columns.
/// Every factor must leave the last column as a pure `a` row.
pub fn phi(s: &ScatteringData, target_shape: &[usize], n: usize) -> Result<TensorWord> {
    let a = s.level;
    let c = build_c(s, n)?;
    let mut cols: Vec<Tableau> = target_shape
        .iter()
        .map(|&l| Tableau::uniform(n, a, l))
        .collect::<Result<_>>()?;
    let mut residue = 0usize;
    for g in c.factors().iter().rev() {
        let mut g = g.clone();
        for col in cols.iter_mut() {
            let img = r_matrix(&g, col)?;
            *col = img.left;
            g = img.right;
        }
        if !g.is_uniform(a) {
            return Err(Error::NotNormalOrdered(format!(
                "residue {g} is not a pure row of letter {a} for {s}"
            )));
        }
        residue += g.len();
    }
    let expected: usize = s.factors.iter().map(|f| f.tableau.len()).sum::<usize>()
        + s.factors.last().map_or(0, |f| f.mode as usize);
    assert_eq!(residue, expected, "residue size");
    TensorWord::new(cols)
}

/// Scattering data of level `a` built on the crystal side: the KKR image of
/// `RC^(a)` (letters raised by `a`) with modes from the layer-`a` riggings.
pub fn crystal_scattering(rc: &RiggedConfiguration, a: usize) -> Result<ScatteringData> {
    let n = rc.n();
    let (path, _) = kkr_forward_shifted(&rc.restrict(a), a, n)?;
    let riggings: Vec<i64> = rc.layer(a).iter().map(|r| r.rigging).collect();
    modes_from_riggings(&path, &riggings, a)
}

/// `Φ^(1) C^(1) ... Φ^(n-1) C^(n-1)` applied to `⊗ n^{μ^(n-1)_i}`.
pub fn compose_theorem(rc: &RiggedConfiguration) -> Result<TensorWord> {
    rc.validate()?;
    let n = rc.n();
    let mut path = top_path(rc)?;
    for a in (1..n).rev() {
        path = level_step(rc, a, &path, normal_order)?;
    }
    Ok(path)
}

/// Every path obtainable from `compose_theorem` by letting each level use
/// any member of `S_1`. Fails when more than `cap` branches arise.
pub fn compose_all_choices(rc: &RiggedConfiguration, cap: usize) -> Result<Vec<TensorWord>> {
    rc.validate()?;
    let n = rc.n();
    let mut frontier = vec![top_path(rc)?];
    for a in (1..n).rev() {
        let mut next = Vec::new();
        for path in &frontier {
            let shape = rc.shape(a - 1);
            if rc.layer(a).is_empty() {
                next.push(TensorWord::uniform(n, a, &shape)?);
                continue;
            }
            let riggings: Vec<i64> = rc.layer(a).iter().map(|r| r.rigging).collect();
            let s = modes_from_riggings(path, &riggings, a)?;
            for rep in normal_ordered_set(&s, DEFAULT_ORBIT_CAP)? {
                next.push(phi(&rep, &shape, n)?);
                if next.len() > cap {
                    return Err(Error::Resource(format!(
                        "more than {cap} composition branches"
                    )));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

fn top_path(rc: &RiggedConfiguration) -> Result<TensorWord> {
    let n = rc.n();
    if n == 1 {
        return TensorWord::uniform(n, 1, rc.quantum());
    }
    TensorWord::uniform(n, n, &rc.shape(n - 1))
}

fn level_step(
    rc: &RiggedConfiguration,
    a: usize,
    path: &TensorWord,
    choose: impl Fn(&ScatteringData) -> Result<ScatteringData>,
) -> Result<TensorWord> {
    let n = rc.n();
    let shape = rc.shape(a - 1);
    if rc.layer(a).is_empty() {
        return TensorWord::uniform(n, a, &shape);
    }
    let riggings: Vec<i64> = rc.layer(a).iter().map(|r| r.rigging).collect();
    let s = modes_from_riggings(path, &riggings, a)?;
    phi(&choose(&s)?, &shape, n)
}

/// Outcome of checking `p ⊗ (⊗ a^{μ^(a)_i}) ⊗ a^{⊗d_1} ≃ c ⊗ (⊗ a^{μ^(a-1)_i})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismReport {
    pub p: TensorWord,
    pub scattering: ScatteringData,
    /// `Φ^(a)` of the peeling data with target `μ^(a-1)`.
    pub phi_image: TensorWord,
    pub lhs: TensorWord,
    /// Right side moved into the capacity order of the left side.
    pub rhs_reordered: TensorWord,
}

impl IsomorphismReport {
    pub fn holds(&self) -> bool {
        self.phi_image == self.p && self.rhs_reordered == self.lhs
    }
}

/// Builds both sides from the KKR image of `RC^(a-1)` and one peeling run.
pub fn isomorphism_for_run(
    rc: &RiggedConfiguration,
    run: &ScatteringRun,
) -> Result<IsomorphismReport> {
    let a = run.level;
    let n = rc.n();
    let (p, _) = kkr_forward_shifted(&rc.restrict(a - 1), a - 1, n)?;
    let s = ScatteringData::from(run);
    let d1 = run.steps.first().map_or(0, |st| st.mode.max(0) as usize);
    let phi_image = phi(&s, &rc.shape(a - 1), n)?;

    let unit = Tableau::uniform(n, a, 1)?;
    let mut lhs = p.factors().to_vec();
    for &k in &rc.shape(a) {
        lhs.push(Tableau::uniform(n, a, k)?);
    }
    lhs.extend(std::iter::repeat_n(unit, d1));
    let lhs = TensorWord::new(lhs)?;

    let mut rhs = build_c(&s, n)?.into_factors();
    for &l in &rc.shape(a - 1) {
        rhs.push(Tableau::uniform(n, a, l)?);
    }
    let rhs_reordered = reorder_to_shape(&TensorWord::new(rhs)?, &lhs.shape())?;
    Ok(IsomorphismReport {
        p,
        scattering: s,
        phi_image,
        lhs,
        rhs_reordered,
    })
}

/// Checks the isomorphism for the default peeling run.
pub fn isomorphism_check(rc: &RiggedConfiguration, a: usize) -> Result<bool> {
    let run = kkr_scattering(rc, a)?;
    Ok(isomorphism_for_run(rc, &run)?.holds())
}

/// Checks the isomorphism for every peeling choice sequence.
pub fn isomorphism_all_choices(rc: &RiggedConfiguration, a: usize, cap: usize) -> Result<bool> {
    for run in kkr_scattering_all(rc, a, cap)? {
        if !isomorphism_for_run(rc, &run)?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kkr::kkr_forward;

    fn sd(s: &str, n: usize, a: usize) -> ScatteringData {
        ScatteringData::parse(s, n, a).unwrap()
    }

    fn sl3_four_rows() -> RiggedConfiguration {
        RiggedConfiguration::from_parts(3, &[1, 1, 2, 1], &[&[(2, 0), (1, 0)], &[(1, 0)]]).unwrap()
    }

    fn sl4_thirteen_boxes() -> RiggedConfiguration {
        RiggedConfiguration::from_parts(
            4,
            &[1; 13],
            &[&[(4, 0), (3, 1), (1, 4)], &[(2, 0), (1, 0)], &[(1, 0)]],
        )
        .unwrap()
    }

    #[test]
    fn modes_from_small_paths() {
        let top = TensorWord::parse("3", 3).unwrap();
        assert_eq!(
            modes_from_riggings(&top, &[0], 2).unwrap().to_string(),
            "3[1]"
        );
        let lvl1 = TensorWord::parse("22*3", 3).unwrap();
        assert_eq!(
            modes_from_riggings(&lvl1, &[0, 0], 1).unwrap().to_string(),
            "22[2]*3[1]"
        );
        assert!(matches!(
            modes_from_riggings(&lvl1, &[0], 1),
            Err(Error::Length(_))
        ));
    }

    #[test]
    fn pure_factor_mode() {
        let w = TensorWord::parse("333", 3).unwrap();
        assert_eq!(
            modes_from_riggings(&w, &[2], 2).unwrap().to_string(),
            "333[5]"
        );
    }

    #[test]
    fn orbit_of_two_factors() {
        let mut o: Vec<String> = orbit(&sd("22[2]*3[1]", 3, 1), 100)
            .unwrap()
            .iter()
            .map(|x| x.to_string())
            .collect();
        o.sort();
        assert_eq!(o, vec!["22[2]*3[1]", "2[1]*23[2]"]);
        assert_eq!(orbit(&sd("2[1]", 3, 1), 10).unwrap().len(), 1);
    }

    #[test]
    fn normal_order_two_factors() {
        let s = sd("22[2]*3[1]", 3, 1);
        assert_eq!(normal_order(&s).unwrap().to_string(), "2[1]*23[2]");
        assert!(!is_normal_ordered(&s).unwrap());
        assert!(is_normal_ordered(&sd("2[1]*23[2]", 3, 1)).unwrap());
    }

    #[test]
    fn thirteen_box_data_are_normal_ordered() {
        let list = [
            "222[4]*2233[5]*4[5]",
            "222[4]*3[5]*2234[5]",
            "2222[4]*233[5]*4[5]",
            "2222[4]*3[5]*234[5]",
        ];
        let s1 = normal_ordered_set(&sd(list[0], 4, 1), DEFAULT_ORBIT_CAP).unwrap();
        let got: Vec<String> = s1.iter().map(|x| x.to_string()).collect();
        for s in list {
            assert!(is_normal_ordered(&sd(s, 4, 1)).unwrap());
            assert!(got.contains(&s.to_string()), "{s} missing from {got:?}");
        }
    }

    #[test]
    fn build_c_examples() {
        assert_eq!(
            build_c(&sd("2[1]*23[2]", 3, 1), 3).unwrap().to_string(),
            "1*2*1*23"
        );
        assert_eq!(build_c(&sd("3[1]", 3, 2), 3).unwrap().to_string(), "2*3");
        assert_eq!(
            build_c(&sd("2[0]*3[0]", 3, 1), 3).unwrap().to_string(),
            "2*3"
        );
        assert!(build_c(&sd("22[2]*3[1]", 3, 1), 3).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(
            phi(&sd("3[1]", 3, 2), &[2, 1], 3).unwrap().to_string(),
            "22*3"
        );
        assert_eq!(
            phi(&sd("3[1]", 3, 2), &[1, 2], 3).unwrap().to_string(),
            "2*23"
        );
        assert_eq!(
            phi(&sd("2[1]*23[2]", 3, 1), &[1, 1, 2, 1], 3)
                .unwrap()
                .to_string(),
            "1*2*13*2"
        );
    }

    #[test]
    fn phi_rejects_non_normal_input() {
        // a single box of capacity 1 cannot absorb 22 without a mode
        assert!(matches!(
            phi(&sd("22[0]", 3, 1), &[1], 3),
            Err(Error::NotNormalOrdered(_))
        ));
    }

    #[test]
    fn composition_matches_kkr() {
        assert_eq!(
            compose_theorem(&sl3_four_rows()).unwrap().to_string(),
            "1*2*13*2"
        );
        let rc = sl4_thirteen_boxes();
        assert_eq!(compose_theorem(&rc).unwrap(), kkr_forward(&rc).unwrap().0);
        let empty = RiggedConfiguration::from_parts(3, &[2, 1], &[]).unwrap();
        assert_eq!(compose_theorem(&empty).unwrap().to_string(), "11*1");
    }

    #[test]
    fn composition_choices_agree() {
        let rc = sl4_thirteen_boxes();
        let p = kkr_forward(&rc).unwrap().0;
        for q in compose_all_choices(&rc, 10_000).unwrap() {
            assert_eq!(q, p);
        }
    }

    #[test]
    fn isomorphism_holds() {
        assert!(isomorphism_check(&sl4_thirteen_boxes(), 1).unwrap());
        assert!(isomorphism_all_choices(&sl4_thirteen_boxes(), 1, 100).unwrap());
        assert!(isomorphism_check(&sl3_four_rows(), 1).unwrap());
        assert!(isomorphism_check(&sl3_four_rows(), 2).unwrap());
    }

    #[test]
    fn crystal_side_contains_case2() {
        let rc = sl4_thirteen_boxes();
        let s = crystal_scattering(&rc, 1).unwrap();
        let set: Vec<String> = normal_ordered_set(&s, DEFAULT_ORBIT_CAP)
            .unwrap()
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert!(set.contains(&"222[4]*2233[5]*4[5]".to_string()));
    }
}
