//! Box-ball system over `{1..n}` with background letter 1, evolved by
//! sweeping a carrier through the state with the R matrix.

use std::fmt;

use crate::crystal::{r_matrix, unwinding_number};
use crate::error::{Error, Result};
use crate::tableau::{write_letters, Tableau, TensorWord};

/// Cells at positions `0, 1, ...`; everything outside is letter 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoxBallState {
    n: usize,
    cells: Vec<usize>,
}

impl BoxBallState {
    pub fn new(n: usize, cells: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = cells.iter().find(|&&c| c == 0 || c > n) {
            return Err(Error::LetterOutOfRange { letter: bad, n });
        }
        Ok(BoxBallState { n, cells })
    }

    /// Parses `"1111223214322"`, or comma-separated letters when `n > 9`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let cells = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad cell {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad cell {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        BoxBallState::new(n, cells)
    }

    /// Reads a path of single boxes as a state.
    pub fn from_path(path: &TensorWord) -> Result<Self> {
        let Some(n) = path.n() else {
            return Ok(BoxBallState {
                n: 1,
                cells: Vec::new(),
            });
        };
        let mut cells = Vec::with_capacity(path.len());
        for f in path.factors() {
            if f.len() != 1 {
                return Err(Error::Length(format!("factor {f} is not a single box")));
            }
            cells.push(f.min_letter().expect("nonempty"));
        }
        Ok(BoxBallState { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Number of balls (cells with a letter other than 1).
    pub fn balls(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 1).count()
    }

    /// Count of each letter `2..=n`, indexed by `letter - 2`.
    pub fn content(&self) -> Vec<usize> {
        let mut out = vec![0; self.n.saturating_sub(1)];
        for &c in &self.cells {
            if c > 1 {
                out[c - 2] += 1;
            }
        }
        out
    }

    /// Pads or trims trailing background so that the state has `width` cells.
    pub fn with_width(&self, width: usize) -> Result<Self> {
        let mut cells = self.cells.clone();
        if width < cells.len() {
            if cells[width..].iter().any(|&c| c != 1) {
                return Err(Error::Length(format!(
                    "state does not fit in {width} cells"
                )));
            }
            cells.truncate(width);
        } else {
            cells.resize(width, 1);
        }
        Ok(BoxBallState { n: self.n, cells })
    }

    fn span(&self) -> usize {
        match (
            self.cells.iter().position(|&c| c != 1),
            self.cells.iter().rposition(|&c| c != 1),
        ) {
            (Some(lo), Some(hi)) => hi - lo + 1,
            _ => 0,
        }
    }

    fn cell(&self, i: usize) -> Tableau {
        Tableau::uniform(self.n, self.cells.get(i).copied().unwrap_or(1), 1).expect("valid letter")
    }

    /// One time step with a carrier of capacity `l`. The state keeps its
    /// width unless balls move past the right edge.
    pub fn evolve(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Length("carrier capacity must be positive".into()));
        }
        let empty = Tableau::uniform(self.n, 1, l)?;
        let mut carrier = empty.clone();
        let limit = self.cells.len() + 16 * self.span().max(1);
        let mut out = Vec::with_capacity(self.cells.len());
        let mut i = 0;
        while i < self.cells.len() || carrier != empty {
            if i >= limit {
                return Err(Error::Padding(limit));
            }
            let img = r_matrix(&carrier, &self.cell(i))?;
            out.push(img.left.min_letter().expect("single box"));
            carrier = img.right;
            i += 1;
        }
        let keep = out.iter().rposition(|&c| c != 1).map_or(0, |p| p + 1);
        out.truncate(keep.max(self.cells.len()));
        Ok(BoxBallState {
            n: self.n,
            cells: out,
        })
    }

    /// `T_∞`: evolution with a carrier at least as large as the ball count.
    pub fn evolve_full(&self) -> Result<Self> {
        self.evolve(self.balls().max(1))
    }

    /// The state and its images after `1..=steps` time steps.
    pub fn trajectory(&self, steps: usize, capacity: Option<usize>) -> Result<Vec<BoxBallState>> {
        let l = capacity.unwrap_or_else(|| self.balls().max(1));
        let mut out = vec![self.clone()];
        for _ in 0..steps {
            let next = out.last().expect("nonempty").evolve(l)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Maximal runs of balls read left to right, each as a sorted row.
    /// Requires every gap to be at least as long as the run on its left.
    pub fn solitons(&self) -> Result<Vec<Tableau>> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < self.cells.len() {
            if self.cells[i] == 1 {
                i += 1;
                continue;
            }
            let start = i;
            while i < self.cells.len() && self.cells[i] != 1 {
                i += 1;
            }
            runs.push((start, i));
        }
        for w in runs.windows(2) {
            let (len, gap) = (w[0].1 - w[0].0, w[1].0 - w[0].1);
            if gap < len {
                return Err(Error::NotSeparated(format!(
                    "run of length {len} at {} is followed by a gap of {gap}",
                    w[0].0
                )));
            }
        }
        runs.iter()
            .map(|&(s, e)| Tableau::from_letters(self.n, &self.cells[s..e]))
            .collect()
    }

    /// `E_l`: total unwinding number met by a capacity-`l` carrier sweeping
    /// the state. `E_0 = 0`.
    pub fn conserved_energy(&self, l: usize) -> Result<usize> {
        if l == 0 {
            return Ok(0);
        }
        let empty = Tableau::uniform(self.n, 1, l)?;
        let mut carrier = empty.clone();
        let mut total = 0;
        let mut i = 0;
        let limit = self.cells.len() + 16 * self.span().max(1);
        while i < self.cells.len() || carrier != empty {
            if i >= limit {
                return Err(Error::Padding(limit));
            }
            let cell = self.cell(i);
            total += unwinding_number(&carrier, &cell)?;
            carrier = r_matrix(&carrier, &cell)?.right;
            i += 1;
        }
        Ok(total)
    }

    /// Soliton lengths, longest first, read off the conserved energies:
    /// `E_l - E_{l-1}` counts solitons of length at least `l`. Defined for
    /// every state, separated or not.
    pub fn soliton_content(&self) -> Result<Vec<usize>> {
        let m = self.balls();
        let energies = (0..=m + 1)
            .map(|l| self.conserved_energy(l))
            .collect::<Result<Vec<_>>>()?;
        let at_least: Vec<usize> = (1..=m + 1).map(|l| energies[l] - energies[l - 1]).collect();
        let mut out = Vec::new();
        for l in (1..=m).rev() {
            let exact = at_least[l - 1] - at_least[l];
            out.extend(std::iter::repeat_n(l, exact));
        }
        Ok(out)
    }
}

impl fmt::Display for BoxBallState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.cells, self.n)
    }
}

/// One line per time step, `t=<k>: <cells>`, starting from `t = first`.
pub fn format_trajectory(states: &[BoxBallState], first: usize) -> String {
    let mut out = String::new();
    for (i, s) in states.iter().enumerate() {
        out.push_str(&format!("t={}: {}\n", first + i, s));
    }
    out
}
