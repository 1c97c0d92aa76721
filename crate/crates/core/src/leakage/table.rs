//! Dense probability tables and typical-set masks.

use serde::{Deserialize, Serialize};

use super::{LeakageError, PROB_TOL};
use crate::numeric::{compensated_sum, CompensatedSum};

fn check_entries(p: &[f64]) -> Result<(), LeakageError> {
    if let Some(bad) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(LeakageError::InvalidTable(format!("entry {bad} is not a probability")));
    }
    Ok(())
}

/// Joint distribution over rows x columns, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl JointTable {
    pub fn new(rows: usize, cols: usize, p: Vec<f64>) -> Result<Self, LeakageError> {
        if rows == 0 || cols == 0 || p.len() != rows * cols {
            return Err(LeakageError::InvalidTable(format!("{} entries for a {rows}x{cols} table", p.len())));
        }
        check_entries(&p)?;
        let total = compensated_sum(p.iter().copied());
        if (total - 1.0).abs() > PROB_TOL {
            return Err(LeakageError::InvalidTable(format!("total mass {total}")));
        }
        let row_labels = (0..rows).map(|i| i.to_string()).collect();
        let col_labels = (0..cols).map(|i| i.to_string()).collect();
        Ok(Self { rows, cols, p, row_labels, col_labels })
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Self {
        assert_eq!((rows.len(), cols.len()), (self.rows, self.cols), "label counts");
        self.row_labels = rows;
        self.col_labels = cols;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.p[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.p[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows).map(|r| compensated_sum(self.row(r).iter().copied())).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols).map(|c| compensated_sum((0..self.rows).map(|r| self.get(r, c)))).collect()
    }

    /// Largest deviation of the row marginal from uniform.
    pub fn row_uniformity_deviation(&self) -> f64 {
        let u = 1.0 / self.rows as f64;
        self.row_marginal().iter().map(|m| (m - u).abs()).fold(0.0, f64::max)
    }

    pub fn check_uniform_rows(&self) -> Result<(), LeakageError> {
        let deviation = self.row_uniformity_deviation();
        if deviation > PROB_TOL {
            return Err(LeakageError::NonUniform { deviation });
        }
        Ok(())
    }

    /// Row-conditional table `P(c | r)`; rows of zero mass become uniform.
    pub fn conditional(&self) -> ChannelTable {
        let marg = self.row_marginal();
        let mut w = Vec::with_capacity(self.p.len());
        for (r, &m) in marg.iter().enumerate() {
            if m > 0.0 {
                w.extend(self.row(r).iter().map(|x| x / m));
            } else {
                w.extend(std::iter::repeat_n(1.0 / self.cols as f64, self.cols));
            }
        }
        ChannelTable { rows: self.rows, cols: self.cols, w }
    }
}

/// Row-stochastic transition table `W(c | r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelTable {
    rows: usize,
    cols: usize,
    w: Vec<f64>,
}

impl ChannelTable {
    pub fn new(rows: usize, cols: usize, w: Vec<f64>) -> Result<Self, LeakageError> {
        if rows == 0 || cols == 0 || w.len() != rows * cols {
            return Err(LeakageError::InvalidTable(format!("{} entries for a {rows}x{cols} channel", w.len())));
        }
        check_entries(&w)?;
        for r in 0..rows {
            let s = compensated_sum(w[r * cols..(r + 1) * cols].iter().copied());
            if (s - 1.0).abs() > 1e-9 {
                return Err(LeakageError::InvalidTable(format!("row {r} sums to {s}")));
            }
        }
        Ok(Self { rows, cols, w })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.w[r * self.cols..(r + 1) * self.cols]
    }

    /// Joint table under input law `p`.
    pub fn joint(&self, p: &[f64]) -> Result<JointTable, LeakageError> {
        if p.len() != self.rows {
            return Err(LeakageError::InvalidTable(format!("input law of length {} for {} rows", p.len(), self.rows)));
        }
        let mut out = Vec::with_capacity(self.w.len());
        for (r, &pr) in p.iter().enumerate() {
            out.extend(self.row(r).iter().map(|w| pr * w));
        }
        JointTable::new(self.rows, self.cols, out)
    }
}

/// Named axis of a [`JointLaw`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub labels: Vec<String>,
}

/// Dense joint law over several axes, last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointLaw {
    pub axes: Vec<Axis>,
    p: Vec<f64>,
}

impl JointLaw {
    pub fn new(axes: Vec<Axis>, p: Vec<f64>) -> Result<Self, LeakageError> {
        let size: usize = axes.iter().map(|a| a.labels.len()).product();
        if size != p.len() || size == 0 {
            return Err(LeakageError::InvalidTable(format!("{} entries for shape of size {size}", p.len())));
        }
        check_entries(&p)?;
        let total = compensated_sum(p.iter().copied());
        if (total - 1.0).abs() > PROB_TOL {
            return Err(LeakageError::InvalidTable(format!("total mass {total}")));
        }
        Ok(Self { axes, p })
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.labels.len()).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Marginal on `row_axes` x `col_axes`, each group flattened with its
    /// last axis fastest.
    pub fn marginal(&self, row_axes: &[usize], col_axes: &[usize]) -> Result<JointTable, LeakageError> {
        let shape = self.shape();
        let mut seen = vec![false; shape.len()];
        for &a in row_axes.iter().chain(col_axes) {
            if a >= shape.len() || std::mem::replace(&mut seen[a], true) {
                return Err(LeakageError::InvalidTable(format!("bad axis selection {row_axes:?} / {col_axes:?}")));
            }
        }
        let rows: usize = row_axes.iter().map(|&a| shape[a]).product();
        let cols: usize = col_axes.iter().map(|&a| shape[a]).product();
        let mut acc = vec![CompensatedSum::new(); rows * cols];
        let mut coord = vec![0usize; shape.len()];
        let flat = |axes: &[usize], coord: &[usize]| axes.iter().fold(0usize, |i, &a| i * shape[a] + coord[a]);
        for &x in &self.p {
            if x != 0.0 {
                acc[flat(row_axes, &coord) * cols + flat(col_axes, &coord)].add(x);
            }
            for d in (0..shape.len()).rev() {
                coord[d] += 1;
                if coord[d] < shape[d] {
                    break;
                }
                coord[d] = 0;
            }
        }
        let labels = |axes: &[usize]| -> Vec<String> {
            let mut out = vec![String::new()];
            for &a in axes {
                out = out
                    .iter()
                    .flat_map(|prefix| {
                        self.axes[a].labels.iter().map(move |l| {
                            if prefix.is_empty() {
                                l.clone()
                            } else {
                                format!("{prefix},{l}")
                            }
                        })
                    })
                    .collect();
            }
            out
        };
        let table = JointTable::new(rows, cols, acc.iter().map(CompensatedSum::value).collect())?;
        Ok(table.with_labels(labels(row_axes), labels(col_axes)))
    }

    /// Single-axis marginal.
    pub fn marginal1(&self, axis: usize) -> Result<Vec<f64>, LeakageError> {
        let shape = self.shape();
        if axis >= shape.len() {
            return Err(LeakageError::InvalidTable(format!("no axis {axis}")));
        }
        let inner: usize = shape[axis + 1..].iter().product();
        let mut acc = vec![CompensatedSum::new(); shape[axis]];
        for (i, &x) in self.p.iter().enumerate() {
            acc[(i / inner) % shape[axis]].add(x);
        }
        Ok(acc.iter().map(CompensatedSum::value).collect())
    }
}

/// Indicator of a `(1 - epsilon)`-typical subset of a joint table's cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetMask {
    rows: usize,
    cols: usize,
    keep: Vec<bool>,
    /// Largest conditional mass removed from any row.
    pub epsilon: f64,
}

impl TypicalSetMask {
    pub fn full(table: &JointTable) -> Self {
        Self { rows: table.rows(), cols: table.cols(), keep: vec![true; table.rows() * table.cols()], epsilon: 0.0 }
    }

    /// Keeps the cells where `keep(row, col)` holds; `epsilon` is the exact
    /// largest removed conditional mass.
    pub fn from_predicate<F: Fn(usize, usize) -> bool>(table: &JointTable, keep: F) -> Self {
        let (rows, cols) = (table.rows(), table.cols());
        let keep: Vec<bool> = (0..rows * cols).map(|i| keep(i / cols, i % cols)).collect();
        let mut mask = Self { rows, cols, keep, epsilon: 0.0 };
        mask.epsilon = mask.removed_mass(table).into_iter().fold(0.0, f64::max);
        mask
    }

    /// Keeps cells whose conditional probability `P(col | row)` is at least
    /// `tau`.
    pub fn threshold(table: &JointTable, tau: f64) -> Self {
        let marg = table.row_marginal();
        Self::from_predicate(table, |r, c| marg[r] > 0.0 && table.get(r, c) / marg[r] >= tau)
    }

    /// Per row, drops the least likely cells (ties by index) while the
    /// dropped conditional mass stays within `budget`.
    pub fn trim_smallest(table: &JointTable, budget: f64) -> Self {
        let marg = table.row_marginal();
        let cols = table.cols();
        let mut drop = vec![false; table.rows() * cols];
        for (r, &m) in marg.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            let mut order: Vec<usize> = (0..cols).collect();
            order.sort_by(|&a, &b| table.get(r, a).total_cmp(&table.get(r, b)).then(a.cmp(&b)));
            let mut removed = 0.0;
            for c in order {
                let q = table.get(r, c) / m;
                if removed + q > budget {
                    break;
                }
                removed += q;
                drop[r * cols + c] = true;
            }
        }
        Self::from_predicate(table, |r, c| !drop[r * cols + c])
    }

    pub fn keeps(&self, r: usize, c: usize) -> bool {
        self.keep[r * self.cols + c]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Conditional mass each row loses.
    pub fn removed_mass(&self, table: &JointTable) -> Vec<f64> {
        table
            .row_marginal()
            .iter()
            .enumerate()
            .map(|(r, &m)| {
                if m <= 0.0 {
                    return 0.0;
                }
                compensated_sum((0..self.cols).filter(|&c| !self.keeps(r, c)).map(|c| table.get(r, c))) / m
            })
            .collect()
    }

    /// Whether any removed cell carries probability.
    pub fn removes_mass(&self, table: &JointTable) -> bool {
        (0..self.rows * self.cols).any(|i| !self.keep[i] && table.p[i] > 0.0)
    }

    pub fn validate(&self, table: &JointTable) -> Result<(), LeakageError> {
        if self.shape() != (table.rows(), table.cols()) {
            return Err(LeakageError::MaskShape { mask: self.shape(), table: (table.rows(), table.cols()) });
        }
        let actual = self.removed_mass(table).into_iter().fold(0.0, f64::max);
        if actual > self.epsilon + PROB_TOL {
            return Err(LeakageError::MaskViolation { claimed: self.epsilon, actual });
        }
        Ok(())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.keep.iter().zip(&other.keep).all(|(a, b)| !a || *b)
    }

    /// Cell-wise union; `epsilon` is the smaller of the two claims.
    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "mask shapes");
        Self {
            rows: self.rows,
            cols: self.cols,
            keep: self.keep.iter().zip(&other.keep).map(|(a, b)| *a || *b).collect(),
            epsilon: self.epsilon.min(other.epsilon),
        }
    }
}
