//! Presolve and a bounded dual simplex on a dense tableau.
//!
//! The dual simplex suits branch-and-bound: tightening a bound keeps the
//! basis dual feasible, so a child node re-optimizes from its parent's
//! tableau in a handful of pivots.

use crate::milp::{MilpModel, Sense, VarKind};

/// Stand-in for an infinite bound on a structural column.
const BIG: f64 = 1e9;
const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REINVERT_EVERY: usize = 100;

/// Dense LP `min c·x` subject to `a x (sense) b`, `lower <= x <= upper`.
#[derive(Debug, Clone)]
pub(crate) struct DenseLp {
    pub n: usize,
    pub m: usize,
    /// Row-major `m × n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub sense: Vec<Sense>,
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Result of presolving a model: a reduced LP over the columns that are not
/// fixed, and enough to map values back.
#[derive(Debug, Clone)]
pub(crate) struct Presolved {
    pub lp: DenseLp,
    /// Model variable index of each reduced column.
    pub cols: Vec<usize>,
    pub binary: Vec<bool>,
    /// Value of every model variable that presolve fixed.
    pub fixed: Vec<Option<f64>>,
    pub objective_constant: f64,
}

impl Presolved {
    /// Full model assignment from reduced column values.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
        for (k, &j) in self.cols.iter().enumerate() {
            out[j] = reduced[k];
        }
        out
    }
}

struct Row {
    terms: Vec<(f64, usize)>,
    sense: Sense,
    rhs: f64,
    active: bool,
}

fn tol_of(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

/// Substitutes fixed variables, drops rows that cannot bind, and tightens
/// binary bounds implied by single rows. Returns `None` when the model is
/// infeasible.
pub(crate) fn presolve(model: &MilpModel) -> Option<Presolved> {
    let vars = model.variables();
    let nv = vars.len();
    let binary: Vec<bool> = vars.iter().map(|v| v.kind == VarKind::Binary).collect();
    let mut lo: Vec<f64> = vars.iter().map(|v| v.lower).collect();
    let mut up: Vec<f64> = vars.iter().map(|v| v.upper).collect();
    for j in 0..nv {
        if binary[j] {
            lo[j] = lo[j].max(0.0).ceil();
            up[j] = up[j].min(1.0).floor();
        }
        if lo[j] > up[j] {
            return None;
        }
    }
    let mut rows: Vec<Row> = model
        .constraints()
        .iter()
        .map(|r| Row {
            terms: r.terms.iter().map(|&(c, v)| (c, v.index())).collect(),
            sense: r.sense,
            rhs: r.rhs,
            active: true,
        })
        .collect();

    let activity = |row: &Row, lo: &[f64], up: &[f64]| {
        let (mut min, mut max) = (0.0, 0.0);
        for &(a, j) in &row.terms {
            if a > 0.0 {
                min += a * lo[j];
                max += a * up[j];
            } else {
                min += a * up[j];
                max += a * lo[j];
            }
        }
        (min, max)
    };

    for _pass in 0..50 {
        let mut changed = false;
        for row in rows.iter_mut().filter(|r| r.active) {
            let (min, max) = activity(row, &lo, &up);
            let t = tol_of(row.rhs);
            let (check_le, check_ge) = match row.sense {
                Sense::Le => (true, false),
                Sense::Ge => (false, true),
                Sense::Eq => (true, true),
            };
            if (check_le && min > row.rhs + t) || (check_ge && max < row.rhs - t) {
                return None;
            }
            let le_redundant = !check_le || max <= row.rhs + t;
            let ge_redundant = !check_ge || min >= row.rhs - t;
            if le_redundant && ge_redundant {
                row.active = false;
                changed = true;
                continue;
            }
            for &(a, j) in &row.terms {
                if !binary[j] || lo[j] == up[j] {
                    continue;
                }
                if check_le && min.is_finite() {
                    // a·x_j <= rhs - (min activity of the other terms)
                    let rest = min - if a > 0.0 { a * lo[j] } else { a * up[j] };
                    let slack = row.rhs - rest;
                    if a > 0.0 && a > slack + t {
                        up[j] = 0.0;
                        changed = true;
                    } else if a < 0.0 && slack < -t {
                        lo[j] = 1.0;
                        changed = true;
                    }
                }
                if check_ge && max.is_finite() && lo[j] != up[j] {
                    let rest = max - if a > 0.0 { a * up[j] } else { a * lo[j] };
                    let need = row.rhs - rest;
                    if a > 0.0 && need > t {
                        lo[j] = 1.0;
                        changed = true;
                    } else if a < 0.0 && a < need - t {
                        up[j] = 0.0;
                        changed = true;
                    }
                }
                if lo[j] > up[j] {
                    return None;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let fixed: Vec<Option<f64>> = (0..nv).map(|j| (lo[j] == up[j]).then_some(lo[j])).collect();
    let cols: Vec<usize> = (0..nv).filter(|&j| fixed[j].is_none()).collect();
    let mut col_of = vec![usize::MAX; nv];
    for (k, &j) in cols.iter().enumerate() {
        col_of[j] = k;
    }
    let n = cols.len();
    let live: Vec<&Row> = rows.iter().filter(|r| r.active).collect();
    let m = live.len();
    let mut a = vec![0.0; m * n];
    let mut b = Vec::with_capacity(m);
    let mut sense = Vec::with_capacity(m);
    for (i, row) in live.iter().enumerate() {
        let mut rhs = row.rhs;
        for &(coef, j) in &row.terms {
            match fixed[j] {
                Some(v) => rhs -= coef * v,
                None => a[i * n + col_of[j]] += coef,
            }
        }
        b.push(rhs);
        sense.push(row.sense);
    }
    let mut c = vec![0.0; n];
    let mut objective_constant = 0.0;
    for &(coef, v) in model.objective() {
        match fixed[v.index()] {
            Some(x) => objective_constant += coef * x,
            None => c[col_of[v.index()]] += coef,
        }
    }
    Some(Presolved {
        lp: DenseLp {
            n,
            m,
            a,
            b,
            sense,
            c,
            lower: cols.iter().map(|&j| lo[j]).collect(),
            upper: cols.iter().map(|&j| up[j]).collect(),
        },
        binary: cols.iter().map(|&j| binary[j]).collect(),
        cols,
        fixed,
        objective_constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    /// The objective bound reached the cutoff before optimality.
    Cutoff,
}

/// Simplex state over structural columns `0..n` and slack columns
/// `n..n+m`, with row `i` reading `a_i·x + s_i = b_i`.
#[derive(Debug, Clone)]
pub(crate) struct DualSimplex {
    n: usize,
    m: usize,
    width: usize,
    /// `B^{-1} [A I]`, row-major `m × width`.
    tab: Vec<f64>,
    d: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    /// Row of a basic column, `usize::MAX` for nonbasic ones.
    row_of: Vec<usize>,
    since_reinvert: usize,
    original: std::rc::Rc<(Vec<f64>, Vec<f64>)>,
}

impl DualSimplex {
    pub fn new(lp: &DenseLp) -> DualSimplex {
        let (n, m) = (lp.n, lp.m);
        let width = n + m;
        let mut tab = vec![0.0; m * width];
        for i in 0..m {
            tab[i * width..i * width + n].copy_from_slice(&lp.a[i * n..(i + 1) * n]);
            tab[i * width + n + i] = 1.0;
        }
        let mut lo = Vec::with_capacity(width);
        let mut up = Vec::with_capacity(width);
        for j in 0..n {
            lo.push(lp.lower[j].max(-BIG));
            up.push(lp.upper[j].min(BIG));
        }
        for s in &lp.sense {
            let (l, u) = match s {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(l);
            up.push(u);
        }
        let mut cost = lp.c.clone();
        cost.resize(width, 0.0);
        let mut x = vec![0.0; width];
        for j in 0..n {
            x[j] = if cost[j] >= 0.0 { lo[j] } else { up[j] };
        }
        for i in 0..m {
            let ax: f64 = (0..n).map(|j| lp.a[i * n + j] * x[j]).sum();
            x[n + i] = lp.b[i] - ax;
        }
        let basis: Vec<usize> = (n..width).collect();
        let mut row_of = vec![usize::MAX; width];
        for (i, &bcol) in basis.iter().enumerate() {
            row_of[bcol] = i;
        }
        let original = std::rc::Rc::new((tab.clone(), lp.b.clone()));
        DualSimplex {
            n,
            m,
            width,
            tab,
            d: cost.clone(),
            cost,
            lo,
            up,
            x,
            basis,
            row_of,
            since_reinvert: 0,
            original,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.x[j]).sum()
    }

    /// Whether any structural sits at an artificial infinite bound.
    pub fn at_artificial_bound(&self) -> bool {
        self.x[..self.n].iter().any(|v| v.abs() >= BIG * 0.5)
    }

    pub fn tableau_bytes(&self) -> usize {
        self.tab.len() * std::mem::size_of::<f64>()
    }

    /// Changes bounds of a structural column. Dual feasibility is kept by
    /// leaving a nonbasic column at the bound its reduced cost prefers.
    pub fn set_bounds(&mut self, j: usize, lo: f64, up: f64) {
        self.lo[j] = lo.max(-BIG);
        self.up[j] = up.min(BIG);
        if self.row_of[j] != usize::MAX {
            return;
        }
        let target = if self.lo[j] == self.up[j] || self.d[j] > DUAL_TOL {
            self.lo[j]
        } else if self.d[j] < -DUAL_TOL {
            self.up[j]
        } else if (self.x[j] - self.up[j]).abs() < (self.x[j] - self.lo[j]).abs() {
            self.up[j]
        } else {
            self.lo[j]
        };
        let delta = target - self.x[j];
        if delta != 0.0 {
            for i in 0..self.m {
                let t = self.tab[i * self.width + j];
                if t != 0.0 {
                    self.x[self.basis[i]] -= t * delta;
                }
            }
            self.x[j] = target;
        }
    }

    fn is_nonbasic_at_upper(&self, j: usize) -> bool {
        self.x[j] == self.up[j] && self.lo[j] != self.up[j]
    }

    /// Runs dual simplex iterations until optimal, infeasible, or the
    /// objective reaches `cutoff`.
    pub fn solve(&mut self, cutoff: f64) -> Result<LpStatus, String> {
        let max_iters = 20_000 + 50 * (self.m + self.width);
        for _ in 0..max_iters {
            if self.objective() >= cutoff {
                return Ok(LpStatus::Cutoff);
            }
            let Some((r, increase)) = self.leaving_row() else {
                return Ok(LpStatus::Optimal);
            };
            let Some(j) = self.entering_column(r, increase) else {
                return Ok(LpStatus::Infeasible);
            };
            self.pivot(r, j, increase);
            self.since_reinvert += 1;
            if self.since_reinvert >= REINVERT_EVERY {
                self.reinvert()?;
            }
        }
        Err("simplex iteration limit reached".to_string())
    }

    /// Row whose basic variable is furthest outside its bounds.
    fn leaving_row(&self) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        let mut worst = 0.0;
        for (i, &bcol) in self.basis.iter().enumerate() {
            let v = self.x[bcol];
            let below = self.lo[bcol] - v;
            let above = v - self.up[bcol];
            if below > PRIMAL_TOL * (1.0 + self.lo[bcol].abs()) && below > worst {
                worst = below;
                best = Some((i, true));
            } else if above > PRIMAL_TOL * (1.0 + self.up[bcol].abs()) && above > worst {
                worst = above;
                best = Some((i, false));
            }
        }
        best
    }

    /// Dual ratio test on row `r`; `increase` means the leaving variable must
    /// rise to its lower bound.
    fn entering_column(&self, r: usize, increase: bool) -> Option<usize> {
        let row = &self.tab[r * self.width..(r + 1) * self.width];
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.width {
            if self.row_of[j] != usize::MAX || self.lo[j] == self.up[j] {
                continue;
            }
            let alpha = row[j];
            if alpha.abs() < PIVOT_TOL {
                continue;
            }
            let at_upper = self.is_nonbasic_at_upper(j);
            // x_B[r] moves by -alpha·Δx_j; Δx_j > 0 from lower, < 0 from upper
            let eligible = match (increase, at_upper) {
                (true, false) => alpha < 0.0,
                (true, true) => alpha > 0.0,
                (false, false) => alpha > 0.0,
                (false, true) => alpha < 0.0,
            };
            if !eligible {
                continue;
            }
            let ratio = self.d[j].abs() / alpha.abs();
            let better = match best {
                None => true,
                Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && alpha.abs() > ba),
            };
            if better {
                best = Some((j, ratio, alpha.abs()));
            }
        }
        best.map(|(j, _, _)| j)
    }

    fn pivot(&mut self, r: usize, j: usize, increase: bool) {
        let w = self.width;
        let leaving = self.basis[r];
        let target = if increase { self.lo[leaving] } else { self.up[leaving] };
        let alpha = self.tab[r * w + j];
        let delta = (self.x[leaving] - target) / alpha;
        for i in 0..self.m {
            let t = self.tab[i * w + j];
            if t != 0.0 {
                self.x[self.basis[i]] -= t * delta;
            }
        }
        self.x[j] += delta;
        self.x[leaving] = target;

        let inv = 1.0 / alpha;
        for v in &mut self.tab[r * w..(r + 1) * w] {
            *v *= inv;
        }
        let (head, rest) = self.tab.split_at_mut(r * w);
        let (pivot_row, tail) = rest.split_at_mut(w);
        for other in head.chunks_exact_mut(w).chain(tail.chunks_exact_mut(w)) {
            let f = other[j];
            if f != 0.0 {
                for (o, p) in other.iter_mut().zip(pivot_row.iter()) {
                    *o -= f * p;
                }
                other[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (o, p) in self.d.iter_mut().zip(pivot_row.iter()) {
                *o -= f * p;
            }
        }
        self.d[j] = 0.0;
        pivot_row[j] = 1.0;

        self.basis[r] = j;
        self.row_of[j] = r;
        self.row_of[leaving] = usize::MAX;
    }

    /// Recomputes the tableau, basic values and reduced costs from the
    /// original data to shed accumulated rounding error.
    fn reinvert(&mut self) -> Result<(), String> {
        self.since_reinvert = 0;
        let (m, w) = (self.m, self.width);
        let (orig, b) = &*self.original;
        let mut rhs = b.clone();
        for j in 0..w {
            if self.row_of[j] == usize::MAX && self.x[j] != 0.0 {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= orig[i * w + j] * self.x[j];
                }
            }
        }
        let mut tab = orig.clone();
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        for &col in &self.basis {
            let mut p = usize::MAX;
            let mut best = 1e-11;
            for i in 0..m {
                if !assigned[i] && tab[i * w + col].abs() > best {
                    best = tab[i * w + col].abs();
                    p = i;
                }
            }
            if p == usize::MAX {
                return Err("singular basis during reinversion".to_string());
            }
            assigned[p] = true;
            new_basis[p] = col;
            let inv = 1.0 / tab[p * w + col];
            for v in &mut tab[p * w..(p + 1) * w] {
                *v *= inv;
            }
            rhs[p] *= inv;
            let pivot_row: Vec<f64> = tab[p * w..(p + 1) * w].to_vec();
            for i in 0..m {
                if i == p {
                    continue;
                }
                let f = tab[i * w + col];
                if f != 0.0 {
                    for (o, pv) in tab[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                        *o -= f * pv;
                    }
                    tab[i * w + col] = 0.0;
                    rhs[i] -= f * rhs[p];
                }
            }
        }
        self.tab = tab;
        self.basis = new_basis;
        for (i, &col) in self.basis.iter().enumerate() {
            self.row_of[col] = i;
            self.x[col] = rhs[i];
        }
        let mut d = self.cost.clone();
        for (i, &col) in self.basis.iter().enumerate() {
            let cb = self.cost[col];
            if cb != 0.0 {
                for (dj, t) in d.iter_mut().zip(&self.tab[i * w..(i + 1) * w]) {
                    *dj -= cb * t;
                }
            }
        }
        for &col in &self.basis {
            d[col] = 0.0;
        }
        self.d = d;
        Ok(())
    }
}
