//! Exact rational linear algebra: row reduction, affine solution spaces,
//! left null spaces and a small two-phase simplex used to decide whether the
//! nonnegative part of an affine space is empty, a single point or infinite.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;
use crate::{Error, Result};

pub type Matrix = Vec<Vec<Rational>>;

/// `A·x = b` with an optional nonnegativity flag per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Rational>,
    pub nonneg: Vec<bool>,
}

impl LinearSystem {
    pub fn new(matrix: Matrix, rhs: Vec<Rational>, nonneg: Vec<bool>) -> Result<Self> {
        let cols = nonneg.len();
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a system with {cols} columns",
                row.len()
            )));
        }
        Ok(LinearSystem {
            matrix,
            rhs,
            nonneg,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.nonneg.len()
    }

    /// Exact check of every equation and every nonnegativity flag.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.cols()
            && self
                .nonneg
                .iter()
                .zip(x)
                .all(|(&flag, v)| !flag || !v.is_negative())
            && self
                .matrix
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| dot(row, x) == *b)
    }
}

/// `{ particular + Σ tᵢ·basisᵢ }`, or the empty set when `particular` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub particular: Option<Vec<Rational>>,
    pub basis: Vec<Vec<Rational>>,
}

impl AffineSpace {
    pub fn empty() -> Self {
        AffineSpace {
            particular: None,
            basis: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.basis.len())
    }

    /// `particular + Σ tᵢ·basisᵢ`.
    pub fn point(&self, t: &[Rational]) -> Option<Vec<Rational>> {
        let mut x = self.particular.clone()?;
        for (coeff, direction) in t.iter().zip(&self.basis) {
            if coeff.is_zero() {
                continue;
            }
            for (xi, di) in x.iter_mut().zip(direction) {
                *xi += coeff * di;
            }
        }
        Some(x)
    }
}

/// The outcome of intersecting an affine space with the nonnegative orthant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeClass {
    Empty,
    Point(Vec<Rational>),
    Infinite {
        space: AffineSpace,
        witness: Vec<Rational>,
    },
}

impl PolytopeClass {
    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            PolytopeClass::Empty => None,
            PolytopeClass::Point(x) => Some(x),
            PolytopeClass::Infinite { witness, .. } => Some(witness),
        }
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Reduces `[A | b]` in place to reduced row echelon form and returns the
/// pivot column of each nonzero row.
fn rref(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Exact solution space of `A·x = b` by row reduction; nonnegativity flags are ignored.
pub fn solve_affine(sys: &LinearSystem) -> AffineSpace {
    let n = sys.cols();
    let mut rows: Vec<Vec<Rational>> = sys
        .matrix
        .iter()
        .zip(&sys.rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, n);
    // Rows below the pivots have a zero left-hand side; any nonzero right-hand
    // side there is a contradiction.
    if rows.iter().skip(pivots.len()).any(|row| !row[n].is_zero()) {
        return AffineSpace::empty();
    }
    let mut particular = vec![Rational::zero(); n];
    for (row, &c) in rows.iter().zip(&pivots) {
        particular[c] = row[n].clone();
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let basis = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &c) in rows.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[c] = -row[f].clone();
                }
            }
            v
        })
        .collect();
    AffineSpace {
        particular: Some(particular),
        basis,
    }
}

/// Solves `A·x = b`, then classifies its nonnegative part.
pub fn classify_system(sys: &LinearSystem) -> PolytopeClass {
    classify_polytope(&solve_affine(sys), &sys.nonneg)
}

/// Decides whether `space ∩ {xᵢ ≥ 0 for flagged i}` is empty, a point, or infinite.
///
/// A feasible point is unique iff, for every basis direction `d`, the maximum
/// and minimum of `⟨d, x⟩` over the feasible set coincide.
pub fn classify_polytope(space: &AffineSpace, nonneg: &[bool]) -> PolytopeClass {
    let Some(p) = &space.particular else {
        return PolytopeClass::Empty;
    };
    let k = space.basis.len();
    // Constraint i reads p_i + Σ_j B_ij t_j ≥ 0. Rows with no t-dependence are
    // checked directly.
    let mut constraints: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (i, &flag) in nonneg.iter().enumerate() {
        if !flag {
            continue;
        }
        let coeffs: Vec<Rational> = space.basis.iter().map(|b| b[i].clone()).collect();
        if coeffs.iter().all(Zero::is_zero) {
            if p[i].is_negative() {
                return PolytopeClass::Empty;
            }
        } else {
            constraints.push((coeffs, p[i].clone()));
        }
    }
    if k == 0 {
        return PolytopeClass::Point(p.clone());
    }

    // Standard form over y = (t⁺, t⁻, s) ≥ 0:  Σ_j B_ij (t⁺_j − t⁻_j) − s_i = −p_i.
    let m = constraints.len();
    let width = 2 * k + m;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (i, (coeffs, pi)) in constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for j in 0..k {
            row[j] = coeffs[j].clone();
            row[k + j] = -coeffs[j].clone();
        }
        row[2 * k + i] = -Rational::one();
        a.push(row);
        b.push(-pi.clone());
    }
    let Some(feasible) = Simplex::feasible(a, b, width) else {
        return PolytopeClass::Empty;
    };
    let t_of = |y: &[Rational]| -> Vec<Rational> { (0..k).map(|j| &y[j] - &y[k + j]).collect() };
    let witness = space
        .point(&t_of(&feasible.solution()))
        .expect("space is non-empty");

    for direction in &space.basis {
        // ⟨d, p + B·t⟩ = ⟨d, p⟩ + Σ_j ⟨d, B_j⟩ t_j; the constant is irrelevant.
        let gram: Vec<Rational> = space.basis.iter().map(|bj| dot(direction, bj)).collect();
        let mut cost = vec![Rational::zero(); width];
        for j in 0..k {
            cost[j] = gram[j].clone();
            cost[k + j] = -gram[j].clone();
        }
        let neg_cost: Vec<Rational> = cost.iter().map(|c| -c.clone()).collect();
        let (Some(min), Some(neg_max)) = (
            feasible.clone().minimize(&cost),
            feasible.clone().minimize(&neg_cost),
        ) else {
            return PolytopeClass::Infinite {
                space: space.clone(),
                witness,
            };
        };
        if min != -neg_max {
            return PolytopeClass::Infinite {
                space: space.clone(),
                witness,
            };
        }
    }
    PolytopeClass::Point(witness)
}

/// Stationary row vectors of a square matrix: `γ·P = γ`, `Σγ = 1`.
pub fn null_space_left(p: &[Vec<Rational>]) -> AffineSpace {
    let n = p.len();
    // Unknowns γ_j; equation per column c: Σ_i γ_i (P_ic − δ_ic) = 0.
    let mut matrix: Matrix = (0..n)
        .map(|c| {
            (0..n)
                .map(|i| {
                    let v = p[i][c].clone();
                    if i == c {
                        v - Rational::one()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    matrix.push(vec![Rational::one(); n]);
    let mut rhs = vec![Rational::zero(); n];
    rhs.push(Rational::one());
    let sys = LinearSystem::new(matrix, rhs, vec![true; n]).expect("square input");
    solve_affine(&sys)
}

/// Solves `A·X = B` for square nonsingular `A`; `None` if `A` is singular.
pub(crate) fn solve_square(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Matrix> {
    let n = a.len();
    let extra = b.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(ar, br)| ar.iter().chain(br).cloned().collect())
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..n + extra].to_vec()).collect())
}

/// Dense simplex tableau in equality form with `y ≥ 0`.
#[derive(Clone, Debug)]
struct Simplex {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Simplex {
    /// Phase one: a basic feasible solution of `A·y = b, y ≥ 0`, or `None`.
    fn feasible(a: Matrix, b: Vec<Rational>, width: usize) -> Option<Simplex> {
        let m = a.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, (mut row, bi)) in a.into_iter().zip(b).enumerate() {
            let flip = bi.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row.extend((0..m).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            rows.push(row);
            rhs.push(if flip { -bi } else { bi });
        }
        let mut tableau = Simplex {
            rows,
            rhs,
            basis: (width..width + m).collect(),
            width: width + m,
        };
        let mut cost = vec![Rational::zero(); width + m];
        for c in cost.iter_mut().skip(width) {
            *c = Rational::one();
        }
        let value = tableau.run(&cost)?;
        if !value.is_zero() {
            return None;
        }
        // Drive artificial variables out of the basis or drop redundant rows.
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] >= width {
                match (0..width).find(|&j| !tableau.rows[r][j].is_zero()) {
                    Some(j) => tableau.pivot(r, j),
                    None => {
                        tableau.rows.remove(r);
                        tableau.rhs.remove(r);
                        tableau.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in tableau.rows.iter_mut() {
            row.truncate(width);
        }
        tableau.width = width;
        Some(tableau)
    }

    fn solution(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.width];
        for (r, &j) in self.basis.iter().enumerate() {
            y[j] = self.rhs[r].clone();
        }
        y
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost·y` from the current basis with Bland's rule.
    /// Returns the optimum, or `None` if unbounded below.
    fn run(&mut self, cost: &[Rational]) -> Option<Rational> {
        loop {
            let reduced = |j: usize| -> Rational {
                let mut z = cost[j].clone();
                for (r, &bj) in self.basis.iter().enumerate() {
                    if !cost[bj].is_zero() && !self.rows[r][j].is_zero() {
                        z -= &cost[bj] * &self.rows[r][j];
                    }
                }
                z
            };
            let Some(entering) =
                (0..self.width).find(|&j| !self.basis.contains(&j) && reduced(j).is_negative())
            else {
                let value = self
                    .basis
                    .iter()
                    .zip(&self.rhs)
                    .map(|(&j, v)| &cost[j] * v)
                    .sum();
                return Some(value);
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let (leaving, _) = best?;
            self.pivot(leaving, entering);
        }
    }

    fn minimize(mut self, cost: &[Rational]) -> Option<Rational> {
        self.run(cost)
    }
}
