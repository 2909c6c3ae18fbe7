//! The matrix `A(D)`, the polynomial `ζ(D) = det A(D)`, its split
//! `ζ = ζ₋ + ζ₊`, the leading matrix `B` and minimality certificates.

use std::fmt;

use thiserror::Error;

use crate::diagram::{CrossingId, Decomposition, DiagramCode, DiagramError, EarlyClass, Sign};
use crate::ring::{Generator, Laurent, Ring, RingT, ZetaPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("diagram has no classical crossings")]
    NoClassicalCrossings,
    #[error("column {column}: {count} arcs reach the threshold degree {threshold}")]
    AmbiguousThreshold {
        column: usize,
        count: usize,
        threshold: i32,
    },
    #[error("det B = {det_b} but the s^{k} coefficient of zeta is {sk_coefficient}")]
    Inconsistent {
        k: usize,
        det_b: RingT,
        sk_coefficient: RingT,
    },
}

/// `[v:a] = e1·1 + e2·(t^w − 1) + e3·(−t^w)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct IncidenceTerm {
    pub emanates: bool,
    pub passes_over: bool,
    pub comes_into: bool,
    pub t: Generator,
    pub sign: Sign,
}

impl IncidenceTerm {
    pub fn is_incident(&self) -> bool {
        self.emanates || self.passes_over || self.comes_into
    }

    pub fn value(&self) -> RingT {
        let tw = RingT::gen_power(self.t, self.sign.value());
        let mut out = RingT::zero();
        if self.emanates {
            out = out + RingT::one();
        }
        if self.passes_over {
            out = out + tw.clone() - RingT::one();
        }
        if self.comes_into {
            out = out - tw;
        }
        out
    }
}

pub fn incidence_term(d: &Decomposition, v: CrossingId, arc: usize) -> IncidenceTerm {
    let a = &d.arcs[arc];
    let under = d.under_position[&v];
    IncidenceTerm {
        emanates: a.start == Some(under),
        passes_over: a.contains(d.over_position[&v]),
        comes_into: a.end == Some(under),
        t: match d.early_class[&v] {
            EarlyClass::EarlyOver => Generator::P,
            EarlyClass::EarlyUnder => Generator::Q,
        },
        sign: d.signs[&v],
    }
}

pub fn incidence(d: &Decomposition, v: CrossingId, arc: usize) -> RingT {
    incidence_term(d, v, arc).value()
}

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareMatrix<R> {
    n: usize,
    entries: Vec<R>,
}

impl<R: Ring> SquareMatrix<R> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![R::zero(); n * n],
        }
    }

    /// Panics unless every row has length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "matrix rows must have length {n}"
        );
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.entries[i * self.n + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<R>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[R]>::to_vec)
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> SquareMatrix<S> {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Division-free determinant (Berkowitz). The characteristic polynomial
    /// of each leading principal block is obtained from the previous one by a
    /// Toeplitz product.
    pub fn determinant(&self) -> R {
        let n = self.n;
        let mut charpoly = vec![R::one()];
        for r in 0..n {
            // column r above the diagonal: C, repeatedly multiplied by the r×r block
            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(R::one());
            toeplitz.push(self.get(r, r).neg_ref());
            let mut v: Vec<R> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for step in 0..r {
                let rv = self.row_dot(r, r, &v);
                toeplitz.push(rv.neg_ref());
                if step + 1 < r {
                    v = self.block_apply(r, &v);
                }
            }
            let mut next = vec![R::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, c) in charpoly.iter().enumerate().take(i + 1) {
                    let t = &toeplitz[i - j];
                    if c.is_zero() || t.is_zero() {
                        continue;
                    }
                    slot.add_assign_ref(&t.mul_ref(c));
                }
            }
            charpoly = next;
        }
        let last = charpoly.pop().expect("nonempty");
        if n % 2 == 1 {
            last.neg_ref()
        } else {
            last
        }
    }

    /// `Σ_{j<len} M[row][j]·v[j]`.
    fn row_dot(&self, row: usize, len: usize, v: &[R]) -> R {
        let mut acc = R::zero();
        for (j, x) in v.iter().enumerate().take(len) {
            let m = self.get(row, j);
            if !m.is_zero() && !x.is_zero() {
                acc.add_assign_ref(&m.mul_ref(x));
            }
        }
        acc
    }

    /// Leading `r×r` block applied to `v`.
    fn block_apply(&self, r: usize, v: &[R]) -> Vec<R> {
        (0..r).map(|i| self.row_dot(i, r, v)).collect()
    }
}

/// Which arcs of the united column enter the matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ColumnPart {
    Whole,
    Minus,
    Plus,
}

pub fn build_matrix(code: &DiagramCode) -> Result<SquareMatrix<ZetaPolynomial>, InvariantError> {
    let d = code.decompose()?;
    build_matrix_from(&d, ColumnPart::Whole)
}

pub fn build_matrix_from(
    d: &Decomposition,
    part: ColumnPart,
) -> Result<SquareMatrix<ZetaPolynomial>, InvariantError> {
    let n = d.classical_count();
    if n == 0 {
        return Err(InvariantError::NoClassicalCrossings);
    }
    let mut m = SquareMatrix::<ZetaPolynomial>::zeros(n);
    for j in 0..n {
        let long_arcs = &d.columns[j].long_arcs;
        let selected: &[usize] = match (d.united_column == Some(j), part) {
            (true, ColumnPart::Plus) => &long_arcs[..1],
            (true, ColumnPart::Minus) => &long_arcs[1..],
            _ => long_arcs,
        };
        for &l in selected {
            for &a in &d.long_arcs[l].arcs {
                let degree = d.arcs[a].degree;
                for (i, &v) in d.crossings.iter().enumerate() {
                    let x = incidence(d, v, a);
                    if !x.is_zero() {
                        let entry = m.get(i, j).add_ref(&Laurent::monomial(degree, x));
                        m.set(i, j, entry);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// `ζ(D)`; zero when there are no classical crossings.
pub fn zeta(code: &DiagramCode) -> Result<ZetaPolynomial, InvariantError> {
    let d = code.decompose()?;
    Ok(zeta_of(&d))
}

pub fn zeta_of(d: &Decomposition) -> ZetaPolynomial {
    match build_matrix_from(d, ColumnPart::Whole) {
        Ok(m) => m.determinant(),
        Err(_) => ZetaPolynomial::zero(),
    }
}

/// `(ζ₋, ζ₊)`; `(−1, 1)` when there are no classical crossings.
pub fn zeta_split(code: &DiagramCode) -> Result<(ZetaPolynomial, ZetaPolynomial), InvariantError> {
    let d = code.decompose()?;
    Ok(zeta_split_of(&d))
}

pub fn zeta_split_of(d: &Decomposition) -> (ZetaPolynomial, ZetaPolynomial) {
    if d.classical_count() == 0 {
        return (ZetaPolynomial::one().neg_ref(), ZetaPolynomial::one());
    }
    let det = |part| build_matrix_from(d, part).expect("n >= 1").determinant();
    (det(ColumnPart::Minus), det(ColumnPart::Plus))
}

/// `B_ij = Σ [v_i:a]` over arcs `a` of column `j` whose degree equals the
/// number of increasing passages on the column.
pub fn leading_matrix(code: &DiagramCode) -> Result<SquareMatrix<RingT>, InvariantError> {
    leading_matrix_of(&code.decompose()?)
}

pub fn leading_matrix_of(d: &Decomposition) -> Result<SquareMatrix<RingT>, InvariantError> {
    let n = d.classical_count();
    if n == 0 {
        return Err(InvariantError::NoClassicalCrossings);
    }
    let mut b = SquareMatrix::zeros(n);
    for j in 0..n {
        let threshold = d.column_increasing(j) as i32;
        let achieving: Vec<usize> = d
            .column_arcs(j)
            .filter(|&a| d.arcs[a].degree == threshold)
            .collect();
        let through_infinity = d.united_column == Some(j)
            && achieving.len() == 2
            && d.junction().is_some_and(|(x, y)| achieving == [x, y]);
        if achieving.len() > 1 && !through_infinity {
            return Err(InvariantError::AmbiguousThreshold {
                column: j,
                count: achieving.len(),
                threshold,
            });
        }
        for (i, &v) in d.crossings.iter().enumerate() {
            let sum = achieving
                .iter()
                .fold(RingT::zero(), |acc, &a| acc + incidence(d, v, a));
            b.set(i, j, sum);
        }
    }
    Ok(b)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinimalityCertificate {
    pub k: usize,
    pub det_b: RingT,
    pub sk_coefficient: RingT,
    pub zeta_top: Option<i32>,
    pub minimal: bool,
    pub cross_check_passed: bool,
}

impl fmt::Display for MinimalityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.minimal {
            write!(f, "k = {}; det B = {}; minimal", self.k, self.det_b)
        } else {
            write!(f, "k = {}; no certificate", self.k)
        }
    }
}

/// Compares `det B` with the `s^k` coefficient of `ζ` and reports whether
/// the diagram is certified to have minimal virtual crossing number. A
/// disagreement is an internal error. Diagrams without classical crossings
/// have no `B` and get no certificate.
pub fn certify_minimality(code: &DiagramCode) -> Result<MinimalityCertificate, InvariantError> {
    let d = code.decompose()?;
    let z = zeta_of(&d);
    certify_with(&d, &z)
}

/// [`certify_minimality`] for a decomposition whose `ζ` is already known.
pub fn certify_with(
    d: &Decomposition,
    z: &ZetaPolynomial,
) -> Result<MinimalityCertificate, InvariantError> {
    let k = d.virtual_count;
    if d.classical_count() == 0 {
        return Ok(MinimalityCertificate {
            k,
            det_b: RingT::zero(),
            sk_coefficient: RingT::zero(),
            zeta_top: None,
            minimal: false,
            cross_check_passed: true,
        });
    }
    let det_b = leading_matrix_of(d)?.determinant();
    let sk_coefficient = z.coeff(k as i32);
    if det_b != sk_coefficient {
        return Err(InvariantError::Inconsistent {
            k,
            det_b,
            sk_coefficient,
        });
    }
    Ok(MinimalityCertificate {
        k,
        minimal: !det_b.is_zero(),
        det_b,
        sk_coefficient,
        zeta_top: z.top_degree(),
        cross_check_passed: true,
    })
}

/// Lower bound on the virtual crossing number of every equivalent diagram.
pub fn virtual_lower_bound(code: &DiagramCode) -> Result<usize, InvariantError> {
    Ok(zeta(code)?.top_degree().map_or(0, |t| t.max(0) as usize))
}
