//! Dense matrices over the exact scalar type.
//!
//! Entries are exact rationals; a matrix used as an "integer matrix" is one
//! whose entries happen to be integers, and the constructors and validators
//! that require integrality say so. Matrix literals cross the CLI boundary
//! as JSON arrays of arrays of decimal integer strings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{int, LocalRing, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().map(|&x| int(x))).collect(),
        }
    }

    /// Column vector from a slice.
    pub fn col_vec(entries: &[Scalar]) -> Self {
        Mat { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Mat {
        self.map(|x| -x.clone())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        self.map(|x| x * c)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Mat {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Mat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Matrix made of the selected columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Block-diagonal assembly.
    pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
        Mat::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            if i < a.rows && j < a.cols {
                a[(i, j)].clone()
            } else if i >= a.rows && j >= a.cols {
                b[(i - a.rows, j - a.cols)].clone()
            } else {
                Scalar::zero()
            }
        })
    }

    /// Exact determinant by rational Gaussian elimination.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Scalar::one();
        }
        let mut m = self.clone();
        let mut det = Scalar::one();
        for t in 0..n {
            let pivot = (t..n).find(|&i| !m[(i, t)].is_zero());
            let Some(p) = pivot else { return Scalar::zero() };
            if p != t {
                m.swap_rows(p, t);
                det = -det;
            }
            let pv = m[(t, t)].clone();
            det *= pv.clone();
            for i in (t + 1)..n {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let f = &m[(i, t)] / &pv;
                for j in t..n {
                    let t2 = &f * &m[(t, j)];
                    m[(i, j)] -= t2;
                }
            }
        }
        det
    }

    /// Rank over the fraction field.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let (r, c) = (m.rows, m.cols);
        let mut rank = 0;
        for col in 0..c {
            let pivot = (rank..r).find(|&i| !m[(i, col)].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(p, rank);
            let pv = m[(rank, col)].clone();
            for i in (rank + 1)..r {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = &m[(i, col)] / &pv;
                for j in col..c {
                    let t = &f * &m[(rank, j)];
                    m[(i, j)] -= t;
                }
            }
            rank += 1;
            if rank == r {
                break;
            }
        }
        rank
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[to] += c * row[from]
    pub fn row_axpy(&mut self, to: usize, from: usize, c: &Scalar) {
        for j in 0..self.cols {
            let t = c * &self[(from, j)];
            self[(to, j)] += t;
        }
    }

    /// col[to] += c * col[from]
    pub fn col_axpy(&mut self, to: usize, from: usize, c: &Scalar) {
        for i in 0..self.rows {
            let t = c * &self[(i, from)];
            self[(i, to)] += t;
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &Scalar) {
        for j in 0..self.cols {
            self[(i, j)] *= c.clone();
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &Scalar) {
        for i in 0..self.rows {
            self[(i, j)] *= c.clone();
        }
    }

    /// Entrywise canonicalization in the given ring.
    pub fn normalize_in(&self, ring: &LocalRing) -> Mat {
        self.map(|x| ring.normalize(x))
    }

    pub fn in_ring(&self, ring: &LocalRing) -> bool {
        self.data.iter().all(|x| ring.contains(x))
    }

    /// Inverse over a ring; the determinant must be a unit there.
    ///
    /// Over Z and Z_(ell) the inverse is computed over the fraction field;
    /// a unit determinant guarantees the result lands back in the ring.
    /// Over Z/ell^k Gauss-Jordan with unit pivots is exact (a local ring
    /// always offers a unit pivot while the determinant stays a unit).
    pub fn inverse_over(&self, ring: &LocalRing) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        if !self.in_ring(ring) {
            return Err(Error::NotInRing("matrix entry".into(), ring.to_string()));
        }
        match ring {
            LocalRing::Integers | LocalRing::LocalizedAt { .. } => {
                if !ring.is_unit(&self.det()) {
                    return Err(Error::NotInvertible(ring.to_string()));
                }
                let inv = self.field_inverse().ok_or_else(|| Error::NotInvertible(ring.to_string()))?;
                debug_assert!(inv.in_ring(ring));
                Ok(inv)
            }
            LocalRing::ModPrimePower { .. } => self.unit_pivot_inverse(ring),
        }
    }

    fn field_inverse(&self) -> Option<Mat> {
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Mat::identity(n);
        for t in 0..n {
            let p = (t..n).find(|&i| !m[(i, t)].is_zero())?;
            m.swap_rows(p, t);
            inv.swap_rows(p, t);
            let u = m[(t, t)].clone().recip();
            m.scale_row(t, &u);
            inv.scale_row(t, &u);
            for i in 0..n {
                if i == t || m[(i, t)].is_zero() {
                    continue;
                }
                let f = -m[(i, t)].clone();
                m.row_axpy(i, t, &f);
                inv.row_axpy(i, t, &f);
            }
        }
        Some(inv)
    }

    fn unit_pivot_inverse(&self, ring: &LocalRing) -> Result<Mat> {
        let n = self.rows;
        let mut m = self.normalize_in(ring);
        let mut inv = Mat::identity(n);
        for t in 0..n {
            let pivot = (t..n)
                .filter(|&i| !ring.is_zero(&m[(i, t)]))
                .min_by_key(|&i| ring.pivot_key(&m[(i, t)]));
            let Some(p) = pivot else {
                return Err(Error::NotInvertible(ring.to_string()));
            };
            if !ring.is_unit(&m[(p, t)]) {
                return Err(Error::NotInvertible(ring.to_string()));
            }
            m.swap_rows(p, t);
            inv.swap_rows(p, t);
            let u = ring.invert(&m[(t, t)])?;
            m.scale_row(t, &u);
            inv.scale_row(t, &u);
            m = m.normalize_in(ring);
            inv = inv.normalize_in(ring);
            for i in 0..n {
                if i == t || ring.is_zero(&m[(i, t)]) {
                    continue;
                }
                let f = -m[(i, t)].clone();
                m.row_axpy(i, t, &f);
                inv.row_axpy(i, t, &f);
            }
        }
        Ok(inv.normalize_in(ring))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

fn scalar_to_string(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn scalar_from_string(s: &str) -> Result<Scalar> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim().parse::<BigInt>().map_err(|_| Error::InvalidInput(format!("bad integer `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| scalar_to_string(&self[(i, j)])).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        // Entries are decimal integer strings; bare JSON integers are also
        // accepted for convenience.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Int(i64),
            Str(String),
        }
        let rows = Vec::<Vec<Entry>>::deserialize(deserializer)?;
        let scalars: Vec<Vec<Scalar>> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        Entry::Int(n) => Ok(int(n)),
                        Entry::Str(s) => scalar_from_string(&s).map_err(D::Error::custom),
                    })
                    .collect()
            })
            .collect::<std::result::Result<_, _>>()?;
        Mat::from_rows(scalars).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_det() {
        let a = Mat::from_i64_rows(&[&[2, 4], &[6, 8]]);
        let b = Mat::from_i64_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(a.mul(&b), a);
        assert_eq!(a.det(), int(-8));
        assert_eq!(Mat::identity(3).det(), int(1));
        assert_eq!(Mat::zero(2, 2).det(), int(0));
        assert_eq!(a.rank(), 2);
        assert_eq!(Mat::from_i64_rows(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn inverse_mod_prime_power() {
        let ring = LocalRing::mod_prime_power(3, 4).unwrap();
        let a = Mat::from_i64_rows(&[&[1, 1], &[2, 1]]);
        let inv = a.inverse_over(&ring).unwrap();
        let prod = a.mul(&inv).normalize_in(&ring);
        assert_eq!(prod, Mat::identity(2));
        // 3 is not invertible mod 81
        let bad = Mat::from_i64_rows(&[&[3, 0], &[0, 1]]);
        assert!(bad.inverse_over(&ring).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a = Mat::from_i64_rows(&[&[2, -4], &[6, 8]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["2","-4"],["6","8"]]"#);
        let back: Mat = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
        let from_ints: Mat = serde_json::from_str("[[2,-4],[6,8]]").unwrap();
        assert_eq!(a, from_ints);
    }
}
