//! Travelling salesman instances: distance matrices, visibility and path
//! costs. Vertices are numbered from 1.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ValidationError {
    #[error("an instance needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("distance d[{i}][{j}] = {value} is not positive")]
    NonPositiveDistance { i: usize, j: usize, value: f64 },
    #[error("distance d[{i}][{j}] is not finite")]
    NonFinite { i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("vertex {0} appears twice")]
    RepeatedVertex(usize),
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TspInstance<F: Scalar> {
    n: usize,
    d: Vec<F>,
    eta: Vec<F>,
}

impl<F: Scalar> TspInstance<F> {
    /// Builds an instance from a row-major `n × n` matrix. The diagonal is
    /// kept but never read.
    pub fn from_matrix(n: usize, d: Vec<F>) -> Result<Self, ValidationError> {
        assert_eq!(d.len(), n * n, "matrix must hold n * n entries");
        if n < 3 {
            return Err(ValidationError::TooFewVertices(n));
        }
        for i in 0..n {
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() {
                    return Err(ValidationError::NonFinite { i: i + 1, j: j + 1 });
                }
                if i != j && v <= F::zero() {
                    return Err(ValidationError::NonPositiveDistance {
                        i: i + 1,
                        j: j + 1,
                        value: v.as_f64(),
                    });
                }
            }
        }
        let eta = (0..n * n)
            .map(|k| if k / n == k % n { F::zero() } else { F::one() / d[k] })
            .collect();
        Ok(TspInstance { n, d, eta })
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self, ValidationError> {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self::from_matrix(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d[i][j]`, 1-based.
    pub fn d(&self, i: usize, j: usize) -> F {
        self.d[(i - 1) * self.n + (j - 1)]
    }

    /// `η[i][j] = 1 / d[i][j]`, 1-based.
    pub fn eta(&self, i: usize, j: usize) -> F {
        self.eta[(i - 1) * self.n + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        self.d.chunks(self.n).map(<[F]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.n).all(|i| (1..=self.n).all(|j| i == j || self.d(i, j) == self.d(j, i)))
    }

    /// Sum of distances along `path`, plus the edge back to the start when
    /// `closed`.
    pub fn path_cost(&self, path: &[usize], closed: bool) -> Result<F, PathError> {
        let mut seen = vec![false; self.n + 1];
        for &v in path {
            if v == 0 || v > self.n {
                return Err(PathError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if seen[v] {
                return Err(PathError::RepeatedVertex(v));
            }
            seen[v] = true;
        }
        let mut cost = F::zero();
        for w in path.windows(2) {
            cost = cost + self.d(w[0], w[1]);
        }
        if closed && path.len() > 1 {
            cost = cost + self.d(path[path.len() - 1], path[0]);
        }
        Ok(cost)
    }

    /// The text format read by [`load_instance`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for row in self.d.chunks(self.n) {
            w.write_record(row.iter().map(|v| v.to_string()))
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8")
    }
}

impl<F: Scalar> fmt::Display for TspInstance<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.d.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Parses the instance format: a line with `n`, then `n` rows of `n`
/// whitespace-separated numbers. Blank lines and lines starting with `#` are
/// skipped.
pub fn load_instance<F: Scalar>(text: &str) -> Result<TspInstance<F>, LoadError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    let (nl, first) = lines
        .next()
        .ok_or_else(|| err(1, 1, "missing vertex count".into()))?;
    let mut toks = tokens(first);
    let (col, tok) = toks
        .next()
        .ok_or_else(|| err(nl, 1, "missing vertex count".into()))?;
    let n: usize = tok
        .parse()
        .map_err(|_| err(nl, col, format!("expected a vertex count, found `{tok}`")))?;
    if let Some((c, t)) = toks.next() {
        return Err(err(nl, c, format!("unexpected `{t}` after the vertex count")).into());
    }
    if n < 3 {
        return Err(ValidationError::TooFewVertices(n).into());
    }
    let mut d = Vec::with_capacity(n * n);
    let mut last = nl;
    for r in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(last + 1, 1, format!("missing row {} of {n}", r + 1)))?;
        last = ln;
        let mut count = 0;
        for (c, t) in tokens(line) {
            count += 1;
            if count > n {
                return Err(err(ln, c, format!("row {} has more than {n} entries", r + 1)).into());
            }
            let v = t
                .parse::<F>()
                .map_err(|_| err(ln, c, format!("expected a number, found `{t}`")))?;
            d.push(v);
        }
        if count < n {
            return Err(err(ln, line.len() + 1, format!("row {} has {count} of {n} entries", r + 1)).into());
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, 1, format!("unexpected content after {n} rows")).into());
    }
    Ok(TspInstance::from_matrix(n, d)?)
}

/// Tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |t| {
        let offset = t.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, t)
    })
}

/// `n` points drawn uniformly from the unit square, with Euclidean
/// distances. Deterministic in `seed`.
pub fn generate_euclidean<F: Scalar>(n: usize, seed: u64) -> Result<TspInstance<F>, ValidationError> {
    let points = random_points(n, seed);
    let mut d = Vec::with_capacity(n * n);
    for &(xi, yi) in &points {
        for &(xj, yj) in &points {
            d.push(F::of((xi - xj).hypot(yi - yj)));
        }
    }
    TspInstance::from_matrix(n, d)
}

pub fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
}
