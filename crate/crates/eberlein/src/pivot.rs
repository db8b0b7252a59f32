//! Cyclic block pivot orderings.
//!
//! A cyclic ordering visits every pivot pair (p, q), p < q, exactly once
//! per cycle. Besides the plain row- and column-wise orderings this module
//! generates serial orderings with permutations (column-by-column or
//! row-by-row with arbitrary order inside each column/row) and derives new
//! orderings by shifts, reversal, admissible transpositions and block-index
//! permutations. Orderings produced by such derivation chains from serial
//! ones belong to the generalized serial class by construction, which is
//! the class the convergence theory covers.

use crate::blockmat::PivotPair;
use crate::error::{Error, Result};
use crate::rng;

/// How an ordering came to be; derivations keep their whole chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Row,
    Col,
    SerialPermCol { seed: u64 },
    SerialPermRow { seed: u64 },
    Derived { op: DeriveOp, base: Box<Provenance> },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeriveOp {
    Shift(usize),
    Reverse,
    TransposeAt(usize),
    VertexPerm(Vec<usize>),
}

/// Inner order direction for serial orderings with permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SerialDirection {
    Col,
    Row,
}

/// Structural class of a serial ordering with permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SerialClass {
    Column,
    ColumnReversed,
    Row,
    RowReversed,
}

/// Cyclic pivot ordering over `m` blocks: all `m(m-1)/2` pairs, each once.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotOrdering {
    m: usize,
    pairs: Vec<PivotPair>,
    provenance: Provenance,
}

fn validate_pairs(m: usize, pairs: &[PivotPair]) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid("orderings need at least two blocks"));
    }
    let expected = m * (m - 1) / 2;
    if pairs.len() != expected {
        return Err(Error::invalid(format!(
            "ordering over {m} blocks needs {expected} pairs, got {}",
            pairs.len()
        )));
    }
    let mut seen = vec![false; m * m];
    for pair in pairs {
        if pair.q >= m {
            return Err(Error::invalid(format!(
                "pair ({}, {}) out of range for {m} blocks",
                pair.p, pair.q
            )));
        }
        let slot = pair.p * m + pair.q;
        if seen[slot] {
            return Err(Error::invalid(format!(
                "pair ({}, {}) appears more than once",
                pair.p, pair.q
            )));
        }
        seen[slot] = true;
    }
    Ok(())
}

impl PivotOrdering {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> &[PivotPair] {
        &self.pairs
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn custom(m: usize, pairs: Vec<PivotPair>) -> Result<Self> {
        validate_pairs(m, &pairs)?;
        Ok(PivotOrdering { m, pairs, provenance: Provenance::Custom })
    }

    /// Row-by-row: (1,2), (1,3), ..., (1,m), (2,3), ...
    pub fn row_cyclic(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("orderings need at least two blocks"));
        }
        let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
        for p in 0..m - 1 {
            for q in p + 1..m {
                pairs.push(PivotPair { p, q });
            }
        }
        Ok(PivotOrdering { m, pairs, provenance: Provenance::Row })
    }

    /// Column-by-column: (1,2), (1,3), (2,3), (1,4), ...
    pub fn col_cyclic(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("orderings need at least two blocks"));
        }
        let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
        for q in 1..m {
            for p in 0..q {
                pairs.push(PivotPair { p, q });
            }
        }
        Ok(PivotOrdering { m, pairs, provenance: Provenance::Col })
    }

    /// Random serial ordering with permutations: columns left to right (or
    /// rows bottom to top), arbitrary order inside each column (row).
    /// Deterministic for a given seed.
    pub fn serial_with_permutations(m: usize, seed: u64, direction: SerialDirection) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("orderings need at least two blocks"));
        }
        let mut rng = rng::seeded(seed);
        let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
        match direction {
            SerialDirection::Col => {
                pairs.push(PivotPair { p: 0, q: 1 });
                for q in 2..m {
                    let mut firsts: Vec<usize> = (0..q).collect();
                    rng::shuffle(&mut rng, &mut firsts);
                    pairs.extend(firsts.into_iter().map(|p| PivotPair { p, q }));
                }
                Ok(PivotOrdering {
                    m,
                    pairs,
                    provenance: Provenance::SerialPermCol { seed },
                })
            }
            SerialDirection::Row => {
                pairs.push(PivotPair { p: m - 2, q: m - 1 });
                for p in (0..m.saturating_sub(2)).rev() {
                    let mut seconds: Vec<usize> = (p + 1..m).collect();
                    rng::shuffle(&mut rng, &mut seconds);
                    pairs.extend(seconds.into_iter().map(|q| PivotPair { p, q }));
                }
                Ok(PivotOrdering {
                    m,
                    pairs,
                    provenance: Provenance::SerialPermRow { seed },
                })
            }
        }
    }

    /// Derives a new ordering; the provenance keeps the chain, so anything
    /// derived from a serial ordering stays inside the generalized serial
    /// class by construction.
    pub fn derive(&self, op: DeriveOp) -> Result<Self> {
        let pairs = match &op {
            DeriveOp::Shift(t) => {
                let t = t % self.pairs.len();
                let mut rotated = self.pairs[t..].to_vec();
                rotated.extend_from_slice(&self.pairs[..t]);
                rotated
            }
            DeriveOp::Reverse => self.pairs.iter().rev().copied().collect(),
            DeriveOp::TransposeAt(k) => {
                if k + 1 >= self.pairs.len() {
                    return Err(Error::invalid(format!(
                        "transposition index {k} out of range"
                    )));
                }
                if !is_admissible_transposition(self.pairs[*k], self.pairs[k + 1]) {
                    return Err(Error::invalid(format!(
                        "pairs at {k} and {} share a block index",
                        k + 1
                    )));
                }
                let mut swapped = self.pairs.clone();
                swapped.swap(*k, k + 1);
                swapped
            }
            DeriveOp::VertexPerm(perm) => {
                if perm.len() != self.m {
                    return Err(Error::invalid(format!(
                        "block permutation must have length {}",
                        self.m
                    )));
                }
                let mut seen = vec![false; self.m];
                for &v in perm {
                    if v >= self.m || seen[v] {
                        return Err(Error::invalid("not a permutation of the block indices"));
                    }
                    seen[v] = true;
                }
                self.pairs
                    .iter()
                    .map(|pair| {
                        let (a, b) = (perm[pair.p], perm[pair.q]);
                        PivotPair { p: a.min(b), q: a.max(b) }
                    })
                    .collect()
            }
        };
        validate_pairs(self.m, &pairs)?;
        Ok(PivotOrdering {
            m: self.m,
            pairs,
            provenance: Provenance::Derived { op, base: Box::new(self.provenance.clone()) },
        })
    }

    /// Structural classification against the four serial-with-permutation
    /// patterns; `None` when the ordering fits none of them.
    pub fn serial_class(&self) -> Option<SerialClass> {
        if matches_column_serial(self.m, &self.pairs) {
            return Some(SerialClass::Column);
        }
        let reversed: Vec<PivotPair> = self.pairs.iter().rev().copied().collect();
        if matches_column_serial(self.m, &reversed) {
            return Some(SerialClass::ColumnReversed);
        }
        if matches_row_serial(self.m, &self.pairs) {
            return Some(SerialClass::Row);
        }
        if matches_row_serial(self.m, &reversed) {
            return Some(SerialClass::RowReversed);
        }
        None
    }

    /// Parses the text format: one pair per line, "p q", 1-based. Blank
    /// lines and lines starting with '#' are skipped.
    pub fn from_text(text: &str, m: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |tok: Option<&str>, idx: usize| -> Result<usize> {
                tok.ok_or(Error::Parse { line: idx + 1, message: "expected 'p q'".into() })?
                    .parse::<usize>()
                    .map_err(|_| Error::Parse { line: idx + 1, message: "expected integer".into() })
            };
            let p = parse(parts.next(), idx)?;
            let q = parse(parts.next(), idx)?;
            if parts.next().is_some() {
                return Err(Error::Parse { line: idx + 1, message: "trailing tokens".into() });
            }
            if p == 0 || q == 0 {
                return Err(Error::Parse { line: idx + 1, message: "indices are 1-based".into() });
            }
            if p >= q {
                return Err(Error::Parse { line: idx + 1, message: format!("need p < q, got {p} {q}") });
            }
            pairs.push(PivotPair { p: p - 1, q: q - 1 });
        }
        validate_pairs(m, &pairs)?;
        Ok(PivotOrdering { m, pairs, provenance: Provenance::Custom })
    }

    /// The text format, 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for pair in &self.pairs {
            out.push_str(&format!("{} {}\n", pair.p + 1, pair.q + 1));
        }
        out
    }

    /// Matrix representation: entry (p, q) of the upper triangle holds the
    /// step number of that pair, everything else is '*'.
    pub fn matrix_display(&self) -> String {
        let width = (self.pairs.len().saturating_sub(1)).to_string().len();
        let mut grid = vec![vec![None::<usize>; self.m]; self.m];
        for (k, pair) in self.pairs.iter().enumerate() {
            grid[pair.p][pair.q] = Some(k);
        }
        let mut out = String::new();
        for row in &grid {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Some(k) => format!("{k:>width$}"),
                    None => format!("{:>width$}", "*"),
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// True iff the four block indices of the two pairs are pairwise distinct,
/// i.e. swapping the adjacent pairs leaves the sweep equivalent.
pub fn is_admissible_transposition(a: PivotPair, b: PivotPair) -> bool {
    a.p != b.p && a.p != b.q && a.q != b.p && a.q != b.q
}

fn matches_column_serial(m: usize, pairs: &[PivotPair]) -> bool {
    let mut pos = 0;
    for col in 1..m {
        let group = &pairs[pos..pos + col];
        if group.iter().any(|pair| pair.q != col) {
            return false;
        }
        let mut firsts: Vec<usize> = group.iter().map(|pair| pair.p).collect();
        firsts.sort_unstable();
        if firsts != (0..col).collect::<Vec<_>>() {
            return false;
        }
        pos += col;
    }
    true
}

fn matches_row_serial(m: usize, pairs: &[PivotPair]) -> bool {
    let mut pos = 0;
    for row in (0..m - 1).rev() {
        let len = m - 1 - row;
        let group = &pairs[pos..pos + len];
        if group.iter().any(|pair| pair.p != row) {
            return false;
        }
        let mut seconds: Vec<usize> = group.iter().map(|pair| pair.q).collect();
        seconds.sort_unstable();
        if seconds != (row + 1..m).collect::<Vec<_>>() {
            return false;
        }
        pos += len;
    }
    true
}
