//! Positive braid words, their linking graphs and Seifert forms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Sign, SignedGraph, VertexId};
use crate::linalg::{inertia_of, IntMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("generator `{0}` is not positive")]
    NonPositiveGenerator(String),
    #[error("bad token `{token}`: {message}")]
    Syntax { token: String, message: String },
    #[error("generator {index} needs more than {strands} strands")]
    IndexOutOfRange { index: u32, strands: u32 },
    #[error("empty braid word")]
    Empty,
}

/// A positive braid word: letters are generator indices in `1..strands`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: u32,
    pub letters: Vec<u32>,
}

impl BraidWord {
    pub fn new(strands: u32, letters: Vec<u32>) -> Result<Self, BraidError> {
        if letters.is_empty() {
            return Err(BraidError::Empty);
        }
        if let Some(&bad) = letters.iter().find(|&&k| k == 0) {
            return Err(BraidError::NonPositiveGenerator(bad.to_string()));
        }
        if let Some(&index) = letters.iter().find(|&&k| k >= strands) {
            return Err(BraidError::IndexOutOfRange { index, strands });
        }
        Ok(BraidWord { strands, letters })
    }

    /// `word` repeated `times` times.
    pub fn power(word: &[u32], times: usize) -> Self {
        let letters: Vec<u32> = word.iter().copied().cycle().take(word.len() * times).collect();
        let strands = letters.iter().max().map_or(2, |m| m + 1);
        BraidWord::new(strands, letters).expect("positive word")
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.letters.iter().map(|k| format!("s{k}")).collect();
        write!(f, "{}", words.join(" "))
    }
}

fn parse_index(tok: &str) -> Result<u32, BraidError> {
    let digits = tok.strip_prefix('s').unwrap_or(tok);
    let syntax = |message: &str| BraidError::Syntax {
        token: tok.to_string(),
        message: message.to_string(),
    };
    if digits.is_empty() {
        return Err(syntax("expected `s<k>` or `<k>`"));
    }
    let value: i64 = digits.parse().map_err(|_| syntax("expected `s<k>` or `<k>`"))?;
    if value <= 0 {
        return Err(BraidError::NonPositiveGenerator(tok.to_string()));
    }
    u32::try_from(value).map_err(|_| syntax("index too large"))
}

/// Parses whitespace-separated generators `s<k>` or `<k>` with an optional
/// leading `strands=<s>`.
pub fn parse_braid(text: &str) -> Result<BraidWord, BraidError> {
    let mut toks = text.split_whitespace().peekable();
    let mut strands = None;
    if let Some(first) = toks.peek() {
        if let Some(s) = first.strip_prefix("strands=") {
            let n = s.parse::<u32>().map_err(|_| BraidError::Syntax {
                token: first.to_string(),
                message: "expected `strands=<s>`".into(),
            })?;
            strands = Some(n);
            toks.next();
        }
    }
    let letters = toks.map(parse_index).collect::<Result<Vec<u32>, _>>()?;
    let max = letters.iter().copied().max().ok_or(BraidError::Empty)?;
    BraidWord::new(strands.unwrap_or(max + 1), letters)
}

impl FromStr for BraidWord {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_braid(s)
    }
}

/// A brick: two consecutive occurrences of generator `column` at word
/// positions `start < end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Brick {
    pub column: u32,
    pub start: usize,
    pub end: usize,
}

/// Bricks sorted by `(column, start)`; this order is the homology basis.
pub fn bricks(b: &BraidWord) -> Vec<Brick> {
    let mut out = Vec::new();
    for column in 1..b.strands {
        let pos: Vec<usize> = (0..b.letters.len()).filter(|&i| b.letters[i] == column).collect();
        out.extend(pos.windows(2).map(|w| Brick {
            column,
            start: w[0],
            end: w[1],
        }));
    }
    out
}

fn bricks_meet(a: &Brick, b: &Brick) -> bool {
    if a.column == b.column {
        return a.end == b.start || b.end == a.start;
    }
    if a.column.abs_diff(b.column) != 1 {
        return false;
    }
    let inside = |p: usize| a.start < p && p < a.end;
    inside(b.start) != inside(b.end)
}

/// Upper-triangular Seifert matrix `V` with unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertForm {
    #[serde(with = "rows")]
    pub v: IntMatrix,
}

mod rows {
    use crate::linalg::IntMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        IntMatrix::from_rows(&Vec::<Vec<i64>>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl SeifertForm {
    pub fn new(v: IntMatrix) -> Result<Self, MatrixError> {
        let n = v.rows();
        if !v.is_square() {
            return Err(MatrixError::Dimension(format!("{}x{} Seifert matrix", n, v.cols())));
        }
        for i in 0..n {
            for j in 0..n {
                let x = v.get(i, j);
                let ok = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => x == 1,
                    std::cmp::Ordering::Greater => x == 0,
                    std::cmp::Ordering::Less => (-1..=1).contains(&x),
                };
                if !ok {
                    return Err(MatrixError::NotGram(format!("entry ({i},{j}) = {x}")));
                }
            }
        }
        Ok(SeifertForm { v })
    }

    pub fn dim(&self) -> usize {
        self.v.rows()
    }

    /// The symmetrized form `V + V^T`.
    pub fn symmetrized(&self) -> IntMatrix {
        let n = self.dim();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.v.get(i, j) + self.v.get(j, i));
            }
        }
        m
    }
}

/// The linking graph on the brick basis and its Seifert form. Vertex `k`
/// is the `k`-th brick of [`bricks`]; every edge is positive, and `V` is
/// the identity plus the strict upper triangle of the graph's Gram matrix.
pub fn linking_graph(b: &BraidWord) -> (SignedGraph, SeifertForm) {
    let bs = bricks(b);
    let n = bs.len();
    let mut edges = Vec::new();
    let mut v = IntMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if bricks_meet(&bs[i], &bs[j]) {
                edges.push((i as VertexId, j as VertexId, Sign::Pos));
                v.set(i, j, 1);
            }
        }
    }
    let g = SignedGraph::on_range(n, edges).expect("brick graph is simple");
    (g, SeifertForm::new(v).expect("unit upper triangular"))
}

/// Signature of the symmetrized Seifert form.
pub fn signature(form: &SeifertForm) -> i64 {
    inertia_of(&form.symmetrized()).signature()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gram_matrix;
    use num_bigint::BigInt;

    #[test]
    fn parse_examples() {
        let b = parse_braid("s1 s1 s1").unwrap();
        assert_eq!((b.strands, b.letters.clone()), (2, vec![1, 1, 1]));
        let b = parse_braid("1 2 1 2 1 2 1 2").unwrap();
        assert_eq!(b, BraidWord::power(&[1, 2], 4));
        assert_eq!(b.strands, 3);
        assert!(matches!(parse_braid("s0 s1"), Err(BraidError::NonPositiveGenerator(_))));
        assert!(matches!(parse_braid("s-1"), Err(BraidError::NonPositiveGenerator(_))));
        assert!(matches!(parse_braid("s1 x"), Err(BraidError::Syntax { .. })));
        assert!(matches!(
            parse_braid("strands=2 s2"),
            Err(BraidError::IndexOutOfRange { index: 2, strands: 2 })
        ));
        assert_eq!(parse_braid("strands=4 s1 s1").unwrap().strands, 4);
        assert_eq!(parse_braid("   "), Err(BraidError::Empty));
        assert_eq!(parse_braid(&b.to_string()).unwrap(), b);
    }

    fn det(b: &BraidWord) -> BigInt {
        let (g, form) = linking_graph(b);
        assert_eq!(gram_matrix(&g).matrix(), &form.symmetrized());
        form.symmetrized().det()
    }

    #[test]
    fn trefoil_and_hopf() {
        let trefoil = BraidWord::power(&[1], 3);
        let (g, form) = linking_graph(&trefoil);
        assert_eq!((g.order(), g.size()), (2, 1));
        assert_eq!(form.symmetrized().to_rows(), vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(det(&trefoil), BigInt::from(3));
        assert_eq!(signature(&form), 2);
        let hopf = BraidWord::power(&[1], 2);
        let (g, form) = linking_graph(&hopf);
        assert_eq!((g.order(), g.size()), (1, 0));
        assert_eq!(signature(&form), 1);
    }

    #[test]
    fn torus_knot_determinants() {
        assert_eq!(linking_graph(&BraidWord::power(&[1, 2], 4)).0.order(), 6);
        assert_eq!(det(&BraidWord::power(&[1, 2], 4)), BigInt::from(3));
        assert_eq!(det(&BraidWord::power(&[1, 2], 5)), BigInt::from(1));
        assert_eq!(det(&BraidWord::power(&[1, 2, 3], 3)), BigInt::from(3));
        assert_eq!(det(&BraidWord::power(&[1, 2], 3)), BigInt::from(4));
        assert_eq!(det(&BraidWord::power(&[1, 2], 6)), BigInt::from(0));
    }

    #[test]
    fn rank_is_letters_minus_columns_used() {
        for word in [&[1u32, 2][..], &[1, 2, 3], &[1, 1, 2], &[2, 1, 3, 2]] {
            for times in 1..6 {
                let b = BraidWord::power(word, times);
                let mut used: Vec<u32> = b.letters.clone();
                used.sort_unstable();
                used.dedup();
                assert_eq!(bricks(&b).len(), b.letters.len() - used.len());
            }
        }
    }

    #[test]
    fn seifert_form_rejects_bad_matrices() {
        assert!(SeifertForm::new(IntMatrix::from_rows(&[vec![1, 2], vec![0, 1]]).unwrap()).is_err());
        assert!(SeifertForm::new(IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap()).is_err());
    }
}
