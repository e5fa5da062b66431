//! Mixed-type data: a table whose columns are either continuous values or
//! categorical codes over a named level set, plus the dummy encoding used by
//! every regression in the crate.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One typed column of a [`MixedDataMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Continuous {
        name: String,
        values: Vec<f64>,
    },
    /// `codes[i]` indexes into `levels`; levels are kept in first-appearance
    /// order so encoding is deterministic.
    Categorical {
        name: String,
        codes: Vec<u32>,
        levels: Vec<String>,
    },
}

impl Column {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Column {
        Column::Continuous { name: name.into(), values }
    }

    /// Build a categorical column from raw labels, collecting the level set
    /// in first-appearance order.
    pub fn categorical_from_labels<S: AsRef<str>>(name: impl Into<String>, labels: &[S]) -> Column {
        let mut levels: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let code = match levels.iter().position(|x| x == l) {
                Some(i) => i,
                None => {
                    levels.push(l.to_string());
                    levels.len() - 1
                }
            };
            codes.push(code as u32);
        }
        Column::Categorical { name: name.into(), codes, levels }
    }

    pub fn name(&self) -> &str {
        match self {
            Column::Continuous { name, .. } => name,
            Column::Categorical { name, .. } => name,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Continuous { values, .. } => values.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, Column::Categorical { .. })
    }

    /// Number of levels for categorical columns, 0 for continuous.
    pub fn level_count(&self) -> usize {
        match self {
            Column::Continuous { .. } => 0,
            Column::Categorical { levels, .. } => levels.len(),
        }
    }

    /// Dummy-encode this single column: continuous columns pass through,
    /// categorical columns expand to `K - 1` indicator columns with the first
    /// level as reference.
    pub fn encode(&self) -> Vec<(String, Vec<f64>)> {
        match self {
            Column::Continuous { name, values } => vec![(name.clone(), values.clone())],
            Column::Categorical { name, codes, levels } => (1..levels.len())
                .map(|l| {
                    let vals = codes
                        .iter()
                        .map(|&c| if c as usize == l { 1.0 } else { 0.0 })
                        .collect();
                    (format!("{name}={}", levels[l]), vals)
                })
                .collect(),
        }
    }
}

/// An `n x p` table of typed columns with unique names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedDataMatrix {
    n: usize,
    columns: Vec<Column>,
}

impl MixedDataMatrix {
    /// Validates column lengths, unique nonempty names, code ranges, and
    /// `K >= 2` for categorical columns. Generated knockoffs may leave some
    /// declared level unobserved; the level *set* is what is preserved.
    pub fn new(columns: Vec<Column>) -> Result<MixedDataMatrix> {
        if columns.is_empty() {
            return Err(Error::InvalidInput("data must have at least one column".into()));
        }
        let n = columns[0].len();
        let mut seen = std::collections::HashSet::new();
        for col in &columns {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column {:?} has length {} but expected {n}",
                    col.name(),
                    col.len()
                )));
            }
            if col.name().is_empty() || !seen.insert(col.name().to_string()) {
                return Err(Error::InvalidInput(format!(
                    "column names must be unique and nonempty; offending name {:?}",
                    col.name()
                )));
            }
            if let Column::Categorical { name, codes, levels } = col {
                if levels.len() < 2 {
                    return Err(Error::InvalidInput(format!(
                        "categorical column {name:?} needs at least 2 levels"
                    )));
                }
                if codes.iter().any(|&c| c as usize >= levels.len()) {
                    return Err(Error::InvalidInput(format!(
                        "categorical column {name:?} has a code outside its level set"
                    )));
                }
            }
        }
        Ok(MixedDataMatrix { n, columns })
    }

    /// All-continuous constructor from a dense matrix.
    pub fn from_continuous(x: &Array2<f64>, names: Option<Vec<String>>) -> Result<MixedDataMatrix> {
        let (_, p) = x.dim();
        let names = names.unwrap_or_else(|| (0..p).map(|j| format!("x{}", j + 1)).collect());
        if names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {p} columns",
                names.len()
            )));
        }
        let columns = names
            .into_iter()
            .zip(x.columns())
            .map(|(name, col)| Column::continuous(name, col.to_vec()))
            .collect();
        MixedDataMatrix::new(columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn is_all_continuous(&self) -> bool {
        self.columns.iter().all(|c| !c.is_categorical())
    }

    /// Dense numeric view of all-continuous data.
    pub fn to_dense(&self) -> Result<Array2<f64>> {
        if !self.is_all_continuous() {
            return Err(Error::InvalidInput(
                "dense view requires all-continuous columns".into(),
            ));
        }
        let mut out = Array2::<f64>::zeros((self.n, self.p()));
        for (j, col) in self.columns.iter().enumerate() {
            if let Column::Continuous { values, .. } = col {
                for (i, v) in values.iter().enumerate() {
                    out[[i, j]] = *v;
                }
            }
        }
        Ok(out)
    }

    /// Dummy-encode every column, tracking which source variable each
    /// encoded column came from.
    pub fn encode(&self) -> EncodedDesign {
        self.encode_subset(&(0..self.p()).collect::<Vec<_>>())
    }

    /// Dummy-encode the listed variables, in the given order.
    pub fn encode_subset(&self, vars: &[usize]) -> EncodedDesign {
        let mut cols = Vec::new();
        let mut names = Vec::new();
        let mut var_of_col = Vec::new();
        for &v in vars {
            for (name, values) in self.columns[v].encode() {
                names.push(name);
                cols.push(values);
                var_of_col.push(v);
            }
        }
        EncodedDesign { cols, names, var_of_col }
    }
}

/// A dummy-encoded design: column-major numeric data plus the mapping from
/// encoded columns back to source variables.
#[derive(Debug, Clone)]
pub struct EncodedDesign {
    pub cols: Vec<Vec<f64>>,
    pub names: Vec<String>,
    pub var_of_col: Vec<usize>,
}

/// Regression response: continuous values or categorical codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Response {
    Gaussian(Vec<f64>),
    Categorical { codes: Vec<u32>, levels: Vec<String> },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Gaussian(v) => v.len(),
            Response::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_collect_levels_in_first_appearance_order() {
        let col = Column::categorical_from_labels("g", &["B", "A", "B", "C"]);
        match &col {
            Column::Categorical { codes, levels, .. } => {
                assert_eq!(levels, &["B", "A", "C"]);
                assert_eq!(codes, &[0, 1, 0, 2]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn encoding_uses_first_level_as_reference() {
        let col = Column::categorical_from_labels("g", &["a", "b", "c", "a"]);
        let enc = col.encode();
        assert_eq!(enc.len(), 2);
        assert_eq!(enc[0].0, "g=b");
        assert_eq!(enc[0].1, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(enc[1].0, "g=c");
        assert_eq!(enc[1].1, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn mixed_encode_tracks_source_variables() {
        let data = MixedDataMatrix::new(vec![
            Column::continuous("x", vec![1.0, 2.0, 3.0]),
            Column::categorical_from_labels("g", &["u", "v", "u"]),
        ])
        .unwrap();
        let enc = data.encode();
        assert_eq!(enc.names, vec!["x".to_string(), "g=v".to_string()]);
        assert_eq!(enc.var_of_col, vec![0, 1]);
    }

    #[test]
    fn duplicate_names_rejected() {
        let res = MixedDataMatrix::new(vec![
            Column::continuous("x", vec![1.0]),
            Column::continuous("x", vec![2.0]),
        ]);
        assert!(res.is_err());
    }

    #[test]
    fn ragged_columns_rejected() {
        let res = MixedDataMatrix::new(vec![
            Column::continuous("x", vec![1.0, 2.0]),
            Column::continuous("y", vec![2.0]),
        ]);
        assert!(res.is_err());
    }
}
