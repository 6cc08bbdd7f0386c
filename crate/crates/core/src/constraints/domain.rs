use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite symbolic domain: parallel lists of class labels and the
/// integers they denote, sorted by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicDomain {
    name: String,
    labels: Vec<String>,
    values: Vec<i64>,
}

impl SymbolicDomain {
    /// Labels get the values `0..n` in lexicographic label order.
    pub fn from_labels(name: &str, labels: &[String]) -> Result<Self> {
        let mut sorted = labels.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("domain `{name}` has duplicate labels")));
        }
        if sorted.is_empty() {
            return Err(Error::domain(format!("domain `{name}` is empty")));
        }
        let values = (0..sorted.len() as i64).collect();
        Ok(SymbolicDomain {
            name: name.to_string(),
            labels: sorted,
            values,
        })
    }

    /// Integers `lo..=hi`, labelled by their decimal representation.
    pub fn from_range(name: &str, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("domain `{name}` has empty range [{lo}, {hi}]")));
        }
        Ok(SymbolicDomain {
            name: name.to_string(),
            labels: (lo..=hi).map(|v| v.to_string()).collect(),
            values: (lo..=hi).collect(),
        })
    }

    /// Restriction of `parent` to `labels`; values are inherited.
    pub fn subset_of(name: &str, parent: &SymbolicDomain, labels: &[String]) -> Result<Self> {
        let mut pairs = Vec::new();
        for l in labels {
            let v = parent.value_of(l).ok_or_else(|| {
                Error::domain(format!("label `{l}` of `{name}` is not in domain `{}`", parent.name))
            })?;
            pairs.push((v, l.clone()));
        }
        pairs.sort();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("domain `{name}` has duplicate labels")));
        }
        if pairs.is_empty() {
            return Err(Error::domain(format!("domain `{name}` is empty")));
        }
        Ok(SymbolicDomain {
            name: name.to_string(),
            values: pairs.iter().map(|p| p.0).collect(),
            labels: pairs.into_iter().map(|p| p.1).collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.index_of(v).is_some()
    }

    /// Position of value `v` in this domain.
    pub fn index_of(&self, v: i64) -> Option<usize> {
        self.values.binary_search(&v).ok()
    }

    pub fn value_of(&self, label: &str) -> Option<i64> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i])
    }

    pub fn label_of(&self, v: i64) -> Option<&str> {
        self.index_of(v).map(|i| self.labels[i].as_str())
    }
}

/// A symbolic variable bound to a domain; `source` names the perceptual
/// dataset its values are drawn from and is annotation only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Arc<SymbolicDomain>,
    pub source: Option<String>,
}

impl VariableSpec {
    pub fn new(name: &str, domain: Arc<SymbolicDomain>, source: Option<&str>) -> Self {
        VariableSpec {
            name: name.to_string(),
            domain,
            source: source.map(str::to_string),
        }
    }
}

pub type VariableAssignment = BTreeMap<String, i64>;

#[cfg(test)]
mod tests {
    use super::*;

    fn fmnist() -> Vec<String> {
        [
            "top", "trouser", "pullover", "dress", "coat", "sandal", "shirt", "sneaker", "bag", "boot",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    #[test]
    fn lexicographic_values() {
        let d = SymbolicDomain::from_labels("fmnist", &fmnist()).unwrap();
        assert_eq!(d.value_of("bag"), Some(0));
        assert_eq!(d.value_of("boot"), Some(1));
        assert_eq!(d.value_of("trouser"), Some(9));
        assert_eq!(d.label_of(8), Some("top"));
    }

    #[test]
    fn subset_keeps_parent_values() {
        let d = SymbolicDomain::from_labels("fmnist", &fmnist()).unwrap();
        let labels: Vec<String> = ["trouser", "sandal", "top", "shirt", "sneaker"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let s = SymbolicDomain::subset_of("five", &d, &labels).unwrap();
        assert_eq!(s.values(), &[5, 6, 7, 8, 9]);
        assert_eq!(s.labels()[0], "sandal");
        assert!(!s.contains(0));
        assert!(SymbolicDomain::subset_of("bad", &d, &["cat".to_string()]).is_err());
    }

    #[test]
    fn ranges_and_duplicates() {
        let r = SymbolicDomain::from_range("c", 2, 8).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.index_of(2), Some(0));
        assert!(SymbolicDomain::from_range("e", 3, 2).is_err());
        assert!(SymbolicDomain::from_labels("d", &["a".into(), "a".into()]).is_err());
    }
}
