use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constraints::{Constraint, SymbolicDomain, VariableSpec};
use crate::error::{Error, Result};
use crate::ltlf::{parse_ltlf, Formula};

pub const DEFAULT_SEED: u64 = 12345;

/// How a domain is declared: exactly one of `labels` or `range`, optionally
/// restricted from a previously declared `subset_of` domain (with `labels`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_of: Option<String>,
}

impl DomainSpec {
    pub fn labels(labels: &[&str]) -> Self {
        DomainSpec {
            labels: Some(labels.iter().map(|s| s.to_string()).collect()),
            range: None,
            subset_of: None,
        }
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        DomainSpec {
            labels: None,
            range: Some([lo, hi]),
            subset_of: None,
        }
    }

    pub fn subset(parent: &str, labels: &[&str]) -> Self {
        DomainSpec {
            subset_of: Some(parent.to_string()),
            ..DomainSpec::labels(labels)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthRange {
    pub min: usize,
    pub max: usize,
}

impl Default for LengthRange {
    fn default() -> Self {
        LengthRange { min: 10, max: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSizes {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes {
            train: 320,
            val: 40,
            test: 40,
        }
    }
}

fn default_ratio() -> f64 {
    0.5
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// A generation task: domains, variables, constraints (atom → body, in
/// declaration order), an LTLf formula over the atoms, and dataset shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub domains: IndexMap<String, DomainSpec>,
    pub variables: IndexMap<String, VariableDecl>,
    pub constraints: IndexMap<String, String>,
    pub formula: String,
    #[serde(default)]
    pub length: LengthRange,
    #[serde(default)]
    pub splits: SplitSizes,
    #[serde(default = "default_ratio")]
    pub positive_ratio: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// The resolved pieces of a spec.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub formula: Formula,
    pub variables: Vec<VariableSpec>,
    pub constraints: Vec<Constraint>,
}

impl TaskSpec {
    pub fn from_yaml(text: &str) -> Result<Self> {
        let spec: TaskSpec = serde_yaml::from_str(text).map_err(|e| Error::Parse {
            location: e
                .location()
                .map_or_else(|| "task spec".to_string(), |l| format!("line {}, column {}", l.line(), l.column())),
            message: e.to_string(),
        })?;
        Ok(spec)
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("task specs serialize")
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("task specs serialize");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn atoms(&self) -> Vec<String> {
        self.constraints.keys().cloned().collect()
    }

    /// Checks the invariants and parses every component.
    pub fn resolve(&self) -> Result<ResolvedSpec> {
        let bad = |m: String| Err(Error::domain(format!("task `{}`: {m}", self.name)));
        if self.length.min < 1 || self.length.min > self.length.max {
            return bad(format!("invalid length range [{}, {}]", self.length.min, self.length.max));
        }
        if !(0.0..=1.0).contains(&self.positive_ratio) {
            return bad(format!("positive ratio {} outside [0, 1]", self.positive_ratio));
        }

        let mut domains: IndexMap<String, Arc<SymbolicDomain>> = IndexMap::new();
        for (name, d) in &self.domains {
            let dom = match (&d.labels, d.range, &d.subset_of) {
                (Some(labels), None, None) => SymbolicDomain::from_labels(name, labels)?,
                (None, Some([lo, hi]), None) => SymbolicDomain::from_range(name, lo, hi)?,
                (Some(labels), None, Some(parent)) => match domains.get(parent) {
                    Some(p) => SymbolicDomain::subset_of(name, p, labels)?,
                    None => return bad(format!("domain `{name}` refers to undeclared domain `{parent}`")),
                },
                _ => return bad(format!("domain `{name}` needs `labels` or `range` (and `labels` with `subset_of`)")),
            };
            domains.insert(name.clone(), Arc::new(dom));
        }

        let mut variables = Vec::new();
        for (name, v) in &self.variables {
            if !crate::ltlf::is_identifier(name) {
                return bad(format!("`{name}` is not a valid variable name"));
            }
            let Some(d) = domains.get(&v.domain) else {
                return bad(format!("variable `{name}` uses undeclared domain `{}`", v.domain));
            };
            variables.push(VariableSpec::new(name, d.clone(), v.source.as_deref()));
        }

        let mut constraints = Vec::new();
        for (atom, body) in &self.constraints {
            if !crate::ltlf::is_identifier(atom) || crate::ltlf::RESERVED.contains(&atom.as_str()) {
                return bad(format!("`{atom}` cannot be used as an atom name"));
            }
            let c = Constraint::parse(atom, body)?;
            for v in c.variables() {
                if !self.variables.contains_key(&v) {
                    return bad(format!("constraint `{atom}` uses undeclared variable `{v}`"));
                }
            }
            constraints.push(c);
        }

        let formula = parse_ltlf(&self.formula)?;
        for a in formula.atoms() {
            if !self.constraints.contains_key(&a) {
                return bad(format!("formula atom `{a}` has no constraint"));
            }
        }
        Ok(ResolvedSpec {
            formula,
            variables,
            constraints,
        })
    }
}

// ---- built-in tasks ----

pub const BUILTIN_TASKS: [&str; 7] = ["task1", "task2", "task3", "task4", "task5", "task6", "example"];

const FMNIST: [&str; 10] = [
    "top", "trouser", "pullover", "dress", "coat", "sandal", "shirt", "sneaker", "bag", "boot",
];

/// Lexicographic values 5..=9 of the clothing domain.
const FMNIST_5_9: [&str; 5] = ["sandal", "shirt", "sneaker", "top", "trouser"];

fn var(domain: &str, source: &str) -> VariableDecl {
    VariableDecl {
        domain: domain.into(),
        source: Some(source.into()),
    }
}

fn task(
    name: &str,
    formula: &str,
    domains: Vec<(&str, DomainSpec)>,
    vars: Vec<(&str, VariableDecl)>,
    constraints: Vec<(&str, &str)>,
) -> TaskSpec {
    TaskSpec {
        name: name.into(),
        domains: domains.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        variables: vars.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        constraints: constraints
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        formula: formula.into(),
        length: LengthRange::default(),
        splits: SplitSizes::default(),
        positive_ratio: default_ratio(),
        seed: DEFAULT_SEED,
    }
}

fn clothing_task(name: &str, formula: &str) -> TaskSpec {
    task(
        name,
        formula,
        vec![
            ("fmnist", DomainSpec::labels(&FMNIST)),
            ("fmnist_5_9", DomainSpec::subset("fmnist", &FMNIST_5_9)),
        ],
        vec![
            ("V", var("fmnist_5_9", "fmnist")),
            ("W", var("fmnist_5_9", "fmnist")),
            ("X", var("fmnist_5_9", "fmnist")),
            ("Y", var("fmnist", "fmnist")),
            ("Z", var("fmnist", "fmnist")),
        ],
        vec![("p", "Y < Z"), ("q", "all_equal([V, W, X])")],
    )
}

fn digits_task(name: &str, formula: &str, vars: &[&str], constraints: Vec<(&str, &str)>) -> TaskSpec {
    task(
        name,
        formula,
        vec![("mnist", DomainSpec::range(0, 9))],
        vars.iter().map(|v| (*v, var("mnist", "mnist"))).collect(),
        constraints,
    )
}

/// The built-in task specs by name (`task1`..`task6`, `example`).
pub fn builtin_task(name: &str) -> Option<TaskSpec> {
    let t34 = vec![("p", "all_different([X, Y, Z])"), ("q", "X < Y + Z")];
    Some(match name {
        "task1" => clothing_task(name, "G (p <-> X X q)"),
        "task2" => clothing_task(name, "G ((p & X p & X X p) -> X X X q)"),
        "task3" => digits_task(name, "F p & (q U X p)", &["X", "Y", "Z"], t34),
        "task4" => task(
            name,
            "F p & (q U X p)",
            vec![("mnist", DomainSpec::range(0, 9)), ("fmnist", DomainSpec::labels(&FMNIST))],
            vec![
                ("X", var("mnist", "mnist")),
                ("Y", var("fmnist", "fmnist")),
                ("Z", var("fmnist", "fmnist")),
            ],
            t34,
        ),
        "task5" => digits_task(name, "G (p <-> WX !p)", &["W", "X", "Y", "Z"], vec![("p", "W + X = Y + Z")]),
        "task6" => digits_task(
            name,
            "G (p <-> X q)",
            &["X", "Y", "Z"],
            vec![("p", "X + Y = Z"), ("q", "X + Y = 2*Z")],
        ),
        "example" => task(
            name,
            "p & G (p <-> X q)",
            vec![("mnist", DomainSpec::range(0, 9)), ("svhn_2_8", DomainSpec::range(2, 8))],
            vec![
                ("A", var("mnist", "mnist")),
                ("B", var("mnist", "mnist")),
                ("C", var("svhn_2_8", "svhn")),
            ],
            vec![("p", "A + B = C"), ("q", "all_different(A, B, C)")],
        ),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        for name in BUILTIN_TASKS {
            let spec = builtin_task(name).unwrap();
            let r = spec.resolve().unwrap();
            assert_eq!(r.constraints.len(), spec.constraints.len());
        }
        assert!(builtin_task("task7").is_none());
    }

    #[test]
    fn clothing_subdomain_values() {
        let r = builtin_task("task1").unwrap().resolve().unwrap();
        let v = r.variables.iter().find(|v| v.name == "V").unwrap();
        assert_eq!(v.domain.values(), &[5, 6, 7, 8, 9]);
        let y = r.variables.iter().find(|v| v.name == "Y").unwrap();
        assert_eq!(y.domain.value_of("bag"), Some(0));
        assert_eq!(y.domain.value_of("boot"), Some(1));
    }

    #[test]
    fn yaml_round_trip_and_hash() {
        let spec = builtin_task("task4").unwrap();
        let back = TaskSpec::from_yaml(&spec.to_yaml()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.hash(), spec.hash());
        let mut other = spec.clone();
        other.seed += 1;
        assert_ne!(other.hash(), spec.hash());
    }

    #[test]
    fn yaml_defaults() {
        let text = "name: t\ndomains:\n  d: {range: [0, 3]}\nvariables:\n  X: {domain: d}\n  Y: {domain: d}\nconstraints:\n  p: \"X < Y\"\nformula: \"F p\"\n";
        let spec = TaskSpec::from_yaml(text).unwrap();
        assert_eq!(spec.length, LengthRange { min: 10, max: 20 });
        assert_eq!(spec.splits.train, 320);
        assert_eq!(spec.positive_ratio, 0.5);
        assert_eq!(spec.seed, 12345);
        spec.resolve().unwrap();
    }

    #[test]
    fn malformed_yaml_has_location() {
        match TaskSpec::from_yaml("name: [unclosed\n") {
            Err(Error::Parse { location, .. }) => assert!(location.contains("line")),
            other => panic!("{other:?}"),
        }
        assert!(TaskSpec::from_yaml("name: x\nbogus: 1\n").is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut s = builtin_task("task3").unwrap();
        s.formula = "F r".into();
        assert!(s.resolve().is_err());
        let mut s = builtin_task("task3").unwrap();
        s.length = LengthRange { min: 0, max: 3 };
        assert!(s.resolve().is_err());
        let mut s = builtin_task("task3").unwrap();
        s.positive_ratio = 1.5;
        assert!(s.resolve().is_err());
        let mut s = builtin_task("task3").unwrap();
        s.constraints.insert("r".into(), "Q < 1".into());
        assert!(s.resolve().is_err());
    }
}
