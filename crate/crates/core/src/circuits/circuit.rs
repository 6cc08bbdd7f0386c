use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::prop::{PropFormula, Var};
use super::semiring::{LiteralWeights, Semiring};
use crate::error::{Error, Result};

pub const DEFAULT_VAR_CAP: usize = 30;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Lit(Var, bool),
    And(Vec<NodeId>),
    /// Disjunction; `decision` is the variable its children disagree on.
    Or(Vec<NodeId>, Option<Var>),
}

/// A DNNF circuit. Nodes are stored children-first, so index order is a
/// topological order and the root comes last among its descendants.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    nodes: Vec<Node>,
    scopes: Vec<Vec<Var>>,
    root: NodeId,
}

impl Circuit {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Sorted variable scope of node `n`.
    pub fn scope(&self, n: NodeId) -> &[Var] {
        &self.scopes[n]
    }

    pub fn vars(&self) -> &[Var] {
        &self.scopes[self.root]
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::And(cs) | Node::Or(cs, _) => cs.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn is_decomposable(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::And(cs) => {
                let total: usize = cs.iter().map(|&c| self.scopes[c].len()).sum();
                let union: BTreeSet<Var> = cs.iter().flat_map(|&c| self.scopes[c].iter().copied()).collect();
                total == union.len()
            }
            _ => true,
        })
    }

    /// Structural determinism: every Or child fixes its decision variable to a
    /// distinct polarity.
    pub fn is_deterministic(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Or(cs, Some(v)) => {
                let pols: Vec<Option<bool>> = cs.iter().map(|&c| self.fixed_polarity(c, *v)).collect();
                pols.iter().all(Option::is_some) && {
                    let set: BTreeSet<bool> = pols.iter().flatten().copied().collect();
                    set.len() == pols.len()
                }
            }
            Node::Or(cs, None) => cs.len() <= 1,
            _ => true,
        })
    }

    fn fixed_polarity(&self, n: NodeId, v: Var) -> Option<bool> {
        match &self.nodes[n] {
            Node::Lit(u, pos) if *u == v => Some(*pos),
            Node::And(cs) => cs.iter().find_map(|&c| self.fixed_polarity(c, v)),
            _ => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Or(cs, _) => cs.windows(2).all(|w| self.scopes[w[0]] == self.scopes[w[1]]),
            _ => true,
        })
    }

    /// Boolean value of node `n` under a total assignment.
    pub fn eval_node(&self, n: NodeId, value: &dyn Fn(Var) -> bool) -> bool {
        match &self.nodes[n] {
            Node::True => true,
            Node::False => false,
            Node::Lit(v, pos) => value(*v) == *pos,
            Node::And(cs) => cs.iter().all(|&c| self.eval_node(c, value)),
            Node::Or(cs, _) => cs.iter().any(|&c| self.eval_node(c, value)),
        }
    }

    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        self.eval_node(self.root, value)
    }

    /// Line-oriented NNF dump (c2d style): header `nnf <nodes> <edges> <vars>`,
    /// then `L <±(v+1)>`, `A <n> <ids>` or `O <decision+1 or 0> <n> <ids>`.
    pub fn to_nnf_text(&self) -> String {
        let max_var = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Lit(v, _) => Some(*v + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut out = format!("nnf {} {} {}\n", self.nodes.len(), self.num_edges(), max_var);
        let ids = |cs: &[NodeId]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        for n in &self.nodes {
            let _ = match n {
                Node::True => writeln!(out, "A 0"),
                Node::False => writeln!(out, "O 0 0"),
                Node::Lit(v, pos) => writeln!(out, "L {}{}", if *pos { "" } else { "-" }, v + 1),
                Node::And(cs) => writeln!(out, "A {} {}", cs.len(), ids(cs)),
                Node::Or(cs, d) => writeln!(out, "O {} {} {}", d.map_or(0, |v| v + 1), cs.len(), ids(cs)),
            };
        }
        out
    }
}

/// Hash-consing node builder.
#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    scopes: Vec<Vec<Var>>,
    index: HashMap<Node, NodeId>,
}

impl Builder {
    fn add(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let scope: Vec<Var> = match &node {
            Node::True | Node::False => vec![],
            Node::Lit(v, _) => vec![*v],
            Node::And(cs) | Node::Or(cs, _) => {
                let set: BTreeSet<Var> = cs.iter().flat_map(|&c| self.scopes[c].iter().copied()).collect();
                set.into_iter().collect()
            }
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.scopes.push(scope);
        self.index.insert(node, id);
        id
    }

    fn and(&mut self, children: Vec<NodeId>) -> NodeId {
        let mut flat = Vec::new();
        for c in children {
            match &self.nodes[c] {
                Node::True => {}
                Node::False => return self.add(Node::False),
                Node::And(cs) => flat.extend(cs.iter().copied()),
                _ => flat.push(c),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => self.add(Node::True),
            1 => flat[0],
            _ => self.add(Node::And(flat)),
        }
    }

    fn tautology(&mut self, v: Var) -> NodeId {
        let pos = self.add(Node::Lit(v, true));
        let neg = self.add(Node::Lit(v, false));
        self.add(Node::Or(vec![pos, neg], Some(v)))
    }

    fn finish(self, root: NodeId) -> Circuit {
        Circuit {
            nodes: self.nodes,
            scopes: self.scopes,
            root,
        }
    }
}

/// Compiles `f` into a decomposable, deterministic circuit by top-down
/// Shannon expansion along `order`, with disjoint-component splitting and a
/// cache keyed by the normalized sub-formula. Variables absent from `order`
/// are branched on last, in ascending order.
pub fn compile_sddnnf(f: &PropFormula, order: &[Var]) -> Result<Circuit> {
    compile_sddnnf_with_cap(f, order, DEFAULT_VAR_CAP)
}

pub fn compile_sddnnf_with_cap(f: &PropFormula, order: &[Var], cap: usize) -> Result<Circuit> {
    let vars = f.vars();
    if vars.len() > cap {
        return Err(Error::Resource(format!(
            "formula has {} variables, compilation cap is {cap}",
            vars.len()
        )));
    }
    let mut rank: HashMap<Var, usize> = HashMap::new();
    for &v in order {
        let next = rank.len();
        rank.entry(v).or_insert(next);
    }
    for &v in &vars {
        let next = rank.len();
        rank.entry(v).or_insert(next);
    }
    let mut c = Compiler {
        b: Builder::default(),
        cache: HashMap::new(),
        rank,
    };
    let root = c.compile(f.normalized());
    Ok(c.b.finish(root))
}

struct Compiler {
    b: Builder,
    cache: HashMap<PropFormula, NodeId>,
    rank: HashMap<Var, usize>,
}

impl Compiler {
    fn compile(&mut self, f: PropFormula) -> NodeId {
        if let Some(&id) = self.cache.get(&f) {
            return id;
        }
        let id = self.compile_uncached(&f);
        self.cache.insert(f, id);
        id
    }

    fn compile_uncached(&mut self, f: &PropFormula) -> NodeId {
        match f {
            PropFormula::True => return self.b.add(Node::True),
            PropFormula::False => return self.b.add(Node::False),
            _ => {}
        }
        if let Some((v, pos)) = f.as_literal() {
            return self.b.add(Node::Lit(v, pos));
        }
        if let PropFormula::And(cs) = f {
            let comps = components(cs);
            if comps.len() > 1 {
                let children: Vec<NodeId> = comps
                    .into_iter()
                    .map(|group| self.compile(super::prop::fold_junction(group.into_iter(), true)))
                    .collect();
                return self.b.and(children);
            }
        }
        let v = *f
            .vars()
            .iter()
            .min_by_key(|v| self.rank[v])
            .expect("non-constant formula has a variable");
        let mut branches = Vec::new();
        for pos in [true, false] {
            let sub = self.compile(f.condition(v, pos).normalized());
            if self.b.nodes[sub] == Node::False {
                continue;
            }
            let lit = self.b.add(Node::Lit(v, pos));
            branches.push(self.b.and(vec![lit, sub]));
        }
        match branches.len() {
            0 => self.b.add(Node::False),
            1 => branches[0],
            _ => self.b.add(Node::Or(branches, Some(v))),
        }
    }
}

/// Groups conjuncts into variable-disjoint components, in first-seen order.
fn components(conjuncts: &[PropFormula]) -> Vec<Vec<PropFormula>> {
    let var_sets: Vec<BTreeSet<Var>> = conjuncts.iter().map(|c| c.vars()).collect();
    let n = conjuncts.len();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && !var_sets[i].is_disjoint(&var_sets[j]) {
                    comp[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    let mut groups = vec![Vec::new(); count];
    for (i, c) in conjuncts.iter().enumerate() {
        groups[comp[i]].push(c.clone());
    }
    groups
}

/// Gap-fills every Or child (and the root, against `vars`) with `v | !v`
/// so that all Or children share a scope. Models over the scope union are
/// unchanged.
pub fn smooth(c: &Circuit, vars: &[Var]) -> Circuit {
    let mut b = Builder::default();
    let mut map: Vec<NodeId> = Vec::with_capacity(c.nodes.len());
    for node in &c.nodes {
        let id = match node {
            Node::True => b.add(Node::True),
            Node::False => b.add(Node::False),
            Node::Lit(v, p) => b.add(Node::Lit(*v, *p)),
            Node::And(cs) => {
                let kids = cs.iter().map(|&k| map[k]).collect();
                b.add(Node::And(kids))
            }
            Node::Or(cs, d) => {
                let kids: Vec<NodeId> = cs.iter().map(|&k| map[k]).collect();
                let union: BTreeSet<Var> = kids.iter().flat_map(|&k| b.scopes[k].clone()).collect();
                let filled = kids
                    .into_iter()
                    .map(|k| fill(&mut b, k, &union))
                    .collect();
                b.add(Node::Or(filled, *d))
            }
        };
        map.push(id);
    }
    let root = map[c.root];
    let target: BTreeSet<Var> = vars.iter().copied().chain(b.scopes[root].iter().copied()).collect();
    let root = fill(&mut b, root, &target);
    b.finish(root)
}

fn fill(b: &mut Builder, n: NodeId, target: &BTreeSet<Var>) -> NodeId {
    let missing: Vec<Var> = target
        .iter()
        .copied()
        .filter(|v| b.scopes[n].binary_search(v).is_err())
        .collect();
    if missing.is_empty() {
        return n;
    }
    let mut kids = vec![n];
    for v in missing {
        kids.push(b.tautology(v));
    }
    if b.nodes[n] == Node::True {
        kids.remove(0);
    }
    if kids.len() == 1 {
        kids[0]
    } else {
        b.add(Node::And(kids))
    }
}

/// Algebraic model count: one bottom-up pass with literals mapped to their
/// weights, And to `times` and Or to `plus`.
pub fn amc<S: Semiring>(c: &Circuit, weights: &LiteralWeights<S::Value>, s: &S) -> Result<S::Value> {
    let mut val: Vec<S::Value> = Vec::with_capacity(c.nodes.len());
    for node in &c.nodes {
        let v = match node {
            Node::True => s.one(),
            Node::False => s.zero(),
            Node::Lit(v, pos) => weights.get(*v, *pos)?,
            Node::And(cs) => cs.iter().fold(s.one(), |acc, &k| s.times(acc, val[k])),
            Node::Or(cs, _) => cs.iter().fold(s.zero(), |acc, &k| s.plus(acc, val[k])),
        };
        val.push(v);
    }
    Ok(val[c.root])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::semiring::{LogProbability, Probability};
    use crate::circuits::wmc::brute_force_wmc;

    fn v(i: u32) -> PropFormula {
        PropFormula::var(i)
    }

    fn half(vars: &[Var]) -> LiteralWeights<f64> {
        let mut w = LiteralWeights::new();
        for &x in vars {
            w.set(x, 0.5, 0.5);
        }
        w
    }

    #[test]
    fn conjunction_is_two_literal_and() {
        let c = compile_sddnnf(&PropFormula::and(vec![v(0), v(1)]), &[0, 1]).unwrap();
        assert_eq!(c.nodes()[c.root()], Node::And(vec![0, 1]));
        assert_eq!(c.size(), 3);
        let p = amc(&c, &half(&[0, 1]), &Probability).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        let lw = LiteralWeights::from_probabilities(&LogProbability, &[(0, 0.5), (1, 0.5)]);
        let lp = amc(&c, &lw, &LogProbability).unwrap();
        assert!((lp - 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn false_compiles_to_false_leaf() {
        let c = compile_sddnnf(&PropFormula::False, &[]).unwrap();
        assert_eq!(c.nodes()[c.root()], Node::False);
        assert_eq!(amc(&c, &half(&[]), &Probability).unwrap(), 0.0);
    }

    #[test]
    fn shannon_branches_are_deterministic() {
        // x0 | x1 over probabilities 0.5 -> 0.75
        let f = PropFormula::or(vec![v(0), v(1)]);
        let c = smooth(&compile_sddnnf(&f, &[0, 1]).unwrap(), &[0, 1]);
        assert!(c.is_decomposable() && c.is_deterministic() && c.is_smooth());
        assert!((amc(&c, &half(&[0, 1]), &Probability).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn smoothing_a_literal_over_two_vars() {
        let c = compile_sddnnf(&v(0), &[0, 1]).unwrap();
        let s = smooth(&c, &[0, 1]);
        assert_eq!(s.vars(), &[0, 1]);
        let mut w = LiteralWeights::new();
        w.set(0, 0.3, 0.7).set(1, 0.5, 0.5);
        assert!((amc(&s, &w, &Probability).unwrap() - 0.3).abs() < 1e-15);
        // With unit weights the smoothed circuit counts models over both vars.
        let mut ones = LiteralWeights::new();
        ones.set(0, 1.0, 1.0).set(1, 1.0, 1.0);
        assert_eq!(amc(&s, &ones, &Probability).unwrap(), 2.0);
    }

    #[test]
    fn smoothing_smooth_circuit_keeps_structure() {
        let f = PropFormula::or(vec![
            PropFormula::and(vec![v(0), v(1)]),
            PropFormula::and(vec![PropFormula::not(v(0)), PropFormula::not(v(1))]),
        ]);
        let c = compile_sddnnf(&f, &[0, 1]).unwrap();
        assert!(c.is_smooth());
        let s = smooth(&c, &[0, 1]);
        assert_eq!(s.nodes(), c.nodes());
    }

    #[test]
    fn missing_weight_is_domain_error() {
        let c = compile_sddnnf(&v(4), &[]).unwrap();
        assert!(matches!(
            amc(&c, &LiteralWeights::new(), &Probability),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn var_cap() {
        let f = PropFormula::and((0..31).map(v).collect());
        assert!(matches!(compile_sddnnf(&f, &[]), Err(Error::Resource(_))));
        assert!(compile_sddnnf_with_cap(&f, &[], 31).is_ok());
    }

    #[test]
    fn components_split_conjunctions() {
        let f = PropFormula::and(vec![
            PropFormula::or(vec![v(0), v(1)]),
            PropFormula::or(vec![v(2), v(3)]),
        ]);
        let c = compile_sddnnf(&f, &[0, 1, 2, 3]).unwrap();
        assert!(matches!(&c.nodes()[c.root()], Node::And(cs) if cs.len() == 2));
        let w = half(&[0, 1, 2, 3]);
        let s = smooth(&c, &[0, 1, 2, 3]);
        let got = amc(&s, &w, &Probability).unwrap();
        let want = brute_force_wmc(&f, &w, &Probability).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn nnf_dump_format() {
        let c = compile_sddnnf(&PropFormula::or(vec![v(0), v(1)]), &[0, 1]).unwrap();
        let text = c.to_nnf_text();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            format!("nnf {} {} 2", c.size(), c.num_edges())
        );
        assert!(text.contains("L 1\n") && text.contains("L -1\n"));
        assert!(text.lines().last().unwrap().starts_with("O 1 2 "));
    }
}
