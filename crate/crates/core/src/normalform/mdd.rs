//! Reduced, hash-consed multi-valued decision diagrams over bounded counters.
//!
//! Every variable ranges over `0..=top`, where `top` stands for "at least `top`".
//! Leaves carry small naturals; boolean diagrams use leaves 0 and 1.

use std::collections::HashMap;

pub(crate) type NodeId = u32;

/// `(variable, admissible values)` pairs along one path.
pub(crate) type PathConstraint = Vec<(u32, Vec<u32>)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct OutOfBudget;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Leaf(u32),
    Branch(u32, Box<[NodeId]>),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Op {
    And,
    Or,
    Iff,
    /// Sum, capped.
    Add(u32),
    /// Product, capped.
    Mul(u32),
}

impl Op {
    fn leaf(self, x: u32, y: u32) -> u32 {
        match self {
            Op::And => (x != 0 && y != 0) as u32,
            Op::Or => (x != 0 || y != 0) as u32,
            Op::Iff => ((x != 0) == (y != 0)) as u32,
            Op::Add(cap) => x.saturating_add(y).min(cap),
            Op::Mul(cap) => x.saturating_mul(y).min(cap),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Unary {
    Not,
    AtLeast(u32),
    Exactly(u32),
}

impl Unary {
    fn leaf(self, x: u32) -> u32 {
        match self {
            Unary::Not => (x == 0) as u32,
            Unary::AtLeast(m) => (x >= m) as u32,
            Unary::Exactly(m) => (x == m) as u32,
        }
    }
}

pub(crate) struct Mdd {
    top: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, NodeId>,
    binary_cache: HashMap<(Op, NodeId, NodeId), NodeId>,
    unary_cache: HashMap<(Unary, NodeId), NodeId>,
    budget: usize,
}

impl Mdd {
    pub fn new(top: u32, budget: usize) -> Mdd {
        Mdd {
            top,
            nodes: Vec::new(),
            unique: HashMap::new(),
            binary_cache: HashMap::new(),
            unary_cache: HashMap::new(),
            budget,
        }
    }

    fn intern(&mut self, node: Node) -> Result<NodeId, OutOfBudget> {
        if let Some(&id) = self.unique.get(&node) {
            return Ok(id);
        }
        if self.nodes.len() >= self.budget {
            return Err(OutOfBudget);
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        Ok(id)
    }

    pub fn leaf(&mut self, v: u32) -> Result<NodeId, OutOfBudget> {
        self.intern(Node::Leaf(v))
    }

    pub fn boolean(&mut self, b: bool) -> Result<NodeId, OutOfBudget> {
        self.leaf(b as u32)
    }

    fn branch(&mut self, var: u32, kids: Vec<NodeId>) -> Result<NodeId, OutOfBudget> {
        if kids.iter().all(|&k| k == kids[0]) {
            return Ok(kids[0]);
        }
        self.intern(Node::Branch(var, kids.into_boxed_slice()))
    }

    pub fn leaf_value(&self, n: NodeId) -> Option<u32> {
        match self.nodes[n as usize] {
            Node::Leaf(v) => Some(v),
            Node::Branch(..) => None,
        }
    }

    fn var(&self, n: NodeId) -> u32 {
        match self.nodes[n as usize] {
            Node::Leaf(_) => u32::MAX,
            Node::Branch(v, _) => v,
        }
    }

    fn cofactor(&self, n: NodeId, var: u32, value: usize) -> NodeId {
        match &self.nodes[n as usize] {
            Node::Branch(v, kids) if *v == var => kids[value],
            _ => n,
        }
    }

    /// Diagram of `f(value of var)`.
    pub fn on_var(&mut self, var: u32, f: impl Fn(u32) -> u32) -> Result<NodeId, OutOfBudget> {
        let kids = (0..=self.top)
            .map(|v| self.leaf(f(v)))
            .collect::<Result<Vec<_>, _>>()?;
        self.branch(var, kids)
    }

    pub fn binary(&mut self, op: Op, a: NodeId, b: NodeId) -> Result<NodeId, OutOfBudget> {
        match (op, self.leaf_value(a), self.leaf_value(b)) {
            (_, Some(x), Some(y)) => return self.leaf(op.leaf(x, y)),
            (Op::And, Some(0), _) | (Op::And, _, Some(0)) => return self.leaf(0),
            (Op::Or, Some(x), _) | (Op::Or, _, Some(x)) if x != 0 => return self.leaf(1),
            (Op::Add(_), Some(0), _) => return Ok(b),
            (Op::Add(_), _, Some(0)) => return Ok(a),
            (Op::Mul(_), Some(0), _) | (Op::Mul(_), _, Some(0)) => return self.leaf(0),
            _ => {}
        }
        let key = (op, a, b);
        if let Some(&r) = self.binary_cache.get(&key) {
            return Ok(r);
        }
        let var = self.var(a).min(self.var(b));
        let mut kids = Vec::with_capacity(self.top as usize + 1);
        for v in 0..=self.top as usize {
            let (x, y) = (self.cofactor(a, var, v), self.cofactor(b, var, v));
            kids.push(self.binary(op, x, y)?);
        }
        let r = self.branch(var, kids)?;
        self.binary_cache.insert(key, r);
        Ok(r)
    }

    pub fn unary(&mut self, op: Unary, a: NodeId) -> Result<NodeId, OutOfBudget> {
        if let Some(x) = self.leaf_value(a) {
            return self.leaf(op.leaf(x));
        }
        if let Some(&r) = self.unary_cache.get(&(op, a)) {
            return Ok(r);
        }
        let var = self.var(a);
        let mut kids = Vec::with_capacity(self.top as usize + 1);
        for v in 0..=self.top as usize {
            let x = self.cofactor(a, var, v);
            kids.push(self.unary(op, x)?);
        }
        let r = self.branch(var, kids)?;
        self.unary_cache.insert((op, a), r);
        Ok(r)
    }

    /// Value of the diagram under a full assignment.
    #[cfg(test)]
    pub fn evaluate(&self, mut n: NodeId, values: &[u32]) -> u32 {
        loop {
            match &self.nodes[n as usize] {
                Node::Leaf(v) => return *v,
                Node::Branch(var, kids) => n = kids[values[*var as usize].min(self.top) as usize],
            }
        }
    }

    /// All paths from `root` to a non-zero leaf; variables skipped by a path
    /// are free.
    pub fn true_paths(&self, root: NodeId, limit: usize) -> Result<Vec<PathConstraint>, OutOfBudget> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(root, &mut path, &mut out, limit)?;
        Ok(out)
    }

    fn walk(
        &self,
        n: NodeId,
        path: &mut Vec<(u32, Vec<u32>)>,
        out: &mut Vec<Vec<(u32, Vec<u32>)>>,
        limit: usize,
    ) -> Result<(), OutOfBudget> {
        match &self.nodes[n as usize] {
            Node::Leaf(0) => Ok(()),
            Node::Leaf(_) => {
                if out.len() >= limit {
                    return Err(OutOfBudget);
                }
                out.push(path.clone());
                Ok(())
            }
            Node::Branch(var, kids) => {
                let mut groups: Vec<(NodeId, Vec<u32>)> = Vec::new();
                for (v, &k) in kids.iter().enumerate() {
                    match groups.iter_mut().find(|(id, _)| *id == k) {
                        Some((_, vals)) => vals.push(v as u32),
                        None => groups.push((k, vec![v as u32])),
                    }
                }
                for (k, vals) in groups {
                    path.push((*var, vals));
                    self.walk(k, path, out, limit)?;
                    path.pop();
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_shared() {
        let mut m = Mdd::new(2, 1000);
        let a = m.on_var(0, |v| (v >= 1) as u32).unwrap();
        let b = m.on_var(0, |v| (v >= 1) as u32).unwrap();
        assert_eq!(a, b);
        let t = m.on_var(1, |_| 1).unwrap();
        assert_eq!(m.leaf_value(t), Some(1));
    }

    #[test]
    fn arithmetic_and_comparison() {
        let mut m = Mdd::new(3, 1000);
        let x = m.on_var(0, |v| v).unwrap();
        let y = m.on_var(1, |v| v).unwrap();
        let sum = m.binary(Op::Add(4), x, y).unwrap();
        let ge = m.unary(Unary::AtLeast(4), sum).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(m.evaluate(ge, &[x, y]), (x + y >= 4) as u32);
            }
        }
        let paths = m.true_paths(ge, 100).unwrap();
        assert!(paths.iter().all(|p| p.iter().all(|(_, vals)| !vals.contains(&0))));
    }

    #[test]
    fn budget_is_enforced() {
        let mut m = Mdd::new(3, 3);
        assert_eq!(m.on_var(0, |v| v), Err(OutOfBudget));
    }
}
