//! Satisfiability of conjunctions of order atoms over the rationals.
//!
//! Equalities are merged with a union-find; `<` and `<=` become edges between
//! classes; constants are chained into a strictly increasing spine. The store is
//! consistent iff no strongly connected component contains a strict edge and no
//! `!=` atom joins two nodes of one component. Every consistent store extends to
//! a strict linear order of its components, which is how witnesses are built.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::atom::{Op, OrderAtom, Term};
use crate::domain::Rational;

#[derive(Debug, Clone, Default)]
pub struct ConjunctiveStore {
    n_vars: usize,
    atoms: Vec<OrderAtom>,
}

#[derive(Debug, Clone)]
struct Closure {
    /// Component id per node (variables first, then constants in ascending order).
    comp: Vec<usize>,
    n_comp: usize,
    /// Component-level edges `(from, to)`.
    edges: Vec<(usize, usize)>,
    consts: Vec<Rational>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl ConjunctiveStore {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            atoms: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn add(&mut self, atom: OrderAtom) {
        if let Some(v) = atom.max_var() {
            self.n_vars = self.n_vars.max(v + 1);
        }
        self.atoms.push(atom);
    }

    pub fn extend(&mut self, atoms: impl IntoIterator<Item = OrderAtom>) {
        for a in atoms {
            self.add(a);
        }
    }

    pub fn atoms(&self) -> &[OrderAtom] {
        &self.atoms
    }

    /// Number of atoms; `truncate` to this length undoes later additions.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.atoms.truncate(len);
    }

    fn closure(&self) -> Option<Closure> {
        let mut consts: Vec<Rational> = self
            .atoms
            .iter()
            .flat_map(|a| [a.lhs, a.rhs])
            .filter_map(|t| match t {
                Term::Const(c) => Some(c),
                Term::Var(_) => None,
            })
            .collect();
        consts.sort();
        consts.dedup();
        let n = self.n_vars + consts.len();
        let node = |t: Term| match t {
            Term::Var(v) => v,
            Term::Const(c) => self.n_vars + consts.binary_search(&c).unwrap(),
        };

        let mut parent: Vec<usize> = (0..n).collect();
        for a in &self.atoms {
            if a.op == Op::Eq {
                let (x, y) = (find(&mut parent, node(a.lhs)), find(&mut parent, node(a.rhs)));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();

        let mut graph = DiGraph::<(), bool>::with_capacity(n, self.atoms.len());
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        let mut strict = Vec::new();
        let mut add_edge = |g: &mut DiGraph<(), bool>, a: usize, b: usize, s: bool| {
            g.add_edge(nodes[roots[a]], nodes[roots[b]], s);
            if s {
                strict.push((roots[a], roots[b]));
            }
        };
        for a in &self.atoms {
            match a.op {
                Op::Lt => add_edge(&mut graph, node(a.lhs), node(a.rhs), true),
                Op::Le => add_edge(&mut graph, node(a.lhs), node(a.rhs), false),
                Op::Eq | Op::Ne => {}
            }
        }
        for i in 1..consts.len() {
            add_edge(&mut graph, self.n_vars + i - 1, self.n_vars + i, true);
        }

        let sccs = tarjan_scc(&graph);
        let mut scc_of = vec![0; n];
        for (i, comp) in sccs.iter().enumerate() {
            for ix in comp {
                scc_of[ix.index()] = i;
            }
        }
        let comp: Vec<usize> = (0..n).map(|i| scc_of[roots[i]]).collect();
        if strict.iter().any(|&(a, b)| scc_of[a] == scc_of[b]) {
            return None;
        }
        for a in &self.atoms {
            if a.op == Op::Ne && comp[node(a.lhs)] == comp[node(a.rhs)] {
                return None;
            }
        }
        let edges = graph
            .edge_indices()
            .filter_map(|e| {
                let (s, t) = graph.edge_endpoints(e).unwrap();
                let (s, t) = (scc_of[s.index()], scc_of[t.index()]);
                (s != t).then_some((s, t))
            })
            .collect();
        Some(Closure {
            comp,
            n_comp: sccs.len(),
            edges,
            consts,
        })
    }

    pub fn is_consistent(&self) -> bool {
        self.closure().is_some()
    }

    /// Whether `a = b` is entailed (both land in one forced-equal class).
    /// Returns `None` when the store is inconsistent.
    pub fn equality_classes(&self) -> Option<Vec<usize>> {
        self.closure().map(|c| c.comp[..self.n_vars].to_vec())
    }

    /// A satisfying assignment: forced-equal classes share a value, all other
    /// classes get distinct values, increasing along a topological order.
    /// Integers are used whenever no constants interfere.
    pub fn witness(&self) -> Option<Vec<Rational>> {
        let c = self.closure()?;
        let mut indeg = vec![0usize; c.n_comp];
        let mut succ = vec![Vec::new(); c.n_comp];
        for &(s, t) in &c.edges {
            succ[s].push(t);
            indeg[t] += 1;
        }
        // smallest member node per component, for deterministic tie-breaking
        let mut key = vec![usize::MAX; c.n_comp];
        for (node, &comp) in c.comp.iter().enumerate() {
            key[comp] = key[comp].min(node);
        }
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..c.n_comp)
            .filter(|&i| indeg[i] == 0)
            .map(|i| Reverse((key[i], i)))
            .collect();
        let mut order = Vec::with_capacity(c.n_comp);
        while let Some(Reverse((_, i))) = heap.pop() {
            order.push(i);
            for &t in &succ[i] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    heap.push(Reverse((key[t], t)));
                }
            }
        }

        let mut fixed: BTreeMap<usize, Rational> = BTreeMap::new();
        for (k, &q) in c.consts.iter().enumerate() {
            fixed.insert(c.comp[self.n_vars + k], q);
        }
        let pos_value = place_values(&order, &fixed);
        let mut value_of_comp = vec![Rational::zero(); c.n_comp];
        for (pos, &comp) in order.iter().enumerate() {
            value_of_comp[comp] = pos_value[pos];
        }
        Some((0..self.n_vars).map(|v| value_of_comp[c.comp[v]]).collect())
    }
}

fn place_values(order: &[usize], fixed: &BTreeMap<usize, Rational>) -> Vec<Rational> {
    let anchors: Vec<(usize, Rational)> = order
        .iter()
        .enumerate()
        .filter_map(|(pos, comp)| fixed.get(comp).map(|q| (pos, *q)))
        .collect();
    let int = |i: usize| Rational::from_integer(i as i64);
    (0..order.len())
        .map(|pos| {
            if anchors.is_empty() {
                return int(pos);
            }
            let before = anchors.iter().rev().find(|(p, _)| *p <= pos);
            let after = anchors.iter().find(|(p, _)| *p >= pos);
            match (before, after) {
                (Some(&(p, q)), _) if p == pos => q,
                (Some(&(p0, q0)), Some(&(p1, q1))) => {
                    q0 + (q1 - q0) * int(pos - p0) / int(p1 - p0)
                }
                (None, Some(&(p1, q1))) => q1 - int(p1 - pos),
                (Some(&(p0, q0)), None) => q0 + int(pos - p0),
                (None, None) => unreachable!(),
            }
        })
        .collect()
}

/// Whether some rational assignment satisfies every atom. Variables pinned in
/// `fixed` are treated as the given constants.
pub fn conjunction_satisfiable(atoms: &[OrderAtom], fixed: &BTreeMap<usize, Rational>) -> bool {
    let pin = |t: Term| match t {
        Term::Var(v) => fixed.get(&v).map_or(t, |q| Term::Const(*q)),
        c => c,
    };
    let mut store = ConjunctiveStore::new(0);
    store.extend(
        atoms
            .iter()
            .map(|a| OrderAtom::new(pin(a.lhs), a.op, pin(a.rhs))),
    );
    store.is_consistent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rat;

    fn sat(atoms: &[OrderAtom]) -> bool {
        conjunction_satisfiable(atoms, &BTreeMap::new())
    }

    #[test]
    fn worked_examples() {
        assert!(!sat(&[OrderAtom::lt(0, 1), OrderAtom::lt(1, 2), OrderAtom::lt(2, 0)]));
        assert!(sat(&[OrderAtom::lt(0, 1), OrderAtom::lt(1, 2)]));
        assert!(!sat(&[OrderAtom::eq(0, 1), OrderAtom::ne(0, 1)]));
    }

    #[test]
    fn le_cycles_force_equality() {
        assert!(sat(&[OrderAtom::le(0, 1), OrderAtom::le(1, 0)]));
        assert!(!sat(&[OrderAtom::le(0, 1), OrderAtom::le(1, 0), OrderAtom::ne(0, 1)]));
        assert!(!sat(&[OrderAtom::le(0, 1), OrderAtom::le(1, 2), OrderAtom::lt(2, 0)]));
    }

    #[test]
    fn constants_are_ordered() {
        let c = |n| Term::Const(rat(n));
        let x = Term::Var(0);
        assert!(!sat(&[
            OrderAtom::new(x, Op::Eq, c(1)),
            OrderAtom::new(x, Op::Eq, c(2))
        ]));
        assert!(!sat(&[
            OrderAtom::new(c(2), Op::Le, x),
            OrderAtom::new(x, Op::Le, c(1))
        ]));
        let mut fixed = BTreeMap::new();
        fixed.insert(0, rat(0));
        fixed.insert(1, rat(1));
        assert!(conjunction_satisfiable(
            &[OrderAtom::lt(0, 2), OrderAtom::lt(2, 1)],
            &fixed
        ));
        assert!(!conjunction_satisfiable(&[OrderAtom::lt(1, 0)], &fixed));
    }

    #[test]
    fn witness_satisfies_atoms() {
        let c = |n| Term::Const(rat(n));
        let mut store = ConjunctiveStore::new(4);
        store.extend([
            OrderAtom::lt(0, 1),
            OrderAtom::le(1, 2),
            OrderAtom::ne(1, 2),
            OrderAtom::new(Term::Var(3), Op::Eq, c(5)),
            OrderAtom::new(Term::Var(2), Op::Lt, c(5)),
        ]);
        let w = store.witness().unwrap();
        for a in store.atoms() {
            assert!(a.holds(|v| w[v], |q| q), "{a:?} on {w:?}");
        }
    }
}
