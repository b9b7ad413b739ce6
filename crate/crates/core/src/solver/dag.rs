use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Formula;

/// A formula compiled to a hash-consed DAG. Children always precede their
/// parents, so increasing node order is a bottom-up order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    /// Bit index of the atom in the caller's labelling.
    Atom(usize),
    Dec(usize),
    Not(usize),
    And(usize, usize),
    BoxI(usize),
    BoxF(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Dag {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl Dag {
    /// Compiles a formula without ceteris-paribus or dynamic nodes.
    pub fn compile(
        phi: &Formula,
        atom: &impl Fn(&str) -> Result<usize>,
        value: &impl Fn(&str) -> Result<usize>,
    ) -> Result<Dag> {
        let mut dag = Dag {
            nodes: Vec::new(),
            root: 0,
        };
        let mut index = HashMap::new();
        dag.root = dag.add(phi, atom, value, &mut index)?;
        Ok(dag)
    }

    fn add(
        &mut self,
        phi: &Formula,
        atom: &impl Fn(&str) -> Result<usize>,
        value: &impl Fn(&str) -> Result<usize>,
        index: &mut HashMap<Node, usize>,
    ) -> Result<usize> {
        let node = match phi {
            Formula::Top => Node::Top,
            Formula::Atom(p) => Node::Atom(atom(p)?),
            Formula::Dec(x) => Node::Dec(value(x)?),
            Formula::Not(a) => Node::Not(self.add(a, atom, value, index)?),
            Formula::And(a, b) => {
                let a = self.add(a, atom, value, index)?;
                let b = self.add(b, atom, value, index)?;
                Node::And(a, b)
            }
            Formula::BoxI(a) => Node::BoxI(self.add(a, atom, value, index)?),
            Formula::BoxF(a) => Node::BoxF(self.add(a, atom, value, index)?),
            Formula::Cp(..) => return Err(Error::Unsupported("an unexpanded ceteris-paribus node")),
            Formula::Dyn(..) => {
                return Err(Error::Unsupported(
                    "the dynamic operator in a satisfiability query (reduce it first)",
                ))
            }
        };
        if let Some(&i) = index.get(&node) {
            return Ok(i);
        }
        self.nodes.push(node);
        index.insert(node, self.nodes.len() - 1);
        Ok(self.nodes.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// Rejects dynamic operators up front, before any expansion work.
pub(crate) fn require_static(phi: &Formula) -> Result<()> {
    if phi.is_static() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "the dynamic operator in a satisfiability query (reduce it first)",
        ))
    }
}
