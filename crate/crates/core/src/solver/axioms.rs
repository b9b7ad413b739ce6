//! Seeded instances of the axiom schemas of the logic, for validity testing.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{conj_term, Formula};
use crate::signature::Signature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    KI,
    KF,
    TI,
    TF,
    FourI,
    FourF,
    FiveI,
    FiveF,
    Comm,
    AtLeast,
    AtMost,
    Funct,
    IndepPos,
    IndepNeg,
    NecI,
    NecF,
}

impl Schema {
    pub const ALL: [Schema; 16] = [
        Schema::KI,
        Schema::KF,
        Schema::TI,
        Schema::TF,
        Schema::FourI,
        Schema::FourF,
        Schema::FiveI,
        Schema::FiveF,
        Schema::Comm,
        Schema::AtLeast,
        Schema::AtMost,
        Schema::Funct,
        Schema::IndepPos,
        Schema::IndepNeg,
        Schema::NecI,
        Schema::NecF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::KI => "K_I",
            Schema::KF => "K_F",
            Schema::TI => "T_I",
            Schema::TF => "T_F",
            Schema::FourI => "4_I",
            Schema::FourF => "4_F",
            Schema::FiveI => "5_I",
            Schema::FiveF => "5_F",
            Schema::Comm => "Comm",
            Schema::AtLeast => "AtLeast",
            Schema::AtMost => "AtMost",
            Schema::Funct => "Funct",
            Schema::IndepPos => "Indep_p",
            Schema::IndepNeg => "Indep_not_p",
            Schema::NecI => "Nec_I",
            Schema::NecF => "Nec_F",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInstance {
    pub schema: Schema,
    pub formula: Formula,
}

/// A random static, CP-free formula of nesting depth at most `depth`.
fn random_depth(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> Formula {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..6) };
    match choice {
        0 | 1 => {
            let na = sig.num_atoms();
            let k = rng.gen_range(0..na + sig.num_values() + 1);
            if k < na {
                Formula::atom(sig.atoms()[k].as_str())
            } else if k < na + sig.num_values() {
                Formula::dec(sig.values()[k - na].as_str())
            } else {
                Formula::Top
            }
        }
        2 => Formula::not(random_depth(rng, sig, depth - 1)),
        3 => Formula::box_i(random_depth(rng, sig, depth - 1)),
        4 => Formula::box_f(random_depth(rng, sig, depth - 1)),
        _ => {
            let a = random_depth(rng, sig, depth - 1);
            Formula::and(a, random_depth(rng, sig, depth - 1))
        }
    }
}

fn modal(schema: Schema, rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> Formula {
    let f = random_depth(rng, sig, depth);
    let boxed = |g: Formula, i: bool| if i { Formula::box_i(g) } else { Formula::box_f(g) };
    match schema {
        Schema::KI | Schema::KF => {
            let i = schema == Schema::KI;
            let g = random_depth(rng, sig, depth);
            Formula::implies(
                Formula::and(boxed(f.clone(), i), boxed(Formula::implies(f, g.clone()), i)),
                boxed(g, i),
            )
        }
        Schema::TI | Schema::TF => Formula::implies(boxed(f.clone(), schema == Schema::TI), f),
        Schema::FourI | Schema::FourF => {
            let i = schema == Schema::FourI;
            Formula::implies(boxed(f.clone(), i), boxed(boxed(f, i), i))
        }
        Schema::FiveI | Schema::FiveF => {
            let i = schema == Schema::FiveI;
            let nb = Formula::not(boxed(f, i));
            Formula::implies(nb.clone(), boxed(nb, i))
        }
        Schema::Comm => Formula::iff(
            Formula::box_f(Formula::box_i(f.clone())),
            Formula::box_i(Formula::box_f(f)),
        ),
        _ => unreachable!("not a modal schema"),
    }
}

/// Instances of every schema, drawn from a seeded generator.
///
/// Modal schemas get `per_schema` instances each, with subformulas of depth
/// at most `depth`. `AtLeast` has a single instance, `AtMost` one per
/// ordered pair of distinct values, `Funct` one per `X ⊆ Atm0` and value, and
/// the independence schemas one per atom. Necessitation wraps random
/// instances of the other schemas.
pub fn axiom_instances(
    sig: &Signature,
    depth: usize,
    seed: u64,
    per_schema: usize,
) -> Vec<AxiomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let push = |out: &mut Vec<AxiomInstance>, schema, formula| {
        out.push(AxiomInstance { schema, formula });
    };
    for schema in [
        Schema::KI,
        Schema::KF,
        Schema::TI,
        Schema::TF,
        Schema::FourI,
        Schema::FourF,
        Schema::FiveI,
        Schema::FiveF,
        Schema::Comm,
    ] {
        for _ in 0..per_schema {
            let f = modal(schema, &mut rng, sig, depth);
            push(&mut out, schema, f);
        }
    }
    let values = sig.values();
    push(
        &mut out,
        Schema::AtLeast,
        Formula::disj(values.iter().map(Formula::dec)),
    );
    for x in values {
        for y in values.iter().filter(|y| *y != x) {
            push(
                &mut out,
                Schema::AtMost,
                Formula::implies(Formula::dec(x.as_str()), Formula::not(Formula::dec(y.as_str()))),
            );
        }
    }
    for mask in 0u64..1 << sig.num_atoms().min(12) {
        let x: BTreeSet<String> = sig.names_in(mask).into_iter().map(String::from).collect();
        let term = conj_term(&x, sig.atoms()).expect("subset of the signature");
        for v in values {
            let dec = Formula::dec(v.as_str());
            push(
                &mut out,
                Schema::Funct,
                Formula::implies(
                    Formula::and(term.clone(), dec.clone()),
                    Formula::box_i(Formula::implies(term.clone(), dec)),
                ),
            );
        }
    }
    for p in sig.atoms() {
        let a = Formula::atom(p.as_str());
        push(
            &mut out,
            Schema::IndepPos,
            Formula::implies(a.clone(), Formula::box_f(a.clone())),
        );
        let na = Formula::not(a);
        push(
            &mut out,
            Schema::IndepNeg,
            Formula::implies(na.clone(), Formula::box_f(na)),
        );
    }
    let base = out.len();
    for (schema, wrap) in [
        (Schema::NecI, Formula::box_i as fn(Formula) -> Formula),
        (Schema::NecF, Formula::box_f),
    ] {
        for _ in 0..per_schema {
            let inner = out[rng.gen_range(0..base)].formula.clone();
            push(&mut out, schema, wrap(inner));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_complete() {
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let a = axiom_instances(&sig, 2, 9, 3);
        assert_eq!(a, axiom_instances(&sig, 2, 9, 3));
        for s in Schema::ALL {
            assert!(a.iter().any(|i| i.schema == s), "{s} missing");
        }
        assert_eq!(a.iter().filter(|i| i.schema == Schema::Funct).count(), 8);
        assert_eq!(a.iter().filter(|i| i.schema == Schema::AtMost).count(), 2);
    }
}
