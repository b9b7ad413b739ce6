//! Filtration of a quasi-model through a formula's subformulas.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::models::{validate_mdm, ConstraintReport, Mdm, Partition};
use crate::semantics::mdm_truth_table;

#[derive(Debug, Clone)]
pub struct Filtration {
    pub model: Mdm,
    /// Image of each world of the input; `None` outside the generated
    /// submodel.
    pub map: Vec<Option<usize>>,
    /// Image of the designated world.
    pub image: usize,
    /// Constraint report of the output.
    pub report: ConstraintReport,
}

/// Restricts `m` to the worlds reachable from `w0`, then merges worlds that
/// agree on every subformula of `phi` and every decision atom.
///
/// Merged worlds are `I`-related when they agree on the `□_I` subformulas and
/// `F`-related when they agree on the `□_F` subformulas and on the atoms of
/// `phi`. Labels keep only the atoms occurring in `phi`.
pub fn filtrate(m: &Mdm, phi: &Formula, w0: usize) -> Result<Filtration> {
    if w0 >= m.num_worlds() {
        return Err(Error::Model(format!("world {w0} out of range")));
    }
    if phi.has_cp() || !phi.is_static() {
        return Err(Error::Unsupported(
            "filtration of formulas with ceteris-paribus or dynamic operators",
        ));
    }
    validate_mdm(m).require_quasi()?;
    let (sub, sub_map) = m.generated(w0);
    let sf: Vec<Formula> = phi.subformulas_plus(&m.sig).into_iter().collect();
    let tables: Vec<Vec<bool>> = sf
        .iter()
        .map(|psi| mdm_truth_table(&sub, psi))
        .collect::<Result<_>>()?;
    let n = sub.num_worlds();
    let theta = |w: usize| -> Vec<bool> { tables.iter().map(|t| t[w]).collect() };
    let picked = |w: usize, keep: &dyn Fn(&Formula) -> bool| -> Vec<bool> {
        sf.iter()
            .zip(&tables)
            .filter(|(psi, _)| keep(psi))
            .map(|(_, t)| t[w])
            .collect()
    };

    let mut class_of = vec![0; n];
    let mut reps = Vec::new();
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    for (w, class) in class_of.iter_mut().enumerate() {
        *class = *index.entry(theta(w)).or_insert_with(|| {
            reps.push(w);
            reps.len() - 1
        });
    }
    let k = reps.len();
    let atoms = m.sig.mask_of(&phi.atoms())?;
    let filtered = Mdm::new(
        m.sig.clone(),
        reps.iter().map(|&w| sub.labels[w] & atoms).collect(),
        reps.iter().map(|&w| sub.decisions[w]).collect(),
        Partition::from_key(k, |c| picked(reps[c], &|psi| matches!(psi, Formula::BoxI(_)))),
        Partition::from_key(k, |c| {
            picked(reps[c], &|psi| {
                matches!(psi, Formula::BoxF(_) | Formula::Atom(_))
            })
        }),
    )?;
    let map = sub_map.iter().map(|s| s.map(|w| class_of[w])).collect::<Vec<_>>();
    let image = map[w0].expect("designated world is in its own component");
    let report = validate_mdm(&filtered);
    Ok(Filtration {
        model: filtered,
        map,
        image,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_grid_mdm, GridShape};
    use crate::semantics::check_mdm;
    use crate::syntax::parse_formula;
    use crate::Signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn preserves_the_formula() {
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = parse_formula("diaI (p & =1) & boxF (q -> diaI =0)", &sig).unwrap();
        let shape = GridShape {
            components: 2,
            max_rows: 3,
            max_columns: 3,
            max_cell: 2,
            functional: false,
        };
        for _ in 0..30 {
            let m = random_grid_mdm(&mut rng, &sig, &shape);
            for w in 0..m.num_worlds() {
                let f = filtrate(&m, &phi, w).unwrap();
                assert_eq!(check_mdm(&m, w, &phi).unwrap(), check_mdm(&f.model, f.image, &phi).unwrap());
                let bound = 1usize << phi.subformulas_plus(&sig).len();
                assert!(f.model.num_worlds() <= bound);
            }
        }
    }

    #[test]
    fn rejects_dynamic_formulas() {
        let sig = Signature::new(["p"], ["0"]).unwrap();
        let m = Mdm::new(sig.clone(), vec![0], vec![0], Partition::identity(1), Partition::identity(1)).unwrap();
        let phi = parse_formula("[! p] p", &sig).unwrap();
        assert!(filtrate(&m, &phi, 0).is_err());
    }
}
