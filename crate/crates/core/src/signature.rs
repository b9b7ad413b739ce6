use crate::error::{Error, Result};

/// Largest number of input atoms a signature may declare. Input instances are
/// stored as bit masks over the atom list.
pub const MAX_ATOMS: usize = 64;

pub(crate) const KEYWORDS: &[&str] = &["boxI", "boxF", "diaI", "diaF", "true", "false"];

/// The declared input variables and output values of a session.
///
/// Atom `i` of the list corresponds to bit `i` of every
/// [`InputInstance`](crate::InputInstance) built over this signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    atoms: Vec<String>,
    values: Vec<String>,
}

impl Signature {
    pub fn new<A, V>(atoms: A, values: V) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        V: IntoIterator,
        V::Item: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();

        if atoms.len() > MAX_ATOMS {
            return Err(Error::Signature(format!(
                "at most {MAX_ATOMS} atoms are supported, got {}",
                atoms.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::Signature("the value set must not be empty".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !is_atom_name(a) {
                return Err(Error::Signature(format!("`{a}` is not a valid atom name")));
            }
            if atoms[..i].contains(a) {
                return Err(Error::Signature(format!("duplicate atom `{a}`")));
            }
        }
        for (i, v) in values.iter().enumerate() {
            if !is_value_name(v) {
                return Err(Error::Signature(format!("`{v}` is not a valid value name")));
            }
            if values[..i].contains(v) {
                return Err(Error::Signature(format!("duplicate value `{v}`")));
            }
            if atoms.contains(v) {
                return Err(Error::Signature(format!(
                    "`{v}` is declared both as an atom and as a value"
                )));
            }
        }
        Ok(Signature { atoms, values })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn value_index(&self, name: &str) -> Option<usize> {
        self.values.iter().position(|v| v == name)
    }

    pub fn atom(&self, name: &str) -> Result<usize> {
        self.atom_index(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn value(&self, name: &str) -> Result<usize> {
        self.value_index(name)
            .ok_or_else(|| Error::UnknownValue(name.to_string()))
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_values(&self) -> usize {
        self.values.len()
    }

    /// Bit mask with one bit per declared atom.
    pub fn full_mask(&self) -> u64 {
        mask_of_len(self.atoms.len())
    }

    /// Bit mask of the named atoms.
    pub fn mask_of<'a, I>(&self, names: I) -> Result<u64>
    where
        I: IntoIterator<Item = &'a String>,
    {
        names
            .into_iter()
            .try_fold(0u64, |m, n| Ok(m | (1u64 << self.atom(n)?)))
    }

    /// Atom names set in `mask`, in declaration order.
    pub fn names_in(&self, mask: u64) -> Vec<&str> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.as_str())
            .collect()
    }

    /// Renders an instance mask as `{a,b}`.
    pub fn render_set(&self, mask: u64) -> String {
        format!("{{{}}}", self.names_in(mask).join(","))
    }
}

pub(crate) fn mask_of_len(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Atom names follow the formula grammar; a leading underscore is reserved
/// for atoms introduced by the open-mode solver.
pub(crate) fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

pub(crate) fn is_value_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_signatures() {
        assert!(Signature::new(["p", "p"], ["0"]).is_err());
        assert!(Signature::new(["p"], Vec::<String>::new()).is_err());
        assert!(Signature::new(["p"], ["p"]).is_err());
        assert!(Signature::new(["boxI"], ["0"]).is_err());
        assert!(Signature::new(["P"], ["0"]).is_err());
        assert!(Signature::new(Vec::<String>::new(), ["0", "1"]).is_ok());
    }

    #[test]
    fn masks_follow_declaration_order() {
        let sig = Signature::new(["si", "or", "cl", "an"], ["0", "1"]).unwrap();
        let m = sig
            .mask_of(&["an".to_string(), "si".to_string()])
            .unwrap();
        assert_eq!(m, 0b1001);
        assert_eq!(sig.render_set(m), "{si,an}");
        assert_eq!(sig.render_set(0), "{}");
    }
}
