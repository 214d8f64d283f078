//! Substitutions of set-theoretic sentences for propositional letters.

use std::collections::BTreeMap;

use thiserror::Error;

use super::prop::PropFormula;
use super::set::SetFormula;

#[derive(Debug, Error)]
pub enum SubstError {
    #[error("image of letter `{0}` is not a sentence (free variables: {1:?})")]
    NotASentence(String, Vec<String>),
    #[error("letter `{0}` is not in the substitution's domain")]
    MissingLetter(String),
}

/// A total map from a finite set of letters to sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, SetFormula>,
}

impl Substitution {
    /// Every image must be a sentence.
    pub fn new(map: BTreeMap<String, SetFormula>) -> Result<Self, SubstError> {
        for (p, f) in &map {
            let free = f.free_vars();
            if !free.is_empty() {
                return Err(SubstError::NotASentence(
                    p.clone(),
                    free.into_iter().collect(),
                ));
            }
        }
        Ok(Substitution { map })
    }

    pub fn get(&self, letter: &str) -> Option<&SetFormula> {
        self.map.get(letter)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SetFormula)> {
        self.map.iter()
    }

    /// Homomorphic replacement of letters by their images; connectives and
    /// bottom map to themselves. The result is a sentence.
    pub fn apply(&self, phi: &PropFormula) -> Result<SetFormula, SubstError> {
        match phi {
            PropFormula::Bottom => Ok(SetFormula::Bottom),
            PropFormula::Letter(p) => self
                .map
                .get(p)
                .cloned()
                .ok_or_else(|| SubstError::MissingLetter(p.clone())),
            PropFormula::And(a, b) => Ok(SetFormula::and(self.apply(a)?, self.apply(b)?)),
            PropFormula::Or(a, b) => Ok(SetFormula::or(self.apply(a)?, self.apply(b)?)),
            PropFormula::Implies(a, b) => {
                Ok(SetFormula::implies(self.apply(a)?, self.apply(b)?))
            }
        }
    }
}

/// `phi^sigma`, the sentence obtained by replacing each letter of `phi` by
/// its image under `sigma`.
pub fn apply_substitution(
    phi: &PropFormula,
    sigma: &Substitution,
) -> Result<SetFormula, SubstError> {
    sigma.apply(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{parse_prop, parse_set};

    fn sigma_p(image: &str) -> Substitution {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), parse_set(image).unwrap());
        Substitution::new(map).unwrap()
    }

    #[test]
    fn letter_base_case() {
        let sigma = sigma_p("exists y . y = y");
        let out = apply_substitution(&parse_prop("p").unwrap(), &sigma).unwrap();
        assert_eq!(out, parse_set("exists y . y = y").unwrap());
    }

    #[test]
    fn bottom_maps_to_bottom() {
        let sigma = sigma_p("exists y . y = y");
        let out = apply_substitution(&PropFormula::Bottom, &sigma).unwrap();
        assert_eq!(out, SetFormula::Bottom);
    }

    #[test]
    fn homomorphic_on_excluded_middle() {
        let sigma = sigma_p("forall x . x = x");
        let psi = parse_set("forall x . x = x").unwrap();
        let out = apply_substitution(&parse_prop("p | ~p").unwrap(), &sigma).unwrap();
        assert_eq!(out, SetFormula::or(psi.clone(), SetFormula::neg(psi)));
    }

    #[test]
    fn missing_letter_is_an_error() {
        let sigma = sigma_p("exists y . y = y");
        let err = apply_substitution(&parse_prop("p & q").unwrap(), &sigma).unwrap_err();
        assert!(matches!(err, SubstError::MissingLetter(l) if l == "q"));
    }

    #[test]
    fn open_image_is_rejected() {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), parse_set("x in y").unwrap());
        assert!(Substitution::new(map).is_err());
    }

    #[test]
    fn commutes_with_connectives() {
        let sigma = sigma_p("exists y . y = y");
        let a = parse_prop("p & p").unwrap();
        let b = parse_prop("p").unwrap();
        let sa = apply_substitution(&a, &sigma).unwrap();
        let sb = apply_substitution(&b, &sigma).unwrap();
        assert_eq!(sa, SetFormula::and(sb.clone(), sb));
    }
}
