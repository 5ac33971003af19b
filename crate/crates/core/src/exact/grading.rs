//! Per-generator gradings and the split of elements into homogeneous blocks.

use std::collections::BTreeMap;

use super::poly::Var;
use super::superalg::{OddVar, SuperElement, SuperMonomial};
use super::ExactError;

/// Conformal weight and multidegree of one generator. The cohomological
/// degree is implied by parity: 0 for even generators, 1 for odd ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenGrade {
    pub weight: i64,
    pub multidegree: Vec<i64>,
}

/// `(cohomological degree, conformal weight, multidegree)` of a homogeneous
/// block. Orders by degree first, then weight, then multidegree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockLabel {
    pub degree: usize,
    pub weight: i64,
    pub multidegree: Vec<i64>,
}

impl BlockLabel {
    pub fn new(degree: usize, weight: i64, multidegree: Vec<i64>) -> Self {
        BlockLabel {
            degree,
            weight,
            multidegree,
        }
    }

    pub fn with_degree(&self, degree: usize) -> Self {
        BlockLabel {
            degree,
            ..self.clone()
        }
    }

    pub fn with_weight(&self, weight: i64) -> Self {
        BlockLabel {
            weight,
            ..self.clone()
        }
    }
}

impl std::fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.multidegree.iter().map(i64::to_string).collect();
        write!(f, "deg={} w={} d=({})", self.degree, self.weight, d.join(","))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradingVector {
    pub rank: usize,
    pub even: BTreeMap<Var, GenGrade>,
    pub odd: BTreeMap<OddVar, GenGrade>,
}

impl GradingVector {
    /// `rank` is the length of every multidegree vector.
    pub fn new(rank: usize) -> Self {
        GradingVector {
            rank,
            ..Default::default()
        }
    }

    pub fn set_even(&mut self, v: Var, weight: i64, multidegree: Vec<i64>) {
        assert_eq!(multidegree.len(), self.rank);
        self.even.insert(v, GenGrade { weight, multidegree });
    }

    pub fn set_odd(&mut self, t: OddVar, weight: i64, multidegree: Vec<i64>) {
        assert_eq!(multidegree.len(), self.rank);
        self.odd.insert(t, GenGrade { weight, multidegree });
    }

    pub fn label(&self, m: &SuperMonomial) -> Result<BlockLabel, ExactError> {
        let mut weight = 0;
        let mut md = vec![0i64; self.rank];
        for (v, e) in m.even.iter() {
            let g = self.even.get(&v).ok_or_else(|| ExactError::MissingGenerator {
                generator: format!("even {v}"),
            })?;
            weight += g.weight * e as i64;
            for (acc, x) in md.iter_mut().zip(&g.multidegree) {
                *acc += x * e as i64;
            }
        }
        for t in &m.odd {
            let g = self.odd.get(t).ok_or_else(|| ExactError::MissingGenerator {
                generator: format!("odd {t}"),
            })?;
            weight += g.weight;
            for (acc, x) in md.iter_mut().zip(&g.multidegree) {
                *acc += x;
            }
        }
        Ok(BlockLabel::new(m.odd.len(), weight, md))
    }

    /// Splits one element into its homogeneous components.
    pub fn components(
        &self,
        s: &SuperElement,
    ) -> Result<BTreeMap<BlockLabel, SuperElement>, ExactError> {
        let mut out: BTreeMap<BlockLabel, SuperElement> = BTreeMap::new();
        for (m, c) in s.terms() {
            out.entry(self.label(m)?)
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// The block label if `s` is nonzero and homogeneous.
    pub fn homogeneous_label(&self, s: &SuperElement) -> Result<Option<BlockLabel>, ExactError> {
        let comps = self.components(s)?;
        if comps.len() == 1 {
            Ok(comps.into_keys().next())
        } else {
            Ok(None)
        }
    }
}

/// Groups the homogeneous components of every element by block. Each list
/// spans one block; distinct keys are disjoint blocks.
pub fn graded_block_split(
    elements: &[SuperElement],
    g: &GradingVector,
) -> Result<BTreeMap<BlockLabel, Vec<SuperElement>>, ExactError> {
    let mut out: BTreeMap<BlockLabel, Vec<SuperElement>> = BTreeMap::new();
    for s in elements {
        for (label, part) in g.components(s)? {
            out.entry(label).or_default().push(part);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::{int, Monomial};

    fn jet_grading() -> GradingVector {
        // x0 = 0, x1 = 1, y0 = 2, y1 = 3; θ = 0
        let mut g = GradingVector::new(2);
        g.set_even(0, 0, vec![1, 0]);
        g.set_even(1, 1, vec![1, 0]);
        g.set_even(2, 0, vec![0, 1]);
        g.set_even(3, 1, vec![0, 1]);
        g.set_odd(0, 0, vec![1, 0]);
        g
    }

    #[test]
    fn jet_levels_land_in_their_weight() {
        let g = jet_grading();
        let blocks =
            graded_block_split(&[SuperElement::even_var(0), SuperElement::even_var(1)], &g)
                .unwrap();
        let labels: Vec<_> = blocks.keys().cloned().collect();
        assert_eq!(
            labels,
            vec![
                BlockLabel::new(0, 0, vec![1, 0]),
                BlockLabel::new(0, 1, vec![1, 0])
            ]
        );
    }

    #[test]
    fn odd_factor_raises_degree() {
        let g = jet_grading();
        let s = &SuperElement::even_var(0) * &SuperElement::odd_var(0);
        let blocks = graded_block_split(&[s], &g).unwrap();
        assert_eq!(blocks.keys().next().unwrap().degree, 1);
    }

    #[test]
    fn sum_of_equal_weight_terms_is_one_block() {
        let g = jet_grading();
        let s = SuperElement::from_poly(&crate::exact::poly::SparsePoly::from_terms([
            (Monomial::from_pairs([(0, 1), (3, 1)]), int(1)),
            (Monomial::from_pairs([(1, 1), (2, 1)]), int(1)),
        ]));
        let blocks = graded_block_split(&[s.clone()], &g).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(
            blocks.get(&BlockLabel::new(0, 1, vec![1, 1])).unwrap(),
            &vec![s]
        );
    }

    #[test]
    fn mixed_element_splits() {
        let g = jet_grading();
        let s = &SuperElement::even_var(0) + &SuperElement::even_var(1);
        assert_eq!(g.homogeneous_label(&s).unwrap(), None);
        assert_eq!(graded_block_split(&[s], &g).unwrap().len(), 2);
    }
}
