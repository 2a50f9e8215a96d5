use super::SncModel;
use crate::error::{Error, Result};
use crate::polyhedra::Face;
use crate::rational::{int_rat, serde_int_mat, Int, Rat};
use crate::ring::{AtomicClass, MotClass};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Morphism of models `X_pi -> Y_sigma` recorded by the orders `a_ij = ord_{D_i} b^* E_j`
/// (rows: source divisors, columns: target divisors), plus a renaming of class symbols
/// describing the push-forward of classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMorphism {
    pub source: Vec<String>,
    pub target: Vec<String>,
    #[serde(with = "serde_int_mat")]
    pub matrix: Vec<Vec<Int>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub class_map: BTreeMap<String, String>,
}

impl ModelMorphism {
    pub fn identity(model: &SncModel) -> Self {
        let ids = model.divisor_ids();
        let n = ids.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
        Self { source: ids.clone(), target: ids, matrix, class_map: BTreeMap::new() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    fn col(&self, j: &str) -> Result<usize> {
        self.target.iter().position(|t| t == j).ok_or_else(|| Error::InvalidMorphism(format!("unknown target divisor `{j}`")))
    }

    fn row(&self, i: &str) -> Result<usize> {
        self.source.iter().position(|s| s == i).ok_or_else(|| Error::InvalidMorphism(format!("unknown source divisor `{i}`")))
    }

    pub fn entry(&self, i: &str, j: &str) -> Result<&Int> {
        Ok(&self.matrix[self.row(i)?][self.col(j)?])
    }

    /// Check shape and sign conditions, and that faces map to strata of the target.
    pub fn validate(&self, source: &SncModel, target: &SncModel) -> Result<()> {
        let mut s = source.divisor_ids();
        let mut t = target.divisor_ids();
        let (mut ms, mut mt) = (self.source.clone(), self.target.clone());
        s.sort();
        t.sort();
        ms.sort();
        mt.sort();
        if s != ms || t != mt {
            return Err(Error::InvalidMorphism("divisor ids do not match the models".into()));
        }
        if self.matrix.len() != self.source.len() || self.matrix.iter().any(|r| r.len() != self.target.len()) {
            return Err(Error::InvalidMorphism("matrix shape does not match divisor lists".into()));
        }
        if self.matrix.iter().flatten().any(|x| x.is_negative()) {
            return Err(Error::InvalidMorphism("negative order of vanishing".into()));
        }
        for (j, id) in self.target.iter().enumerate() {
            if self.matrix.iter().all(|r| r[j].is_zero()) {
                return Err(Error::InvalidMorphism(format!("target divisor `{id}` pulls back to zero")));
            }
        }
        for face in source.faces() {
            let (img, _) = self.face_map(&face)?;
            if !target.has_stratum(&img) {
                return Err(Error::InvalidMorphism(format!("face {face:?} maps to {img:?}, which is not a stratum of the target")));
            }
        }
        Ok(())
    }

    /// Target face `J(I)` and the linear map `R^I -> R^{J(I)}` (rows in target face order).
    pub fn face_map(&self, face: &[String]) -> Result<(Face, Vec<Vec<Rat>>)> {
        let rows: Vec<usize> = face.iter().map(|i| self.row(i)).collect::<Result<_>>()?;
        let mut img: Face = self
            .target
            .iter()
            .enumerate()
            .filter(|(j, _)| rows.iter().any(|&r| self.matrix[r][*j].is_positive()))
            .map(|(_, id)| id.clone())
            .collect();
        img.sort();
        let lam = img
            .iter()
            .map(|j| {
                let c = self.col(j).unwrap();
                rows.iter().map(|&r| int_rat(&self.matrix[r][c])).collect()
            })
            .collect();
        Ok((img, lam))
    }

    /// Image `w_j = sum_{i in I} a_ij v_i` of a point of the open face `I`, in coordinates of `J(I)`.
    pub fn valuation_map(&self, face: &[String], point: &[Rat]) -> Result<(Face, Vec<Rat>)> {
        if point.len() != face.len() {
            return Err(Error::invalid("point dimension does not match the face"));
        }
        let (img, lam) = self.face_map(face)?;
        let w = lam.iter().map(|row| row.iter().zip(point).map(|(a, v)| a * v).sum()).collect();
        Ok((img, w))
    }

    /// `self : X -> Y` followed by `next : Y -> Z`.
    pub fn then(&self, next: &ModelMorphism) -> Result<ModelMorphism> {
        let mut sorted_mid = self.target.clone();
        sorted_mid.sort();
        let mut next_src = next.source.clone();
        next_src.sort();
        if sorted_mid != next_src {
            return Err(Error::InvalidMorphism("morphisms do not compose".into()));
        }
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                next.target
                    .iter()
                    .map(|k| {
                        self.target.iter().zip(row).fold(Int::zero(), |acc, (j, a)| acc + a * next.entry(j, k).unwrap())
                    })
                    .collect()
            })
            .collect();
        // Push-forward of classes composes as renamings.
        let mut class_map = BTreeMap::new();
        for (s, t) in &self.class_map {
            class_map.insert(s.clone(), next.class_map.get(t).cloned().unwrap_or_else(|| t.clone()));
        }
        for (s, t) in &next.class_map {
            class_map.entry(s.clone()).or_insert_with(|| t.clone());
        }
        Ok(ModelMorphism { source: self.source.clone(), target: next.target.clone(), matrix, class_map })
    }

    pub fn push_class(&self, c: &MotClass) -> MotClass {
        c.rename(&self.class_map)
    }

    pub fn push_atomic(&self, c: &AtomicClass) -> AtomicClass {
        c.rename(&self.class_map)
    }
}
