//! The six functors on concrete DG modules.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::data::{JLowerModel, RecollementData};
use super::maps::{counit_map, postcompose, tensor_with_map};
use crate::derived::{derived_hom, derived_tensor, DerivedHom, DerivedTensor};
use crate::dg::{cone, same_alg, ChainMap, DgAlgebra, DgModule, Triangle};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functor {
    #[serde(rename = "i_*")]
    ILowerStar,
    #[serde(rename = "i^*")]
    IUpperStar,
    #[serde(rename = "i^!")]
    IUpperShriek,
    #[serde(rename = "j_!")]
    JLowerShriek,
    #[serde(rename = "j^*")]
    JUpperStar,
    #[serde(rename = "j_*")]
    JLowerStar,
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Functor::ILowerStar => "i_*",
            Functor::IUpperStar => "i^*",
            Functor::IUpperShriek => "i^!",
            Functor::JLowerShriek => "j_!",
            Functor::JUpperStar => "j^*",
            Functor::JLowerStar => "j_*",
        };
        write!(f, "{s}")
    }
}

impl Functor {
    pub const ALL: [Functor; 6] = [
        Functor::ILowerStar,
        Functor::IUpperStar,
        Functor::IUpperShriek,
        Functor::JLowerShriek,
        Functor::JUpperStar,
        Functor::JLowerStar,
    ];
}

/// `i_* i^! X → X` with its pieces.
#[derive(Clone, Debug)]
pub struct CounitData {
    pub hom: DerivedHom,
    pub tensor: DerivedTensor,
    pub counit: ChainMap,
}

/// `j_* Z` with the pieces of whichever model produced it.
#[derive(Clone, Debug)]
pub enum JLowerValue {
    Bimodule(DerivedHom),
    /// `cone(i_* i^! j_! Z → j_! Z)`.
    Glued {
        shriek: DerivedTensor,
        counit: CounitData,
        triangle: Triangle,
    },
}

impl JLowerValue {
    pub fn module(&self) -> &Arc<DgModule> {
        match self {
            JLowerValue::Bimodule(h) => h.module(),
            JLowerValue::Glued { triangle, .. } => &triangle.z,
        }
    }
}

/// `i^* X = i^!(cone(j_! j^* X → X))`.
#[derive(Clone, Debug)]
pub struct IUpperValue {
    pub counit: CounitData,
    pub triangle: Triangle,
    pub value: DerivedHom,
}

fn expect_over(x: &DgModule, alg: &Arc<DgAlgebra>, which: &str) -> Result<()> {
    match x.left_alg() {
        Some(a) if same_alg(a, alg) => Ok(()),
        Some(a) => {
            Err(Error::Structure(format!("{which} expects a module over {}, got one over {}", alg.name, a.name)))
        }
        None => Err(Error::Structure(format!("{which} expects a left module over {}", alg.name))),
    }
}

impl RecollementData {
    pub fn i_lower(&self, y: &Arc<DgModule>) -> Result<DerivedTensor> {
        expect_over(y, &self.s, "i_*")?;
        derived_tensor(&self.pb, y, &self.opts)
    }

    pub fn i_shriek(&self, x: &Arc<DgModule>) -> Result<DerivedHom> {
        expect_over(x, &self.r, "i^!")?;
        derived_hom(&self.pb, x, &self.opts)
    }

    pub fn j_shriek(&self, z: &Arc<DgModule>) -> Result<DerivedTensor> {
        expect_over(z, &self.t, "j_!")?;
        derived_tensor(&self.pc, z, &self.opts)
    }

    pub fn j_upper(&self, x: &Arc<DgModule>) -> Result<DerivedHom> {
        expect_over(x, &self.r, "j^*")?;
        derived_hom(&self.pc, x, &self.opts)
    }

    /// Counit `i_* i^! X → X`.
    pub fn i_counit(&self, x: &Arc<DgModule>) -> Result<CounitData> {
        let hom = self.i_shriek(x)?;
        let tensor = derived_tensor(&self.pb, hom.module(), &self.opts)?;
        let counit = counit_map(&hom.hom, &tensor.resolution, &tensor.tensor, x)?;
        Ok(CounitData { hom, tensor, counit })
    }

    /// Counit `j_! j^* X → X`.
    pub fn j_counit(&self, x: &Arc<DgModule>) -> Result<CounitData> {
        let hom = self.j_upper(x)?;
        let tensor = derived_tensor(&self.pc, hom.module(), &self.opts)?;
        let counit = counit_map(&hom.hom, &tensor.resolution, &tensor.tensor, x)?;
        Ok(CounitData { hom, tensor, counit })
    }

    pub fn j_lower(&self, z: &Arc<DgModule>) -> Result<JLowerValue> {
        expect_over(z, &self.t, "j_*")?;
        match &self.j_lower {
            JLowerModel::Bimodule(res) => Ok(JLowerValue::Bimodule(derived_hom(&res.resolution, z, &self.opts)?)),
            JLowerModel::Glued(_) => {
                let shriek = self.j_shriek(z)?;
                let counit = self.i_counit(shriek.module())?;
                let triangle = cone(&counit.counit)?;
                Ok(JLowerValue::Glued { shriek, counit, triangle })
            }
        }
    }

    pub fn i_upper(&self, x: &Arc<DgModule>) -> Result<IUpperValue> {
        let counit = self.j_counit(x)?;
        let triangle = cone(&counit.counit)?;
        let value = self.i_shriek(&triangle.z)?;
        Ok(IUpperValue { counit, triangle, value })
    }

    /// `i_* i^!(g)` for a map `g : W → X`, available when the `S`-side
    /// resolutions are identities (ground `S`).
    pub fn i_counit_naturality(&self, w: &CounitData, x: &CounitData, g: &ChainMap) -> Result<ChainMap> {
        let h = postcompose(&w.hom.hom, &x.hom.hom, g)?;
        let (rw, rx) = (&w.tensor.resolution, &x.tensor.resolution);
        let identity = |r: &crate::derived::SemifreeResolution| {
            r.quasi_iso.matrix == crate::kernel::Matrix::identity(r.resolution.dim())
        };
        if !identity(rw) || !identity(rx) {
            return Err(Error::Unrepresentable("functoriality of i_* needs identity resolutions on the S-side".into()));
        }
        tensor_with_map(&w.tensor.tensor, &x.tensor.tensor, &h.matrix)
    }
}

/// Value of one of the six functors.
pub fn evaluate_functor(data: &RecollementData, which: Functor, x: &Arc<DgModule>) -> Result<Arc<DgModule>> {
    Ok(match which {
        Functor::ILowerStar => data.i_lower(x)?.module().clone(),
        Functor::IUpperShriek => data.i_shriek(x)?.module().clone(),
        Functor::JLowerShriek => data.j_shriek(x)?.module().clone(),
        Functor::JUpperStar => data.j_upper(x)?.module().clone(),
        Functor::JLowerStar => data.j_lower(x)?.module().clone(),
        Functor::IUpperStar => data.i_upper(x)?.value.module().clone(),
    })
}
