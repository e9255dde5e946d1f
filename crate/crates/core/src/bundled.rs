//! Example curves, families and (φ,∇)-modules shipped with the crate.

use crate::curve::{CurveModel, CurveRepr};
use crate::error::{Error, Result};
use crate::family::{CrystalFamily, FamilyRepr};
use crate::phi_nabla::{ModuleRepr, PhiNablaModule};

pub const CURVES: &[(&str, &str)] = &[
    ("p1", include_str!("../data/curves/p1.toml")),
    ("ec_ss_f7", include_str!("../data/curves/ec_ss_f7.toml")),
    ("ec_ord_f7", include_str!("../data/curves/ec_ord_f7.toml")),
    ("ec_f5", include_str!("../data/curves/ec_f5.toml")),
    ("g2_f7", include_str!("../data/curves/g2_f7.toml")),
];

pub const FAMILIES: &[(&str, &str)] = &[
    ("legendre_7", include_str!("../data/families/legendre_7.toml")),
    ("legendre_11", include_str!("../data/families/legendre_11.toml")),
    ("legendre_13", include_str!("../data/families/legendre_13.toml")),
    ("planted_z", include_str!("../data/families/planted_z.toml")),
    ("constant_ss_f7", include_str!("../data/families/constant_ss_f7.toml")),
];

pub const MODULES: &[(&str, &str)] = &[
    ("conjugated_diag_1_5", include_str!("../data/modules/conjugated_diag_1_5.json")),
    ("diag_1_3_9", include_str!("../data/modules/diag_1_3_9.json")),
    ("jumping_7", include_str!("../data/modules/jumping_7.json")),
];

fn toml_err(e: toml::de::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_curve(src: &str) -> Result<CurveModel> {
    let r: CurveRepr = toml::from_str(src).map_err(toml_err)?;
    CurveModel::from_repr(&r)
}

pub fn parse_family(src: &str) -> Result<CrystalFamily> {
    let r: FamilyRepr = toml::from_str(src).map_err(toml_err)?;
    CrystalFamily::from_repr(&r)
}

pub fn parse_module(src: &str) -> Result<PhiNablaModule> {
    let r: ModuleRepr = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    r.build()
}

pub fn curves() -> Result<Vec<(&'static str, CurveModel)>> {
    CURVES.iter().map(|(n, s)| Ok((*n, parse_curve(s)?))).collect()
}

pub fn families() -> Result<Vec<(&'static str, CrystalFamily)>> {
    FAMILIES.iter().map(|(n, s)| Ok((*n, parse_family(s)?))).collect()
}

pub fn modules() -> Result<Vec<(&'static str, PhiNablaModule)>> {
    MODULES.iter().map(|(n, s)| Ok((*n, parse_module(s)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_parses() {
        assert_eq!(curves().unwrap().len(), 5);
        assert_eq!(families().unwrap().len(), 5);
        for (name, m) in modules().unwrap() {
            assert!(m.is_horizontal(), "{name}");
        }
    }
}
