//! Machine profiles.
//!
//! Profiles are TOML documents with one table per process and an optional
//! `[part]` table for part-level requirements. Units are carried in key names.
//!
//! ```toml
//! [machining]
//! envelope_x_mm = 1000.0
//! envelope_y_mm = 600.0
//! envelope_z_mm = 500.0
//! slenderness_limit = 10.0
//! tool_diameters_mm = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0]
//! hb_max = 600.0
//! ra_best_um = 0.4
//! ra_coarse_um = 6.4
//!
//! [machining.hardness_hb]
//! aluminum = 95.0
//!
//! [additive]
//! build_x_mm = 250.0
//! build_y_mm = 250.0
//! build_z_mm = 250.0
//! # platform_center_x_mm, platform_center_y_mm, reference_area_mm2 are optional
//!
//! [part]
//! material = "aluminum"
//! required_ra_um = 1.6
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;

/// Subtractive machine capabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtractiveProfile {
    pub envelope_x_mm: f64,
    pub envelope_y_mm: f64,
    pub envelope_z_mm: f64,
    /// Largest usable tool length over diameter.
    pub slenderness_limit: f64,
    pub tool_diameters_mm: Vec<f64>,
    /// Hardness treated as the machinability ceiling.
    pub hb_max: f64,
    #[serde(default)]
    pub hardness_hb: BTreeMap<String, f64>,
    pub ra_best_um: f64,
    pub ra_coarse_um: f64,
}

impl SubtractiveProfile {
    pub fn envelope(&self) -> Vector {
        Vector::new(self.envelope_x_mm, self.envelope_y_mm, self.envelope_z_mm)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Profile(format!("machining: {m}")));
        if self.envelope().iter().any(|e| !(*e > 0.0)) {
            return bad("envelope extents must be positive".into());
        }
        if !(self.slenderness_limit > 1.0) {
            return bad(format!("slenderness_limit {} must exceed 1", self.slenderness_limit));
        }
        if self.tool_diameters_mm.is_empty() {
            return bad("tool_diameters_mm is empty".into());
        }
        if self.tool_diameters_mm.iter().any(|d| !(*d > 0.0)) {
            return bad("tool diameters must be positive".into());
        }
        if self.tool_diameters_mm.windows(2).any(|w| w[0] >= w[1]) {
            return bad("tool_diameters_mm must be strictly increasing".into());
        }
        if !(self.hb_max > 0.0) {
            return bad("hb_max must be positive".into());
        }
        if let Some((name, _)) = self.hardness_hb.iter().find(|(_, hb)| !(**hb >= 0.0)) {
            return bad(format!("hardness of `{name}` must be non-negative"));
        }
        if !(self.ra_best_um > 0.0 && self.ra_best_um < self.ra_coarse_um) {
            return bad("need 0 < ra_best_um < ra_coarse_um".into());
        }
        Ok(())
    }
}

/// Additive machine build volume. The platform is the `x`/`y` plane at the
/// bottom of the envelope, with its origin at one corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveProfile {
    pub build_x_mm: f64,
    pub build_y_mm: f64,
    pub build_z_mm: f64,
    pub platform_center_x_mm: Option<f64>,
    pub platform_center_y_mm: Option<f64>,
    /// Normalizer for the skin index; defaults to the envelope box surface.
    pub reference_area_mm2: Option<f64>,
}

impl AdditiveProfile {
    pub fn cube(edge: f64) -> Self {
        Self {
            build_x_mm: edge,
            build_y_mm: edge,
            build_z_mm: edge,
            platform_center_x_mm: None,
            platform_center_y_mm: None,
            reference_area_mm2: None,
        }
    }

    pub fn envelope(&self) -> Vector {
        Vector::new(self.build_x_mm, self.build_y_mm, self.build_z_mm)
    }

    pub fn platform_center(&self) -> [f64; 2] {
        [
            self.platform_center_x_mm.unwrap_or(self.build_x_mm / 2.0),
            self.platform_center_y_mm.unwrap_or(self.build_y_mm / 2.0),
        ]
    }

    pub fn reference_area(&self) -> f64 {
        self.reference_area_mm2.unwrap_or_else(|| {
            let e = self.envelope();
            2.0 * (e.x * e.y + e.y * e.z + e.x * e.z)
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Profile(format!("additive: {m}")));
        if self.envelope().iter().any(|e| !(*e > 0.0)) {
            return bad("build extents must be positive");
        }
        let [cx, cy] = self.platform_center();
        if !(0.0..=self.build_x_mm).contains(&cx) || !(0.0..=self.build_y_mm).contains(&cy) {
            return bad("platform center lies outside the platform");
        }
        if !(self.reference_area() > 0.0) {
            return bad("reference_area_mm2 must be positive");
        }
        Ok(())
    }
}

/// Part-level requirements that feed the hardness and roughness indexes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartRequirements {
    pub material: Option<String>,
    pub required_ra_um: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSet {
    pub machining: Option<SubtractiveProfile>,
    pub additive: Option<AdditiveProfile>,
    #[serde(default)]
    pub part: PartRequirements,
}

impl ProfileSet {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Profile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let set: ProfileSet = toml::from_str(text).map_err(|e| Error::Profile(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.machining.is_none() && self.additive.is_none() {
            return Err(Error::Profile("no [machining] or [additive] table".into()));
        }
        if let Some(m) = &self.machining {
            m.validate()?;
        }
        if let Some(a) = &self.additive {
            a.validate()?;
        }
        if let (Some(m), Some(material)) = (&self.machining, &self.part.material) {
            if !m.hardness_hb.contains_key(material) {
                return Err(Error::UnknownMaterial(material.clone()));
            }
        }
        if let Some(ra) = self.part.required_ra_um {
            if !(ra > 0.0) {
                return Err(Error::NonPositiveRoughness(ra));
            }
        }
        Ok(())
    }
}

/// A general-purpose 3-axis mill used by the examples and tests.
pub fn reference_mill() -> SubtractiveProfile {
    SubtractiveProfile {
        envelope_x_mm: 1000.0,
        envelope_y_mm: 1000.0,
        envelope_z_mm: 1000.0,
        slenderness_limit: 10.0,
        tool_diameters_mm: vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0],
        hb_max: 600.0,
        hardness_hb: [("aluminum", 95.0), ("steel_c45", 200.0), ("tool_steel_x40", 230.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        ra_best_um: 0.4,
        ra_coarse_um: 6.4,
    }
}
