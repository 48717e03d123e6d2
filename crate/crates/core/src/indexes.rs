//! Index identifiers and local index fields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aggregation::{local_max, local_mean};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Machining,
    Additive,
}

impl Process {
    pub fn sign(self) -> char {
        match self {
            Process::Machining => '-',
            Process::Additive => '+',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Process::Machining => "machining",
            Process::Additive => "additive",
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Process {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machining" => Ok(Process::Machining),
            "additive" => Ok(Process::Additive),
            other => Err(format!("unknown process `{other}`")),
        }
    }
}

/// Every manufacturability index. Declaration order is the reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexId {
    /// Part size relative to the machine work volume.
    MachiningDimension,
    /// Material removed relative to the stock.
    Chips,
    /// Cutting-tool slenderness needed to reach each region (local).
    Flexibility,
    Hardness,
    Roughness,
    AdditiveDimension,
    Volume,
    Skin,
    /// Build height of each region (local).
    Height,
    /// Distance of each region from the platform center (local).
    PlatformDistance,
}

impl IndexId {
    pub const ALL: [IndexId; 10] = [
        IndexId::MachiningDimension,
        IndexId::Chips,
        IndexId::Flexibility,
        IndexId::Hardness,
        IndexId::Roughness,
        IndexId::AdditiveDimension,
        IndexId::Volume,
        IndexId::Skin,
        IndexId::Height,
        IndexId::PlatformDistance,
    ];

    pub fn process(self) -> Process {
        use IndexId::*;
        match self {
            MachiningDimension | Chips | Flexibility | Hardness | Roughness => Process::Machining,
            _ => Process::Additive,
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, IndexId::Flexibility | IndexId::Height | IndexId::PlatformDistance)
    }

    /// Letter inside `C(.)`.
    pub fn symbol(self) -> &'static str {
        use IndexId::*;
        match self {
            MachiningDimension | AdditiveDimension => "d",
            Chips => "c",
            Flexibility => "f",
            Hardness => "m",
            Roughness => "r",
            Volume => "v",
            Skin => "s",
            Height => "h",
            PlatformDistance => "rho",
        }
    }

    /// Key such as `C(f)-`.
    pub fn key(self) -> String {
        format!("C({}){}", self.symbol(), self.process().sign())
    }

    /// Key of the maximum over a local field, e.g. `C(f)max-`.
    pub fn max_key(self) -> String {
        format!("C({})max{}", self.symbol(), self.process().sign())
    }

    /// Key of the volume-weighted mean of a local field, e.g. `C(f)mean-`.
    pub fn mean_key(self) -> String {
        format!("C({})mean{}", self.symbol(), self.process().sign())
    }

    pub fn from_key(key: &str) -> Option<IndexId> {
        IndexId::ALL.into_iter().find(|id| id.key() == key)
    }

    /// Short file-name stem, e.g. `cf`.
    pub fn stem(self) -> String {
        format!("c{}", self.symbol())
    }
}

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Statistic a scalar key denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScalarKind {
    Global,
    Max,
    Mean,
}

/// Splits a scalar key (`C(d)-`, `C(f)max-`, `C(f)mean-`) into its index and
/// statistic.
pub fn parse_scalar_key(key: &str) -> Option<(IndexId, ScalarKind)> {
    IndexId::ALL.into_iter().find_map(|id| {
        if key == id.key() {
            Some((id, ScalarKind::Global))
        } else if key == id.max_key() {
            Some((id, ScalarKind::Max))
        } else if key == id.mean_key() {
            Some((id, ScalarKind::Mean))
        } else {
            None
        }
    })
}

/// Canonical reporting order for scalar keys; unknown keys sort last.
pub fn scalar_key_order(key: &str) -> (usize, ScalarKind, String) {
    match parse_scalar_key(key) {
        Some((id, kind)) => (id as usize, kind, String::new()),
        None => (usize::MAX, ScalarKind::Global, key.to_string()),
    }
}

/// Per-grey-leaf values of one local index, aligned with
/// [`Octree::grey_leaves`](crate::spatial::Octree::grey_leaves).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIndexField {
    pub id: IndexId,
    pub values: Vec<f64>,
    /// Part volume of each leaf (mm³), the weights of the mean.
    pub volumes: Vec<f64>,
}

impl LocalIndexField {
    pub fn new(id: IndexId, values: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if values.len() != volumes.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: volumes.len(),
            });
        }
        Ok(Self { id, values, volumes })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Result<f64> {
        local_max(&self.values)
    }

    pub fn mean(&self) -> Result<f64> {
        local_mean(&self.values, &self.volumes)
    }
}
