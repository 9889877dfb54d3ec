/*
Copyright 2026 The uvdose Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PlannerError;
use crate::geometry::RiskClass;

/// Frequently touched object classes.
pub const DEFAULT_HOTSPOT_LABELS: [&str; 9] = [
    "armless office chair",
    "examination table",
    "side rail",
    "medical machine",
    "switch",
    "sink",
    "table",
    "door handle",
    "bed rail",
];

/// Semantic label to risk class. Unknown labels are non-hotspot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RiskRegistry {
    classes: BTreeMap<String, RiskClass>,
}

impl Default for RiskRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        for label in DEFAULT_HOTSPOT_LABELS {
            r.insert(label, RiskClass::Hotspot);
        }
        r
    }
}

/// Lower-case, with `_` and `-` read as spaces and runs of spaces collapsed.
pub fn normalize_label(label: &str) -> String {
    label
        .to_lowercase()
        .replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

impl RiskRegistry {
    pub fn empty() -> Self {
        Self {
            classes: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, label: &str, class: RiskClass) {
        self.classes.insert(normalize_label(label), class);
    }

    pub fn classify(&self, label: &str) -> RiskClass {
        self.classes
            .get(&normalize_label(label))
            .copied()
            .unwrap_or(RiskClass::NonHotspot)
    }

    pub fn classify_all<S: AsRef<str>>(&self, labels: &[S]) -> Vec<RiskClass> {
        labels.iter().map(|l| self.classify(l.as_ref())).collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Parses `{"label": "hotspot" | "nonhotspot", ...}`.
    pub fn from_json(text: &str) -> Result<Self, PlannerError> {
        let raw: BTreeMap<String, RiskClass> =
            serde_json::from_str(text).map_err(|e| PlannerError::Registry(e.to_string()))?;
        let mut r = Self::empty();
        for (label, class) in raw {
            let key = normalize_label(&label);
            if r.classes.insert(key.clone(), class).is_some() {
                return Err(PlannerError::Registry(format!("duplicate label {key:?}")));
            }
        }
        Ok(r)
    }

    /// Entries of `other` override this registry's.
    pub fn merge(&mut self, other: &RiskRegistry) {
        for (k, v) in &other.classes {
            self.classes.insert(k.clone(), *v);
        }
    }
}
