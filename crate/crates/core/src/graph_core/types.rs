use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Vertex identifier. Allocated sequentially and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

/// Edge identifier. Allocated sequentially and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LayerId(pub u16);

/// Discrete simulation time in unitless ticks.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Timestamp(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {}", self.0)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub id: LayerId,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    User,
    Avatar,
    Server,
    Router,
    Device,
    StorageNode,
    ContentItem,
    Admin,
    KeyEntity,
    UiElement,
    Sensor,
    Actuator,
    Task,
}

impl Role {
    pub const ALL: [Role; 13] = [
        Role::User,
        Role::Avatar,
        Role::Server,
        Role::Router,
        Role::Device,
        Role::StorageNode,
        Role::ContentItem,
        Role::Admin,
        Role::KeyEntity,
        Role::UiElement,
        Role::Sensor,
        Role::Actuator,
        Role::Task,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Avatar => "avatar",
            Role::Server => "server",
            Role::Router => "router",
            Role::Device => "device",
            Role::StorageNode => "storage-node",
            Role::ContentItem => "content-item",
            Role::Admin => "admin",
            Role::KeyEntity => "key-entity",
            Role::UiElement => "ui-element",
            Role::Sensor => "sensor",
            Role::Actuator => "actuator",
            Role::Task => "task",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scalar attribute value attached to a vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Float(f64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub roles: BTreeSet<Role>,
    pub layers: BTreeSet<LayerId>,
    #[serde(default)]
    pub attrs: BTreeMap<String, AttrValue>,
    pub t_start: Timestamp,
    /// `None` while the vertex is still active.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<Timestamp>,
}

impl VertexRecord {
    /// Half-open validity test `t_start <= t < t_end`.
    pub fn active_at(&self, t: Timestamp) -> bool {
        active_in(self.t_start, self.t_end, t)
    }

    pub fn has_any_role(&self, roles: &BTreeSet<Role>) -> bool {
        self.roles.iter().any(|r| roles.contains(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
    pub layer_src: LayerId,
    pub layer_dst: LayerId,
    pub directed: bool,
    pub weight: f64,
    pub relation: String,
    pub t_start: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<Timestamp>,
}

impl EdgeRecord {
    pub fn active_at(&self, t: Timestamp) -> bool {
        active_in(self.t_start, self.t_end, t)
    }

    pub fn is_intra_layer(&self) -> bool {
        self.layer_src == self.layer_dst
    }
}

fn active_in(start: Timestamp, end: Option<Timestamp>, t: Timestamp) -> bool {
    start <= t && end.map_or(true, |end| t < end)
}
