//! JSON bodies exchanged by the navigation service and its clients.

use serde::{Deserialize, Serialize};

use crate::nav::NavEvent;
use crate::sonifier::{concept_of, Audience};
use crate::uml::{ClassModel, ElementRef, Position};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    #[serde(default)]
    pub audience: Option<Audience>,
    /// Name of the served model; checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Name of the served catalogue; checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalogue: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResponse {
    #[serde(flatten)]
    pub event: NavEvent,
    pub cue_url: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub id: String,
    pub audience: Audience,
    pub focus: ElementRef,
    pub focus_id: String,
    pub breadcrumb: Vec<String>,
    /// Element ids visited, oldest first.
    pub history: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session: SessionInfo,
    pub event: MoveResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: String,
    pub concept: String,
    pub name: String,
    pub position: Position,
    pub depth: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipView {
    pub id: String,
    pub concept: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelView {
    pub name: String,
    pub roots: Vec<NodeView>,
    pub relationships: Vec<RelationshipView>,
}

fn node(model: &ClassModel, e: ElementRef) -> NodeView {
    NodeView {
        id: model.element_id(e),
        concept: concept_of(model, e).to_string(),
        name: model.display_name(e),
        position: model.anchor(e),
        depth: model.depth(e),
        children: model.children(e).into_iter().map(|c| node(model, c)).collect(),
    }
}

pub fn model_view(model: &ClassModel) -> ModelView {
    let class_id = |c: usize| model.element_id(ElementRef::Classifier { index: c });
    ModelView {
        name: model.name.clone(),
        roots: model.root_elements().into_iter().map(|e| node(model, e)).collect(),
        relationships: model
            .relationships
            .iter()
            .enumerate()
            .map(|(index, r)| {
                let e = ElementRef::Relationship { index };
                RelationshipView {
                    id: model.element_id(e),
                    concept: concept_of(model, e).to_string(),
                    source: class_id(r.source),
                    target: class_id(r.target),
                    via: r.assoc_class.map(class_id),
                    label: r.label.clone(),
                    position: model.anchor(e),
                }
            })
            .collect(),
    }
}
