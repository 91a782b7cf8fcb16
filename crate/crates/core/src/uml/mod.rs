//! UML class-diagram model, textual parser and grid layout.

mod layout;
mod model;
mod parser;

pub use layout::{assign_layout, grid_position, model_stats, ModelStats};
pub use model::*;
pub use parser::{parse_diagram, serialize_diagram, ParseError, ParseErrorKind};
