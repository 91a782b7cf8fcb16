use serde::{Deserialize, Serialize};

use super::model::{ClassModel, ClassifierKind, Position, RelationshipKind, LAYOUT_EXTENT};

/// Cell center for slot `k` of `n` in a row-major grid with
/// `ceil(sqrt(n))` columns spread over the layout extent.
pub fn grid_position(k: usize, n: usize) -> Position {
    let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
    let rows = n.div_ceil(cols).max(1);
    let (row, col) = (k / cols, k % cols);
    Position {
        x: (col as f64 + 0.5) * LAYOUT_EXTENT / cols as f64,
        y: (row as f64 + 0.5) * LAYOUT_EXTENT / rows as f64,
    }
}

/// Gives every unpositioned classifier a grid cell, in declaration order.
/// Explicit positions are kept, so a fully positioned model is unchanged.
pub fn assign_layout(model: &ClassModel) -> ClassModel {
    let mut out = model.clone();
    let pending: Vec<usize> = (0..out.classifiers.len()).filter(|&c| out.classifiers[c].position.is_none()).collect();
    let n = pending.len();
    for (k, c) in pending.into_iter().enumerate() {
        out.classifiers[c].position = Some(grid_position(k, n));
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelStats {
    pub classifiers: usize,
    pub classes: usize,
    pub interfaces: usize,
    pub attributes: usize,
    pub operations: usize,
    pub associations: usize,
    pub inheritances: usize,
    pub realizations: usize,
    pub dependencies: usize,
    pub aggregations: usize,
    pub compositions: usize,
    pub association_classes: usize,
    pub packages: usize,
    /// Longest chain of nested packages; 0 when there are none.
    pub max_package_depth: usize,
}

pub fn model_stats(model: &ClassModel) -> ModelStats {
    let mut s = ModelStats {
        classifiers: model.classifiers.len(),
        packages: model.packages.len(),
        ..Default::default()
    };
    for c in &model.classifiers {
        match c.kind {
            ClassifierKind::Class => s.classes += 1,
            ClassifierKind::Interface => s.interfaces += 1,
        }
        s.attributes += c.attributes.len();
        s.operations += c.operations.len();
    }
    for r in &model.relationships {
        let slot = match r.kind {
            RelationshipKind::Association => &mut s.associations,
            RelationshipKind::Inheritance => &mut s.inheritances,
            RelationshipKind::Realization => &mut s.realizations,
            RelationshipKind::Dependency => &mut s.dependencies,
            RelationshipKind::Aggregation => &mut s.aggregations,
            RelationshipKind::Composition => &mut s.compositions,
            RelationshipKind::AssociationClass => &mut s.association_classes,
        };
        *slot += 1;
    }
    s.max_package_depth = (0..model.packages.len())
        .map(|p| model.package_depth(p) as usize + 1)
        .max()
        .unwrap_or(0);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uml::parse_diagram;

    #[test]
    fn single_classifier_is_centered() {
        let m = assign_layout(&parse_diagram("class A").unwrap());
        assert_eq!(m.classifiers[0].position, Some(Position { x: 50.0, y: 50.0 }));
    }

    #[test]
    fn four_classifiers_fill_a_two_by_two_grid() {
        let m = assign_layout(&parse_diagram("class A; class B; class C; class D").unwrap());
        let got: Vec<(f64, f64)> = m.classifiers.iter().map(|c| c.position.map(|p| (p.x, p.y)).unwrap()).collect();
        assert_eq!(got, vec![(25.0, 25.0), (75.0, 25.0), (25.0, 75.0), (75.0, 75.0)]);
    }

    #[test]
    fn positioned_model_is_unchanged_and_layout_idempotent() {
        let m = parse_diagram("class A @ (1, 2); class B @ (3, 4)").unwrap();
        assert_eq!(assign_layout(&m), m);
        let partial = parse_diagram("class A @ (1, 2); class B; class C").unwrap();
        let once = assign_layout(&partial);
        assert_eq!(assign_layout(&once), once);
        assert_eq!(once.classifiers[0].position, Position::new(1.0, 2.0));
    }

    #[test]
    fn empty_model_stats_are_zero() {
        assert_eq!(model_stats(&parse_diagram("").unwrap()), ModelStats::default());
    }
}
