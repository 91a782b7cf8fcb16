use std::fmt;

use serde::{Deserialize, Serialize};

/// Layout coordinates in abstract units, `[0, 100] x [0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

pub const LAYOUT_EXTENT: f64 = 100.0;

impl Position {
    pub fn new(x: f64, y: f64) -> Option<Self> {
        let ok = |v: f64| v.is_finite() && (0.0..=LAYOUT_EXTENT).contains(&v);
        (ok(x) && ok(y)).then_some(Self { x, y })
    }

    pub fn center() -> Self {
        Self { x: LAYOUT_EXTENT / 2.0, y: LAYOUT_EXTENT / 2.0 }
    }

    pub fn midpoint(a: Position, b: Position) -> Self {
        Self { x: 0.5 * (a.x + b.x), y: 0.5 * (a.y + b.y) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationshipKind {
    Association,
    Inheritance,
    Realization,
    Dependency,
    Aggregation,
    Composition,
    AssociationClass,
}

impl RelationshipKind {
    pub const ALL: [RelationshipKind; 7] = [
        RelationshipKind::Association,
        RelationshipKind::Inheritance,
        RelationshipKind::Realization,
        RelationshipKind::Dependency,
        RelationshipKind::Aggregation,
        RelationshipKind::Composition,
        RelationshipKind::AssociationClass,
    ];

    /// Edge token in the textual grammar.
    pub fn arrow(self) -> &'static str {
        match self {
            RelationshipKind::Association => "-->",
            RelationshipKind::Inheritance => "<|--",
            RelationshipKind::Realization => "<|..",
            RelationshipKind::Dependency => "..>",
            RelationshipKind::Aggregation => "o--",
            RelationshipKind::Composition => "*--",
            RelationshipKind::AssociationClass => "..",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RelationshipKind::Association => "association",
            RelationshipKind::Inheritance => "inheritance",
            RelationshipKind::Realization => "realization",
            RelationshipKind::Dependency => "dependency",
            RelationshipKind::Aggregation => "aggregation",
            RelationshipKind::Composition => "composition",
            RelationshipKind::AssociationClass => "association class",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    /// Raw text between the parentheses.
    pub params: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub name: String,
    pub kind: ClassifierKind,
    pub attributes: Vec<String>,
    pub operations: Vec<Operation>,
    pub package: Option<usize>,
    pub position: Option<Position>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "node", content = "index", rename_all = "snake_case")]
pub enum NodeRef {
    Package(usize),
    Classifier(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Package {
    pub name: String,
    pub parent: Option<usize>,
    /// Sub-packages and classifiers in declaration order.
    pub children: Vec<NodeRef>,
}

/// Child-to-parent convention for inheritance and realization: `source` is
/// the subclass or implementor, `target` the parent or interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relationship {
    pub kind: RelationshipKind,
    pub source: usize,
    pub target: usize,
    pub assoc_class: Option<usize>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    pub name: String,
    pub packages: Vec<Package>,
    pub classifiers: Vec<Classifier>,
    pub relationships: Vec<Relationship>,
    /// Top-level packages and classifiers in declaration order.
    pub roots: Vec<NodeRef>,
}

/// Addresses one element of a [`ClassModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "element", rename_all = "snake_case")]
pub enum ElementRef {
    Package { index: usize },
    Classifier { index: usize },
    Attribute { classifier: usize, index: usize },
    Operation { classifier: usize, index: usize },
    Relationship { index: usize },
}

impl From<NodeRef> for ElementRef {
    fn from(n: NodeRef) -> Self {
        match n {
            NodeRef::Package(index) => ElementRef::Package { index },
            NodeRef::Classifier(index) => ElementRef::Classifier { index },
        }
    }
}

impl ClassModel {
    pub fn empty(name: impl Into<String>) -> Self {
        Self { name: name.into(), packages: vec![], classifiers: vec![], relationships: vec![], roots: vec![] }
    }

    /// Dotted package path, e.g. `library.catalog`.
    pub fn package_path(&self, index: usize) -> String {
        let mut names = vec![self.packages[index].name.as_str()];
        let mut cur = self.packages[index].parent;
        while let Some(p) = cur {
            names.push(&self.packages[p].name);
            cur = self.packages[p].parent;
        }
        names.reverse();
        names.join(".")
    }

    pub fn qualified_name(&self, classifier: usize) -> String {
        let c = &self.classifiers[classifier];
        match c.package {
            Some(p) => format!("{}.{}", self.package_path(p), c.name),
            None => c.name.clone(),
        }
    }

    /// Number of packages enclosing a package (top level is 0).
    pub fn package_depth(&self, index: usize) -> u32 {
        let mut depth = 0;
        let mut cur = self.packages[index].parent;
        while let Some(p) = cur {
            depth += 1;
            cur = self.packages[p].parent;
        }
        depth
    }

    /// Number of packages enclosing a classifier.
    pub fn classifier_depth(&self, index: usize) -> u32 {
        self.classifiers[index].package.map_or(0, |p| self.package_depth(p) + 1)
    }

    pub fn element_count(&self) -> usize {
        self.packages.len()
            + self
                .classifiers
                .iter()
                .map(|c| 1 + c.attributes.len() + c.operations.len())
                .sum::<usize>()
            + self.relationships.len()
    }

    pub fn contains(&self, e: ElementRef) -> bool {
        match e {
            ElementRef::Package { index } => index < self.packages.len(),
            ElementRef::Classifier { index } => index < self.classifiers.len(),
            ElementRef::Attribute { classifier, index } => {
                self.classifiers.get(classifier).is_some_and(|c| index < c.attributes.len())
            }
            ElementRef::Operation { classifier, index } => {
                self.classifiers.get(classifier).is_some_and(|c| index < c.operations.len())
            }
            ElementRef::Relationship { index } => index < self.relationships.len(),
        }
    }

    /// Structural children: package contents, or a classifier's attributes
    /// followed by its operations.
    pub fn children(&self, e: ElementRef) -> Vec<ElementRef> {
        match e {
            ElementRef::Package { index } => self.packages[index].children.iter().map(|&n| n.into()).collect(),
            ElementRef::Classifier { index } => {
                let c = &self.classifiers[index];
                (0..c.attributes.len())
                    .map(|i| ElementRef::Attribute { classifier: index, index: i })
                    .chain((0..c.operations.len()).map(|i| ElementRef::Operation { classifier: index, index: i }))
                    .collect()
            }
            _ => vec![],
        }
    }

    pub fn root_elements(&self) -> Vec<ElementRef> {
        self.roots.iter().map(|&n| n.into()).collect()
    }

    /// Structural parent; `None` for top-level nodes and relationships.
    pub fn parent(&self, e: ElementRef) -> Option<ElementRef> {
        match e {
            ElementRef::Package { index } => self.packages[index].parent.map(|p| ElementRef::Package { index: p }),
            ElementRef::Classifier { index } => {
                self.classifiers[index].package.map(|p| ElementRef::Package { index: p })
            }
            ElementRef::Attribute { classifier, .. } | ElementRef::Operation { classifier, .. } => {
                Some(ElementRef::Classifier { index: classifier })
            }
            ElementRef::Relationship { .. } => None,
        }
    }

    /// The sibling list `e` belongs to, in declaration order.
    pub fn siblings(&self, e: ElementRef) -> Vec<ElementRef> {
        match e {
            ElementRef::Relationship { .. } => {
                (0..self.relationships.len()).map(|index| ElementRef::Relationship { index }).collect()
            }
            _ => match self.parent(e) {
                Some(p) => self.children(p),
                None => self.root_elements(),
            },
        }
    }

    /// Relationships touching a classifier (as source, target or association
    /// class), in declaration order.
    pub fn relationships_of(&self, classifier: usize) -> Vec<usize> {
        self.relationships
            .iter()
            .enumerate()
            .filter(|(_, r)| r.source == classifier || r.target == classifier || r.assoc_class == Some(classifier))
            .map(|(i, _)| i)
            .collect()
    }

    /// Every element in walkthrough order: depth-first over the package
    /// tree (each classifier followed by its members), then relationships.
    pub fn elements(&self) -> Vec<ElementRef> {
        fn walk(model: &ClassModel, e: ElementRef, out: &mut Vec<ElementRef>) {
            out.push(e);
            for c in model.children(e) {
                walk(model, c, out);
            }
        }
        let mut out = Vec::with_capacity(self.element_count());
        for r in self.root_elements() {
            walk(self, r, &mut out);
        }
        out.extend((0..self.relationships.len()).map(|index| ElementRef::Relationship { index }));
        out
    }

    /// Layout position used to place an element's cue. Members sit at their
    /// classifier, packages at the centroid of the classifiers they contain
    /// (center when empty), relationships at the midpoint of their endpoints.
    /// Unpositioned classifiers fall back to the center.
    pub fn anchor(&self, e: ElementRef) -> Position {
        let pos = |c: usize| self.classifiers[c].position.unwrap_or_else(Position::center);
        match e {
            ElementRef::Classifier { index }
            | ElementRef::Attribute { classifier: index, .. }
            | ElementRef::Operation { classifier: index, .. } => pos(index),
            ElementRef::Relationship { index } => {
                let r = &self.relationships[index];
                Position::midpoint(pos(r.source), pos(r.target))
            }
            ElementRef::Package { index } => {
                let members: Vec<usize> = (0..self.classifiers.len())
                    .filter(|&c| {
                        let mut cur = self.classifiers[c].package;
                        while let Some(p) = cur {
                            if p == index {
                                return true;
                            }
                            cur = self.packages[p].parent;
                        }
                        false
                    })
                    .collect();
                if members.is_empty() {
                    return Position::center();
                }
                let n = members.len() as f64;
                let (sx, sy) = members.iter().fold((0.0, 0.0), |(x, y), &c| (x + pos(c).x, y + pos(c).y));
                Position { x: sx / n, y: sy / n }
            }
        }
    }

    /// Package nesting used for reverberation. Relationships take the
    /// shallower of their endpoints.
    pub fn depth(&self, e: ElementRef) -> u32 {
        match e {
            ElementRef::Package { index } => self.package_depth(index),
            ElementRef::Classifier { index }
            | ElementRef::Attribute { classifier: index, .. }
            | ElementRef::Operation { classifier: index, .. } => self.classifier_depth(index),
            ElementRef::Relationship { index } => {
                let r = &self.relationships[index];
                self.classifier_depth(r.source).min(self.classifier_depth(r.target))
            }
        }
    }

    /// Stable textual id, e.g. `class:library.catalog.Book`.
    pub fn element_id(&self, e: ElementRef) -> String {
        match e {
            ElementRef::Package { index } => format!("package:{}", self.package_path(index)),
            ElementRef::Classifier { index } => format!("class:{}", self.qualified_name(index)),
            ElementRef::Attribute { classifier, index } => format!(
                "attribute:{}.{}",
                self.qualified_name(classifier),
                self.classifiers[classifier].attributes[index]
            ),
            ElementRef::Operation { classifier, index } => format!(
                "operation:{}.{}",
                self.qualified_name(classifier),
                self.classifiers[classifier].operations[index].name
            ),
            ElementRef::Relationship { index } => format!("relationship:{index}"),
        }
    }

    /// Resolves an element id, or a bare / qualified classifier name.
    pub fn find_element(&self, id: &str) -> Option<ElementRef> {
        if let Some(e) = self.elements().into_iter().find(|&e| self.element_id(e) == id) {
            return Some(e);
        }
        if id.contains(':') {
            return None;
        }
        let matches: Vec<usize> = (0..self.classifiers.len())
            .filter(|&c| self.qualified_name(c) == id || self.classifiers[c].name == id)
            .collect();
        match matches.as_slice() {
            [one] => Some(ElementRef::Classifier { index: *one }),
            _ => None,
        }
    }

    /// Human-readable name of an element.
    pub fn display_name(&self, e: ElementRef) -> String {
        match e {
            ElementRef::Package { index } => self.packages[index].name.clone(),
            ElementRef::Classifier { index } => self.classifiers[index].name.clone(),
            ElementRef::Attribute { classifier, index } => self.classifiers[classifier].attributes[index].clone(),
            ElementRef::Operation { classifier, index } => {
                format!("{}()", self.classifiers[classifier].operations[index].name)
            }
            ElementRef::Relationship { index } => {
                let r = &self.relationships[index];
                let mut s = format!(
                    "{} from {} to {}",
                    r.kind.label(),
                    self.classifiers[r.source].name,
                    self.classifiers[r.target].name
                );
                if let Some(c) = r.assoc_class {
                    s.push_str(&format!(" via {}", self.classifiers[c].name));
                }
                s
            }
        }
    }

    /// Names from the top level down to `e`.
    pub fn breadcrumb(&self, e: ElementRef) -> Vec<String> {
        let mut trail = vec![self.display_name(e)];
        let mut cur = self.parent(e);
        while let Some(p) = cur {
            trail.push(self.display_name(p));
            cur = self.parent(p);
        }
        trail.push(self.name.clone());
        trail.reverse();
        trail
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Class => "class",
            ClassifierKind::Interface => "interface",
        })
    }
}
