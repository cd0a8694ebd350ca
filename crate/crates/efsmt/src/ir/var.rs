use super::sort::Sort;

/// Dense integer variable identifier. Names are metadata carried by the
/// declaration; all structural operations work on ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl std::fmt::Display for VarId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A declared variable: id, human-readable name, and sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub id: VarId,
    pub name: String,
    pub sort: Sort,
}

impl VarDecl {
    pub fn new(id: VarId, name: impl Into<String>, sort: Sort) -> Self {
        VarDecl {
            id,
            name: name.into(),
            sort,
        }
    }
}
