use std::fmt;
use std::sync::LazyLock;

use parking_lot::RwLock;

use super::ExprError;

/// What a symbol stands for. Fixed at creation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    BaseCoordinate,
    FJet,
    GroupJet,
    Formal,
}

/// Interned symbol. The id doubles as the variable's rank in the monomial
/// order: earlier symbols sort higher.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub(crate) u32);

struct Table {
    names: Vec<(String, SymbolKind)>,
    index: std::collections::HashMap<String, u32>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| {
    let mut t = Table {
        names: Vec::new(),
        index: Default::default(),
    };
    for n in ["x", "u", "p", "q", "r"] {
        t.index.insert(n.to_string(), t.names.len() as u32);
        t.names.push((n.to_string(), SymbolKind::BaseCoordinate));
    }
    RwLock::new(t)
});

impl Symbol {
    pub const X: Symbol = Symbol(0);
    pub const U: Symbol = Symbol(1);
    pub const P: Symbol = Symbol(2);
    pub const Q: Symbol = Symbol(3);
    pub const R: Symbol = Symbol(4);

    /// Intern `name`, or return the existing symbol if it was created with the same kind.
    pub fn new(name: &str, kind: SymbolKind) -> Result<Symbol, ExprError> {
        if let Some(s) = Self::lookup(name) {
            let k = s.kind();
            return if k == kind {
                Ok(s)
            } else {
                Err(ExprError::SymbolKindConflict {
                    name: name.to_string(),
                    existing: k,
                    requested: kind,
                })
            };
        }
        let mut t = TABLE.write();
        // another writer may have raced us between the read and the write lock
        if let Some(&id) = t.index.get(name) {
            let k = t.names[id as usize].1;
            return if k == kind {
                Ok(Symbol(id))
            } else {
                Err(ExprError::SymbolKindConflict {
                    name: name.to_string(),
                    existing: k,
                    requested: kind,
                })
            };
        }
        let id = t.names.len() as u32;
        t.names.push((name.to_string(), kind));
        t.index.insert(name.to_string(), id);
        Ok(Symbol(id))
    }

    /// Like [`Symbol::new`] but panics on a kind conflict. For internal names
    /// whose kind is fixed by the library.
    pub fn intern(name: &str, kind: SymbolKind) -> Symbol {
        Self::new(name, kind).expect("internal symbol kind conflict")
    }

    pub fn lookup(name: &str) -> Option<Symbol> {
        TABLE.read().index.get(name).map(|&i| Symbol(i))
    }

    pub fn name(self) -> String {
        TABLE.read().names[self.0 as usize].0.clone()
    }

    pub fn kind(self) -> SymbolKind {
        TABLE.read().names[self.0 as usize].1
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// The four coordinates an ODE right-hand side may use.
    pub fn base() -> [Symbol; 4] {
        [Self::X, Self::U, Self::P, Self::Q]
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
