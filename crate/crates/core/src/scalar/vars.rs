//! Process-wide registry of parameter names.
//!
//! Polynomials store variables as small integer ids so that exponent
//! vectors have a stable width. `c`, `g1` and `g2` are always present with
//! ids 0, 1 and 2; any other name is appended on first use.

use std::fmt;
use std::sync::{LazyLock, RwLock};

static REGISTRY: LazyLock<RwLock<Vec<String>>> =
    LazyLock::new(|| RwLock::new(vec!["c".to_owned(), "g1".to_owned(), "g2".to_owned()]));

/// Interned parameter name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub(crate) u16);

impl Var {
    pub fn new(name: &str) -> Var {
        if let Some(v) = Var::lookup(name) {
            return v;
        }
        let mut reg = REGISTRY.write().expect("variable registry poisoned");
        if let Some(pos) = reg.iter().position(|n| n == name) {
            return Var(pos as u16);
        }
        reg.push(name.to_owned());
        Var((reg.len() - 1) as u16)
    }

    pub fn lookup(name: &str) -> Option<Var> {
        let reg = REGISTRY.read().expect("variable registry poisoned");
        reg.iter().position(|n| n == name).map(|p| Var(p as u16))
    }

    pub fn name(self) -> String {
        let reg = REGISTRY.read().expect("variable registry poisoned");
        reg[self.0 as usize].clone()
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
