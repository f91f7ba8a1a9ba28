pub mod automaton;
pub mod canonical;
pub mod corpus;
pub mod counting;
pub mod decomposition;
pub mod error;
pub mod graph_aut;
pub mod io;
pub mod partition;
pub mod perm;
pub mod rule;
pub mod subgroup;
pub mod transducer;

pub use automaton::Automaton;
pub use canonical::CanonicalKey;
pub use error::{Error, Result};
pub use partition::StatePartition;
pub use perm::Perm;
pub use transducer::{ElementOrder, OrderCaps, Transducer};
pub use rule::LocalRule;
pub use graph_aut::{Digraph, DigraphAutomorphism};
pub use decomposition::{DecompositionStep, Factorization};
pub use subgroup::{SubgroupAutomaton, SubgroupClosure};
