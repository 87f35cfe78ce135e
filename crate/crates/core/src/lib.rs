//! Assistive planning for a weekly pill-sorting task.
//!
//! The crate keeps a symbolic model of the task and of the user's stated
//! preferences, plans the remaining pill moves with a small hierarchical task
//! network, picks a graded hint from a need model and answers "why?" with a
//! provenance-tagged chain of facts.

pub mod bundle;
pub mod explain;
pub mod hint;
pub mod knowledge;
pub mod planner;
pub mod rules;
pub mod scenario;
pub mod session;

pub use explain::{Explainer, Explanation};
pub use hint::{AssistanceLevel, AssistiveAction, NeedConfig, NeedModel};
pub use knowledge::{Bindings, Fact, FactStore, Source, Term};
pub use planner::{Operator, Plan};
pub use scenario::{TaskState, UserAction};
pub use session::{Session, SessionError};
