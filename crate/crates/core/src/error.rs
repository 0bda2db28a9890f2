use crate::grid::Node;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input outside an operation's domain.
    #[error("{0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("policy `{policy}` does not apply to {kind} grids in {duplex}-duplex mode")]
    PolicyMismatch { policy: String, kind: String, duplex: String },

    /// The policy produced dispatches that break the port model. This is a bug in the policy.
    #[error("step {step}: policy conflict: {detail}")]
    PolicyConflict { step: u64, detail: String },

    #[error("flow infeasible ({detail}); deficient set: {}", fmt_nodes(.deficiency))]
    Infeasible { detail: String, deficiency: Vec<Node> },

    #[error("exact coloring refuses {edges} edges (limit {limit}); use the greedy heuristic")]
    TooLarge { edges: usize, limit: usize },

    #[error("expression `{expr}`: {msg}")]
    Expr { expr: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_nodes(nodes: &[Node]) -> String {
    let shown: Vec<String> = nodes.iter().take(12).map(|n| format!("({},{},{})", n.u, n.v, n.site)).collect();
    if nodes.len() > 12 {
        format!("[{} ... +{}]", shown.join(" "), nodes.len() - 12)
    } else {
        format!("[{}]", shown.join(" "))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
