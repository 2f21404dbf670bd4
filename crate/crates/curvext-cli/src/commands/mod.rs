//! One module per subcommand. Each parses its own config type and returns a
//! [`Report`](crate::report::Report) without touching the file system.

pub mod appendix;
pub mod cap_metric;
pub mod compare;
pub mod decompose;
pub mod diagnose;
pub mod foschi;
pub mod search;
pub mod triple;
pub mod xi_scan;

/// Options shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Also emit sampled fields (plane fields or arc functions) as CSV.
    pub dump_fields: bool,
}
