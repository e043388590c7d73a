pub mod datasets;
pub mod oracle;
pub mod tables;
