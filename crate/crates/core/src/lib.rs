pub mod construction;
pub mod error;
pub mod general;
pub mod simple;
pub mod space;
pub mod oracle;
pub mod render;
