pub mod characteristic;
pub mod check;
pub mod cps;
pub mod frame;
pub mod heyting;
pub mod machine;
pub mod mca;
pub mod reduce;
pub mod term;
pub mod topology;
pub mod topos;
pub mod workbench;
pub mod tripos;
