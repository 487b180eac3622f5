pub mod rma;
