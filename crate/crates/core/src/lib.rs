//! Exact and stochastic solvers for metastable spin dynamics on small tori:
//! Ising/Potts Hamiltonians, Metropolis-type kernels (reversible and not),
//! potential-theoretic quantities (capacities, equilibrium potentials,
//! trace processes), energy-landscape combinatorics and kinetic Monte Carlo.

pub mod error;
pub mod lattice;
pub mod dynamics;
mod linalg;
pub mod chain;
pub mod ladder;
pub mod landscape;
pub mod fullspace;
pub mod constants;
pub mod kmc;
pub mod testfn;
pub mod taxonomy;
pub mod testfn_small;
