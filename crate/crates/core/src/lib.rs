//! Stratonovich-Weyl kernels for N-level quantum systems.
//!
//! A kernel `Δ` is an `N×N` Hermitian matrix with `tr Δ = 1` and `tr Δ² = N`.
//! Pairing it with a density matrix gives the Wigner function
//! `W_ρ(Ω) = tr[ρ Δ(Ω)]`. Unitarily inequivalent kernels are labelled by a
//! point on a unit `(N-2)`-sphere cut down to a spherical simplex by the
//! descending order of the kernel spectrum.
//!
//! Module map:
//!
//! * [`algebra`]: Hermitian matrices, the generalized Gell-Mann basis,
//!   spectral decomposition and Haar sampling.
//! * [`moduli`]: spherical-angle parametrization of the moduli space.
//! * [`kernels`]: kernel construction, master equations, closed-form families.
//! * [`orbits`]: coadjoint-orbit strata, Gram matrices and orbit cones.
//! * [`wigner`]: density matrices, Bloch vectors, Wigner values and
//!   Monte-Carlo checks of the correspondence.

pub mod algebra;
pub mod error;
pub mod kernels;
pub mod moduli;
pub mod orbits;
pub mod wigner;

pub use algebra::{
    build_basis, sample_haar_unitaries, sample_haar_unitary, spectral_decompose, GellMannBasis, HermitianMatrix,
    SpectralDecomposition, Unitary,
};
pub use error::{Error, Result};
pub use kernels::{
    build_kernel, detect_singular, family_spectrum, lucas_traces, verify_master, KernelFamily,
    MasterReport, SWKernel, SingularReport,
};
pub use moduli::{
    angles_to_mu, check_ordering, classify_region, mu_to_spectrum, sample_moduli_grid,
    ModuliPoint, OrderedSpectrum, RegionMembership, Subregion,
};
pub use orbits::{classify_stratum, cone_membership, gram_matrix, GramMatrix, OrbitCone, Stratum};
pub use wigner::{
    cartan_frame, check_sw_postulates, random_density_with, random_pure_with, reconstruct_mc,
    to_bloch, weingarten_check, weingarten_moment, wigner_cartan, wigner_value, BlochVector,
    DensityMatrix, PostulateCheck, PostulateReport, Reconstruction, WeingartenReport,
    WignerValue,
};

pub use num_complex::Complex64;
