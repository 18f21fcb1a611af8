//! Current response of the electron gas and the current wave radiated by a decaying macrospin.

pub mod chi;
pub mod diagnostics;
pub mod field;
pub mod green;

pub use chi::{chi, chi_radial, kernel_k, RadialIntegrals, ResponseEvaluation};
pub use field::{
    current_field, spin_spectrum, CurrentFrame, CurrentSynthesis, FieldOptions, FrequencyGrid, PolarGrid,
    SpinSpectrum, SpiralSetup,
};
pub use green::{
    g_complex, g_prime, green_exact, green_smallq, kubo_coefficient, landau_chi, ResponseMode, ResponsePart,
};
