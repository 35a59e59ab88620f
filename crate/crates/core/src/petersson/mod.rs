//! Cusp combinatorics of `Γ0(N)`, volumes, truncated coefficient sums and a
//! numerical audit of the Petersson-norm inequality
//! `‖f‖² <= I_f(Y)/[SL_2 : Γ0(N)] + Vol(ℱ_N ∩ {y < Y})·‖f‖_∞²/[SL_2 : Γ0(N)]`.

pub mod cusps;
pub mod forms;
pub mod norm;

pub use cusps::{
    cusp_count, cusp_tail_volume, cusp_widths_brute_force, cusps, dim_bound, ford_column_above, ford_floor,
    index_gamma0, psi_vol, CuspClass, TailVolume, VOLUME_SEED,
};
pub use forms::{corpus, i_f, s_f, FormData, StripIntegral};
pub use norm::{
    coefficient_shape, coset_representatives, measure, petersson_numeric, sup_norm_numeric, theorem_audit,
    AuditReport, CoefficientShape, Measured, NormValue, SupNorm,
};
