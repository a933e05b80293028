#pragma once

#include <string>
#include <vector>

#include "mcnls/grid.hpp"
#include "mcnls/propagator.hpp"
#include "mcnls/symmetry.hpp"

namespace mcnls {

struct ProfileEntry {
    Field phi;                 ///< bubble content in its own frame
    EnlargedElement fit;
    double captured_mass = 0.0;
    double template_correlation = 0.0;  ///< |<g T, r>|^2 at the accepted fit
    std::string template_name;
};

struct ProfileDecomposition {
    std::vector<ProfileEntry> profiles;
    Field remainder;
    double total_mass = 0.0;          ///< M(u) of the decomposed field
    double decoupling_defect = 0.0;   ///< |M(u) - sum M(phi) - M(w)|
    double remainder_linear_S = 0.0;  ///< S of the free flow of w over the window
};

struct ExtractOptions {
    /// Unit-mass centered dictionary entries; an empty list defaults to one
    /// Gaussian.  Push the computed ground state here when available.
    std::vector<Field> templates;
    std::vector<std::string> template_names;

    double t_ref = 4.0;         ///< t0 search half-window and free-S window
    double t0_step = 0.25;      ///< coarse t0 grid step
    int lambda_exp_min = -4;    ///< dyadic lambda search range 2^[min,max]
    int lambda_exp_max = 4;
    double xi_halfrange = -1.0; ///< coarse xi0 half-range (default nyquist/2)
    double window_radius = 6.0; ///< bubble window: flat out to this radius
    double window_rolloff = 2.0;
    int refine_rounds = 3;
    double s_quad_dt = 0.05;    ///< snapshot cadence for S quadratures
};

/// Greedy bubble extraction: search the enlarged group for the transported
/// dictionary element best correlated with the residual, pull the residual
/// back to the bubble frame, keep the windowed local content, subtract, and
/// repeat until max_profiles or the best capture drops below mass_floor
/// (absolute mass; pass a negative value for the 1e-3*M(u) default).
ProfileDecomposition extract_profiles(const Field& u, int max_profiles, double mass_floor,
                                      ExtractOptions opts = {});

/// Same loop with x0 = xi0 = 0 frozen; the input must be radial to 1e-6
/// (in d=1: even), otherwise an invalid_argument carrying the asymmetry is
/// thrown.
ProfileDecomposition extract_profiles_radial(const Field& u, int max_profiles, double mass_floor,
                                             ExtractOptions opts = {});

struct DecouplingReport {
    double mass_gap = 0.0;  ///< |M(u) - sum M(phi) - M(w)| / M(u)
    double S_gap = 0.0;     ///< |S(sum of bubbles) - sum S(bubble)| / sum S(bubble)
    bool flagged = false;   ///< mass_gap suspiciously large for this input
};

DecouplingReport decoupling_check(const ProfileDecomposition& dec, const Field& u,
                                  double t_ref = 4.0, double s_quad_dt = 0.05);

struct SeparationReport {
    std::vector<std::vector<double>> pairwise;  ///< symmetric, diagonal = 2
    double min_offdiag = 0.0;
    bool suspect = false;  ///< some off-diagonal pair is (near) coincident
};

SeparationReport orthogonality_report(const ProfileDecomposition& dec);

/// Orthogonal projection onto radial functions: evenization in d=1, angular
/// averaging of the bilinear interpolant in d=2.
Field radial_projection(const Field& f);

/// ||f - radial_projection(f)||_2 / ||f||_2.
double radial_asymmetry(const Field& f);

/// min over phase and translation of ||g a - b||_2 (gauge-insensitive field
/// comparison; the phase minimum is analytic, the shift is refined sub-cell).
double orbit_distance(const Field& a, const Field& b);

/// Unit-mass centered Gaussian e^{-|x|^2/2} (normalized), the default
/// dictionary entry.
Field gaussian_template(const GridPtr& grid);

}  // namespace mcnls
