#pragma once

#include <array>
#include <cmath>

#include "mcnls/grid.hpp"
#include "mcnls/propagator.hpp"

namespace mcnls {

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Reduce an angle to [0, 2 pi).
double wrap_angle(double theta);

/// Element g = (theta, xi0, x0, lambda) acting unitarily on L^2 by
///   g f(x) = lambda^{-d/2} e^{i theta} e^{i x.xi0} f((x - x0)/lambda).
struct GroupElement {
    double theta = 0.0;
    Vec xi0{0.0, 0.0};
    Vec x0{0.0, 0.0};
    double lambda = 1.0;
};

GroupElement identity_element();
GroupElement phase_element(double theta);
GroupElement modulation_element(const Vec& xi0);
GroupElement translation_element(const Vec& x0);
GroupElement dilation_element(double lambda);

/// Group law:
///   g g' = (theta + theta' - x0.xi0'/lambda, xi0 + xi0'/lambda,
///           x0 + lambda x0', lambda lambda').
GroupElement compose(const GroupElement& a, const GroupElement& b);

/// g^{-1} = (-theta - x0.xi0, -lambda xi0, -x0/lambda, 1/lambda).
GroupElement inverse(const GroupElement& g);

/// Per-application dilation stages are clamped to this range; larger factors
/// are realized as a product of stages.
inline constexpr double kDilationStageMin = 0.125;
inline constexpr double kDilationStageMax = 8.0;
/// A zoom that would silently fold more than this mass fraction past the
/// Nyquist band marks the output diverged.
inline constexpr double kAliasTolerance = 1e-6;

/// Apply g to a field.  The resampling of f((x-x0)/lambda) is spectral:
/// band-limited zoom for the dilation, a frequency-space phase for the
/// translation, pointwise phases for modulation and rotation.
Field apply(const GroupElement& g, const Field& f);

/// Element of the enlarged group G' = G . e^{i t0 Delta}.
struct EnlargedElement {
    GroupElement base;
    double t0 = 0.0;
};

/// apply(base, e^{i t0 Delta} f).
Field apply_enlarged(const EnlargedElement& g, const Field& f);
/// Exact inverse of apply_enlarged (propagate by -t0 after undoing base).
Field apply_enlarged_inverse(const EnlargedElement& g, const Field& f);

/// Finite pairwise separation
///   la/lb + lb/la + |ta la^2 - tb lb^2| + |xia - xib| + |xa - xb|;
/// divergence of this quantity along a sequence of pairs is the
/// asymptotic-orthogonality criterion.
double separation(const EnlargedElement& a, const EnlargedElement& b);

/// Action on trajectories: the image lives on lambda^2 I and
///   (T_g u)(t) = g_{theta - t|xi0|^2, xi0, x0 + 2 xi0 t, lambda} u(t/lambda^2).
/// Snapshot times are rescaled, not re-integrated.
Trajectory apply_trajectory(const GroupElement& g, const Trajectory& u);

}  // namespace mcnls
