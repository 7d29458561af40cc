#pragma once

#include "band/types.hpp"

namespace band::analysis {

struct Options {
  // Bending modulus used for the reported energy.
  double A = 1.0;
  // Half-width of the arc mask around the singular point; < 0 means 2% of L.
  double window = -1.0;
  // A minimum of K^2+W^2 counts as singular below this fraction of the max.
  double significance = 0.01;
  // |W| local minima below this fraction of max|W| count as touching zeros.
  double touch_fraction = 0.05;
  // One-sided fit range for the generator-angle limit, fraction of L.
  double phi_window_fraction = 0.08;
};

/**
 * Global minimum of K^2 + W^2 with parabolic sub-grid refinement. All
 * local minima below significance * max are reported as candidates; the
 * returned point is the widest such dip (the physical flat point), which
 * makes the choice robust against narrow numerical dips. found stays
 * false when no minimum is significant (e.g. a circle).
 */
SingularPointReport find_singular_point(const CurvatureTwistProfile& profile,
                                        const Options& opt = {});

/** Generator angle to the binormal, degrees: atan2(|W|, |K|). */
Eigen::ArrayXd phi_field(const CurvatureTwistProfile& profile);

/** Signed variant atan2(W, K), degrees, for plotting. */
Eigen::ArrayXd phi_field_signed(const CurvatureTwistProfile& profile);

/**
 * One-sided limits of the unsigned generator angle at the singular point:
 * linear fits of phi(s) on each side over phi_window_fraction * L starting
 * outside the mask window, extrapolated to s_X. Throws when a side has
 * fewer than 4 grid points. valid requires a located singular point.
 */
PhiLimitReport phi_limit_at_X(const CurvatureTwistProfile& profile,
                              double s_X, const Options& opt = {});

/**
 * Zeros of the torsion: sign changes located by linear interpolation plus
 * touching zeros (|W| dips below touch_fraction * max|W| without a sign
 * change), each counted once. W identically ~0 sets degenerate instead.
 */
TorsionZeroReport count_w_zeros(const CurvatureTwistProfile& profile,
                                const Options& opt = {});

/**
 * Best half-turn symmetry axis through the centroid: direction minimizing
 * the RMS distance from rotated nodes to the original midline polyline,
 * coarse sphere search plus local refinement. degenerate flags rotationally
 * symmetric shapes where many directions fit equally well. Also reports
 * where the axis pierces the midline with the strongest binormal alignment.
 */
SymmetryAxisReport fit_symmetry_axis(const FramedCurve& curve);

/**
 * Geometry of the flat wedge at the singular point: signed angles (in the
 * tangent/binormal plane of X) of the rulings entering and leaving the
 * masked window, plus the deviation of the swept patch from a plane.
 */
TriangleReport triangle_report(const CurvatureTwistProfile& profile,
                               const FramedCurve& curve, double s_X,
                               const Options& opt = {});

/** Full pipeline over a solved profile/curve pair. */
AnalysisReport analyze(const CurvatureTwistProfile& profile,
                       const FramedCurve& curve, const Options& opt = {});

}  // namespace band::analysis
