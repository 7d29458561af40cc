#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace band {

inline constexpr int kVersionMajor = 0;
inline constexpr int kVersionMinor = 1;
inline constexpr int kVersionPatch = 0;

inline std::string version_string() {
  return std::to_string(kVersionMajor) + "." + std::to_string(kVersionMinor) +
         "." + std::to_string(kVersionPatch);
}

/**
 * Periodic nodal curvature/torsion fields on a uniform closed grid.
 * Node i sits at arclength s_i = i * spacing(); the grid wraps, so the
 * step from the last node back to node 0 uses the same spacing.
 */
struct CurvatureTwistProfile {
  double length = 2.0 * M_PI;  // total arclength L
  Eigen::ArrayXd K;            // curvature per node
  Eigen::ArrayXd W;            // torsion per node

  // Seam monodromy. A half-twisted closure conjugates the material frame by
  // a half turn about the tangent, so the transported curvature continues as
  // -K across the wrap while W continues unchanged. Fields that carry this
  // sign (K and everything linear in it) are anti-periodic across the seam.
  bool moebius = false;

  int nodes() const { return static_cast<int>(K.size()); }
  double spacing() const { return length / static_cast<double>(nodes()); }
  double s_at(int i) const { return spacing() * static_cast<double>(i); }

  /** Sign picked up by anti-periodic fields when indexing wraps the seam. */
  double seam_sign() const { return moebius ? -1.0 : 1.0; }

  /** Throws std::invalid_argument unless n >= 8, K/W same size, all finite. */
  void validate() const;
};

/**
 * Discrete framed curve: positions and orthonormal frames (columns t, n, b
 * with b = t x n) at the profile nodes, plus the state advanced one step
 * past the last node, which closure residuals compare against node 0.
 */
struct FramedCurve {
  double length = 2.0 * M_PI;
  std::vector<Eigen::Vector3d> position;
  std::vector<Eigen::Matrix3d> frame;
  Eigen::Vector3d wrap_position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d wrap_frame = Eigen::Matrix3d::Identity();
  bool has_wrap = false;

  int nodes() const { return static_cast<int>(position.size()); }
  double spacing() const { return length / static_cast<double>(nodes()); }
  Eigen::Vector3d tangent(int i) const { return frame[i].col(0); }
  Eigen::Vector3d normal(int i) const { return frame[i].col(1); }
  Eigen::Vector3d binormal(int i) const { return frame[i].col(2); }

  /** Throws unless frames are orthonormal (tol 1e-8) and steps uniform. */
  void validate() const;
};

/** Closure mismatch after one circuit; frame gap is a rotation vector. */
struct ClosureResidual {
  Eigen::Vector3d position_gap = Eigen::Vector3d::Zero();
  Eigen::Vector3d frame_gap = Eigen::Vector3d::Zero();
  bool moebius = true;

  double position_norm() const { return position_gap.norm(); }
  double frame_norm() const { return frame_gap.norm(); }
  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> g;
    g << position_gap, frame_gap;
    return g;
  }
};

/** Bending modulus and curvature regularization for the energy density. */
struct MaterialParams {
  double A = 1.0;
  double epsilon = 0.0;
};

/** Total energy with its partial derivatives per node (grid factor folded in). */
struct EnergyGradient {
  double energy = 0.0;
  Eigen::ArrayXd dK;  // dE/dK_i
  Eigen::ArrayXd dW;  // dE/dW_i
};

/** Profile extracted from a curve; nodes with indeterminate torsion flagged. */
struct ExtractedProfile {
  CurvatureTwistProfile profile;
  std::vector<std::uint8_t> interpolated;  // 1 where W was filled from neighbors
  bool all_flagged = false;
};

enum class InitMode { analytic_moebius, perturbed_circle, from_file };

struct PenaltyStage {
  double mu = 1.0;
  int max_inner = 500;
};

struct SolverConfig {
  int n_nodes = 256;
  double length = 2.0 * M_PI;
  double A = 1.0;
  // Entries divided by length when applied, matching the scale of K ~ 1/L.
  std::vector<double> epsilon_schedule = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<PenaltyStage> penalty_schedule = {
      {1.0, 400}, {10.0, 400}, {100.0, 600}, {1000.0, 800}};
  // Optional annealed H1 bias theta * A * integral(K'^2 + W'^2) ds; must end
  // at 0 so the reported state is stationary for the unbiased energy. The
  // interpolant quadrature already prices inter-node field jumps, so the
  // default applies no bias.
  std::vector<double> smoothing_schedule = {0.0};
  double grad_tol = 1e-6;
  double constraint_tol = 1e-6;
  InitMode init_mode = InitMode::analytic_moebius;
  std::string init_path;       // profile table for from_file
  std::uint64_t seed = 1;
  bool moebius = true;         // closure target includes the half-twist flip
  bool clamp_w = false;        // freeze W at 0 (orientable sanity mode)
  double perturbation = 0.1;   // relative W amplitude for perturbed_circle
  int max_outer = 200;
  std::string checkpoint_dir;  // when nonempty, profile written per outer iter
};

struct SolverReport {
  bool converged = false;
  double energy = 0.0;
  double constraint_norm = 0.0;
  double grad_norm = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<double> energy_history;      // per outer iteration
  std::vector<double> constraint_history;  // per outer iteration
  std::vector<double> mu_history;          // per outer iteration
  std::vector<double> epsilon_history;     // per outer iteration
  std::string message;
};

/** Pointwise statics fields on the grid plus the fitted integration constant. */
struct StaticFields {
  double A = 1.0;
  double epsilon = 0.0;
  double C = 0.0;           // integration constant of the tangent force
  Eigen::ArrayXd U;         // energy density
  Eigen::ArrayXd T, N, B;   // force components (tangent, normal, binormal)
  Eigen::ArrayXd Mt, Mn, Mb;  // moment components
};

/** Six balance-law residual fields and their max norms outside a mask. */
struct EquilibriumResiduals {
  std::vector<Eigen::ArrayXd> r;  // six arrays, one per balance equation
  Eigen::Matrix<double, 6, 1> max_norm = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 1> rms_norm = Eigen::Matrix<double, 6, 1>::Zero();
  double reduced_normal_max = 0.0;    // tangent-force balance, Kt+N'-WB
  double reduced_binormal_max = 0.0;  // WN+B'
  int masked_nodes = 0;
};

struct SingularPointReport {
  bool found = false;
  double s = 0.0;       // refined arclength of the minimum
  int node = 0;         // nearest node index
  double value = 0.0;   // min of K^2+W^2
  double max_value = 0.0;  // max of K^2+W^2 over the grid
  std::vector<double> candidates;  // refined s of all sufficiently deep minima
};

struct PhiLimitReport {
  bool valid = false;
  double left_deg = 0.0;
  double right_deg = 0.0;
  double average_deg = 0.0;
  double spread_deg = 0.0;
};

struct TorsionZero {
  double s = 0.0;
  bool touching = false;  // |W| dips to ~0 without a sign change
};

struct TorsionZeroReport {
  bool degenerate = false;  // W identically ~0
  std::vector<TorsionZero> zeros;
  int sign_changes = 0;
};

struct SymmetryAxisReport {
  bool valid = false;
  bool degenerate = false;  // multiple axes fit equally well (e.g. circle)
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double rms = 0.0;
  double diameter = 0.0;
  double s_intersection = 0.0;  // arclength where axis meets the midline
  double b_alignment = 0.0;     // |axis . binormal| there
};

struct TriangleReport {
  bool valid = false;
  double left_angle_deg = 0.0;   // generator angle to b(X), approaching side
  double right_angle_deg = 0.0;  // leaving side
  double flat_deviation = 0.0;   // max distance of patch samples to best plane
  double patch_size = 0.0;       // patch diameter the deviation is relative to
};

struct AnalysisReport {
  SingularPointReport singular;
  PhiLimitReport phi;
  TorsionZeroReport torsion_zeros;
  SymmetryAxisReport axis;
  TriangleReport triangle;
  double energy = 0.0;
  double singular_window = 0.0;  // mask half-width used, in arclength
};

}  // namespace band
