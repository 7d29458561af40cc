#include "band/analysis.hpp"

#include "band/energy.hpp"
#include "band/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace band::analysis {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

double wrap_period(double s, double L) {
  s = std::fmod(s, L);
  if (s < 0.0) s += L;
  return s;
}

// Signed periodic offset in (-L/2, L/2].
double wrap_signed(double s, double L) {
  s = wrap_period(s, L);
  return s > 0.5 * L ? s - L : s;
}

double mask_window(const Options& opt, double L) {
  return opt.window < 0.0 ? 0.02 * L : opt.window;
}

int mod(int i, int n) { return ((i % n) + n) % n; }

// Parabolic vertex through samples at offsets {-h, 0, h}; offset clamped.
double refine_min(double vm, double v0, double vp, double h) {
  const double denom = vm - 2.0 * v0 + vp;
  if (!(denom > 0.0)) return 0.0;
  double off = 0.5 * h * (vm - vp) / denom;
  return std::clamp(off, -h, h);
}

double point_segment_dist2(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b) {
  const Eigen::Vector3d d = b - a;
  const double dd = d.squaredNorm();
  double t = dd > 0.0 ? (p - a).dot(d) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).squaredNorm();
}

double polyline_dist(const Eigen::Vector3d& p,
                     const std::vector<Eigen::Vector3d>& x) {
  const int n = static_cast<int>(x.size());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    best = std::min(best, point_segment_dist2(p, x[i], x[mod(i + 1, n)]));
  return std::sqrt(best);
}

// RMS distance from the half-turn image of the midline to the midline.
double axis_cost(const Eigen::Vector3d& a, const Eigen::Vector3d& c,
                 const std::vector<Eigen::Vector3d>& x) {
  double acc = 0.0;
  for (const auto& xi : x) {
    const Eigen::Vector3d r = xi - c;
    const Eigen::Vector3d y = c + 2.0 * a * a.dot(r) - r;
    const double d = polyline_dist(y, x);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace

SingularPointReport find_singular_point(const CurvatureTwistProfile& profile,
                                        const Options& opt) {
  profile.validate();
  const int n = profile.nodes();
  const double h = profile.spacing();
  const Eigen::ArrayXd v = profile.K.square() + profile.W.square();

  SingularPointReport rep;
  rep.max_value = v.maxCoeff();
  const double cut = opt.significance * rep.max_value;

  struct Dip {
    double s, value, width;
    int node;
  };
  std::vector<Dip> dips;
  for (int i = 0; i < n; ++i) {
    const double vm = v[mod(i - 1, n)], v0 = v[i], vp = v[mod(i + 1, n)];
    const bool local_min = v0 <= vm && v0 <= vp && (v0 < vm || v0 < vp);
    if (!local_min || v0 > cut) continue;
    const double off = refine_min(vm, v0, vp, h);
    const double value =
        std::max(0.0, v0 + 0.5 * off * (vp - vm) / h +
                          0.5 * off * off * (vm - 2.0 * v0 + vp) / (h * h));
    // Width of the dip: contiguous run below the significance cut.
    int lo = i, hi = i, steps = 0;
    while (v[mod(lo - 1, n)] <= cut && steps < n) { --lo; ++steps; }
    steps = 0;
    while (v[mod(hi + 1, n)] <= cut && steps < n) { ++hi; ++steps; }
    dips.push_back({wrap_period(profile.s_at(i) + off, profile.length), value,
                    h * static_cast<double>(hi - lo + 1), i});
  }
  if (dips.empty()) return rep;

  for (const auto& d : dips) rep.candidates.push_back(d.s);
  const auto best = std::max_element(
      dips.begin(), dips.end(), [](const Dip& a, const Dip& b) {
        if (a.width != b.width) return a.width < b.width;
        return a.value > b.value;
      });
  rep.found = true;
  rep.s = best->s;
  rep.node = best->node;
  rep.value = best->value;
  return rep;
}

Eigen::ArrayXd phi_field(const CurvatureTwistProfile& profile) {
  const int n = profile.nodes();
  Eigen::ArrayXd phi(n);
  for (int i = 0; i < n; ++i)
    phi[i] =
        kRadToDeg * std::atan2(std::abs(profile.W[i]), std::abs(profile.K[i]));
  return phi;
}

Eigen::ArrayXd phi_field_signed(const CurvatureTwistProfile& profile) {
  const int n = profile.nodes();
  Eigen::ArrayXd phi(n);
  for (int i = 0; i < n; ++i)
    phi[i] = kRadToDeg * std::atan2(profile.W[i], profile.K[i]);
  return phi;
}

PhiLimitReport phi_limit_at_X(const CurvatureTwistProfile& profile, double s_X,
                              const Options& opt) {
  profile.validate();
  const int n = profile.nodes();
  const double L = profile.length;
  const double inner = mask_window(opt, L);
  const double outer = inner + opt.phi_window_fraction * L;
  const Eigen::ArrayXd phi = phi_field(profile);

  // One-sided least-squares line phi(d) = p0 + p1 d, evaluated at d = 0.
  const auto side_limit = [&](double sign) {
    double sw = 0, sd = 0, sdd = 0, sp = 0, sdp = 0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const double d = sign * wrap_signed(profile.s_at(i) - s_X, L);
      if (d < inner || d > outer) continue;
      sw += 1.0;
      sd += d;
      sdd += d * d;
      sp += phi[i];
      sdp += d * phi[i];
      ++count;
    }
    if (count < 4)
      throw std::runtime_error(
          "phi_limit_at_X: grid too coarse, need at least 4 nodes per side "
          "inside the fit window");
    const double det = sw * sdd - sd * sd;
    return (sdd * sp - sd * sdp) / det;
  };

  PhiLimitReport rep;
  rep.right_deg = side_limit(+1.0);
  rep.left_deg = side_limit(-1.0);
  rep.average_deg = 0.5 * (rep.left_deg + rep.right_deg);
  rep.spread_deg = std::abs(rep.left_deg - rep.right_deg);
  rep.valid = true;
  return rep;
}

TorsionZeroReport count_w_zeros(const CurvatureTwistProfile& profile,
                                const Options& opt) {
  profile.validate();
  const int n = profile.nodes();
  const double h = profile.spacing();
  const double L = profile.length;
  const Eigen::ArrayXd& W = profile.W;

  TorsionZeroReport rep;
  const double scale = W.abs().maxCoeff();
  if (scale * L < 1e-10 * (1.0 + profile.K.abs().maxCoeff() * L)) {
    rep.degenerate = true;
    return rep;
  }

  // Sign crossings, with exact-zero runs handled as single zeros.
  for (int i = 0; i < n; ++i) {
    const int j = mod(i + 1, n);
    if (W[i] == 0.0) {
      if (W[mod(i - 1, n)] == 0.0) continue;  // interior of a zero run
      int b = i, len = 0;
      while (W[mod(b + 1, n)] == 0.0 && len < n) { ++b; ++len; }
      const double before = W[mod(i - 1, n)], after = W[mod(b + 1, n)];
      TorsionZero z;
      z.s = wrap_period(profile.s_at(i) + 0.5 * h * len, L);
      z.touching = before * after > 0.0;
      if (!z.touching) ++rep.sign_changes;
      rep.zeros.push_back(z);
    } else if (W[j] != 0.0 && W[i] * W[j] < 0.0) {
      TorsionZero z;
      z.s = wrap_period(
          profile.s_at(i) + h * std::abs(W[i]) / (std::abs(W[i]) + std::abs(W[j])),
          L);
      z.touching = false;
      rep.zeros.push_back(z);
      ++rep.sign_changes;
    }
  }

  // Touching zeros: |W| dips toward zero without changing sign.
  const double touch_cut = opt.touch_fraction * scale;
  for (int i = 0; i < n; ++i) {
    const double am = std::abs(W[mod(i - 1, n)]), a0 = std::abs(W[i]),
                 ap = std::abs(W[mod(i + 1, n)]);
    const bool local_min = a0 <= am && a0 <= ap && (a0 < am || a0 < ap);
    if (!local_min || a0 == 0.0 || a0 > touch_cut) continue;
    const double off = refine_min(am * am, a0 * a0, ap * ap, h);
    const double s = wrap_period(profile.s_at(i) + off, L);
    bool near_existing = false;
    for (const auto& z : rep.zeros)
      if (std::abs(wrap_signed(z.s - s, L)) <= 2.0 * h) near_existing = true;
    if (near_existing) continue;
    rep.zeros.push_back({s, true});
  }

  std::sort(rep.zeros.begin(), rep.zeros.end(),
            [](const TorsionZero& a, const TorsionZero& b) { return a.s < b.s; });

  // A pair of crossings a few grid steps apart with |W| staying below the
  // touch cut between them is the discrete resolution of a touching zero
  // (W kinks to zero without a genuine sign change at grid scale).
  if (rep.zeros.size() >= 2) {
    const int m = static_cast<int>(rep.zeros.size());
    std::vector<char> drop(m, 0);
    std::vector<TorsionZero> extra;
    for (int a = 0; a < m; ++a) {
      const int b = (a + 1) % m;
      if (drop[a] || drop[b] || a == b) continue;
      if (rep.zeros[a].touching || rep.zeros[b].touching) continue;
      const double sa = rep.zeros[a].s;
      const double gap = wrap_period(rep.zeros[b].s - sa, L);
      if (gap > 3.0 * h) continue;
      bool low = true;
      double best = std::numeric_limits<double>::infinity();
      double best_s = wrap_period(sa + 0.5 * gap, L);
      for (int i = 0; i < n; ++i) {
        const double d = wrap_period(profile.s_at(i) - sa, L);
        if (d <= 0.0 || d >= gap) continue;
        const double a0 = std::abs(W[i]);
        if (a0 > touch_cut) low = false;
        if (a0 < best) { best = a0; best_s = profile.s_at(i); }
      }
      if (!low) continue;
      drop[a] = drop[b] = 1;
      extra.push_back({best_s, true});
      rep.sign_changes -= 2;
    }
    if (!extra.empty()) {
      std::vector<TorsionZero> kept;
      for (int a = 0; a < m; ++a)
        if (!drop[a]) kept.push_back(rep.zeros[a]);
      kept.insert(kept.end(), extra.begin(), extra.end());
      std::sort(kept.begin(), kept.end(), [](const TorsionZero& x,
                                             const TorsionZero& y) {
        return x.s < y.s;
      });
      rep.zeros = std::move(kept);
    }
  }
  return rep;
}

SymmetryAxisReport fit_symmetry_axis(const FramedCurve& curve) {
  curve.validate();
  const int n = curve.nodes();
  const auto& x = curve.position;

  SymmetryAxisReport rep;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& xi : x) c += xi;
  c /= static_cast<double>(n);
  rep.center = c;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      rep.diameter = std::max(rep.diameter, (x[i] - x[j]).norm());
  if (rep.diameter <= 0.0) return rep;

  // Coarse hemisphere sweep (directions are antipodally equivalent).
  const int m = 120;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> dirs;
  std::vector<double> costs;
  dirs.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double z = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ang = golden * static_cast<double>(k);
    dirs.emplace_back(r * std::cos(ang), r * std::sin(ang), z);
  }
  Eigen::Vector3d best_dir = dirs[0];
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) {
    const double cost = axis_cost(d, c, x);
    costs.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      best_dir = d;
    }
  }

  // Local refinement on the sphere around the best coarse direction.
  for (double delta = 0.2; delta > 0.004; delta *= 0.25) {
    Eigen::Vector3d u = best_dir.unitOrthogonal();
    Eigen::Vector3d v = best_dir.cross(u);
    Eigen::Vector3d round_best = best_dir;
    double round_cost = best_cost;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        if (a == 0 && b == 0) continue;
        const Eigen::Vector3d d =
            (best_dir + 0.5 * delta * (a * u + b * v)).normalized();
        const double cost = axis_cost(d, c, x);
        if (cost < round_cost) {
          round_cost = cost;
          round_best = d;
        }
      }
    best_dir = round_best;
    best_cost = round_cost;
  }
  rep.direction = best_dir;
  rep.rms = best_cost;
  rep.valid = true;

  // Degeneracy: a distant coarse direction fits (almost) as well.
  const double tol = std::max(2.0 * best_cost, 1e-3 * rep.diameter);
  for (int k = 0; k < m; ++k) {
    if (costs[k] > tol) continue;
    const double align = std::abs(dirs[k].dot(best_dir));
    if (align < std::cos(20.0 / kRadToDeg)) rep.degenerate = true;
  }

  // Axis/midline intersection with the strongest binormal alignment.
  Eigen::ArrayXd dist(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d r = x[i] - c;
    dist[i] = (r - best_dir * best_dir.dot(r)).norm();
  }
  const double h = curve.spacing();
  const double dist_cut = std::max(2.0 * dist.minCoeff(), 0.05 * rep.diameter);
  double best_align = -1.0;
  for (int i = 0; i < n; ++i) {
    const double dm = dist[mod(i - 1, n)], d0 = dist[i], dp = dist[mod(i + 1, n)];
    const bool local_min = d0 <= dm && d0 <= dp && (d0 < dm || d0 < dp);
    if (!local_min || d0 > dist_cut) continue;
    const double align = std::abs(best_dir.dot(curve.binormal(i)));
    if (align <= best_align) continue;
    best_align = align;
    const double off = refine_min(dm * dm, d0 * d0, dp * dp, h);
    rep.s_intersection =
        wrap_period(h * static_cast<double>(i) + off, curve.length);
    rep.b_alignment = align;
  }
  return rep;
}

TriangleReport triangle_report(const CurvatureTwistProfile& profile,
                               const FramedCurve& curve, double s_X,
                               const Options& opt) {
  profile.validate();
  curve.validate();
  if (profile.nodes() != curve.nodes())
    throw std::invalid_argument("triangle_report: profile/curve node mismatch");
  const int n = profile.nodes();
  const double h = profile.spacing();
  const double L = profile.length;
  const double w = mask_window(opt, L);

  const Eigen::ArrayXd S = profile.K.square() + profile.W.square();
  const double s_floor = 1e-8 * S.maxCoeff();
  const auto generator = [&](int i) -> Eigen::Vector3d {
    const Eigen::Vector3d g =
        profile.W[i] * curve.tangent(i) + profile.K[i] * curve.binormal(i);
    return g / std::sqrt(S[i]);
  };

  TriangleReport rep;
  const int iX = mod(static_cast<int>(std::lround(s_X / h)), n);
  const Eigen::Vector3d tX = curve.tangent(iX), bX = curve.binormal(iX);

  // Rulings where the arc leaves the masked core, stepped outward past any
  // flat nodes whose generator direction is indeterminate.
  const auto boundary_angle = [&](double sign, double& angle_deg) {
    int i = iX;
    int steps = static_cast<int>(std::ceil(w / h));
    for (int guard = 0; guard < n / 2; ++guard) {
      i = mod(iX + static_cast<int>(sign) * steps, n);
      if (S[i] > s_floor) break;
      ++steps;
    }
    if (S[i] <= s_floor) return false;
    Eigen::Vector3d g = generator(i);
    if (g.dot(bX) < 0.0) g = -g;  // rulings are lines; fix the half
    angle_deg = kRadToDeg * std::atan2(g.dot(tX), g.dot(bX));
    return true;
  };
  const bool ok_left = boundary_angle(-1.0, rep.left_angle_deg);
  const bool ok_right = boundary_angle(+1.0, rep.right_angle_deg);

  // Sweep the rulings across the core and measure deviation from a plane.
  std::vector<Eigen::Vector3d> samples;
  for (int i = 0; i < n; ++i) {
    if (std::abs(wrap_signed(profile.s_at(i) - s_X, L)) > w) continue;
    samples.push_back(curve.position[i]);
    if (S[i] <= s_floor) continue;
    const Eigen::Vector3d g = generator(i);
    for (double v : {-1.0, -0.5, 0.5, 1.0})
      samples.push_back(curve.position[i] + v * w * g);
  }
  if (!ok_left || !ok_right || samples.size() < 4) return rep;

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : samples) mean += p;
  mean /= static_cast<double>(samples.size());
  Eigen::MatrixXd P(3, samples.size());
  for (size_t j = 0; j < samples.size(); ++j) P.col(j) = samples[j] - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU);
  const Eigen::Vector3d normal = svd.matrixU().col(2);
  for (const auto& p : samples) {
    rep.flat_deviation =
        std::max(rep.flat_deviation, std::abs(normal.dot(p - mean)));
    for (const auto& q : samples)
      rep.patch_size = std::max(rep.patch_size, (p - q).norm());
  }
  rep.valid = true;
  return rep;
}

AnalysisReport analyze(const CurvatureTwistProfile& profile,
                       const FramedCurve& curve, const Options& opt) {
  AnalysisReport rep;
  rep.singular_window = mask_window(opt, profile.length);
  rep.energy = energy::total_energy(profile, {opt.A, 0.0});
  rep.singular = find_singular_point(profile, opt);
  rep.torsion_zeros = count_w_zeros(profile, opt);
  rep.axis = fit_symmetry_axis(curve);
  if (rep.singular.found) {
    rep.phi = phi_limit_at_X(profile, rep.singular.s, opt);
    rep.triangle = triangle_report(profile, curve, rep.singular.s, opt);
  }
  return rep;
}

}  // namespace band::analysis
