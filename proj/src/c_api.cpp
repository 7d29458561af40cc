#include "band.h"

#include "band/analysis.hpp"
#include "band/energy.hpp"
#include "band/geometry.hpp"
#include "band/io.hpp"
#include "band/solver.hpp"
#include "band/statics.hpp"
#include "band/types.hpp"
#include "band/validate.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using band::CurvatureTwistProfile;
using band::FramedCurve;

struct band_config {
  band::SolverConfig cfg;
};

struct band_profile {
  CurvatureTwistProfile p;
};

struct band_curve {
  FramedCurve c;
};

struct band_result {
  band::solver::SolveOutput out;
  band_profile profile_view;
  band_curve curve_view;
};

struct band_fields {
  CurvatureTwistProfile profile;
  band::StaticFields fields;
  band::EquilibriumResiduals residuals;
};

struct band_analysis {
  band::AnalysisReport rep;
};

namespace {

thread_local std::string g_error;

band_status fail(band_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <typename F>
band_status guarded(F&& f) {
  try {
    f();
    return BAND_OK;
  } catch (const std::invalid_argument& e) {
    return fail(BAND_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(BAND_ERR_NUMERIC, e.what());
  } catch (const std::runtime_error& e) {
    return fail(BAND_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(BAND_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BAND_ERR_INTERNAL, "unknown error");
  }
}

bool null_arg(const void* p, const char* what) {
  if (p) return false;
  g_error = std::string("null argument: ") + what;
  return true;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v) {
  size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (trim(v.substr(pos)) != "")
    throw std::invalid_argument("not a number: " + v);
  return x;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

void config_set(band::SolverConfig& cfg, const std::string& key,
                const std::string& value) {
  if (key == "n") {
    cfg.n_nodes = static_cast<int>(parse_double(value));
  } else if (key == "length") {
    cfg.length = parse_double(value);
  } else if (key == "A") {
    cfg.A = parse_double(value);
  } else if (key == "grad_tol") {
    cfg.grad_tol = parse_double(value);
  } else if (key == "constraint_tol") {
    cfg.constraint_tol = parse_double(value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_double(value));
  } else if (key == "init") {
    if (value == "analytic")
      cfg.init_mode = band::InitMode::analytic_moebius;
    else if (value == "circle")
      cfg.init_mode = band::InitMode::perturbed_circle;
    else if (value == "file")
      cfg.init_mode = band::InitMode::from_file;
    else
      throw std::invalid_argument("init must be analytic, circle or file");
  } else if (key == "init_path") {
    cfg.init_path = value;
  } else if (key == "moebius") {
    cfg.moebius = parse_double(value) != 0.0;
  } else if (key == "clamp_w") {
    cfg.clamp_w = parse_double(value) != 0.0;
  } else if (key == "perturbation") {
    cfg.perturbation = parse_double(value);
  } else if (key == "max_outer") {
    cfg.max_outer = static_cast<int>(parse_double(value));
  } else if (key == "checkpoint_dir") {
    cfg.checkpoint_dir = value;
  } else if (key == "epsilon_schedule") {
    std::vector<double> sched;
    for (const auto& part : split(value, ','))
      if (!part.empty()) sched.push_back(parse_double(part));
    if (sched.empty()) throw std::invalid_argument("empty epsilon_schedule");
    cfg.epsilon_schedule = sched;
  } else if (key == "penalty_schedule") {
    std::vector<band::PenaltyStage> sched;
    for (const auto& part : split(value, ',')) {
      if (part.empty()) continue;
      const auto poles = split(part, ':');
      if (poles.size() != 2)
        throw std::invalid_argument("penalty_schedule entries are mu:iters");
      sched.push_back({parse_double(poles[0]),
                       static_cast<int>(parse_double(poles[1]))});
    }
    if (sched.empty()) throw std::invalid_argument("empty penalty_schedule");
    cfg.penalty_schedule = sched;
  } else if (key == "smoothing_schedule") {
    std::vector<double> sched;
    for (const auto& part : split(value, ','))
      if (!part.empty()) sched.push_back(parse_double(part));
    cfg.smoothing_schedule = sched;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

std::string config_get(const band::SolverConfig& cfg, const std::string& key) {
  const auto num = [](double v) { return band::io::fmt(v); };
  if (key == "n") return std::to_string(cfg.n_nodes);
  if (key == "length") return num(cfg.length);
  if (key == "A") return num(cfg.A);
  if (key == "grad_tol") return num(cfg.grad_tol);
  if (key == "constraint_tol") return num(cfg.constraint_tol);
  if (key == "seed") return std::to_string(cfg.seed);
  if (key == "init") {
    switch (cfg.init_mode) {
      case band::InitMode::analytic_moebius: return "analytic";
      case band::InitMode::perturbed_circle: return "circle";
      case band::InitMode::from_file: return "file";
    }
    return "analytic";
  }
  if (key == "init_path") return cfg.init_path;
  if (key == "moebius") return cfg.moebius ? "1" : "0";
  if (key == "clamp_w") return cfg.clamp_w ? "1" : "0";
  if (key == "perturbation") return num(cfg.perturbation);
  if (key == "max_outer") return std::to_string(cfg.max_outer);
  if (key == "checkpoint_dir") return cfg.checkpoint_dir;
  if (key == "epsilon_schedule") {
    std::string s;
    for (size_t i = 0; i < cfg.epsilon_schedule.size(); ++i)
      s += (i ? "," : "") + num(cfg.epsilon_schedule[i]);
    return s;
  }
  if (key == "penalty_schedule") {
    std::string s;
    for (size_t i = 0; i < cfg.penalty_schedule.size(); ++i)
      s += (i ? "," : "") + num(cfg.penalty_schedule[i].mu) + ":" +
           std::to_string(cfg.penalty_schedule[i].max_inner);
    return s;
  }
  if (key == "smoothing_schedule") {
    std::string s;
    for (size_t i = 0; i < cfg.smoothing_schedule.size(); ++i)
      s += (i ? "," : "") + num(cfg.smoothing_schedule[i]);
    return s;
  }
  throw std::invalid_argument("unknown config key: " + key);
}

band_result* make_result(band::solver::SolveOutput&& out) {
  auto* r = new band_result{std::move(out), {}, {}};
  r->profile_view.p = r->out.profile;
  r->curve_view.c = r->out.curve;
  return r;
}

double analysis_value(const band::AnalysisReport& rep, const std::string& key) {
  const auto& a = rep;
  if (key == "energy") return a.energy;
  if (key == "window") return a.singular_window;
  if (key == "singular.found") return a.singular.found ? 1.0 : 0.0;
  if (key == "singular.s") return a.singular.s;
  if (key == "singular.value") return a.singular.value;
  if (key == "singular.max_value") return a.singular.max_value;
  if (key == "phi.left_deg") return a.phi.left_deg;
  if (key == "phi.right_deg") return a.phi.right_deg;
  if (key == "phi.average_deg") return a.phi.average_deg;
  if (key == "phi.spread_deg") return a.phi.spread_deg;
  if (key == "zeros.count") return static_cast<double>(a.torsion_zeros.zeros.size());
  if (key == "zeros.sign_changes")
    return static_cast<double>(a.torsion_zeros.sign_changes);
  if (key == "zeros.touching") {
    int t = 0;
    for (const auto& z : a.torsion_zeros.zeros) t += z.touching ? 1 : 0;
    return static_cast<double>(t);
  }
  if (key == "zeros.degenerate") return a.torsion_zeros.degenerate ? 1.0 : 0.0;
  if (key == "axis.rms") return a.axis.rms;
  if (key == "axis.rms_rel")
    return a.axis.diameter > 0.0 ? a.axis.rms / a.axis.diameter : 0.0;
  if (key == "axis.degenerate") return a.axis.degenerate ? 1.0 : 0.0;
  if (key == "axis.s_intersection") return a.axis.s_intersection;
  if (key == "axis.b_alignment") return a.axis.b_alignment;
  if (key == "axis.diameter") return a.axis.diameter;
  if (key == "triangle.left_angle_deg") return a.triangle.left_angle_deg;
  if (key == "triangle.right_angle_deg") return a.triangle.right_angle_deg;
  if (key == "triangle.flat_deviation") return a.triangle.flat_deviation;
  if (key == "triangle.patch_size") return a.triangle.patch_size;
  throw std::invalid_argument("unknown analysis key: " + key);
}

}  // namespace

extern "C" {

const char* band_version(void) {
  static const std::string v = band::version_string();
  return v.c_str();
}

const char* band_last_error(void) { return g_error.c_str(); }

/* config */

band_config* band_config_create(void) { return new band_config(); }

void band_config_free(band_config* config) { delete config; }

band_status band_config_set(band_config* config, const char* key,
                            const char* value) {
  if (null_arg(config, "config") || null_arg(key, "key") ||
      null_arg(value, "value"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] { config_set(config->cfg, key, value); });
}

band_status band_config_get(const band_config* config, const char* key,
                            char* buf, size_t bufsize) {
  if (null_arg(config, "config") || null_arg(key, "key") ||
      null_arg(buf, "buf"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const std::string v = config_get(config->cfg, key);
    if (v.size() + 1 > bufsize)
      throw std::invalid_argument("buffer too small for " + std::string(key));
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

band_status band_config_load(band_config* config, const char* path) {
  if (null_arg(config, "config") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open: ") + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(std::string(path) + ":" +
                                 std::to_string(lineno) +
                                 ": expected key = value");
      config_set(config->cfg, trim(line.substr(0, eq)),
                 trim(line.substr(eq + 1)));
    }
  });
}

/* profile */

band_status band_profile_create(int n, double length, int moebius,
                                const double* K, const double* W,
                                band_profile** out) {
  if (null_arg(K, "K") || null_arg(W, "W") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    CurvatureTwistProfile p;
    p.length = length;
    p.moebius = moebius != 0;
    if (n < 1) throw std::invalid_argument("n must be positive");
    p.K = Eigen::Map<const Eigen::ArrayXd>(K, n);
    p.W = Eigen::Map<const Eigen::ArrayXd>(W, n);
    p.validate();
    *out = new band_profile{std::move(p)};
  });
}

band_status band_profile_load(const char* path, band_profile** out) {
  if (null_arg(path, "path") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new band_profile{band::io::load_profile(path)}; });
}

band_status band_profile_save(const band_profile* profile, const char* path,
                              const char* comment) {
  if (null_arg(profile, "profile") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { band::io::save_profile(profile->p, path, comment ? comment : ""); });
}

void band_profile_free(band_profile* profile) { delete profile; }

int band_profile_nodes(const band_profile* profile) {
  return profile ? profile->p.nodes() : 0;
}

double band_profile_length(const band_profile* profile) {
  return profile ? profile->p.length : 0.0;
}

int band_profile_moebius(const band_profile* profile) {
  return profile && profile->p.moebius ? 1 : 0;
}

band_status band_profile_get(const band_profile* profile, double* s, double* K,
                             double* W) {
  if (null_arg(profile, "profile") || null_arg(K, "K") || null_arg(W, "W"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    for (int i = 0; i < profile->p.nodes(); ++i) {
      if (s) s[i] = profile->p.s_at(i);
      K[i] = profile->p.K[i];
      W[i] = profile->p.W[i];
    }
  });
}

/* curves */

band_status band_reconstruct(const band_profile* profile, band_curve** out) {
  if (null_arg(profile, "profile") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { *out = new band_curve{band::geometry::reconstruct(profile->p)}; });
}

band_status band_curve_load(const char* path, band_curve** out) {
  if (null_arg(path, "path") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new band_curve{band::io::load_curve(path)}; });
}

band_status band_curve_save(const band_curve* curve, const char* path,
                            const char* comment) {
  if (null_arg(curve, "curve") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { band::io::save_curve(curve->c, path, comment ? comment : ""); });
}

void band_curve_free(band_curve* curve) { delete curve; }

int band_curve_nodes(const band_curve* curve) {
  return curve ? curve->c.nodes() : 0;
}

band_status band_curve_positions(const band_curve* curve, double* xyz) {
  if (null_arg(curve, "curve") || null_arg(xyz, "xyz"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    for (int i = 0; i < curve->c.nodes(); ++i)
      for (int k = 0; k < 3; ++k) xyz[3 * i + k] = curve->c.position[i][k];
  });
}

band_status band_closure(const band_curve* curve, int moebius,
                         double* position_gap, double* frame_gap) {
  if (null_arg(curve, "curve")) return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const auto res = band::geometry::closure(curve->c, moebius != 0);
    if (position_gap) *position_gap = res.position_norm();
    if (frame_gap) *frame_gap = res.frame_norm();
  });
}

band_status band_curve_from_centerline(const char* path, int n,
                                       band_curve** out) {
  if (null_arg(path, "path") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const auto points = band::io::load_centerline(path);
    const auto resampled =
        band::geometry::resample_closed(points, n <= 0 ? 256 : n);
    *out = new band_curve{band::geometry::frames_from_positions(resampled)};
  });
}

band_status band_extract_profile(const band_curve* curve, band_profile** out,
                                 int* flagged) {
  if (null_arg(curve, "curve") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    auto extracted = band::geometry::extract_profile(curve->c);
    if (flagged) {
      int count = 0;
      for (auto f : extracted.interpolated) count += f ? 1 : 0;
      *flagged = count;
    }
    *out = new band_profile{std::move(extracted.profile)};
  });
}

/* solve */

band_status band_solve(const band_config* config, band_result** out) {
  if (null_arg(config, "config") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = make_result(band::solver::solve(config->cfg)); });
}

band_status band_solve_from(const band_config* config,
                            const band_profile* start, band_result** out) {
  if (null_arg(config, "config") || null_arg(start, "start") ||
      null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    CurvatureTwistProfile s0 = start->p;
    if (s0.nodes() != config->cfg.n_nodes)
      s0 = band::solver::resample_profile(s0, config->cfg.n_nodes);
    *out = make_result(band::solver::solve_from(config->cfg, s0));
  });
}

void band_result_free(band_result* result) { delete result; }

const band_profile* band_result_profile(const band_result* result) {
  return result ? &result->profile_view : nullptr;
}

const band_curve* band_result_curve(const band_result* result) {
  return result ? &result->curve_view : nullptr;
}

int band_result_converged(const band_result* result) {
  return result && result->out.report.converged ? 1 : 0;
}

double band_result_energy(const band_result* result) {
  return result ? result->out.report.energy : 0.0;
}

double band_result_constraint_norm(const band_result* result) {
  return result ? result->out.report.constraint_norm : 0.0;
}

double band_result_grad_norm(const band_result* result) {
  return result ? result->out.report.grad_norm : 0.0;
}

int band_result_outer_iterations(const band_result* result) {
  return result ? result->out.report.outer_iterations : 0;
}

int band_result_inner_iterations(const band_result* result) {
  return result ? result->out.report.inner_iterations : 0;
}

const char* band_result_message(const band_result* result) {
  return result ? result->out.report.message.c_str() : "";
}

band_status band_result_save(const band_result* result, const char* path,
                             const char* comment) {
  if (null_arg(result, "result") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(std::string("cannot open: ") + path);
    if (comment && *comment) {
      std::istringstream lines(comment);
      std::string line;
      while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    const auto& rep = result->out.report;
    out << "converged: " << (rep.converged ? 1 : 0) << "\n";
    out << "energy: " << band::io::fmt(rep.energy) << "\n";
    out << "constraint_norm: " << band::io::fmt(rep.constraint_norm) << "\n";
    out << "grad_norm: " << band::io::fmt(rep.grad_norm) << "\n";
    out << "outer_iterations: " << rep.outer_iterations << "\n";
    out << "inner_iterations: " << rep.inner_iterations << "\n";
    out << "message: " << rep.message << "\n";
    out << "history: outer,energy,constraint,mu,epsilon\n";
    const auto at = [](const std::vector<double>& v, size_t k) {
      return k < v.size() ? v[k] : 0.0;
    };
    for (size_t k = 0; k < rep.energy_history.size(); ++k) {
      out << k << "," << band::io::fmt(rep.energy_history[k]) << ","
          << band::io::fmt(at(rep.constraint_history, k)) << ","
          << band::io::fmt(at(rep.mu_history, k)) << ","
          << band::io::fmt(at(rep.epsilon_history, k)) << "\n";
    }
    if (!out) throw std::runtime_error(std::string("write failed: ") + path);
  });
}

/* statics */

band_status band_evaluate_statics(const band_profile* profile, double A,
                                  double epsilon, double s_center,
                                  double window, band_fields** out) {
  if (null_arg(profile, "profile") || null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const auto& p = profile->p;
    double center = s_center;
    if (center < 0.0) {
      const auto sp = band::analysis::find_singular_point(p);
      center = sp.found ? sp.s : -1.0;
    }
    std::vector<std::uint8_t> mask;
    if (center >= 0.0) mask = band::statics::arc_mask(p, center, window);
    const band::MaterialParams mat{A, epsilon};
    auto fields = band::statics::evaluate_fields(
        p, mat, std::numeric_limits<double>::quiet_NaN(), mask);
    auto res = band::statics::residuals(p, fields, mask);
    *out = new band_fields{p, std::move(fields), std::move(res)};
  });
}

void band_fields_free(band_fields* fields) { delete fields; }

double band_fields_constant(const band_fields* fields) {
  return fields ? fields->fields.C : 0.0;
}

double band_fields_max_residual(const band_fields* fields, int which) {
  if (!fields || which < 0 || which > 5) return -1.0;
  return fields->residuals.max_norm[which];
}

double band_fields_rms_residual(const band_fields* fields, int which) {
  if (!fields || which < 0 || which > 5) return -1.0;
  return fields->residuals.rms_norm[which];
}

band_status band_fields_save(const band_fields* fields, const char* path,
                             const char* comment) {
  if (null_arg(fields, "fields") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    band::io::save_fields(fields->profile, fields->fields, fields->residuals,
                          path, comment ? comment : "");
  });
}

/* analysis */

band_status band_analyze(const band_profile* profile, const band_curve* curve,
                         band_analysis** out) {
  if (null_arg(profile, "profile") || null_arg(curve, "curve") ||
      null_arg(out, "out"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new band_analysis{band::analysis::analyze(profile->p, curve->c)};
  });
}

void band_analysis_free(band_analysis* analysis) { delete analysis; }

band_status band_analysis_get(const band_analysis* analysis, const char* key,
                              double* value) {
  if (null_arg(analysis, "analysis") || null_arg(key, "key") ||
      null_arg(value, "value"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] { *value = analysis_value(analysis->rep, key); });
}

band_status band_analysis_save(const band_analysis* analysis, const char* path,
                               const char* comment) {
  if (null_arg(analysis, "analysis") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error(std::string("cannot open: ") + path);
    if (comment && *comment) {
      std::istringstream lines(comment);
      std::string line;
      while (std::getline(lines, line)) outf << "# " << line << "\n";
    }
    static const char* keys[] = {
        "energy",          "window",
        "singular.found",  "singular.s",
        "singular.value",  "singular.max_value",
        "phi.left_deg",    "phi.right_deg",
        "phi.average_deg", "phi.spread_deg",
        "zeros.count",     "zeros.sign_changes",
        "zeros.touching",  "zeros.degenerate",
        "axis.rms",        "axis.rms_rel",
        "axis.degenerate", "axis.s_intersection",
        "axis.b_alignment", "axis.diameter",
        "triangle.left_angle_deg", "triangle.right_angle_deg",
        "triangle.flat_deviation", "triangle.patch_size"};
    for (const char* k : keys)
      outf << k << ": " << band::io::fmt(analysis_value(analysis->rep, k))
           << "\n";
    for (size_t i = 0; i < analysis->rep.torsion_zeros.zeros.size(); ++i) {
      const auto& z = analysis->rep.torsion_zeros.zeros[i];
      outf << "zero[" << i << "]: " << band::io::fmt(z.s)
           << (z.touching ? " touching" : " crossing") << "\n";
    }
    if (!outf) throw std::runtime_error(std::string("write failed: ") + path);
  });
}

/* export */

band_status band_export_mesh(const band_profile* profile,
                             const band_curve* curve, double width, int moebius,
                             const char* path, const char* comment) {
  if (null_arg(profile, "profile") || null_arg(curve, "curve") ||
      null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    band::io::save_mesh_obj(profile->p, curve->c, width, moebius != 0, path,
                            comment ? comment : "");
  });
}

band_status band_export_plot(const band_profile* profile, const char* path,
                             const char* comment) {
  if (null_arg(profile, "profile") || null_arg(path, "path"))
    return BAND_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    band::io::save_plot_table(profile->p, path, comment ? comment : "");
  });
}

/* selftest */

int band_self_test(int full, void (*log)(const char* line, void* user),
                   void* user) {
  band::validate::Logger logger;
  if (log)
    logger = [log, user](const std::string& line) { log(line.c_str(), user); };
  try {
    return band::validate::run(full != 0, logger).failures();
  } catch (const std::exception& e) {
    g_error = e.what();
    return -1;
  }
}

} /* extern "C" */
