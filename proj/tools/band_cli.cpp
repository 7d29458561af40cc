#include "band.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Frees a handle through the matching band_*_free on scope exit.
template <typename T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  ~Owned() { Free(ptr); }
  T** slot() { return &ptr; }
  operator T*() const { return ptr; }
};

using ConfigPtr = Owned<band_config, band_config_free>;
using ProfilePtr = Owned<band_profile, band_profile_free>;
using CurvePtr = Owned<band_curve, band_curve_free>;
using ResultPtr = Owned<band_result, band_result_free>;
using FieldsPtr = Owned<band_fields, band_fields_free>;
using AnalysisPtr = Owned<band_analysis, band_analysis_free>;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error: " << context << ": " << band_last_error() << "\n";
  std::exit(1);
}

void check(band_status st, const std::string& context) {
  if (st != BAND_OK) die(context);
}

std::string utc_now() {
  std::time_t t;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde)
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  else
    t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Header comment carried into every output file: version, invocation,
// effective configuration, and (only when stamped) the creation time.
std::string manifest(const std::string& invocation, const band_config* cfg,
                     bool stamp) {
  std::string m = "band " + std::string(band_version()) + "\n";
  m += "invocation: " + invocation + "\n";
  if (cfg) {
    static const char* keys[] = {"n",        "length",        "A",
                                 "init",     "seed",          "moebius",
                                 "clamp_w",  "grad_tol",      "constraint_tol",
                                 "max_outer", "epsilon_schedule",
                                 "penalty_schedule", "smoothing_schedule"};
    char buf[256];
    for (const char* k : keys)
      if (band_config_get(cfg, k, buf, sizeof(buf)) == BAND_OK)
        m += std::string(k) + " = " + buf + "\n";
  }
  if (stamp) m += "created: " + utc_now() + "\n";
  return m;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += " ";
    s += argv[i];
  }
  return s;
}

int config_n(const band_config* cfg) {
  char buf[64];
  check(band_config_get(cfg, "n", buf, sizeof(buf)), "read n");
  return std::atoi(buf);
}

double analysis_num(const band_analysis* a, const char* key) {
  double v = 0.0;
  check(band_analysis_get(a, key, &v), std::string("analysis key ") + key);
  return v;
}

void print_analysis_summary(const band_analysis* a, const band_fields* fields) {
  std::printf("singular point: %s\n",
              analysis_num(a, "singular.found") != 0.0 ? "found" : "none");
  if (analysis_num(a, "singular.found") != 0.0) {
    std::printf("  s = %.6f, K^2+W^2 = %.3e (max %.3e)\n",
                analysis_num(a, "singular.s"), analysis_num(a, "singular.value"),
                analysis_num(a, "singular.max_value"));
    std::printf("  generator angle limits: left %.2f deg, right %.2f deg\n",
                analysis_num(a, "phi.left_deg"), analysis_num(a, "phi.right_deg"));
    std::printf("  wedge angles to binormal: %.2f deg / %.2f deg, "
                "flatness %.3e over patch %.3e\n",
                analysis_num(a, "triangle.left_angle_deg"),
                analysis_num(a, "triangle.right_angle_deg"),
                analysis_num(a, "triangle.flat_deviation"),
                analysis_num(a, "triangle.patch_size"));
  }
  std::printf("torsion zeros: %d (%d sign changes, %d touching)\n",
              static_cast<int>(analysis_num(a, "zeros.count")),
              static_cast<int>(analysis_num(a, "zeros.sign_changes")),
              static_cast<int>(analysis_num(a, "zeros.touching")));
  std::printf("symmetry axis: rms/diameter = %.3e%s, binormal alignment at "
              "intersection %.4f\n",
              analysis_num(a, "axis.rms_rel"),
              analysis_num(a, "axis.degenerate") != 0.0 ? " (degenerate)" : "",
              analysis_num(a, "axis.b_alignment"));
  if (fields) {
    std::printf("equilibrium residuals (max, unmasked):");
    for (int k = 0; k < 6; ++k)
      std::printf(" r%d=%.3e", k + 1, band_fields_max_residual(fields, k));
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("BAND_THREADS");
      threads && std::atoi(threads) < 1 && *threads)
    std::cerr << "warning: ignoring invalid BAND_THREADS value\n";

  CLI::App app{"equilibrium shapes of closed developable strips"};
  const std::string invocation = join_args(argc, argv);

  // solve
  auto* solve_cmd =
      app.add_subcommand("solve", "minimize the bending energy under closure");
  std::string config_path, out_dir = "out", init, init_path, checkpoint_dir;
  std::string eps_sched, pen_sched, smooth_sched;
  int n = 0, max_outer = 0;
  double length = 0, A = 0, grad_tol = 0, constraint_tol = 0, perturbation = 0;
  std::uint64_t seed = 0;
  bool orientable = false, clamp_w = false, stamp = false;
  solve_cmd->add_option("--config", config_path, "key = value options file");
  solve_cmd->add_option("--n", n, "number of grid nodes");
  solve_cmd->add_option("--length", length, "band length");
  solve_cmd->add_option("--A", A, "bending modulus");
  solve_cmd->add_option("--init", init, "starting guess: analytic|circle|file");
  solve_cmd->add_option("--init-path", init_path, "profile table for --init file");
  solve_cmd->add_option("--seed", seed, "perturbation random seed");
  solve_cmd->add_option("--grad-tol", grad_tol, "gradient tolerance");
  solve_cmd->add_option("--constraint-tol", constraint_tol,
                        "closure tolerance");
  solve_cmd->add_option("--max-outer", max_outer, "outer iteration cap");
  solve_cmd->add_option("--perturbation", perturbation,
                        "relative torsion perturbation for --init circle");
  solve_cmd->add_option("--checkpoint", checkpoint_dir,
                        "write a profile checkpoint per outer iteration");
  solve_cmd->add_option("--epsilon-schedule", eps_sched,
                        "comma-separated curvature regularization ramp");
  solve_cmd->add_option("--penalty-schedule", pen_sched,
                        "comma-separated mu:iters penalty ramp");
  solve_cmd->add_option("--smoothing-schedule", smooth_sched,
                        "comma-separated annealed field-smoothness bias");
  solve_cmd->add_flag("--orientable", orientable,
                      "close without the half twist");
  solve_cmd->add_flag("--clamp-w", clamp_w, "freeze torsion at zero");
  solve_cmd->add_flag("--stamp", stamp,
                      "add a creation timestamp to output headers");
  solve_cmd->add_option("--out", out_dir, "output directory");

  // analyze
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "statics fields and geometric diagnostics of a profile");
  std::string an_profile, an_centerline, an_curve, an_out = "out";
  double an_A = 1.0, an_eps = 0.0, an_window = -1.0;
  int an_n = 0;
  bool an_stamp = false;
  analyze_cmd->add_option("--profile", an_profile, "profile table to analyze");
  analyze_cmd->add_option("--centerline", an_centerline,
                          "x,y,z centerline to ingest instead of a profile");
  analyze_cmd->add_option("--curve", an_curve,
                          "curve table (reconstructed when omitted)");
  analyze_cmd->add_option("--n", an_n, "resampled nodes for --centerline");
  analyze_cmd->add_option("--A", an_A, "bending modulus");
  analyze_cmd->add_option("--epsilon", an_eps, "curvature regularization");
  analyze_cmd->add_option("--window", an_window,
                          "mask half-width around the singular point");
  analyze_cmd->add_flag("--stamp", an_stamp, "timestamp output headers");
  analyze_cmd->add_option("--out", an_out, "output directory");

  // export
  auto* export_cmd =
      app.add_subcommand("export", "ruled-strip mesh and plot tables");
  std::string ex_profile, ex_out = "out";
  double ex_width = -1.0;
  bool ex_orientable = false, ex_stamp = false;
  export_cmd->add_option("--profile", ex_profile, "profile table to export")
      ->required();
  export_cmd->add_option("--width", ex_width,
                         "strip display width (default 0.05 L / 2pi)");
  export_cmd->add_flag("--orientable", ex_orientable,
                       "stitch the seam without the half twist");
  export_cmd->add_flag("--stamp", ex_stamp, "timestamp output headers");
  export_cmd->add_option("--out", ex_out, "output directory");

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "run the built-in cross-check battery");
  bool full = false;
  bool quick = false;
  validate_cmd->add_flag("--full", full, "extended battery");
  validate_cmd->add_flag("--quick", quick,
                         "fast subset (the default; kept for scripts)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 1;
  }

  if (*solve_cmd) {
    ConfigPtr cfg;
    cfg.ptr = band_config_create();
    if (!config_path.empty())
      check(band_config_load(cfg, config_path.c_str()), config_path);
    const auto set = [&](const char* key, const std::string& value) {
      check(band_config_set(cfg, key, value.c_str()),
            std::string("set ") + key);
    };
    if (solve_cmd->count("--n")) set("n", std::to_string(n));
    if (solve_cmd->count("--length")) set("length", std::to_string(length));
    if (solve_cmd->count("--A")) set("A", std::to_string(A));
    if (solve_cmd->count("--init")) set("init", init);
    if (solve_cmd->count("--init-path")) set("init_path", init_path);
    if (solve_cmd->count("--seed")) set("seed", std::to_string(seed));
    if (solve_cmd->count("--grad-tol")) set("grad_tol", std::to_string(grad_tol));
    if (solve_cmd->count("--constraint-tol"))
      set("constraint_tol", std::to_string(constraint_tol));
    if (solve_cmd->count("--max-outer"))
      set("max_outer", std::to_string(max_outer));
    if (solve_cmd->count("--perturbation"))
      set("perturbation", std::to_string(perturbation));
    if (solve_cmd->count("--checkpoint")) set("checkpoint_dir", checkpoint_dir);
    if (solve_cmd->count("--epsilon-schedule")) set("epsilon_schedule", eps_sched);
    if (solve_cmd->count("--penalty-schedule")) set("penalty_schedule", pen_sched);
    if (solve_cmd->count("--smoothing-schedule"))
      set("smoothing_schedule", smooth_sched);
    if (orientable) set("moebius", "0");
    if (clamp_w) set("clamp_w", "1");

    if (config_n(cfg) < 8) {
      std::cerr << "error: n must be at least 8\n";
      return 1;
    }
    std::filesystem::create_directories(out_dir);
    if (!checkpoint_dir.empty())
      std::filesystem::create_directories(checkpoint_dir);

    ResultPtr result;
    check(band_solve(cfg, result.slot()), "solve");
    const std::string head = manifest(invocation, cfg, stamp);
    check(band_profile_save(band_result_profile(result),
                            (out_dir + "/profile.csv").c_str(), head.c_str()),
          "write profile");
    check(band_curve_save(band_result_curve(result),
                          (out_dir + "/curve.csv").c_str(), head.c_str()),
          "write curve");
    check(band_result_save(result, (out_dir + "/report.txt").c_str(),
                           head.c_str()),
          "write report");

    std::printf("%s\n", band_result_message(result));
    std::printf("converged: %s\n",
                band_result_converged(result) ? "yes" : "no");
    std::printf("energy: %.12g\n", band_result_energy(result));
    std::printf("closure gap: %.3e\n", band_result_constraint_norm(result));
    std::printf("projected gradient: %.3e\n", band_result_grad_norm(result));
    std::printf("iterations: %d outer, %d inner\n",
                band_result_outer_iterations(result),
                band_result_inner_iterations(result));
    std::printf("wrote %s/{profile.csv, curve.csv, report.txt}\n",
                out_dir.c_str());
    // Non-convergence still writes every output, but signals distinctly.
    return band_result_converged(result) ? 0 : 2;
  }

  if (*analyze_cmd) {
    if (an_profile.empty() == an_centerline.empty()) {
      std::cerr << "error: analyze needs exactly one of --profile or "
                   "--centerline\n";
      return 1;
    }
    ProfilePtr profile;
    CurvePtr curve;
    if (!an_centerline.empty()) {
      check(band_curve_from_centerline(an_centerline.c_str(), an_n,
                                       curve.slot()),
            an_centerline);
      int flagged = 0;
      check(band_extract_profile(curve, profile.slot(), &flagged),
            "extract profile");
      if (flagged > 0)
        std::printf("note: torsion interpolated at %d flat nodes\n", flagged);
    } else {
      check(band_profile_load(an_profile.c_str(), profile.slot()), an_profile);
      if (!an_curve.empty())
        check(band_curve_load(an_curve.c_str(), curve.slot()), an_curve);
      else
        check(band_reconstruct(profile, curve.slot()), "reconstruct");
    }
    if (band_profile_nodes(profile) < 8) {
      std::cerr << "error: n must be at least 8\n";
      return 1;
    }
    std::filesystem::create_directories(an_out);

    FieldsPtr fields;
    check(band_evaluate_statics(profile, an_A, an_eps, -1.0, an_window,
                                fields.slot()),
          "statics");
    AnalysisPtr analysis;
    check(band_analyze(profile, curve, analysis.slot()), "analysis");

    const std::string head = manifest(invocation, nullptr, an_stamp);
    check(band_fields_save(fields, (an_out + "/fields.csv").c_str(),
                           head.c_str()),
          "write fields");
    check(band_analysis_save(analysis, (an_out + "/analysis.txt").c_str(),
                             head.c_str()),
          "write analysis");
    check(band_export_plot(profile, (an_out + "/plot.csv").c_str(),
                           head.c_str()),
          "write plot table");

    print_analysis_summary(analysis, fields);
    std::printf("wrote %s/fields.csv, %s/analysis.txt, %s/plot.csv\n",
                an_out.c_str(), an_out.c_str(), an_out.c_str());
    return 0;
  }

  if (*export_cmd) {
    ProfilePtr profile;
    check(band_profile_load(ex_profile.c_str(), profile.slot()), ex_profile);
    CurvePtr curve;
    check(band_reconstruct(profile, curve.slot()), "reconstruct");
    std::filesystem::create_directories(ex_out);
    const double width = ex_width > 0.0
                             ? ex_width
                             : 0.05 * band_profile_length(profile) /
                                   (2.0 * M_PI);
    const int stitch = ex_orientable ? 0 : band_profile_moebius(profile);
    const std::string head = manifest(invocation, nullptr, ex_stamp);
    check(band_export_mesh(profile, curve, width, stitch,
                           (ex_out + "/band.obj").c_str(), head.c_str()),
          "write mesh");
    check(band_export_plot(profile, (ex_out + "/plot.csv").c_str(),
                           head.c_str()),
          "write plot table");
    std::printf("wrote %s/band.obj and %s/plot.csv\n", ex_out.c_str(),
                ex_out.c_str());
    return 0;
  }

  if (*validate_cmd) {
    const int failures = band_self_test(
        full ? 1 : 0,
        [](const char* line, void*) { std::printf("%s\n", line); }, nullptr);
    if (failures < 0) die("self test");
    std::printf("%s (%d failure%s)\n", failures == 0 ? "PASS" : "FAIL",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
  }

  return 1;
}
