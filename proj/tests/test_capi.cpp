#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "band.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

bool file_nonempty(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  return in.good() && std::getline(in, line);
}

// Circle profile arrays of length n.
void circle_arrays(int n, std::vector<double>& K, std::vector<double>& W) {
  K.assign(n, 1.0);
  W.assign(n, 0.0);
}

}  // namespace

TEST_CASE("version string is semantic") {
  const char* v = band_version();
  REQUIRE(v != nullptr);
  int maj = -1, min = -1, pat = -1;
  CHECK(std::sscanf(v, "%d.%d.%d", &maj, &min, &pat) == 3);
  CHECK(maj >= 0);
}

TEST_CASE("config set, get and error reporting") {
  band_config* c = band_config_create();
  REQUIRE(c != nullptr);
  CHECK(band_config_set(c, "n", "64") == BAND_OK);
  char buf[64];
  CHECK(band_config_get(c, "n", buf, sizeof buf) == BAND_OK);
  CHECK(std::string(buf) == "64");

  CHECK(band_config_set(c, "no_such_key", "1") == BAND_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(band_last_error()) > 0);
  CHECK(std::string(band_last_error()).find("no_such_key") != std::string::npos);
  CHECK(band_config_set(c, "n", "not_a_number") == BAND_ERR_INVALID_ARGUMENT);
  CHECK(band_config_set(c, "epsilon_schedule", "1e-1,1e-2") == BAND_OK);
  CHECK(band_config_set(c, "smoothing_schedule", "0") == BAND_OK);
  band_config_free(c);
}

TEST_CASE("config file loading applies key = value lines") {
  TempFile f("capi_config.cfg");
  {
    std::ofstream out(f.path);
    out << "# fixture\nn = 48\nA = 2.0\nmoebius = 0\n";
  }
  band_config* c = band_config_create();
  REQUIRE(band_config_load(c, f.path.c_str()) == BAND_OK);
  char buf[64];
  CHECK(band_config_get(c, "n", buf, sizeof buf) == BAND_OK);
  CHECK(std::string(buf) == "48");
  CHECK(band_config_get(c, "A", buf, sizeof buf) == BAND_OK);
  CHECK(std::stod(buf) == 2.0);
  CHECK(band_config_load(c, "missing.cfg") == BAND_ERR_IO);
  band_config_free(c);
}

TEST_CASE("profile handles round trip their data") {
  std::vector<double> K, W;
  circle_arrays(32, K, W);
  W[3] = 0.25;
  band_profile* p = nullptr;
  REQUIRE(band_profile_create(32, 2.0 * M_PI, 1, K.data(), W.data(), &p) == BAND_OK);
  CHECK(band_profile_nodes(p) == 32);
  CHECK(band_profile_length(p) == 2.0 * M_PI);
  CHECK(band_profile_moebius(p) == 1);
  std::vector<double> s(32), K2(32), W2(32);
  REQUIRE(band_profile_get(p, s.data(), K2.data(), W2.data()) == BAND_OK);
  CHECK(K2[10] == 1.0);
  CHECK(W2[3] == 0.25);
  CHECK(s[1] == doctest::Approx(2.0 * M_PI / 32).epsilon(1e-15));

  TempFile f("capi_profile.csv");
  REQUIRE(band_profile_save(p, f.path.c_str(), "fixture") == BAND_OK);
  band_profile* q = nullptr;
  REQUIRE(band_profile_load(f.path.c_str(), &q) == BAND_OK);
  CHECK(band_profile_moebius(q) == 1);
  CHECK(band_profile_nodes(q) == 32);
  band_profile_free(q);
  band_profile_free(p);
}

TEST_CASE("failed loads leave output pointers untouched") {
  band_profile* sentinel = reinterpret_cast<band_profile*>(0x1);
  band_profile* p = sentinel;
  CHECK(band_profile_load("definitely_missing.csv", &p) == BAND_ERR_IO);
  CHECK(p == sentinel);
  CHECK(std::strlen(band_last_error()) > 0);
}

TEST_CASE("invalid profile arguments are rejected") {
  std::vector<double> K, W;
  circle_arrays(16, K, W);
  band_profile* p = nullptr;
  CHECK(band_profile_create(16, 2.0, 0, nullptr, W.data(), &p) ==
        BAND_ERR_INVALID_ARGUMENT);
  CHECK(band_profile_create(0, 2.0, 0, K.data(), W.data(), &p) ==
        BAND_ERR_INVALID_ARGUMENT);
  CHECK(band_profile_create(16, -1.0, 0, K.data(), W.data(), &p) ==
        BAND_ERR_INVALID_ARGUMENT);
}

TEST_CASE("reconstruction and closure through the C interface") {
  std::vector<double> K, W;
  circle_arrays(128, K, W);
  band_profile* p = nullptr;
  REQUIRE(band_profile_create(128, 2.0 * M_PI, 0, K.data(), W.data(), &p) == BAND_OK);
  band_curve* c = nullptr;
  REQUIRE(band_reconstruct(p, &c) == BAND_OK);
  CHECK(band_curve_nodes(c) == 128);

  double pos_gap = -1.0, frame_gap = -1.0;
  REQUIRE(band_closure(c, 0, &pos_gap, &frame_gap) == BAND_OK);
  CHECK(pos_gap < 1e-6);
  CHECK(frame_gap < 1e-6);
  REQUIRE(band_closure(c, 1, &pos_gap, &frame_gap) == BAND_OK);
  CHECK(frame_gap == doctest::Approx(M_PI).epsilon(1e-12));

  std::vector<double> xyz(3 * 128);
  REQUIRE(band_curve_positions(c, xyz.data()) == BAND_OK);
  const double r0 = std::hypot(xyz[0] - 0.0, xyz[1] - 1.0);  // center (0, 1, 0)
  CHECK(r0 == doctest::Approx(1.0).epsilon(1e-2).scale(1.0));

  band_profile* back = nullptr;
  int flagged = -1;
  REQUIRE(band_extract_profile(c, &back, &flagged) == BAND_OK);
  CHECK(flagged == 0);
  std::vector<double> Kb(128), Wb(128);
  REQUIRE(band_profile_get(back, nullptr, Kb.data(), Wb.data()) == BAND_OK);
  for (int i = 0; i < 128; ++i) CHECK(Kb[i] == doctest::Approx(1.0).epsilon(1e-3));
  band_profile_free(back);
  band_curve_free(c);

  TempFile f("capi_curve.csv");
  band_curve* c2 = nullptr;
  REQUIRE(band_reconstruct(p, &c2) == BAND_OK);
  REQUIRE(band_curve_save(c2, f.path.c_str(), "fixture") == BAND_OK);
  band_curve* c3 = nullptr;
  REQUIRE(band_curve_load(f.path.c_str(), &c3) == BAND_OK);
  CHECK(band_curve_nodes(c3) == 128);
  band_curve_free(c3);
  band_curve_free(c2);
  band_profile_free(p);
}

TEST_CASE("centerline import resamples and frames a point cloud") {
  TempFile f("capi_centerline.csv");
  {
    std::ofstream out(f.path);
    out << "# unit circle samples\n";
    for (int i = 0; i < 360; ++i) {
      const double t = 2.0 * M_PI * i / 360;
      out << std::cos(t) << "," << std::sin(t) << ",0\n";
    }
  }
  band_curve* c = nullptr;
  REQUIRE(band_curve_from_centerline(f.path.c_str(), 96, &c) == BAND_OK);
  CHECK(band_curve_nodes(c) == 96);
  band_profile* p = nullptr;
  REQUIRE(band_extract_profile(c, &p, nullptr) == BAND_OK);
  std::vector<double> K(96), W(96);
  REQUIRE(band_profile_get(p, nullptr, K.data(), W.data()) == BAND_OK);
  for (int i = 0; i < 96; ++i) CHECK(K[i] == doctest::Approx(1.0).epsilon(2e-2));
  band_profile_free(p);
  band_curve_free(c);
}

TEST_CASE("clamped orientable solve relaxes to the circle through the C interface") {
  band_config* cfg = band_config_create();
  REQUIRE(band_config_set(cfg, "n", "64") == BAND_OK);
  REQUIRE(band_config_set(cfg, "moebius", "0") == BAND_OK);
  REQUIRE(band_config_set(cfg, "clamp_w", "1") == BAND_OK);
  REQUIRE(band_config_set(cfg, "init", "circle") == BAND_OK);
  REQUIRE(band_config_set(cfg, "perturbation", "0") == BAND_OK);
  band_result* res = nullptr;
  REQUIRE(band_solve(cfg, &res) == BAND_OK);
  CHECK(band_result_converged(res) == 1);
  CHECK(band_result_energy(res) == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
  CHECK(band_result_constraint_norm(res) <= 1e-6);
  CHECK(band_result_grad_norm(res) <= 1e-6);
  CHECK(band_result_outer_iterations(res) >= 1);
  band_result_free(res);
  band_config_free(cfg);
}

TEST_CASE("full pipeline: solve, statics, analysis and export") {
  band_config* cfg = band_config_create();
  REQUIRE(band_config_set(cfg, "n", "96") == BAND_OK);
  band_result* res = nullptr;
  REQUIRE(band_solve(cfg, &res) == BAND_OK);
  REQUIRE(band_result_converged(res) == 1);
  const band_profile* p = band_result_profile(res);
  const band_curve* c = band_result_curve(res);
  REQUIRE(p != nullptr);
  REQUIRE(c != nullptr);

  band_fields* fields = nullptr;
  REQUIRE(band_evaluate_statics(p, 1.0, 0.0, -1.0, -1.0, &fields) == BAND_OK);
  CHECK(std::isfinite(band_fields_constant(fields)));
  // Identities hold everywhere; the genuine balances hold off the mask.
  CHECK(band_fields_max_residual(fields, 0) < 1e-6);
  CHECK(band_fields_max_residual(fields, 3) < 1e-6);
  CHECK(band_fields_rms_residual(fields, 1) < band_fields_max_residual(fields, 1) + 1.0);
  TempFile ff("capi_fields.csv");
  REQUIRE(band_fields_save(fields, ff.path.c_str(), "fixture") == BAND_OK);
  CHECK(file_nonempty(ff.path));
  band_fields_free(fields);

  band_analysis* an = nullptr;
  REQUIRE(band_analyze(p, c, &an) == BAND_OK);
  double v = 0.0;
  REQUIRE(band_analysis_get(an, "singular.found", &v) == BAND_OK);
  CHECK(v == 1.0);
  REQUIRE(band_analysis_get(an, "zeros.count", &v) == BAND_OK);
  CHECK(v == 3.0);
  REQUIRE(band_analysis_get(an, "phi.average_deg", &v) == BAND_OK);
  CHECK(v > 39.0);
  CHECK(v < 51.0);
  REQUIRE(band_analysis_get(an, "axis.rms_rel", &v) == BAND_OK);
  CHECK(v < 0.01);
  CHECK(band_analysis_get(an, "bogus.key", &v) == BAND_ERR_INVALID_ARGUMENT);
  TempFile fa("capi_analysis.txt");
  REQUIRE(band_analysis_save(an, fa.path.c_str(), "fixture") == BAND_OK);
  CHECK(file_nonempty(fa.path));
  band_analysis_free(an);

  TempFile fm("capi_strip.obj");
  REQUIRE(band_export_mesh(p, c, 0.1, 1, fm.path.c_str(), "fixture") == BAND_OK);
  CHECK(file_nonempty(fm.path));
  CHECK(band_export_mesh(p, c, -0.1, 1, fm.path.c_str(), "fixture") ==
        BAND_ERR_INVALID_ARGUMENT);
  TempFile fp("capi_plot.csv");
  REQUIRE(band_export_plot(p, fp.path.c_str(), "fixture") == BAND_OK);
  CHECK(file_nonempty(fp.path));

  // Warm start from the solution: immediate convergence to the same energy.
  band_result* again = nullptr;
  REQUIRE(band_solve_from(cfg, p, &again) == BAND_OK);
  CHECK(band_result_converged(again) == 1);
  CHECK(band_result_energy(again) ==
        doctest::Approx(band_result_energy(res)).epsilon(1e-6));
  band_result_free(again);

  band_result_free(res);
  band_config_free(cfg);
}

TEST_CASE("self test battery passes and reports lines") {
  std::vector<std::string> lines;
  auto log = [](const char* line, void* user) {
    static_cast<std::vector<std::string>*>(user)->push_back(line);
  };
  const int failures = band_self_test(0, log, &lines);
  CHECK(failures == 0);
  CHECK(lines.size() >= 5);
}
