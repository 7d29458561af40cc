#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "band/geometry.hpp"
#include "band/io.hpp"
#include "band/statics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace band;

namespace {

CurvatureTwistProfile random_profile(std::mt19937_64& rng, int n, bool moebius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CurvatureTwistProfile p;
  p.length = 5.678901234567;
  p.moebius = moebius;
  p.K.resize(n);
  p.W.resize(n);
  for (int i = 0; i < n; ++i) {
    p.K[i] = 1.0 + 0.37 * u(rng);
    p.W[i] = 0.73 * u(rng);
  }
  return p;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("fmt round trips doubles exactly") {
  const double values[] = {0.0,       1.0 / 3.0, 0.1,    -M_PI,
                           1e-300,    6.02e23,   -0.0,   2.2250738585072014e-308,
                           123456789.123456789};
  for (double v : values) {
    const std::string s = io::fmt(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("timestamp honors the reproducible-build epoch") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(io::timestamp_utc() == "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("profile tables round trip bit for bit") {
  std::mt19937_64 rng(3);
  for (bool moebius : {false, true}) {
    const auto p = random_profile(rng, 37, moebius);
    TempFile f(moebius ? "rt_profile_m.csv" : "rt_profile.csv");
    io::save_profile(p, f.path, "round trip fixture");
    const auto q = io::load_profile(f.path);
    CHECK(q.length == p.length);  // exact: 17 digits survive the text form
    CHECK(q.moebius == p.moebius);
    REQUIRE(q.nodes() == p.nodes());
    CHECK((q.K - p.K).abs().maxCoeff() == 0.0);
    CHECK((q.W - p.W).abs().maxCoeff() == 0.0);
    // The comment made it into the header.
    const auto lines = read_lines(f.path);
    CHECK(lines[0] == "# round trip fixture");
  }
}

TEST_CASE("profile loading accepts whitespace separation and infers length") {
  TempFile f("ws_profile.txt");
  {
    std::ofstream out(f.path);
    out << "# hand-written table, no length comment\n";
    out << "0.0  2.0  0.5\n";
    out << "0.25 2.1 -0.5\n";
    out << "0.5  2.2  0.25\n";
    out << "0.75 2.3  0.0\n";
  }
  const auto p = io::load_profile(f.path);
  REQUIRE(p.nodes() == 4);
  CHECK(p.length == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.K[2] == 2.2);
  CHECK(p.W[1] == -0.5);
}

TEST_CASE("malformed profile rows are rejected with their line number") {
  TempFile f("bad_profile.csv");
  {
    std::ofstream out(f.path);
    out << "s,K,W\n0,1,0\n0.1,1\n";  // third line lacks the W column
  }
  try {
    io::load_profile(f.path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(io::load_profile("no_such_profile_file.csv"),
                  std::runtime_error);
}

TEST_CASE("curve tables round trip including the wrap state") {
  std::mt19937_64 rng(7);
  const auto p = random_profile(rng, 24, true);
  const auto curve = geometry::reconstruct(p);
  TempFile f("rt_curve.csv");
  io::save_curve(curve, f.path);
  const auto back = io::load_curve(f.path);
  REQUIRE(back.nodes() == curve.nodes());
  CHECK(back.length == curve.length);
  CHECK(back.has_wrap == curve.has_wrap);
  for (int i = 0; i < curve.nodes(); ++i) {
    CHECK((back.position[i] - curve.position[i]).norm() == 0.0);
    CHECK((back.frame[i] - curve.frame[i]).norm() == 0.0);
  }
  CHECK((back.wrap_position - curve.wrap_position).norm() == 0.0);
  CHECK((back.wrap_frame - curve.wrap_frame).norm() == 0.0);
  // The wrap survives, so closure is identical after the round trip.
  const auto g0 = geometry::closure(curve, true);
  const auto g1 = geometry::closure(back, true);
  CHECK(g0.frame_norm() == g1.frame_norm());
}

TEST_CASE("centerline reader accepts bare and arclength-prefixed points") {
  TempFile f("centerline.txt");
  {
    std::ofstream out(f.path);
    out << "# three points, bare xyz\n";
    out << "0,0,0\n1,0,0\n1,1,0.5\n";
  }
  auto pts = io::load_centerline(f.path);
  REQUIRE(pts.size() == 3);
  CHECK((pts[2] - Eigen::Vector3d(1, 1, 0.5)).norm() == 0.0);
  {
    std::ofstream out(f.path);
    out << "s x y z\n0 9 0 0\n1 0 9 0\n2 0 0 9\n";
  }
  pts = io::load_centerline(f.path);
  REQUIRE(pts.size() == 3);
  // Four columns: the first is arclength, not geometry.
  CHECK((pts[0] - Eigen::Vector3d(9, 0, 0)).norm() == 0.0);
}

TEST_CASE("fields table carries all columns and headers") {
  std::mt19937_64 rng(11);
  auto p = random_profile(rng, 20, false);
  p.K = p.K.abs() + 0.5;  // keep divisions by K benign
  const auto fields = statics::evaluate_fields(p, {1.0, 0.0});
  const auto res = statics::residuals(p, fields);
  TempFile f("rt_fields.csv");
  io::save_fields(p, fields, res, f.path);
  const auto lines = read_lines(f.path);
  int header = -1;
  for (int i = 0; i < static_cast<int>(lines.size()); ++i)
    if (lines[i].rfind("s,K,W", 0) == 0) header = i;
  REQUIRE(header >= 0);
  CHECK(lines[header] == "s,K,W,phi_deg,U,T,N,B,Mt,Mn,Mb,r1,r2,r3,r4,r5,r6");
  CHECK(static_cast<int>(lines.size()) - header - 1 == 20);
  // Every data row has 17 comma-separated columns.
  std::stringstream row(lines[header + 1]);
  std::string cell;
  int cells = 0;
  while (std::getline(row, cell, ',')) ++cells;
  CHECK(cells == 17);
  bool has_C = false;
  for (const auto& l : lines) has_C = has_C || l.rfind("# C:", 0) == 0;
  CHECK(has_C);
}

TEST_CASE("plot table closes the loop with the seam image of node 0") {
  std::mt19937_64 rng(13);
  for (bool moebius : {false, true}) {
    const auto p = random_profile(rng, 16, moebius);
    TempFile f("rt_plot.csv");
    io::save_plot_table(p, f.path);
    const auto lines = read_lines(f.path);
    std::vector<std::vector<double>> rows;
    for (const auto& l : lines) {
      if (l.empty() || l[0] == '#' || l[0] == 's') continue;
      std::stringstream ss(l);
      std::vector<double> row;
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      rows.push_back(row);
    }
    REQUIRE(static_cast<int>(rows.size()) == 17);  // n + 1 closed rows
    CHECK(rows[0].size() == 5);
    CHECK(rows.back()[0] == p.length);
    const double sg = moebius ? -1.0 : 1.0;
    CHECK(rows.back()[1] == sg * rows[0][1]);  // K picks up the seam sign
    CHECK(rows.back()[2] == rows[0][2]);       // W is periodic
  }
}

TEST_CASE("mesh export writes two vertices and two triangles per node") {
  CurvatureTwistProfile p;
  p.length = 2.0 * M_PI;
  p.K = Eigen::ArrayXd::Constant(64, 1.0);
  p.W = Eigen::ArrayXd::Zero(64);
  const auto curve = geometry::reconstruct(p);
  TempFile f("strip.obj");

  SUBCASE("orientable stitch joins matching edges") {
    io::save_mesh_obj(p, curve, 0.1, false, f.path);
    int nv = 0, nf = 0;
    bool plain_seam = false;
    for (const auto& l : read_lines(f.path)) {
      if (l.rfind("v ", 0) == 0) ++nv;
      if (l.rfind("f ", 0) == 0) ++nf;
      if (l == "f 127 1 2") plain_seam = true;
    }
    CHECK(nv == 128);
    CHECK(nf == 128);
    CHECK(plain_seam);
  }

  SUBCASE("half-twisted stitch swaps the strip edges at the seam") {
    io::save_mesh_obj(p, curve, 0.1, true, f.path);
    bool crossed = false;
    for (const auto& l : read_lines(f.path))
      if (l == "f 127 2 1") crossed = true;
    CHECK(crossed);
  }

  SUBCASE("degenerate width is rejected") {
    CHECK_THROWS_AS(io::save_mesh_obj(p, curve, 0.0, false, f.path),
                    std::invalid_argument);
  }
}
