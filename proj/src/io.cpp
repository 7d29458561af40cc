#include "band/io.hpp"

#include "band/geometry.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace band::io {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void write_comment(std::ofstream& out, const std::string& comment) {
  if (comment.empty()) return;
  std::istringstream lines(comment);
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << "\n";
}

// Parses every numeric token on a line; false when any token is not a
// number, so column-header rows are skipped without special casing.
bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::string s = line;
  for (char& c : s)
    if (c == ',' || c == ';' || c == '\t') c = ' ';
  const char* p = s.c_str();
  while (*p) {
    while (*p && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) return false;
    out.push_back(v);
    p = end;
  }
  return !out.empty();
}

// Value of a "# key: v0 v1 ..." comment, or empty when the key is absent.
bool comment_values(const std::string& line, const std::string& key,
                    std::vector<double>& out) {
  const auto pos = line.find(key + ":");
  if (pos == std::string::npos) return false;
  return parse_row(line.substr(pos + key.size() + 1), out);
}

struct Table {
  std::vector<std::string> comments;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path, size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Table t;
  std::string line;
  std::vector<double> row;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      t.comments.push_back(line);
      continue;
    }
    if (!parse_row(line, row)) continue;  // header row
    if (row.size() < min_cols)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": row with fewer than " +
                               std::to_string(min_cols) + " columns");
    t.rows.push_back(row);
  }
  if (t.rows.empty()) throw std::runtime_error(path + ": no data rows");
  return t;
}

// Table length from a "# length:" comment, else from the uniform s column.
double table_length(const Table& t, const std::string& path) {
  std::vector<double> vals;
  for (const auto& c : t.comments)
    if (comment_values(c, "length", vals) && !vals.empty()) return vals[0];
  const size_t n = t.rows.size();
  if (n < 2) throw std::runtime_error(path + ": cannot infer length");
  const double ds = t.rows[1][0] - t.rows[0][0];
  const double L = ds * static_cast<double>(n);
  if (!(ds > 0.0) || !std::isfinite(L))
    throw std::runtime_error(path + ": cannot infer length from s column");
  for (size_t i = 0; i < n; ++i)
    if (std::abs(t.rows[i][0] - ds * static_cast<double>(i)) > 1e-6 * L)
      throw std::runtime_error(path + ": s column is not a uniform grid");
  return L;
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string timestamp_utc() {
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

void save_profile(const CurvatureTwistProfile& profile, const std::string& path,
                  const std::string& comment) {
  profile.validate();
  auto out = open_out(path);
  write_comment(out, comment);
  out << "# length: " << fmt(profile.length) << "\n";
  out << "# moebius: " << (profile.moebius ? 1 : 0) << "\n";
  out << "s,K,W\n";
  for (int i = 0; i < profile.nodes(); ++i)
    out << fmt(profile.s_at(i)) << "," << fmt(profile.K[i]) << ","
        << fmt(profile.W[i]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

CurvatureTwistProfile load_profile(const std::string& path) {
  const Table t = read_table(path, 3);
  CurvatureTwistProfile profile;
  profile.length = table_length(t, path);
  std::vector<double> vals;
  for (const auto& c : t.comments)
    if (comment_values(c, "moebius", vals) && !vals.empty())
      profile.moebius = vals[0] != 0.0;
  const int n = static_cast<int>(t.rows.size());
  profile.K.resize(n);
  profile.W.resize(n);
  for (int i = 0; i < n; ++i) {
    profile.K[i] = t.rows[i][1];
    profile.W[i] = t.rows[i][2];
  }
  profile.validate();
  return profile;
}

void save_curve(const FramedCurve& curve, const std::string& path,
                const std::string& comment) {
  curve.validate();
  auto out = open_out(path);
  write_comment(out, comment);
  out << "# length: " << fmt(curve.length) << "\n";
  out << "# has_wrap: " << (curve.has_wrap ? 1 : 0) << "\n";
  if (curve.has_wrap) {
    out << "# wrap_position:";
    for (int k = 0; k < 3; ++k) out << " " << fmt(curve.wrap_position[k]);
    out << "\n# wrap_frame:";
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << " " << fmt(curve.wrap_frame(r, c));
    out << "\n";
  }
  out << "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz\n";
  for (int i = 0; i < curve.nodes(); ++i) {
    out << fmt(curve.spacing() * static_cast<double>(i));
    for (int k = 0; k < 3; ++k) out << "," << fmt(curve.position[i][k]);
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) out << "," << fmt(curve.frame[i](r, c));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

FramedCurve load_curve(const std::string& path) {
  const Table t = read_table(path, 13);
  FramedCurve curve;
  curve.length = table_length(t, path);
  const int n = static_cast<int>(t.rows.size());
  curve.position.resize(n);
  curve.frame.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    curve.position[i] = Eigen::Vector3d(row[1], row[2], row[3]);
    Eigen::Matrix3d F;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) F(r, c) = row[4 + 3 * c + r];
    curve.frame[i] = F;
  }
  std::vector<double> vals;
  for (const auto& c : t.comments) {
    if (comment_values(c, "has_wrap", vals) && !vals.empty())
      curve.has_wrap = vals[0] != 0.0;
    if (comment_values(c, "wrap_position", vals) && vals.size() >= 3)
      curve.wrap_position = Eigen::Vector3d(vals[0], vals[1], vals[2]);
    if (comment_values(c, "wrap_frame", vals) && vals.size() >= 9)
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) curve.wrap_frame(r, k) = vals[3 * r + k];
  }
  curve.validate();
  return curve;
}

std::vector<Eigen::Vector3d> load_centerline(const std::string& path) {
  const Table t = read_table(path, 3);
  std::vector<Eigen::Vector3d> points;
  points.reserve(t.rows.size());
  // 3 columns are x,y,z; wider tables are s,x,y,z,... so skip the s column.
  for (const auto& row : t.rows) {
    const size_t off = row.size() >= 4 ? 1 : 0;
    points.emplace_back(row[off], row[off + 1], row[off + 2]);
  }
  return points;
}

void save_fields(const CurvatureTwistProfile& profile, const StaticFields& fields,
                 const EquilibriumResiduals& residuals, const std::string& path,
                 const std::string& comment) {
  profile.validate();
  const int n = profile.nodes();
  if (fields.U.size() != n || residuals.r.size() != 6 ||
      residuals.r[0].size() != n)
    throw std::invalid_argument("save_fields: size mismatch");
  auto out = open_out(path);
  write_comment(out, comment);
  out << "# length: " << fmt(profile.length) << "\n";
  out << "# A: " << fmt(fields.A) << "\n";
  out << "# epsilon: " << fmt(fields.epsilon) << "\n";
  out << "# C: " << fmt(fields.C) << "\n";
  out << "# masked_nodes: " << residuals.masked_nodes << "\n";
  out << "# max_residual:";
  for (int k = 0; k < 6; ++k) out << " " << fmt(residuals.max_norm[k]);
  out << "\n# rms_residual:";
  for (int k = 0; k < 6; ++k) out << " " << fmt(residuals.rms_norm[k]);
  out << "\n";
  out << "s,K,W,phi_deg,U,T,N,B,Mt,Mn,Mb,r1,r2,r3,r4,r5,r6\n";
  for (int i = 0; i < n; ++i) {
    const double phi =
        kRadToDeg * std::atan2(std::abs(profile.W[i]), std::abs(profile.K[i]));
    out << fmt(profile.s_at(i)) << "," << fmt(profile.K[i]) << ","
        << fmt(profile.W[i]) << "," << fmt(phi) << "," << fmt(fields.U[i])
        << "," << fmt(fields.T[i]) << "," << fmt(fields.N[i]) << ","
        << fmt(fields.B[i]) << "," << fmt(fields.Mt[i]) << ","
        << fmt(fields.Mn[i]) << "," << fmt(fields.Mb[i]);
    for (int k = 0; k < 6; ++k) out << "," << fmt(residuals.r[k][i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_mesh_obj(const CurvatureTwistProfile& profile, const FramedCurve& curve,
                   double width, bool moebius, const std::string& path,
                   const std::string& comment) {
  profile.validate();
  curve.validate();
  if (profile.nodes() != curve.nodes())
    throw std::invalid_argument("save_mesh_obj: profile/curve node mismatch");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("save_mesh_obj: width must be positive");
  const auto gen = geometry::generator_field(profile, curve);
  const int n = curve.nodes();
  auto out = open_out(path);
  write_comment(out, comment);
  out << "# ruled strip, width " << fmt(width) << (moebius ? ", moebius seam" : "")
      << "\n";
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d off = 0.5 * width * gen.g[i];
    const Eigen::Vector3d a = curve.position[i] + off;
    const Eigen::Vector3d b = curve.position[i] - off;
    out << "v " << fmt(a[0]) << " " << fmt(a[1]) << " " << fmt(a[2]) << "\n";
    out << "v " << fmt(b[0]) << " " << fmt(b[1]) << " " << fmt(b[2]) << "\n";
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    int a = 2 * i + 1, b = 2 * i + 2, c = 2 * j + 1, d = 2 * j + 2;
    if (j == 0 && moebius) std::swap(c, d);  // half-twist seam stitch
    out << "f " << a << " " << c << " " << d << "\n";
    out << "f " << a << " " << d << " " << b << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_plot_table(const CurvatureTwistProfile& profile,
                     const std::string& path, const std::string& comment) {
  profile.validate();
  auto out = open_out(path);
  write_comment(out, comment);
  out << "# length: " << fmt(profile.length) << "\n";
  out << "# closed: last row repeats node 0 at s = length\n";
  out << "s,K,W,phi_deg,phi_signed_deg\n";
  const int n = profile.nodes();
  for (int i = 0; i <= n; ++i) {
    const int k = i % n;
    const double s = i == n ? profile.length : profile.s_at(i);
    // The closing row shows the seam image of node 0 (K is anti-periodic
    // across a half-twisted wrap).
    const double Kk = (i == n ? profile.seam_sign() : 1.0) * profile.K[k];
    out << fmt(s) << "," << fmt(Kk) << "," << fmt(profile.W[k]) << ","
        << fmt(kRadToDeg * std::atan2(std::abs(profile.W[k]), std::abs(Kk)))
        << ","
        << fmt(kRadToDeg * std::atan2(profile.W[k], Kk)) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace band::io
