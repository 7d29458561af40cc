#pragma once

#include "band/types.hpp"

#include <string>
#include <vector>

namespace band::io {

/** Format a double with 17 significant digits (exact binary round trip). */
std::string fmt(double v);

/**
 * UTC timestamp "YYYY-MM-DDTHH:MM:SSZ". Honors SOURCE_DATE_EPOCH when set,
 * so stamped outputs can still be reproduced bit for bit.
 */
std::string timestamp_utc();

/**
 * Profile table: '#' comment lines (free-form comment plus a "# length:"
 * entry), a "s,K,W" header row, then one comma-separated row per node.
 */
void save_profile(const CurvatureTwistProfile& profile, const std::string& path,
                  const std::string& comment = "");

/**
 * Reads a profile table. Accepts comma or whitespace separation; the length
 * comes from the "# length:" comment or, failing that, from the uniform s
 * column. Throws std::runtime_error on malformed input.
 */
CurvatureTwistProfile load_profile(const std::string& path);

/**
 * Curve table: s,x,y,z plus the frame columns tx..bz, with the wrap state
 * stored in header comments so closure survives the round trip.
 */
void save_curve(const FramedCurve& curve, const std::string& path,
                const std::string& comment = "");

FramedCurve load_curve(const std::string& path);

/**
 * Plain centerline reader: one point per line, x,y,z (or s,x,y,z; comma or
 * whitespace separated; '#' comments ignored).
 */
std::vector<Eigen::Vector3d> load_centerline(const std::string& path);

/** Statics table: s,K,W,phi_deg,U,T,N,B,Mt,Mn,Mb,r1..r6. */
void save_fields(const CurvatureTwistProfile& profile, const StaticFields& fields,
                 const EquilibriumResiduals& residuals, const std::string& path,
                 const std::string& comment = "");

/**
 * Ruled-strip OBJ mesh of half-width width/2 along the generator field.
 * With moebius set the seam quad is stitched edge-swapped, producing the
 * one-sided surface. Vertices are emitted in node order, two per node.
 */
void save_mesh_obj(const CurvatureTwistProfile& profile, const FramedCurve& curve,
                   double width, bool moebius, const std::string& path,
                   const std::string& comment = "");

/**
 * Closed plot table with n+1 rows (node 0 repeated at s = L):
 * s,K,W,phi_deg,phi_signed_deg.
 */
void save_plot_table(const CurvatureTwistProfile& profile,
                     const std::string& path, const std::string& comment = "");

}  // namespace band::io
