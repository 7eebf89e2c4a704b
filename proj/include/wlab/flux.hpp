#pragma once

#include <optional>
#include <vector>

#include "wlab/mesh.hpp"
#include "wlab/profile.hpp"
#include "wlab/weingarten.hpp"

namespace wlab {

// Sign convention used throughout this module: at the cut of a positive
// (upward) end, the conormal and the cap normal both point away from the end,
// i.e. downward at a horizontal parallel. With it, the flux of a W-Delaunay
// surface at any parallel equals -pi times the first integral, which is the
// end mass pi (R r + b).

/// A parallel of a surface of revolution.
struct Parallel {
  double y = 0.0;
  double psi = 0.0;
  double z = 0.0;
  int orientation = 1;  // +1: conventions above; -1: both normals reversed
};

/// Closed-form flux at a parallel: -pi (y^2 - 2 a y cos psi - b cos^2 psi).
double flux_at_parallel(const Parallel& p, double a, double b);

/// Principal frame and curvatures of the surface at a point (mean curvature
/// orientation).
struct ShapeOperator {
  Vec3 dir1;
  double k1;
  Vec3 dir2;
  double k2;

  double mean() const { return 0.5 * (k1 + k2); }
  Vec3 apply(const Vec3& v) const { return k1 * v.dot(dir1) * dir1 + k2 * v.dot(dir2) * dir2; }
  /// T = 2H I - A on tangent vectors.
  Vec3 apply_t(const Vec3& v) const { return 2.0 * mean() * v - apply(v); }
};

struct LoopSample {
  Vec3 position;
  Vec3 normal;    // unit surface normal, mean curvature orientation
  Vec3 conormal;  // unit, tangent to the surface, orthogonal to the loop
  std::optional<ShapeOperator> shape;
  double weight = 0.0;  // quadrature weight (line element)
};

/// <Y, (2a I + b T) nu> at a loop sample.
double operator_term(const LoopSample& sample, const Vec3& Y, double a, double b);
/// <nu, (2a I + b T) nu>; positive where the operator is elliptic.
double operator_quadratic_form(const LoopSample& sample, double a, double b);

struct FluxTerms {
  double cap = 0.0;   // sum over cap triangles of <Y, n> area
  double line = 0.0;  // trapezoid sum of <Y, (2a + bT) nu>
  double value = 0.0; // cap - line / 2
};

/// Quadrature of int_K <Y, n_K> - 1/2 int_Gamma <Y, (2a + bT) nu>. The cap
/// winding defines n_K; the conormals come with the samples.
FluxTerms flux_quadrature(const std::vector<LoopSample>& loop, const TriMesh& cap, double a,
                          double b, const Vec3& Y = Vec3::UnitZ());

/// Samples of the parallel through `state` with analytic curvature data.
/// conormal_sign = -1 points the conormal backward along the profile
/// (downward where the profile rises). Weights are the exact circle
/// trapezoid weights 2 pi y / n.
std::vector<LoopSample> parallel_loop(const ProfileState& state, const WeingartenRelation& relation,
                                      int n, double conormal_sign);

/// Planar fan over the loop positions, wound so its normal has a positive
/// component along normal_hint.
TriMesh disk_cap(const std::vector<LoopSample>& loop, const Vec3& normal_hint);

/// flux_quadrature at a parallel with the module's sign convention (horizontal
/// disk cap, downward normals).
FluxTerms parallel_flux(const ProfileState& state, const WeingartenRelation& relation, int n);

enum class EndSign { kPositive, kNegative };

struct EndSpec {
  EndSign sign = EndSign::kPositive;
  double R = 0.0;
  double r = 0.0;
  double b = 0.0;
  double H = 0.0;  // only used by cmc ends
};

/// pi (R r + b).
double mass_of_end(const EndSpec& end);
/// pi (r / H - r^2), for 0 < r < 1/H.
double cmc_mass(double r, double H);

/// A compact cycle: an open surface plus planar caps closing each of its
/// boundary loops. Cap normals point out of the enclosed region; boundary
/// conormals point out of the surface part.
struct CycleCap {
  TriMesh disk;
  std::vector<LoopSample> boundary;
};

struct CappedCycle {
  TriMesh surface;
  std::vector<CycleCap> caps;
};

struct BalancingResult {
  double lhs = 0.0;       // sum over caps of int <Y, n>
  double rhs = 0.0;       // 1/2 sum over boundaries of int <Y, (2a + bT) nu>
  double residual = 0.0;  // |lhs - rhs| / diameter^2
  double relative = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|), or residual when both vanish
};

BalancingResult balancing_check(const CappedCycle& cycle, const Vec3& Y, double a, double b);

/// Revolved profile between two parallels closed by horizontal disks.
CappedCycle capped_profile_cycle(const ProfileCurve& curve, double s_lo, double s_hi, int n_theta);

}  // namespace wlab
