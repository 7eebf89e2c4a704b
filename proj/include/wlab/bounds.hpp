#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlab/flux.hpp"
#include "wlab/mesh.hpp"
#include "wlab/weingarten.hpp"

namespace wlab {

enum class Verdict { kInequalityHolds, kInequalityViolated, kCompactForced };
const char* to_string(Verdict v);

struct BalanceReport {
  double disk_area = 0.0;
  double positive_mass_sum = 0.0;
  double negative_mass_sum = 0.0;
  double balance = 0.0;
  Verdict verdict = Verdict::kInequalityHolds;
  int min_positive_ends = 0;
};

/// Sum of positive end masses minus negative ones.
double balance(const std::vector<EndSpec>& ends);

/// Area inequality for a disk of area disk_area bounded by the annulus
/// boundary. When params is empty, a is read off the ends as (R + r) / 2 and
/// b from the first end. Boundary radius for the end count is sqrt(|D|/pi).
BalanceReport theorem_two_verdict(double disk_area, const std::vector<EndSpec>& ends,
                                  std::optional<LinearParams> params = std::nullopt);

/// ceil(r^2 / (2a^2 + b)); with sharp, ceil(r^2 / (a^2 + b)).
int min_positive_ends(double boundary_radius, double a, double b, bool sharp = false);

/// Signed number of turns of a closed polyline around p.
int winding_number(const std::vector<Vec2>& loop, const Vec2& p);

struct PlanarLoopSet {
  std::vector<std::vector<Vec2>> loops;
  Vec2 p = Vec2::Zero();
};

struct ParityResult {
  int loop_count = 0;
  int nonzero_winding = 0;
  bool pass = false;
};

/// Boundary loops of the surface must lie in z = 0. The ray is the polyline
/// ray[0] -> ray[1] -> ... continued to infinity along final_dir; ray[0] is p.
PlanarLoopSet boundary_loop_set(const TriMesh& surface, const Vec3& p);
ParityResult loop_parity_check(const TriMesh& surface, const std::vector<Vec3>& ray,
                               const Vec3& final_dir);
ParityResult loop_parity_check(const PlanarLoopSet& loops);

/// Half-torus over the annulus r_in < |x - c| < r_out of the plane z = 0.
TriMesh half_torus(const Vec2& c, double r_in, double r_out, int n_theta, int n_phi);
/// Hemisphere over the disk |x - c| < radius.
TriMesh dome(const Vec2& c, double radius, int n_theta, int n_phi);

struct ParityTrial {
  std::uint64_t seed = 0;
  int loop_count = 0;
  int nonzero_winding = 0;
  bool pass = false;
};

/// One random configuration of disjoint domes and concentric half-tori in the
/// upper halfspace, with a bent ray from the origin that avoids them all.
ParityTrial parity_trial(std::uint64_t seed);
std::vector<ParityTrial> parity_harness(std::uint64_t seed, int trials);

}  // namespace wlab
