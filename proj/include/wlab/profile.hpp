#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wlab/mesh.hpp"
#include "wlab/weingarten.hpp"

namespace wlab {

/// Point of an arclength-parametrized generating curve. psi is the angle
/// between the curve and the rotation axis: dy/ds = sin(psi), dz/ds = cos(psi).
struct ProfileState {
  double s = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;
};

struct ProfileRates {
  double dy = 0.0;
  double dz = 0.0;
  double dpsi = 0.0;
};

/// Right-hand side of the generating-curve ODE. The principal curvatures are
/// kappa1 = -dpsi/ds (meridian) and kappa2 = cos(psi)/y (parallel); kappa1 is
/// obtained from the Weingarten relation. Throws AxisSingularityError when
/// y < y_min (defaults to 1e-8 times the relation's length scale).
ProfileRates profile_rhs(const ProfileState& state, const WeingartenRelation& relation,
                         double y_min = -1.0);

/// y^2 - 2 a y cos(psi) - b cos^2(psi); conserved along linear and cmc profiles.
double first_integral(const ProfileState& state, double a, double b);

/// Stop condition for integrate_profile: integration ends at the count-th sign
/// change of g. Every crossing of g is located and stored as a sample.
struct ProfileEvent {
  std::function<double(const ProfileState&)> g;
  int count = 1;
};

struct IntegrateOptions {
  double tol = 1e-11;       // local error tolerance (absolute in units of the length scale and relative)
  double max_step = 0.0;    // <= 0 selects 0.05 * length scale
  double y_min = -1.0;      // <= 0 selects 1e-8 * length scale
  std::optional<ProfileEvent> event;
};

enum class Termination { kReachedEnd, kEvent, kAxisApproach };

/// Sampled generating curve. Samples are accepted Runge-Kutta states (plus the
/// located event states), strictly increasing in s.
struct ProfileCurve {
  WeingartenRelation relation;
  std::vector<ProfileState> samples;
  std::vector<ProfileRates> rates;
  std::vector<double> first_integral_values;  // empty for general relations
  std::vector<std::size_t> event_indices;     // samples that are located crossings of the event
  Termination termination = Termination::kReachedEnd;

  /// Cubic Hermite interpolation of (y, z, psi) at arclength s.
  ProfileState interpolate(double s) const;
  double first_integral_drift() const;  // max |I - I(0)|
};

/// Dormand-Prince 5(4) integration with a PI step controller.
ProfileCurve integrate_profile(const ProfileState& initial, const WeingartenRelation& relation,
                               double s_max, const IntegrateOptions& options = {});

enum class ExtremumKind { kNeck, kBulge };

struct Extremum {
  ProfileState state;
  ExtremumKind kind;
};

enum class ExtremaStatus { kOk, kDegenerate, kNoExtrema };

struct ExtremaResult {
  ExtremaStatus status = ExtremaStatus::kNoExtrema;
  std::vector<Extremum> extrema;
};

/// Locates the parallels where sin(psi) = 0 (to 1e-10). A curve that stays at
/// sin(psi) = 0 with constant radius is reported as degenerate (cylinder).
ExtremaResult detect_extrema(const ProfileCurve& curve);

/// One period of a W-Delaunay (or classical unduloid, for cmc) profile.
struct DelaunayProfile {
  ProfileCurve curve;  // neck -> bulge -> neck
  double R = 0.0;      // big radius
  double r = 0.0;      // small radius
  double period = 0.0; // arclength of one period
  double z_period = 0.0;
  double I0 = 0.0;
  bool cylinder = false;
};

/// Integrates from a neck of radius neck_r in (0, a] over one full period.
/// At neck_r = a the cylinder is returned over the limiting period
/// 2 pi sqrt(a^2 + b) of small oscillations.
DelaunayProfile delaunay_family(const WeingartenRelation& relation, double neck_r,
                                const IntegrateOptions& options = {});

/// Continues a period for n_periods with the same tolerance, used to check
/// periodicity and conservation over several periods.
ProfileCurve delaunay_periods(const WeingartenRelation& relation, double neck_r, int n_periods,
                              const IntegrateOptions& options = {});

struct SphereProfile {
  ProfileCurve curve;
  double radius = 0.0;           // max y along the profile
  double start_offset = 0.0;     // arclength from the pole of the first sample
  double closure_y = 0.0;        // |y_end - y_start|
  double closure_psi = 0.0;      // |psi_end + psi_start|
};

/// Half profile of the umbilic solution, started off-axis from the pole series
/// y = sin(k s)/k, psi = pi/2 - k s, z = (1 - cos(k s))/k at s = eps_fraction/k
/// and integrated until psi is mirrored.
SphereProfile sphere_profile(const WeingartenRelation& relation, double eps_fraction = 1e-3,
                             const IntegrateOptions& options = {});
SphereProfile sphere_profile(double a, double b, double eps_fraction = 1e-3);

enum class CapMode { kNone, kBoth };

/// Surface of revolution about the z axis. Ring i of the mesh holds vertices
/// i * n_theta ... i * n_theta + n_theta - 1 at angles 2 pi j / n_theta.
/// Triangles are wound so that normals point away from the axis where the
/// profile rises (z increasing); the mean curvature vector of the linear
/// family is the opposite one.
struct RevolvedMesh {
  TriMesh mesh;
  int n_theta = 0;
  std::vector<ProfileState> rings;
  std::vector<int> cap_centers;  // vertex index of each cap center, bottom first
};

RevolvedMesh revolve(const ProfileCurve& curve, int n_theta, double s_lo, double s_hi,
                     CapMode caps = CapMode::kNone);
RevolvedMesh revolve(const ProfileCurve& curve, int n_theta, CapMode caps = CapMode::kNone);

/// Index of the sample closest to s.
std::size_t nearest_sample(const ProfileCurve& curve, double s);

}  // namespace wlab
