#include "wlab/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

using State3 = std::array<double, 3>;  // (y, z, psi)

constexpr double kEventTol = 1e-10;

State3 to3(const ProfileState& p) { return {p.y, p.z, p.psi}; }
ProfileState from3(double s, const State3& x) { return {s, x[0], x[1], x[2]}; }
State3 to3(const ProfileRates& r) { return {r.dy, r.dz, r.dpsi}; }

double default_y_min(const WeingartenRelation& rel, double y_min) {
  return y_min > 0.0 ? y_min : 1e-8 * rel.length_scale();
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  bool ok = false;  // false when a stage crossed the axis threshold
  State3 x{};
  State3 err{};
  State3 k7{};
};

class Stepper {
 public:
  Stepper(const WeingartenRelation& rel, double y_min) : rel_(rel), y_min_(y_min) {}

  State3 rhs(double s, const State3& x) const {
    const auto r = profile_rhs(from3(s, x), rel_, y_min_);
    return to3(r);
  }

  StepResult step(double s, const State3& x, const State3& k1, double h) const {
    StepResult out;
    try {
      auto comb = [&](std::initializer_list<std::pair<double, const State3*>> terms) {
        State3 r = x;
        for (const auto& [c, k] : terms) {
          for (int i = 0; i < 3; ++i) r[i] += h * c * (*k)[i];
        }
        return r;
      };
      const State3 k2 = rhs(s + c2 * h, comb({{a21, &k1}}));
      const State3 k3 = rhs(s + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
      const State3 k4 = rhs(s + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State3 k5 = rhs(s + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State3 k6 =
          rhs(s + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      out.x = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      out.k7 = rhs(s + h, out.x);
      for (int i = 0; i < 3; ++i) {
        out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * out.k7[i]);
      }
      out.ok = true;
    } catch (const AxisSingularityError&) {
      out.ok = false;
    }
    return out;
  }

 private:
  const WeingartenRelation& rel_;
  double y_min_;
};

// Locates g = 0 inside a step of size h from (s, x) by Illinois regula falsi,
// each trial point being a fresh single step from the left end.
ProfileState locate_crossing(const Stepper& stepper, double s, const State3& x, const State3& k1,
                             double h, const std::function<double(const ProfileState&)>& g,
                             double g_lo, double g_hi) {
  double lo = 0.0, hi = h;
  double f_lo = g_lo, f_hi = g_hi;
  ProfileState best = from3(s + h, stepper.step(s, x, k1, h).x);
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const auto res = stepper.step(s, x, k1, mid);
    if (!res.ok) throw NumericalError("event location crossed the axis threshold");
    best = from3(s + mid, res.x);
    const double f_mid = g(best);
    if (std::abs(f_mid) < 1e-3 * kEventTol || hi - lo < 1e-15 * std::max(1.0, std::abs(s))) break;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      f_hi = f_mid;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  return best;
}

bool sign_change(double a, double b) {
  return a != 0.0 && b != 0.0 && std::signbit(a) != std::signbit(b);
}

}  // namespace

ProfileRates profile_rhs(const ProfileState& state, const WeingartenRelation& relation,
                         double y_min) {
  const double threshold = default_y_min(relation, y_min);
  if (!(state.y >= threshold)) {
    std::ostringstream os;
    os << "profile_rhs: radius " << state.y << " below axis threshold " << threshold;
    throw AxisSingularityError(os.str());
  }
  const double kappa2 = std::cos(state.psi) / state.y;
  const double kappa1 = solve_kappa1(relation, kappa2);
  return {std::sin(state.psi), std::cos(state.psi), -kappa1};
}

double first_integral(const ProfileState& state, double a, double b) {
  const double c = std::cos(state.psi);
  return state.y * state.y - 2.0 * a * state.y * c - b * c * c;
}

ProfileState ProfileCurve::interpolate(double s) const {
  if (samples.empty()) throw DomainError("interpolate: empty curve");
  if (s <= samples.front().s) return samples.front();
  if (s >= samples.back().s) return samples.back();
  auto it = std::upper_bound(samples.begin(), samples.end(), s,
                             [](double v, const ProfileState& p) { return v < p.s; });
  const auto i = static_cast<std::size_t>(std::distance(samples.begin(), it)) - 1;
  const auto& p0 = samples[i];
  const auto& p1 = samples[i + 1];
  const double h = p1.s - p0.s;
  const double t = (s - p0.s) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  const State3 x0 = to3(p0), x1 = to3(p1), d0 = to3(rates[i]), d1 = to3(rates[i + 1]);
  State3 x{};
  for (int k = 0; k < 3; ++k) x[k] = h00 * x0[k] + h10 * h * d0[k] + h01 * x1[k] + h11 * h * d1[k];
  return from3(s, x);
}

double ProfileCurve::first_integral_drift() const {
  double drift = 0.0;
  for (double v : first_integral_values) {
    drift = std::max(drift, std::abs(v - first_integral_values.front()));
  }
  return drift;
}

ProfileCurve integrate_profile(const ProfileState& initial, const WeingartenRelation& relation,
                               double s_max, const IntegrateOptions& options) {
  const double L = relation.length_scale();
  const double y_min = default_y_min(relation, options.y_min);
  if (!(initial.y > y_min)) {
    throw DomainError("integrate_profile: initial radius must exceed the axis threshold");
  }
  if (!(s_max > initial.s)) throw DomainError("integrate_profile: s_max must exceed initial s");
  if (!(options.tol > 0.0)) throw DomainError("integrate_profile: tolerance must be positive");
  const double max_step = options.max_step > 0.0 ? options.max_step : 0.05 * L;

  Stepper stepper(relation, y_min);
  ProfileCurve curve{relation, {}, {}, {}, {}, Termination::kReachedEnd};
  std::optional<LinearParams> ab;
  if (relation.has_first_integral()) ab = relation.linear_params();

  auto push = [&](const ProfileState& st, const State3& k) {
    curve.samples.push_back(st);
    curve.rates.push_back({k[0], k[1], k[2]});
    if (ab) curve.first_integral_values.push_back(first_integral(st, ab->a, ab->b));
  };

  double s = initial.s;
  State3 x = to3(initial);
  State3 k1 = stepper.rhs(s, x);
  push(initial, k1);

  const double scale[3] = {L, L, 1.0};
  double h = std::min(max_step, 0.01 * L);
  double err_prev = 1e-4;
  int crossings = 0;
  const auto* ev = options.event ? &*options.event : nullptr;

  while (s < s_max) {
    h = std::min({h, max_step, s_max - s});
    if (h < 1e-14 * std::max(L, std::abs(s))) {
      // the cos(psi)/y term makes the error estimate blow up right at the axis
      if (x[0] < 1e-3 * L) {
        curve.termination = Termination::kAxisApproach;
        return curve;
      }
      throw StepCollapseError("integrate_profile: step size collapsed at s = " + std::to_string(s)
                            + ", y = " + std::to_string(x[0]));
    }
    const auto res = stepper.step(s, x, k1, h);
    if (!res.ok) {
      h *= 0.25;
      if (h < 1e-12 * L) {
        curve.termination = Termination::kAxisApproach;
        return curve;
      }
      continue;
    }
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = options.tol * (scale[i] + std::max(std::abs(x[i]), std::abs(res.x[i])));
      err = std::max(err, std::abs(res.err[i]) / sc);
    }
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      continue;
    }

    const double s_new = s + h;
    const ProfileState st_new = from3(s_new, res.x);
    bool new_pushed = false;
    if (ev) {
      const double g0 = ev->g(from3(s, x));
      const double g1 = ev->g(st_new);
      std::optional<ProfileState> crossing;
      if (sign_change(g0, g1)) {
        crossing = locate_crossing(stepper, s, x, k1, h, ev->g, g0, g1);
      } else if (g0 != 0.0 && g1 == 0.0) {
        crossing = st_new;
      }
      if (crossing) {
        if (crossing->s < s_new - 1e-14 * std::max(1.0, std::abs(s_new))) {
          push(*crossing, stepper.rhs(crossing->s, to3(*crossing)));
        } else {
          push(st_new, res.k7);
          new_pushed = true;
        }
        curve.event_indices.push_back(curve.samples.size() - 1);
        if (++crossings >= ev->count) {
          curve.termination = Termination::kEvent;
          return curve;
        }
      }
    }
    if (!new_pushed) push(st_new, res.k7);
    s = s_new;
    x = res.x;
    k1 = res.k7;

    if (x[0] < 2.0 * y_min) {
      curve.termination = Termination::kAxisApproach;
      return curve;
    }
    {
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = std::max(err, 1e-4);
    }
  }
  curve.termination = Termination::kReachedEnd;
  return curve;
}

ExtremaResult detect_extrema(const ProfileCurve& curve) {
  ExtremaResult out;
  const auto& smp = curve.samples;
  if (smp.size() < 2) return out;
  const double L = curve.relation.length_scale();

  bool flat = true;
  double y_lo = smp.front().y, y_hi = smp.front().y;
  for (const auto& p : smp) {
    flat = flat && std::abs(std::sin(p.psi)) <= kEventTol;
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  if (flat && y_hi - y_lo <= 1e-9 * L) {
    out.status = ExtremaStatus::kDegenerate;
    return out;
  }

  auto classify = [](double y_prev, double y_at, double y_next) {
    return (y_prev - y_at) + (y_next - y_at) > 0.0 ? ExtremumKind::kNeck : ExtremumKind::kBulge;
  };
  auto at_event = [](const ProfileState& p) { return std::abs(std::sin(p.psi)) <= kEventTol; };

  const double y_min = default_y_min(curve.relation, -1.0);
  Stepper stepper(curve.relation, y_min);
  const std::size_t n = smp.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (at_event(smp[i])) {
      if (!out.extrema.empty() && out.extrema.back().state.s == smp[i].s) continue;
      const double y_prev = i > 0 ? smp[i - 1].y : smp[i + 1].y;
      const double y_next = i + 1 < n ? smp[i + 1].y : smp[i - 1].y;
      out.extrema.push_back({smp[i], classify(y_prev, smp[i].y, y_next)});
      continue;
    }
    if (i + 1 < n && !at_event(smp[i + 1])) {
      const double g0 = std::sin(smp[i].psi);
      const double g1 = std::sin(smp[i + 1].psi);
      if (!sign_change(g0, g1)) continue;
      const State3 x = to3(smp[i]);
      const State3 k1 = to3(curve.rates[i]);
      const auto e = locate_crossing(
          stepper, smp[i].s, x, k1, smp[i + 1].s - smp[i].s,
          [](const ProfileState& p) { return std::sin(p.psi); }, g0, g1);
      out.extrema.push_back({e, classify(smp[i].y, e.y, smp[i + 1].y)});
    }
  }
  out.status = out.extrema.empty() ? ExtremaStatus::kNoExtrema : ExtremaStatus::kOk;
  return out;
}

namespace {

void require_family_relation(const WeingartenRelation& relation, double neck_r, double& a,
                             double& b) {
  if (!relation.has_first_integral()) {
    throw DomainError("delaunay_family needs a linear or cmc relation");
  }
  const auto p = relation.linear_params();
  a = p.a;
  b = p.b;
  if (!(a > 0.0)) throw DomainError("delaunay_family: cmc relation needs H > 0");
  if (!(neck_r > 0.0) || neck_r > a * (1.0 + 1e-12)) {
    throw DomainError("delaunay_family: neck radius must lie in (0, a]");
  }
}

}  // namespace

ProfileCurve delaunay_periods(const WeingartenRelation& relation, double neck_r, int n_periods,
                              const IntegrateOptions& options) {
  double a = 0.0, b = 0.0;
  require_family_relation(relation, neck_r, a, b);
  if (n_periods < 1) throw DomainError("delaunay_periods: need at least one period");
  const ProfileState start{0.0, neck_r, 0.0, 0.0};
  if (neck_r >= a * (1.0 - 1e-12)) {
    const double period = 2.0 * std::numbers::pi * std::sqrt(a * a + b);
    IntegrateOptions opts = options;
    opts.event.reset();
    return integrate_profile({0.0, a, 0.0, 0.0}, relation, n_periods * period, opts);
  }
  IntegrateOptions opts = options;
  opts.event = ProfileEvent{[](const ProfileState& p) { return std::sin(p.psi); }, 2 * n_periods};
  auto curve = integrate_profile(start, relation, 1e3 * a * n_periods, opts);
  if (curve.termination != Termination::kEvent) {
    throw NumericalError("delaunay_family: period not closed (integration ended early)");
  }
  return curve;
}

DelaunayProfile delaunay_family(const WeingartenRelation& relation, double neck_r,
                                const IntegrateOptions& options) {
  DelaunayProfile out{delaunay_periods(relation, neck_r, 1, options)};
  const auto [a, b] = relation.linear_params();
  const auto& smp = out.curve.samples;
  if (out.curve.event_indices.empty()) {
    out.cylinder = true;
    out.R = a;
    out.r = a;
    out.period = smp.back().s;
    out.z_period = smp.back().z;
  } else {
    const auto& bulge = smp[out.curve.event_indices.at(0)];
    const auto& neck = smp[out.curve.event_indices.at(1)];
    out.R = bulge.y;
    out.r = neck_r;
    out.period = neck.s;
    out.z_period = neck.z;
  }
  out.I0 = first_integral(smp.front(), a, b);
  return out;
}

SphereProfile sphere_profile(const WeingartenRelation& relation, double eps_fraction,
                             const IntegrateOptions& options) {
  const double k = relation.umbilic_curvature();
  if (!(eps_fraction >= 1e-8) || !(eps_fraction < 0.5)) {
    throw NumericalError("sphere_profile: series start offset below the precision floor");
  }
  const double s0 = eps_fraction / k;
  const ProfileState start{s0, std::sin(k * s0) / k, (1.0 - std::cos(k * s0)) / k,
                           std::numbers::pi / 2 - k * s0};
  IntegrateOptions opts = options;
  if (opts.y_min <= 0.0) opts.y_min = 1e-3 * start.y;
  const double psi0 = start.psi;
  opts.event = ProfileEvent{[psi0](const ProfileState& p) { return p.psi + psi0; }, 1};
  SphereProfile out{integrate_profile(start, relation, s0 + 10.0 / k, opts)};
  if (out.curve.termination != Termination::kEvent) {
    throw NumericalError("sphere_profile: profile did not return to the axis");
  }
  out.start_offset = s0;
  const auto ex = detect_extrema(out.curve);
  double radius = 0.0;
  for (const auto& e : ex.extrema) {
    if (e.kind == ExtremumKind::kBulge) radius = std::max(radius, e.state.y);
  }
  if (radius == 0.0) {
    for (const auto& p : out.curve.samples) radius = std::max(radius, p.y);
  }
  out.radius = radius;
  out.closure_y = std::abs(out.curve.samples.back().y - start.y);
  out.closure_psi = std::abs(out.curve.samples.back().psi + psi0);
  return out;
}

SphereProfile sphere_profile(double a, double b, double eps_fraction) {
  if (!(a > 0.0) || !(b >= 0.0)) throw DomainError("sphere_profile: need a > 0, b >= 0");
  const auto rel = b > 0.0 ? WeingartenRelation::linear(a, b) : WeingartenRelation::cmc(0.5 / a);
  return sphere_profile(rel, eps_fraction);
}

std::size_t nearest_sample(const ProfileCurve& curve, double s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    if (std::abs(curve.samples[i].s - s) < std::abs(curve.samples[best].s - s)) best = i;
  }
  return best;
}

RevolvedMesh revolve(const ProfileCurve& curve, int n_theta, double s_lo, double s_hi,
                     CapMode caps) {
  if (n_theta < 8) throw DomainError("revolve: n_theta must be at least 8");
  if (!(s_hi > s_lo)) throw DomainError("revolve: empty arclength range");
  const double L = curve.relation.length_scale();
  const double eps = 1e-12 * std::max(1.0, std::abs(s_hi));
  RevolvedMesh out;
  out.n_theta = n_theta;
  if (s_lo < curve.samples.front().s - eps || s_hi > curve.samples.back().s + eps) {
    throw DomainError("revolve: arclength range outside the sampled curve");
  }
  for (const auto& p : curve.samples) {
    if (p.s >= s_lo - eps && p.s <= s_hi + eps) out.rings.push_back(p);
  }
  if (out.rings.empty() || out.rings.front().s > s_lo + eps) {
    out.rings.insert(out.rings.begin(), curve.interpolate(s_lo));
  }
  if (out.rings.back().s < s_hi - eps) out.rings.push_back(curve.interpolate(s_hi));
  if (out.rings.size() < 2) throw DomainError("revolve: need at least two rings");
  for (std::size_t i = 1; i < out.rings.size(); ++i) {
    const double d = std::hypot(out.rings[i].y - out.rings[i - 1].y, out.rings[i].z - out.rings[i - 1].z);
    if (d < 1e-14 * L) throw DomainError("revolve: degenerate strip (coincident samples)");
  }

  std::vector<std::vector<Vec3>> rings;
  rings.reserve(out.rings.size());
  for (const auto& p : out.rings) {
    std::vector<Vec3> ring;
    ring.reserve(static_cast<std::size_t>(n_theta));
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n_theta;
      ring.emplace_back(p.y * std::cos(th), p.y * std::sin(th), p.z);
    }
    rings.push_back(std::move(ring));
  }
  out.mesh = tube_mesh(rings, caps == CapMode::kBoth);
  if (caps == CapMode::kBoth) {
    const int n_ring_vertices = static_cast<int>(out.rings.size()) * n_theta;
    out.cap_centers = {n_ring_vertices, n_ring_vertices + 1};
    // Centroids of the rings lie on the axis up to rounding; snap them.
    out.mesh.vertices[n_ring_vertices] = Vec3(0.0, 0.0, out.rings.front().z);
    out.mesh.vertices[n_ring_vertices + 1] = Vec3(0.0, 0.0, out.rings.back().z);
  }
  return out;
}

RevolvedMesh revolve(const ProfileCurve& curve, int n_theta, CapMode caps) {
  return revolve(curve, n_theta, curve.samples.front().s, curve.samples.back().s, caps);
}

}  // namespace wlab
