#include "wlab/weingarten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

// boost 1.74 pchip calls isnan unqualified.
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr double kEllipticMargin = 1e-10;

}  // namespace

GeneralParams linear_to_f(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("linear_to_f: a and b must be positive");
  }
  GeneralParams p;
  // Rationalized form (1 + b t)/(sqrt(a^2 + b + b^2 t) + a); it tends to 1/(2a)
  // as b -> 0 without cancellation.
  p.f = [a, b](double t) { return (1.0 + b * t) / (std::sqrt(a * a + b + b * b * t) + a); };
  p.fprime = [a, b](double t) { return b / (2.0 * std::sqrt(a * a + b + b * b * t)); };
  std::ostringstream os;
  os << "linear(a=" << a << ",b=" << b << ")";
  p.label = os.str();
  return p;
}

EllipticityReport check_ellipticity(const GeneralParams& relation, double t_max,
                                    int n_samples) {
  if (!(t_max > 0.0) || n_samples < 2) {
    throw DomainError("check_ellipticity: need t_max > 0 and n_samples >= 2");
  }
  const double t_min = t_max * 1e-12;
  const double log_lo = std::log(t_min);
  const double log_hi = std::log(t_max);
  EllipticityReport report{true, std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < n_samples; ++i) {
    const double t =
        i + 1 == n_samples ? t_max
                           : std::exp(log_lo + (log_hi - log_lo) * i / (n_samples - 1));
    const double fp = relation.fprime(t);
    const double margin = 1.0 - 4.0 * t * fp * fp;
    if (!(margin >= report.worst_margin)) {  // NaN counts as worst
      report.worst_margin = std::isnan(margin) ? -std::numeric_limits<double>::infinity()
                                               : margin;
      report.worst_t = t;
    }
  }
  report.elliptic = report.worst_margin >= kEllipticMargin;
  return report;
}

WeingartenRelation WeingartenRelation::linear(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("linear relation needs a > 0 and b > 0");
  }
  return WeingartenRelation(LinearParams{a, b});
}

WeingartenRelation WeingartenRelation::cmc(double H) {
  if (!(H != 0.0) || !std::isfinite(H)) {
    throw DomainError("cmc relation needs H != 0");
  }
  return WeingartenRelation(CmcParams{H});
}

WeingartenRelation WeingartenRelation::general(std::function<double(double)> f,
                                               std::function<double(double)> fprime,
                                               std::string label, double check_t_max) {
  GeneralParams p{std::move(f), std::move(fprime), std::move(label)};
  const auto report = check_ellipticity(p, check_t_max, 400);
  if (!report.elliptic) {
    std::ostringstream os;
    os << "relation '" << p.label << "' is not elliptic: 1 - 4tf'^2 = " << report.worst_margin
       << " at t = " << report.worst_t;
    throw DomainError(os.str());
  }
  return WeingartenRelation(std::move(p));
}

WeingartenRelation WeingartenRelation::table(std::vector<double> t, std::vector<double> f) {
  if (t.size() != f.size() || t.size() < 4) {
    throw DomainError("table relation needs matching t and f arrays with at least 4 points");
  }
  if (t.front() < 0.0) {
    throw DomainError("table relation: t grid must start at t >= 0");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw DomainError("table relation: t grid must be strictly increasing");
    }
  }
  const double t_lo = t.front();
  const double t_hi = t.back();
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  auto interp = std::make_shared<const Pchip>(std::move(t), std::move(f));
  const double f_lo = (*interp)(t_lo);
  const double f_hi = (*interp)(t_hi);
  const double d_lo = interp->prime(t_lo);
  const double d_hi = interp->prime(t_hi);
  // Linear continuation outside the tabulated range.
  auto fn = [=](double x) {
    if (x < t_lo) return f_lo + d_lo * (x - t_lo);
    if (x > t_hi) return f_hi + d_hi * (x - t_hi);
    return (*interp)(x);
  };
  auto dfn = [=](double x) {
    if (x < t_lo) return d_lo;
    if (x > t_hi) return d_hi;
    return interp->prime(x);
  };
  return general(fn, dfn, "table", t_hi);
}

LinearParams WeingartenRelation::linear_params() const {
  if (const auto* p = std::get_if<LinearParams>(&kind_)) return *p;
  if (const auto* p = std::get_if<CmcParams>(&kind_)) return {1.0 / (2.0 * p->H), 0.0};
  throw DomainError("general elliptic relations have no (a, b) parametrization");
}

double WeingartenRelation::f(double t) const {
  return std::visit(
      [t](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          return (1.0 + p.b * t) / (std::sqrt(p.a * p.a + p.b + p.b * p.b * t) + p.a);
        } else if constexpr (std::is_same_v<P, CmcParams>) {
          return p.H;
        } else {
          return p.f(t);
        }
      },
      kind_);
}

double WeingartenRelation::fprime(double t) const {
  return std::visit(
      [t](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          return p.b / (2.0 * std::sqrt(p.a * p.a + p.b + p.b * p.b * t));
        } else if constexpr (std::is_same_v<P, CmcParams>) {
          return 0.0;
        } else {
          return p.fprime(t);
        }
      },
      kind_);
}

double WeingartenRelation::length_scale() const {
  if (const auto* p = std::get_if<LinearParams>(&kind_)) return p->a;
  if (const auto* p = std::get_if<CmcParams>(&kind_)) return 1.0 / (2.0 * std::abs(p->H));
  const double f0 = f(0.0);
  return f0 > 0.0 ? 1.0 / (2.0 * f0) : 1.0;
}

double WeingartenRelation::umbilic_curvature() const {
  // At an umbilic t = 0, so H = kappa = f(0).
  const double k = f(0.0);
  if (!(k > 0.0)) {
    throw DomainError("relation admits no sphere (needs f(0) > 0)");
  }
  return k;
}

double relation_residual(const WeingartenRelation& relation, const CurvaturePair& k) {
  const double half_diff = 0.5 * (k.kappa1 - k.kappa2);
  return k.mean() - relation.f(half_diff * half_diff);
}

namespace {

double solve_general(const WeingartenRelation& rel, double kappa2) {
  auto g = [&](double k1) {
    const double h = 0.5 * (k1 - kappa2);
    return 0.5 * (k1 + kappa2) - rel.f(h * h);
  };
  auto dg = [&](double k1) {
    const double h = 0.5 * (k1 - kappa2);
    return 0.5 - rel.fprime(h * h) * h;
  };

  // far out, g is a difference of two huge numbers; its sign there is only
  // trusted above the rounding level
  auto noise = [&](double k1) {
    const double h = 0.5 * (k1 - kappa2);
    return 64.0 * std::numeric_limits<double>::epsilon() *
           (std::abs(k1) + std::abs(kappa2) + std::abs(rel.f(h * h)));
  };
  auto bracketed = [&](double lo, double hi, double g_lo, double g_hi) {
    return g_lo < -noise(lo) && g_hi > noise(hi);
  };
  double width = 2.0 * (std::abs(rel.f(0.0)) + std::abs(kappa2) + 1.0);
  double lo = kappa2 - width;
  double hi = kappa2 + width;
  double g_lo = g(lo);
  double g_hi = g(hi);
  for (int widen = 0; widen < 60 && !bracketed(lo, hi, g_lo, g_hi); ++widen) {
    width *= 2.0;
    lo = kappa2 - width;
    hi = kappa2 + width;
    g_lo = g(lo);
    g_hi = g(hi);
  }
  if (!bracketed(lo, hi, g_lo, g_hi)) {
    std::ostringstream os;
    os << "solve_kappa1: no sign change of g on [" << lo << ", " << hi << "] for kappa2 = "
       << kappa2;
    throw BracketFailureError(os.str(), lo, hi);
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = g(x);
    if (std::abs(gx) < kResidualTol) return x;
    if (gx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = dg(x);
    double next = x - gx / d;
    if (!(d > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  const double gx = g(x);
  if (std::abs(gx) < 1e3 * kResidualTol) return x;
  throw BracketFailureError("solve_kappa1: safeguarded Newton did not converge", lo, hi);
}

}  // namespace

double solve_kappa1(const WeingartenRelation& relation, double kappa2) {
  if (const auto* p = std::get_if<LinearParams>(&relation.kind())) {
    const double denom = p->a + p->b * kappa2;
    if (std::abs(denom) <= 1e-14 * (p->a + p->b * std::abs(kappa2))) {
      std::ostringstream os;
      os << "solve_kappa1: a + b*kappa2 vanishes at kappa2 = " << kappa2;
      throw SingularDenominatorError(os.str());
    }
    return (1.0 - p->a * kappa2) / denom;
  }
  if (const auto* p = std::get_if<CmcParams>(&relation.kind())) {
    return 2.0 * p->H - kappa2;
  }
  return solve_general(relation, kappa2);
}

}  // namespace wlab
