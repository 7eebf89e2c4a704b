#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wlab {

/// 2aH + bK = 1 with a, b > 0.
struct LinearParams {
  double a;
  double b;
};

/// Constant mean curvature H != 0. Same as the linear class with a = 1/(2H), b = 0.
struct CmcParams {
  double H;
};

/// H = f(H^2 - K) for an elliptic f. Holds f and its derivative on [0, inf).
struct GeneralParams {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::string label;
};

/// Principal curvatures of a surface of revolution: kappa1 along the profile
/// (meridian), kappa2 along the parallel.
struct CurvaturePair {
  double kappa1;
  double kappa2;

  double mean() const { return 0.5 * (kappa1 + kappa2); }
  double gauss() const { return kappa1 * kappa2; }
};

struct EllipticityReport {
  bool elliptic;
  double worst_margin;  // min over samples of 1 - 4 t f'(t)^2
  double worst_t;
};

class WeingartenRelation {
 public:
  using Kind = std::variant<LinearParams, CmcParams, GeneralParams>;

  static WeingartenRelation linear(double a, double b);
  static WeingartenRelation cmc(double H);
  /// General elliptic relation from analytic callbacks. Ellipticity is checked
  /// on (0, check_t_max]; a DomainError is thrown when it fails.
  static WeingartenRelation general(std::function<double(double)> f,
                                    std::function<double(double)> fprime,
                                    std::string label = "general",
                                    double check_t_max = 1e6);
  /// General elliptic relation from a strictly increasing t grid and samples of
  /// f, interpolated with a monotone (PCHIP) cubic.
  static WeingartenRelation table(std::vector<double> t, std::vector<double> f);

  const Kind& kind() const { return kind_; }
  bool is_linear() const { return std::holds_alternative<LinearParams>(kind_); }
  bool is_cmc() const { return std::holds_alternative<CmcParams>(kind_); }
  bool is_general() const { return std::holds_alternative<GeneralParams>(kind_); }

  /// (a, b) of the equivalent linear relation; cmc maps to (1/(2H), 0).
  /// Throws DomainError for general relations, which have no first integral.
  LinearParams linear_params() const;
  bool has_first_integral() const { return !is_general(); }

  /// f(t) for the relation written as H = f(H^2 - K).
  double f(double t) const;
  double fprime(double t) const;

  /// A characteristic length: a for linear, 1/(2|H|) for cmc, 1/(2 f(0)) for
  /// general relations with f(0) > 0 and 1 otherwise.
  double length_scale() const;

  /// Curvature of the umbilic solution (the round sphere), kappa with
  /// H = kappa and t = 0. Throws DomainError if the class admits no sphere.
  double umbilic_curvature() const;

 private:
  explicit WeingartenRelation(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// The linear relation rewritten as H = f(t): f(t) = (sqrt(a^2 + b + b^2 t) - a)/b.
GeneralParams linear_to_f(double a, double b);

/// Checks 4 t f'(t)^2 < 1 on a log-spaced grid of (0, t_max]. Strictness is
/// enforced as a margin of at least 1e-10.
EllipticityReport check_ellipticity(const GeneralParams& relation, double t_max,
                                    int n_samples);

/// Solves the Weingarten relation for the profile curvature given the
/// rotational one.
double solve_kappa1(const WeingartenRelation& relation, double kappa2);

/// Residual H - f(H^2 - K) of a curvature pair.
double relation_residual(const WeingartenRelation& relation, const CurvaturePair& k);

}  // namespace wlab
