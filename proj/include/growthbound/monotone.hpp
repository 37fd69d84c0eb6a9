#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "growthbound/common.hpp"

namespace growthbound {

/// Open-by-default real interval; `hi` may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = kInfinity;
  bool lo_closed = false;
  bool hi_closed = false;

  Interval() = default;
  Interval(double lo_, double hi_, bool lo_closed_ = false, bool hi_closed_ = false);

  bool contains(double t) const;
  /// Strictly inside, away from both endpoints.
  bool interior(double t) const { return t > lo && t < hi; }
  /// Smallest representable point of the interval.
  double first_point() const;
  /// Largest finite representable point of the interval.
  double last_point() const;
};

/// Increasing concave profile psi on (beta, inf).
///   Power:    offset + scale * (s + shift)^theta, 0 < theta <= 1
///   LogPower: offset + scale * (log s + shift)^theta
///   Log1p:    offset + scale * log(1 + s)
class ConcaveFn {
 public:
  enum class Kind { Power, LogPower, Log1p };

  static ConcaveFn power(double theta, double scale = 1.0, double shift = 0.0, double offset = 0.0);
  static ConcaveFn log_power(double theta, double scale = 1.0, double shift = 0.0, double offset = 0.0);
  static ConcaveFn log1p(double scale = 1.0, double offset = 0.0);

  double operator()(double s) const;
  double derivative(double s) const;
  /// Inverse of the increasing map; argument must exceed psi(beta+).
  double inverse(double v) const;
  /// Left end of the domain: psi is defined and positive on (beta, inf).
  double beta() const { return beta_; }

  /// Second-difference test on `n` log-spaced triples over (beta, beta + span].
  bool concavity_probe(double tol = 1e-9, int n = 200) const;

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  double scale() const { return scale_; }
  double shift() const { return shift_; }
  double offset() const { return offset_; }
  std::string describe() const;

 private:
  ConcaveFn(Kind kind, double theta, double scale, double shift, double offset);
  Kind kind_;
  double theta_, scale_, shift_, offset_;
  double beta_;
};

/// Fundamental-solution profile evaluated without domain restriction.
double eta_value(int k, double t);
double eta_derivative(int k, double t);
/// Inverse of eta on its natural range.
double eta_inverse(int k, double s);

/// A positive non-increasing function on an interval, closed form or tabulated.
/// Cheap to copy: the representation is shared and immutable.
class DecreasingFn {
 public:
  struct PowerLaw { double C, b; };
  struct LogPower { double b, eps_scale; };
  struct ExpPower { double alpha; };
  struct PsiEta {
    ConcaveFn psi;
    int k;
  };
  struct Knot {
    double t, value;
  };
  /// Piecewise linear through knots. Two knots with equal t encode a jump;
  /// eval at the jump returns the right value, or the left one when
  /// `right_continuous` is false.
  struct Tabulated {
    std::vector<Knot> knots;
    bool right_continuous = true;
  };
  /// Closure-backed function, used for composites (phi, rho, inverses, ...).
  struct Custom {
    std::string label;
    std::function<double(double)> value;
    std::function<double(double)> deriv;      // optional
    std::function<double(double)> log_value;  // optional
    double limit_hi = 0.0;                    // lim f(t) as t -> hi
  };
  using Family = std::variant<PowerLaw, LogPower, ExpPower, PsiEta, Tabulated, Custom>;

  static DecreasingFn power_law(double C, double b);
  static DecreasingFn log_power(double b, double eps_scale);
  static DecreasingFn exp_power(double alpha);
  static DecreasingFn psi_eta(const ConcaveFn& psi, int k);
  /// Knots with non-decreasing t and non-increasing values; default domain is [t_0, t_n].
  static DecreasingFn tabulated(std::vector<Knot> knots, std::optional<Interval> domain = std::nullopt,
                                bool right_continuous = true);
  static DecreasingFn custom(Custom c, Interval domain);

  double operator()(double t) const;
  double derivative(double t) const;
  /// log f(t), computed without forming f(t) where the family allows.
  double log_value(double t) const;
  /// f'(t)/f(t).
  double log_derivative(double t) const;
  /// inf{t in domain : log f(t) <= level}.
  double log_level_inverse(double level) const;
  /// lim f(t) as t -> hi.
  double limit_hi() const;

  const Interval& domain() const { return rep_->domain; }
  const Family& family() const { return rep_->family; }
  std::string family_name() const;
  bool is_closed_form() const;
  bool is_tabulated() const { return std::holds_alternative<Tabulated>(rep_->family); }
  template <class T>
  const T* as() const { return std::get_if<T>(&rep_->family); }

  /// Probe of the majorant role: f grows by at least `factor` between `probe`
  /// and the midpoint-ish reference point of the domain.
  bool blows_up_at_lo(double probe, double factor = 10.0) const;

 private:
  struct Rep {
    Family family;
    Interval domain;
  };
  explicit DecreasingFn(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static DecreasingFn make(Family family, Interval domain);
  void check_domain(double t) const;
  std::shared_ptr<const Rep> rep_;
};

/// eta(t) = t^{2-k} (k > 2) or log(1/t) (k = 2), restricted so values stay positive.
DecreasingFn fundamental_eta(int k);

/// Generalized inverse s -> inf{t : f(t) <= s} on (lim_hi f, inf), right-continuous.
DecreasingFn gen_inverse(const DecreasingFn& f);

/// Right-continuous version of f. Identity on continuous families.
DecreasingFn right_regularize(const DecreasingFn& f);

/// Free-function spellings of the member operations.
inline double eval(const DecreasingFn& f, double t) { return f(t); }
inline double derivative(const DecreasingFn& f, double t) { return f.derivative(t); }

/// Rewrite g as psi(eta(t)) in dimension k where an exact identity exists.
/// Throws InvalidProfile when no concave psi represents g.
DecreasingFn as_psi_eta(const DecreasingFn& g, int k);

/// Radius alpha of the largest interval (0, alpha) on which g is defined.
double domain_radius(const DecreasingFn& g);

/// Smallest double t in [lo, hi] with pred(t) true. Requires pred monotone
/// (false then true) and pred(hi) true; pred(lo) may be either.
double bisect_doubles(double lo, double hi, const std::function<bool(double)>& pred);

/// Load (t, value) knots from a two-column CSV with optional header.
std::vector<DecreasingFn::Knot> load_knots_csv(const std::string& path);

}  // namespace growthbound
