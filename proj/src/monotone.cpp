#include "growthbound/monotone.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace growthbound {

namespace {

std::string num(double v) { return format_double(v); }

// Order-preserving map from doubles to unsigned integers.
std::uint64_t ordered_key(double x) {
  const auto u = std::bit_cast<std::uint64_t>(x);
  return (u >> 63) ? ~u : (u | 0x8000000000000000ULL);
}

double from_key(std::uint64_t k) {
  const std::uint64_t u = (k >> 63) ? (k & 0x7fffffffffffffffULL) : ~k;
  return std::bit_cast<double>(u);
}

// inf{t in dom : le(t)} for a predicate that is false then true along dom.
// Returns dom.first_point() when the predicate already holds there.
double search_inf(const Interval& dom, const std::function<bool(double)>& le, double hint) {
  const double first = dom.first_point();
  if (le(first)) return first;
  double lo_false = first;
  double t_true = kInfinity;
  if (std::isfinite(hint) && dom.contains(hint)) {
    if (le(hint)) {
      t_true = hint;
    } else {
      lo_false = hint;
    }
  }
  if (!std::isfinite(t_true)) {
    if (std::isfinite(dom.hi)) {
      // Composites can fail to evaluate right at an open end, so back off geometrically.
      double t = dom.last_point();
      double gap = dom.hi - std::nextafter(dom.hi, -kInfinity);
      while (!le(t)) {
        gap *= 2.0;
        t = dom.hi - gap;
        if (!(t > lo_false) || gap == kInfinity) throw DomainError("level lies below the range of the function");
      }
      t_true = t;
    } else {
      double t = std::max({1.0, 2.0 * std::abs(lo_false), lo_false + 1.0});
      while (!le(t)) {
        lo_false = t;
        t *= 16.0;
        if (t > 1e300) throw DomainError("level lies below the range of the function");
      }
      t_true = t;
    }
  }
  return bisect_doubles(lo_false, t_true, le);
}

// Move a closed-form estimate to the smallest double satisfying the predicate.
double polish(const Interval& dom, const std::function<bool(double)>& le, double t0) {
  if (!std::isfinite(t0) || !dom.contains(t0)) return search_inf(dom, le, kInfinity);
  constexpr int kMaxSteps = 64;
  if (le(t0)) {
    for (int i = 0; i < kMaxSteps; ++i) {
      const double prev = std::nextafter(t0, -kInfinity);
      if (!dom.contains(prev) || !le(prev)) return t0;
      t0 = prev;
    }
    return search_inf(dom, le, t0);
  }
  for (int i = 0; i < kMaxSteps; ++i) {
    const double next = std::nextafter(t0, kInfinity);
    if (!dom.contains(next)) break;
    if (le(next)) return next;
    t0 = next;
  }
  return search_inf(dom, le, kInfinity);
}

double concave_limit_at_beta(const ConcaveFn& psi) {
  const double b = psi.beta();
  double v = 0.0;
  switch (psi.kind()) {
    case ConcaveFn::Kind::Power: v = psi.offset() + psi.scale() * std::pow(std::max(0.0, b + psi.shift()), psi.theta()); break;
    case ConcaveFn::Kind::LogPower:
      v = psi.offset() + psi.scale() * std::pow(std::max(0.0, std::log(b) + psi.shift()), psi.theta());
      break;
    case ConcaveFn::Kind::Log1p: v = psi.offset() + psi.scale() * std::log1p(b); break;
  }
  return std::max(0.0, v);
}

}  // namespace

// ---------------------------------------------------------------- Interval

Interval::Interval(double lo_, double hi_, bool lo_closed_, bool hi_closed_)
    : lo(lo_), hi(hi_), lo_closed(lo_closed_), hi_closed(hi_closed_ && std::isfinite(hi_)) {
  if (!(lo < hi)) throw ArgumentError("Interval requires lo < hi, got [" + num(lo) + ", " + num(hi) + "]");
}

bool Interval::contains(double t) const {
  if (std::isnan(t)) return false;
  const bool above = lo_closed ? t >= lo : t > lo;
  const bool below = hi_closed ? t <= hi : t < hi;
  return above && below;
}

double Interval::first_point() const { return lo_closed ? lo : std::nextafter(lo, kInfinity); }

double Interval::last_point() const {
  if (!std::isfinite(hi)) return std::numeric_limits<double>::max();
  return hi_closed ? hi : std::nextafter(hi, -kInfinity);
}

// ---------------------------------------------------------------- ConcaveFn

ConcaveFn::ConcaveFn(Kind kind, double theta, double scale, double shift, double offset)
    : kind_(kind), theta_(theta), scale_(scale), shift_(shift), offset_(offset), beta_(0.0) {
  if (!(scale > 0.0)) throw ArgumentError("ConcaveFn scale must be positive");
  if (!(theta > 0.0)) throw ArgumentError("ConcaveFn exponent must be positive");
  const double need = offset < 0.0 ? std::pow(-offset / scale, 1.0 / theta) : 0.0;
  switch (kind) {
    case Kind::Power: beta_ = need - shift; break;
    case Kind::LogPower: beta_ = std::exp(need - shift); break;
    case Kind::Log1p: beta_ = std::expm1(-offset / scale); break;
  }
}

ConcaveFn ConcaveFn::power(double theta, double scale, double shift, double offset) {
  return ConcaveFn(Kind::Power, theta, scale, shift, offset);
}
ConcaveFn ConcaveFn::log_power(double theta, double scale, double shift, double offset) {
  return ConcaveFn(Kind::LogPower, theta, scale, shift, offset);
}
ConcaveFn ConcaveFn::log1p(double scale, double offset) { return ConcaveFn(Kind::Log1p, 1.0, scale, 0.0, offset); }

double ConcaveFn::operator()(double s) const {
  if (!(s > beta_)) throw DomainError("concave profile evaluated at " + num(s) + " <= beta = " + num(beta_));
  switch (kind_) {
    case Kind::Power: return offset_ + scale_ * std::pow(s + shift_, theta_);
    case Kind::LogPower: return offset_ + scale_ * std::pow(std::log(s) + shift_, theta_);
    case Kind::Log1p: return offset_ + scale_ * std::log1p(s);
  }
  return 0.0;
}

double ConcaveFn::derivative(double s) const {
  if (!(s > beta_)) throw DomainError("concave profile derivative at " + num(s) + " <= beta");
  switch (kind_) {
    case Kind::Power: return scale_ * theta_ * std::pow(s + shift_, theta_ - 1.0);
    case Kind::LogPower: return scale_ * theta_ * std::pow(std::log(s) + shift_, theta_ - 1.0) / s;
    case Kind::Log1p: return scale_ / (1.0 + s);
  }
  return 0.0;
}

double ConcaveFn::inverse(double v) const {
  const double w = (v - offset_) / scale_;
  if (!(w >= 0.0)) throw DomainError("concave profile inverse below range");
  switch (kind_) {
    case Kind::Power: return std::pow(w, 1.0 / theta_) - shift_;
    case Kind::LogPower: return std::exp(std::pow(w, 1.0 / theta_) - shift_);
    case Kind::Log1p: return std::expm1(w);
  }
  return 0.0;
}

bool ConcaveFn::concavity_probe(double tol, int n) const {
  if (n < 3) n = 3;
  std::vector<double> s(n), v(n);
  for (int i = 0; i < n; ++i) {
    const double e = -6.0 + 12.0 * i / (n - 1);
    s[i] = beta_ + std::pow(10.0, e) * std::max(1.0, std::abs(beta_));
    v[i] = (*this)(s[i]);
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (v[i + 1] < v[i] - tol * (1.0 + std::abs(v[i]))) return false;
  }
  for (int i = 0; i + 2 < n; ++i) {
    const double w = (s[i + 1] - s[i]) / (s[i + 2] - s[i]);
    const double chord = (1.0 - w) * v[i] + w * v[i + 2];
    if (v[i + 1] < chord - tol * (1.0 + std::abs(chord))) return false;
  }
  return true;
}

std::string ConcaveFn::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power: os << "power(theta=" << num(theta_); break;
    case Kind::LogPower: os << "log_power(theta=" << num(theta_); break;
    case Kind::Log1p: os << "log1p("; break;
  }
  os << ",scale=" << num(scale_) << ",shift=" << num(shift_) << ",offset=" << num(offset_) << ")";
  return os.str();
}

// ---------------------------------------------------------------- eta

double eta_value(int k, double t) { return k == 2 ? -std::log(t) : std::pow(t, 2.0 - k); }

double eta_derivative(int k, double t) { return k == 2 ? -1.0 / t : (2.0 - k) * std::pow(t, 1.0 - k); }

double eta_inverse(int k, double s) { return k == 2 ? std::exp(-s) : std::pow(s, -1.0 / (k - 2.0)); }

// ---------------------------------------------------------------- DecreasingFn

DecreasingFn DecreasingFn::make(Family family, Interval domain) {
  return DecreasingFn(std::make_shared<const Rep>(Rep{std::move(family), domain}));
}

DecreasingFn DecreasingFn::power_law(double C, double b) {
  if (!(C > 0.0) || !(b > 0.0)) throw ArgumentError("PowerLaw requires C > 0 and b > 0");
  return make(PowerLaw{C, b}, Interval(0.0, kInfinity));
}

DecreasingFn DecreasingFn::log_power(double b, double eps_scale) {
  if (!(b > 0.0) || !(eps_scale > 0.0)) throw ArgumentError("LogPower requires b > 0 and eps_scale > 0");
  return make(LogPower{b, eps_scale}, Interval(0.0, eps_scale * std::exp(-1.0), false, true));
}

DecreasingFn DecreasingFn::exp_power(double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("ExpPower requires alpha > 0");
  return make(ExpPower{alpha}, Interval(0.0, kInfinity));
}

DecreasingFn DecreasingFn::psi_eta(const ConcaveFn& psi, int k) {
  if (k < 2) throw ArgumentError("PsiEta requires k >= 2");
  const double beta = psi.beta();
  double alpha = kInfinity;
  if (k == 2 || beta > 0.0) alpha = eta_inverse(k, beta);
  if (!(alpha > 0.0)) throw ArgumentError("PsiEta has an empty domain");
  return make(PsiEta{psi, k}, Interval(0.0, alpha));
}

DecreasingFn DecreasingFn::tabulated(std::vector<Knot> knots, std::optional<Interval> domain, bool right_continuous) {
  if (knots.size() < 2) throw ArgumentError("Tabulated requires at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].value) || knots[i].value < 0.0)
      throw ArgumentError("Tabulated knot " + std::to_string(i) + " is not finite and nonnegative");
    if (i > 0 && knots[i].t < knots[i - 1].t)
      throw ArgumentError("Tabulated knots must have non-decreasing t (knot " + std::to_string(i) + ")");
    if (i > 0 && knots[i].value > knots[i - 1].value)
      throw ArgumentError("Tabulated knot values must be non-increasing (knot " + std::to_string(i) + ")");
  }
  if (!(knots.front().t < knots.back().t)) throw ArgumentError("Tabulated knots span an empty range");
  Interval dom = domain.value_or(Interval(knots.front().t, knots.back().t, true, true));
  if (dom.lo > knots.front().t || dom.hi < knots.back().t)
    throw ArgumentError("Tabulated domain must contain all knots");
  return make(Tabulated{std::move(knots), right_continuous}, dom);
}

DecreasingFn DecreasingFn::custom(Custom c, Interval domain) {
  if (!c.value) throw ArgumentError("Custom function requires a value callback");
  return make(std::move(c), domain);
}

void DecreasingFn::check_domain(double t) const {
  if (!domain().contains(t))
    throw DomainError(family_name() + ": argument " + num(t) + " outside domain (" + num(domain().lo) + ", " +
                      num(domain().hi) + ")");
}

namespace {

double tab_eval(const DecreasingFn::Tabulated& tab, double t) {
  const auto& k = tab.knots;
  auto less_t = [](const DecreasingFn::Knot& a, double x) { return a.t < x; };
  if (tab.right_continuous) {
    auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const DecreasingFn::Knot& a) { return x < a.t; });
    if (it == k.begin()) return k.front().value;
    if (it == k.end()) return k.back().value;
    const auto& left = *(it - 1);
    if (left.t == t) return left.value;
    const auto& right = *it;
    const double w = (t - left.t) / (right.t - left.t);
    return left.value + w * (right.value - left.value);
  }
  auto it = std::lower_bound(k.begin(), k.end(), t, less_t);
  if (it == k.end()) return k.back().value;
  if (it->t == t || it == k.begin()) return it->value;
  const auto& left = *(it - 1);
  const auto& right = *it;
  const double w = (t - left.t) / (right.t - left.t);
  return left.value + w * (right.value - left.value);
}

}  // namespace

double DecreasingFn::operator()(double t) const {
  check_domain(t);
  return std::visit(
      [t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return f.C * std::pow(t, -f.b);
        } else if constexpr (std::is_same_v<T, LogPower>) {
          return std::pow(std::log(f.eps_scale / t), f.b);
        } else if constexpr (std::is_same_v<T, ExpPower>) {
          return std::exp(std::pow(t, -f.alpha));
        } else if constexpr (std::is_same_v<T, PsiEta>) {
          return f.psi(eta_value(f.k, t));
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          return tab_eval(f, t);
        } else {
          return f.value(t);
        }
      },
      family());
}

namespace {

double finite_difference(const DecreasingFn& f, double t) {
  const Interval& dom = f.domain();
  const double h = 1e-5 * (t != 0.0 ? std::abs(t) : 1.0);
  const bool left_ok = dom.contains(t - h);
  const bool right_ok = dom.contains(t + h);
  if (left_ok && right_ok) return (f(t + h) - f(t - h)) / (2.0 * h);
  if (right_ok) return (f(t + h) - f(t)) / h;
  if (left_ok) return (f(t) - f(t - h)) / h;
  throw DomainError("finite difference step leaves the domain at " + num(t));
}

}  // namespace

double DecreasingFn::derivative(double t) const {
  check_domain(t);
  return std::visit(
      [this, t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return -f.b * f.C * std::pow(t, -f.b - 1.0);
        } else if constexpr (std::is_same_v<T, LogPower>) {
          return -f.b * std::pow(std::log(f.eps_scale / t), f.b - 1.0) / t;
        } else if constexpr (std::is_same_v<T, ExpPower>) {
          return -f.alpha * std::pow(t, -f.alpha - 1.0) * std::exp(std::pow(t, -f.alpha));
        } else if constexpr (std::is_same_v<T, PsiEta>) {
          return f.psi.derivative(eta_value(f.k, t)) * eta_derivative(f.k, t);
        } else if constexpr (std::is_same_v<T, Custom>) {
          return f.deriv ? f.deriv(t) : finite_difference(*this, t);
        } else {
          return finite_difference(*this, t);
        }
      },
      family());
}

double DecreasingFn::log_value(double t) const {
  check_domain(t);
  return std::visit(
      [this, t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return std::log(f.C) - f.b * std::log(t);
        } else if constexpr (std::is_same_v<T, LogPower>) {
          return f.b * std::log(std::log(f.eps_scale / t));
        } else if constexpr (std::is_same_v<T, ExpPower>) {
          return std::pow(t, -f.alpha);
        } else if constexpr (std::is_same_v<T, Custom>) {
          return f.log_value ? f.log_value(t) : std::log(f.value(t));
        } else {
          return std::log((*this)(t));
        }
      },
      family());
}

double DecreasingFn::log_derivative(double t) const {
  check_domain(t);
  return std::visit(
      [this, t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return -f.b / t;
        } else if constexpr (std::is_same_v<T, LogPower>) {
          return -f.b / (t * std::log(f.eps_scale / t));
        } else if constexpr (std::is_same_v<T, ExpPower>) {
          return -f.alpha * std::pow(t, -f.alpha - 1.0);
        } else if constexpr (std::is_same_v<T, PsiEta>) {
          const double s = eta_value(f.k, t);
          return f.psi.derivative(s) * eta_derivative(f.k, t) / f.psi(s);
        } else {
          return derivative(t) / (*this)(t);
        }
      },
      family());
}

double DecreasingFn::limit_hi() const {
  return std::visit(
      [this](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, LogPower> || std::is_same_v<T, ExpPower>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, PsiEta>) {
          if (std::isfinite(domain().hi) || f.psi.beta() >= 0.0) return concave_limit_at_beta(f.psi);
          return std::max(0.0, f.psi(0.0));
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          return f.knots.back().value;
        } else {
          return f.limit_hi;
        }
      },
      family());
}

double DecreasingFn::log_level_inverse(double level) const {
  if (std::isnan(level)) throw DomainError("log_level_inverse of NaN");
  const Interval& dom = domain();
  auto le = [this, level](double t) { return log_value(t) <= level; };
  double guess = kInfinity;
  if (const auto* p = as<PowerLaw>()) {
    guess = std::exp((std::log(p->C) - level) / p->b);
  } else if (const auto* l = as<LogPower>()) {
    if (level < 0.0) throw DomainError("LogPower level below range");
    guess = l->eps_scale * std::exp(-std::exp(level / l->b));
  } else if (const auto* e = as<ExpPower>()) {
    if (!(level > 0.0)) throw DomainError("ExpPower level below range");
    guess = std::pow(level, -1.0 / e->alpha);
  }
  if (guess == 0.0) return 0.0;  // underflow: the level set starts below every positive double
  return polish(dom, le, guess);
}

std::string DecreasingFn::family_name() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) return "power_law";
        else if constexpr (std::is_same_v<T, LogPower>) return "log_power";
        else if constexpr (std::is_same_v<T, ExpPower>) return "exp_power";
        else if constexpr (std::is_same_v<T, PsiEta>) return "psi_eta";
        else if constexpr (std::is_same_v<T, Tabulated>) return "tabulated";
        else return f.label.empty() ? std::string("custom") : f.label;
      },
      family());
}

bool DecreasingFn::is_closed_form() const {
  return as<PowerLaw>() || as<LogPower>() || as<ExpPower>() || as<PsiEta>();
}

bool DecreasingFn::blows_up_at_lo(double probe, double factor) const {
  const Interval& dom = domain();
  if (!dom.contains(probe)) return false;
  double ref = std::isfinite(dom.hi) ? 0.5 * (dom.lo + dom.hi) : std::max(1.0, 2.0 * dom.lo);
  if (dom.hi_closed) ref = dom.hi;
  if (!(ref > probe) || !dom.contains(ref)) return false;
  return (*this)(probe) >= factor * (*this)(ref);
}

// ---------------------------------------------------------------- free functions

DecreasingFn fundamental_eta(int k) {
  if (k < 2) throw ArgumentError("fundamental_eta requires k >= 2");
  return DecreasingFn::psi_eta(ConcaveFn::power(1.0), k);
}

namespace {

double closed_form_guess(const DecreasingFn& f, double s) {
  if (const auto* p = f.as<DecreasingFn::PowerLaw>()) return std::pow(p->C / s, 1.0 / p->b);
  if (const auto* l = f.as<DecreasingFn::LogPower>()) return s >= 1.0 ? l->eps_scale * std::exp(-std::pow(s, 1.0 / l->b)) : kInfinity;
  if (const auto* e = f.as<DecreasingFn::ExpPower>()) return s > 1.0 ? std::pow(std::log(s), -1.0 / e->alpha) : kInfinity;
  if (const auto* q = f.as<DecreasingFn::PsiEta>()) {
    try {
      return eta_inverse(q->k, q->psi.inverse(s));
    } catch (const DomainError&) {
      return kInfinity;
    }
  }
  return kInfinity;
}

double inverse_value(const DecreasingFn& f, double s) {
  if (std::isnan(s)) throw DomainError("generalized inverse of NaN");
  if (s == kInfinity) return f.domain().first_point();
  // Composite functions may fail to evaluate far out; such points do not qualify.
  auto le = [&f, s](double t) {
    try {
      return f(t) <= s;
    } catch (const DomainError&) {
      return false;
    }
  };
  return polish(f.domain(), le, closed_form_guess(f, s));
}

DecreasingFn tabulated_inverse(const DecreasingFn& f, const DecreasingFn::Tabulated& tab) {
  std::vector<DecreasingFn::Knot> inv;
  inv.reserve(tab.knots.size() + 1);
  for (auto it = tab.knots.rbegin(); it != tab.knots.rend(); ++it) inv.push_back({it->value, it->t});
  const Interval& dom = f.domain();
  if (dom.lo < tab.knots.front().t) inv.push_back({tab.knots.front().value, dom.lo});
  const bool attains_last = dom.hi_closed || dom.hi > tab.knots.back().t;
  const double lo = tab.knots.back().value;
  if (!(inv.front().t < inv.back().t)) {
    // Constant table: the inverse is a single jump from the upper end to the lower end.
    const double first_t = std::min(dom.lo, tab.knots.front().t);
    inv = {{lo, tab.knots.back().t}, {lo, first_t}, {lo + 1.0, first_t}};
  }
  return DecreasingFn::tabulated(std::move(inv), Interval(lo, kInfinity, attains_last, false), true);
}

}  // namespace

DecreasingFn gen_inverse(const DecreasingFn& f) {
  if (const auto* tab = f.as<DecreasingFn::Tabulated>()) return tabulated_inverse(f, *tab);
  DecreasingFn::Custom c;
  c.label = "inverse(" + f.family_name() + ")";
  c.value = [f](double s) { return inverse_value(f, s); };
  if (f.is_closed_form()) {
    c.deriv = [f](double s) {
      const double t = inverse_value(f, s);
      return 1.0 / f.derivative(t);
    };
  }
  c.limit_hi = f.domain().lo;
  const Interval& dom = f.domain();
  return DecreasingFn::custom(std::move(c), Interval(f.limit_hi(), kInfinity, dom.hi_closed, false));
}

DecreasingFn right_regularize(const DecreasingFn& f) {
  if (const auto* tab = f.as<DecreasingFn::Tabulated>()) {
    if (tab->right_continuous) return f;
    return DecreasingFn::tabulated(tab->knots, f.domain(), true);
  }
  return f;
}

DecreasingFn as_psi_eta(const DecreasingFn& g, int k) {
  if (k < 2) throw ArgumentError("as_psi_eta requires k >= 2");
  std::optional<ConcaveFn> psi;
  if (const auto* q = g.as<DecreasingFn::PsiEta>()) {
    if (q->k != k) throw InvalidProfile("profile is built on eta for k=" + std::to_string(q->k));
    psi = q->psi;
  } else if (const auto* p = g.as<DecreasingFn::PowerLaw>()) {
    if (k == 2) throw InvalidProfile("a power law is not a concave function of log(1/t)");
    psi = ConcaveFn::power(p->b / (k - 2.0), p->C);
  } else if (const auto* l = g.as<DecreasingFn::LogPower>()) {
    if (k == 2) {
      psi = ConcaveFn::power(l->b, 1.0, std::log(l->eps_scale));
    } else {
      psi = ConcaveFn::log_power(l->b, std::pow(k - 2.0, -l->b), (k - 2.0) * std::log(l->eps_scale));
    }
  } else {
    throw InvalidProfile("profile family " + g.family_name() + " has no psi(eta) representation");
  }
  if (!psi->concavity_probe()) throw InvalidProfile("psi = " + psi->describe() + " fails the concavity probe");
  return DecreasingFn::psi_eta(*psi, k);
}

double domain_radius(const DecreasingFn& g) { return g.domain().hi; }

double bisect_doubles(double lo, double hi, const std::function<bool(double)>& pred) {
  std::uint64_t a = ordered_key(lo), b = ordered_key(hi);
  if (a > b) throw ArgumentError("bisect_doubles requires lo <= hi");
  if (pred(lo)) return lo;
  while (b - a > 1) {
    const std::uint64_t mid = a + (b - a) / 2;
    if (pred(from_key(mid))) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return from_key(b);
}

std::vector<DecreasingFn::Knot> load_knots_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open knot file " + path);
  std::vector<DecreasingFn::Knot> knots;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double t, v;
    if (!(ls >> t >> v)) {
      if (knots.empty() && lineno == 1) continue;  // header row
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    knots.push_back({t, v});
  }
  return knots;
}

}  // namespace growthbound
