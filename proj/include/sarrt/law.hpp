#ifndef SARRT_LAW_HPP
#define SARRT_LAW_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace sarrt {

enum class LawKind { Uniform, MaxOrder, MinOrder, Power, Constant, AtomMixture, Tabulated, Restricted };

inline const char* to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Uniform: return "Uniform";
    case LawKind::MaxOrder: return "MaxOrder";
    case LawKind::MinOrder: return "MinOrder";
    case LawKind::Power: return "Power";
    case LawKind::Constant: return "Constant";
    case LawKind::AtomMixture: return "AtomMixture";
    case LawKind::Tabulated: return "Tabulated";
    case LawKind::Restricted: return "Restricted";
  }
  return "?";
}

/// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x < hi; }
  double width() const noexcept { return hi - lo; }
};

/// Piecewise-linear density on [x.front(), x.back()], zero elsewhere.
/// Values are normalized so that the trapezoidal mass is exactly one.
class TabulatedDensity {
public:
  TabulatedDensity(std::vector<double> x, std::vector<double> f, std::string source = {})
      : x_(std::move(x)), f_(std::move(f)), source_(std::move(source)) {
    if (x_.size() < 2 || x_.size() != f_.size())
      throw InvalidLaw("tabulated density needs at least two (x, density) rows of equal length");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i]) || x_[i] < 0.0 || x_[i] > 1.0)
        throw InvalidLaw("tabulated breakpoint outside [0,1]: " + std::to_string(x_[i]));
      if (i > 0 && !(x_[i] > x_[i - 1]))
        throw InvalidLaw("tabulated breakpoints must be strictly increasing");
      if (!std::isfinite(f_[i]) || f_[i] < 0.0)
        throw InvalidLaw("tabulated density values must be finite and nonnegative");
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) total += 0.5 * (f_[i] + f_[i + 1]) * (x_[i + 1] - x_[i]);
    if (!(total > 0.0)) throw InvalidLaw("tabulated density has zero mass");
    for (auto& v : f_) v /= total;
    cumulative_.resize(x_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      cumulative_[i + 1] = cumulative_[i] + segment_mass(i);
    // trapezoid is exact for piecewise-linear f; pin the last node to 1
    cumulative_.back() = 1.0;
  }

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& f() const noexcept { return f_; }
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t segments() const noexcept { return x_.size() - 1; }

  double segment_mass(std::size_t i) const noexcept {
    return 0.5 * (f_[i] + f_[i + 1]) * (x_[i + 1] - x_[i]);
  }

  double density(double t) const noexcept {
    if (t < x_.front() || t > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    if (it == x_.end()) return f_.back();
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double w = x_[i + 1] - x_[i];
    return f_[i] + (f_[i + 1] - f_[i]) * (t - x_[i]) / w;
  }

private:
  std::vector<double> x_;
  std::vector<double> f_;
  std::vector<double> cumulative_;
  std::string source_;
};

class AttachmentLaw;

namespace law {

struct Uniform {};
struct MaxOrder {
  int k;
};
struct MinOrder {
  int k;
};
struct Power {
  double beta;
};
struct Constant {
  double theta;
};
struct AtomMixture {
  double p;
  std::shared_ptr<const AttachmentLaw> base;
};
struct Tabulated {
  std::shared_ptr<const TabulatedDensity> table;
};
/// `parent` conditioned on landing in `kept`; `mass` = P{parent in kept}.
struct Restricted {
  std::shared_ptr<const AttachmentLaw> parent;
  std::vector<Interval> kept;
  double mass;
};

}  // namespace law

/// Law of the attachment variable X on [0,1). Immutable; copies share state.
class AttachmentLaw {
public:
  using Variant = std::variant<law::Uniform, law::MaxOrder, law::MinOrder, law::Power, law::Constant,
                               law::AtomMixture, law::Tabulated, law::Restricted>;

  static AttachmentLaw uniform() { return AttachmentLaw(law::Uniform{}); }

  static AttachmentLaw max_order(int k) {
    if (k < 1) throw InvalidLaw("max order k must be a positive integer, got " + std::to_string(k));
    return AttachmentLaw(law::MaxOrder{k});
  }

  static AttachmentLaw min_order(int k) {
    if (k < 1) throw InvalidLaw("min order k must be a positive integer, got " + std::to_string(k));
    return AttachmentLaw(law::MinOrder{k});
  }

  /// X = U^beta.
  static AttachmentLaw power(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw InvalidLaw("power exponent must be positive and finite, got " + std::to_string(beta));
    return AttachmentLaw(law::Power{beta});
  }

  static AttachmentLaw constant(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
      throw InvalidLaw("constant theta must lie in (0,1), got " + std::to_string(theta));
    return AttachmentLaw(law::Constant{theta});
  }

  /// X = 0 with probability p, otherwise a draw from `base`.
  static AttachmentLaw atom_mixture(double p, const AttachmentLaw& base) {
    if (!(p >= 0.0 && p < 1.0))
      throw InvalidLaw("atom mass must lie in [0,1), got " + std::to_string(p));
    if (base.kind() == LawKind::AtomMixture) throw InvalidLaw("atom mixtures cannot be nested");
    return AttachmentLaw(law::AtomMixture{p, std::make_shared<const AttachmentLaw>(base)});
  }

  static AttachmentLaw tabulated(std::vector<double> x, std::vector<double> density, std::string source = {}) {
    return AttachmentLaw(law::Tabulated{
        std::make_shared<const TabulatedDensity>(std::move(x), std::move(density), std::move(source))});
  }

  /// Used by truncation; `mass` must equal P{parent in kept}.
  static AttachmentLaw restricted(const AttachmentLaw& parent, std::vector<Interval> kept, double mass) {
    if (!(mass > 0.0 && mass <= 1.0)) throw InvalidLaw("restricted law needs kept mass in (0,1]");
    if (kept.empty()) throw InvalidLaw("restricted law needs at least one kept interval");
    switch (parent.kind()) {
      case LawKind::Uniform:
      case LawKind::MaxOrder:
      case LawKind::MinOrder:
      case LawKind::Power:
      case LawKind::Tabulated: break;
      default: throw InvalidLaw("restriction requires a parent law with a density");
    }
    return AttachmentLaw(law::Restricted{std::make_shared<const AttachmentLaw>(parent), std::move(kept), mass});
  }

  LawKind kind() const noexcept { return static_cast<LawKind>(state_->index()); }
  const Variant& variant() const noexcept { return *state_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(*state_);
  }

  bool is_point_mass() const noexcept { return kind() == LawKind::Constant; }

  /// Mass at zero (0 unless this is an atom mixture).
  double atom_mass() const noexcept {
    if (const auto* m = std::get_if<law::AtomMixture>(state_.get())) return m->p;
    return 0.0;
  }

  /// Mini-language rendering (inverse of parse_law for non-internal kinds).
  std::string spec() const;

private:
  explicit AttachmentLaw(Variant v) : state_(std::make_shared<const Variant>(std::move(v))) {}

  std::shared_ptr<const Variant> state_;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string AttachmentLaw::spec() const {
  switch (kind()) {
    case LawKind::Uniform: return "uniform";
    case LawKind::MaxOrder: return "max:" + std::to_string(as<law::MaxOrder>().k);
    case LawKind::MinOrder: return "min:" + std::to_string(as<law::MinOrder>().k);
    case LawKind::Power: return "pow:" + detail::format_number(as<law::Power>().beta);
    case LawKind::Constant: return "const:" + detail::format_number(as<law::Constant>().theta);
    case LawKind::AtomMixture: {
      const auto& m = as<law::AtomMixture>();
      return "atom:" + detail::format_number(m.p) + "+" + m.base->spec();
    }
    case LawKind::Tabulated: {
      const auto& src = as<law::Tabulated>().table->source();
      return "table:" + (src.empty() ? std::string("<inline>") : src);
    }
    case LawKind::Restricted: {
      const auto& r = as<law::Restricted>();
      std::string out = "restrict(" + r.parent->spec();
      for (const auto& iv : r.kept) out += ",[" + detail::format_number(iv.lo) + "," + detail::format_number(iv.hi) + ")";
      return out + ")";
    }
  }
  return "?";
}

}  // namespace sarrt

#endif
