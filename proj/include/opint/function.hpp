#pragma once

// Scalar functions on R^2: the bandlimited catalog, slotwise divided
// differences with the coincident-point derivative rule, and the
// (1 - i t)^{-1} weighting used for unbounded second arguments.

#include "opint/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace opint {

using ScalarFn = std::function<Complex(double, double)>;

// c * exp(i (a s + b t))
struct FourierMode {
  double a = 0.0;
  double b = 0.0;
  Complex c{0.0, 0.0};

  double radius() const { return std::hypot(a, b); }
  Complex operator()(double s, double t) const { return c * std::exp(kI * (a * s + b * t)); }
};

namespace detail {
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

// Immutable function value. Catalog instances carry exact Fourier metadata
// and analytic partials; custom ones may carry neither.
class FunctionR2 {
 public:
  FunctionR2(std::string label, ScalarFn evaluate, std::optional<ScalarFn> partial_x = std::nullopt,
             std::optional<ScalarFn> partial_y = std::nullopt)
      : state_(std::make_shared<State>(State{std::move(label), std::move(evaluate),
                                             std::move(partial_x), std::move(partial_y),
                                             std::nullopt})) {}

  // Trigonometric polynomial. Equal frequencies are merged and zero
  // coefficients dropped, so support_radius() is exact.
  static FunctionR2 from_modes(std::vector<FourierMode> modes, std::string label = {}) {
    std::map<std::pair<double, double>, Complex> merged;
    for (const auto& m : modes) merged[{m.a, m.b}] += m.c;
    auto kept = std::make_shared<std::vector<FourierMode>>();
    for (const auto& [freq, c] : merged)
      if (c != Complex(0.0, 0.0)) kept->push_back({freq.first, freq.second, c});

    if (label.empty()) label = modes_label(*kept);
    ScalarFn eval = [kept](double s, double t) {
      Complex acc{0.0, 0.0};
      for (const auto& m : *kept) acc += m(s, t);
      return acc;
    };
    ScalarFn px = [kept](double s, double t) {
      Complex acc{0.0, 0.0};
      for (const auto& m : *kept) acc += kI * m.a * m(s, t);
      return acc;
    };
    ScalarFn py = [kept](double s, double t) {
      Complex acc{0.0, 0.0};
      for (const auto& m : *kept) acc += kI * m.b * m(s, t);
      return acc;
    };
    FunctionR2 f(std::move(label), std::move(eval), std::move(px), std::move(py));
    f.state_->modes = *kept;
    return f;
  }

  Complex operator()(double s, double t) const { return state_->evaluate(s, t); }
  Complex evaluate(double s, double t) const { return state_->evaluate(s, t); }

  bool has_partials() const { return state_->partial_x && state_->partial_y; }
  bool has_partial_x() const { return state_->partial_x.has_value(); }
  bool has_partial_y() const { return state_->partial_y.has_value(); }

  Complex partial_x(double s, double t) const {
    if (!state_->partial_x)
      throw CapabilityError("function '" + label() + "' has no partial_x; supply analytic partials");
    return (*state_->partial_x)(s, t);
  }
  Complex partial_y(double s, double t) const {
    if (!state_->partial_y)
      throw CapabilityError("function '" + label() + "' has no partial_y; supply analytic partials");
    return (*state_->partial_y)(s, t);
  }
  const std::optional<ScalarFn>& partial_x_fn() const { return state_->partial_x; }
  const std::optional<ScalarFn>& partial_y_fn() const { return state_->partial_y; }

  const std::optional<std::vector<FourierMode>>& fourier_modes() const { return state_->modes; }
  bool has_modes() const { return state_->modes.has_value(); }

  // max |ξ_j| over the modes; nullopt without Fourier metadata.
  std::optional<double> support_radius() const {
    if (!state_->modes) return std::nullopt;
    double r = 0.0;
    for (const auto& m : *state_->modes) r = std::max(r, m.radius());
    return r;
  }

  const std::string& label() const { return state_->label; }

 private:
  struct State {
    std::string label;
    ScalarFn evaluate;
    std::optional<ScalarFn> partial_x;
    std::optional<ScalarFn> partial_y;
    std::optional<std::vector<FourierMode>> modes;
  };

  static std::string modes_label(const std::vector<FourierMode>& modes) {
    using detail::fmt_num;
    auto one = [](const FourierMode& m) {
      if (m.c == Complex(1.0, 0.0)) return "plane_wave:" + fmt_num(m.a) + "," + fmt_num(m.b);
      return "mode:" + fmt_num(m.a) + "," + fmt_num(m.b) + "," + fmt_num(m.c.real()) + "," +
             fmt_num(m.c.imag());
    };
    if (modes.empty()) return "zero";
    if (modes.size() == 1) return one(modes.front());
    std::string s = "sum(";
    for (std::size_t i = 0; i < modes.size(); ++i) s += (i ? "," : "") + one(modes[i]);
    return s + ")";
  }

  std::shared_ptr<State> state_;
};

// ---------------------------------------------------------------------------
// Catalog constructors. Mode-carrying inputs give mode-carrying outputs.

namespace catalog {

inline FunctionR2 zero() { return FunctionR2::from_modes({}); }

inline FunctionR2 plane_wave(double a, double b) { return FunctionR2::from_modes({{a, b, 1.0}}); }

inline FunctionR2 mode(double a, double b, Complex c) { return FunctionR2::from_modes({{a, b, c}}); }

inline FunctionR2 trig_poly(std::vector<FourierMode> modes) {
  return FunctionR2::from_modes(std::move(modes));
}

inline FunctionR2 constant(Complex c) {
  if (c.imag() == 0.0) return FunctionR2::from_modes({{0.0, 0.0, c}}, "const:" + detail::fmt_num(c.real()));
  return FunctionR2::from_modes({{0.0, 0.0, c}});
}

inline FunctionR2 sum(const std::vector<FunctionR2>& terms) {
  if (terms.empty()) return zero();
  std::string label = "sum(";
  bool all_modes = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    label += (i ? "," : "") + terms[i].label();
    all_modes = all_modes && terms[i].has_modes();
  }
  label += ")";
  if (all_modes) {
    std::vector<FourierMode> modes;
    for (const auto& f : terms) modes.insert(modes.end(), f.fourier_modes()->begin(), f.fourier_modes()->end());
    return FunctionR2::from_modes(std::move(modes), std::move(label));
  }
  ScalarFn eval = [terms](double s, double t) {
    Complex acc{0.0, 0.0};
    for (const auto& f : terms) acc += f(s, t);
    return acc;
  };
  std::optional<ScalarFn> px, py;
  if (std::all_of(terms.begin(), terms.end(), [](const auto& f) { return f.has_partial_x(); }))
    px = [terms](double s, double t) {
      Complex acc{0.0, 0.0};
      for (const auto& f : terms) acc += f.partial_x(s, t);
      return acc;
    };
  if (std::all_of(terms.begin(), terms.end(), [](const auto& f) { return f.has_partial_y(); }))
    py = [terms](double s, double t) {
      Complex acc{0.0, 0.0};
      for (const auto& f : terms) acc += f.partial_y(s, t);
      return acc;
    };
  return FunctionR2(std::move(label), std::move(eval), std::move(px), std::move(py));
}

inline FunctionR2 sum(const FunctionR2& f, const FunctionR2& g) { return sum(std::vector{f, g}); }

inline FunctionR2 scale(const FunctionR2& f, Complex c) {
  std::string label = "scale(" + f.label() + "," + detail::fmt_num(c.real()) + "," + detail::fmt_num(c.imag()) + ")";
  if (f.has_modes()) {
    auto modes = *f.fourier_modes();
    for (auto& m : modes) m.c *= c;
    return FunctionR2::from_modes(std::move(modes), std::move(label));
  }
  std::optional<ScalarFn> px, py;
  if (f.has_partial_x()) px = [f, c](double s, double t) { return c * f.partial_x(s, t); };
  if (f.has_partial_y()) py = [f, c](double s, double t) { return c * f.partial_y(s, t); };
  return FunctionR2(std::move(label), [f, c](double s, double t) { return c * f(s, t); }, std::move(px),
                    std::move(py));
}

// (s, t) -> f(λ s, λ t); frequencies scale by λ.
inline FunctionR2 dilate(const FunctionR2& f, double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ValidationError("dilate: lambda must be a positive finite number");
  std::string label = "dilate(" + f.label() + "," + detail::fmt_num(lambda) + ")";
  if (f.has_modes()) {
    auto modes = *f.fourier_modes();
    for (auto& m : modes) {
      m.a *= lambda;
      m.b *= lambda;
    }
    return FunctionR2::from_modes(std::move(modes), std::move(label));
  }
  std::optional<ScalarFn> px, py;
  if (f.has_partial_x())
    px = [f, lambda](double s, double t) { return lambda * f.partial_x(lambda * s, lambda * t); };
  if (f.has_partial_y())
    py = [f, lambda](double s, double t) { return lambda * f.partial_y(lambda * s, lambda * t); };
  return FunctionR2(
      std::move(label), [f, lambda](double s, double t) { return f(lambda * s, lambda * t); },
      std::move(px), std::move(py));
}

// Test hooks: coordinate functions and squares (not bandlimited).
inline FunctionR2 coordinate_x() {
  return FunctionR2(
      "x", [](double s, double) { return Complex(s); }, [](double, double) { return Complex(1.0); },
      [](double, double) { return Complex(0.0); });
}
inline FunctionR2 coordinate_y() {
  return FunctionR2(
      "y", [](double, double t) { return Complex(t); }, [](double, double) { return Complex(0.0); },
      [](double, double) { return Complex(1.0); });
}
inline FunctionR2 square_x() {
  return FunctionR2(
      "x2", [](double s, double) { return Complex(s * s); }, [](double s, double) { return Complex(2 * s); },
      [](double, double) { return Complex(0.0); });
}
inline FunctionR2 square_y() {
  return FunctionR2(
      "y2", [](double, double t) { return Complex(t * t); }, [](double, double) { return Complex(0.0); },
      [](double, double t) { return Complex(2 * t); });
}

}  // namespace catalog

// ---------------------------------------------------------------------------
// Divided differences. The derivative branch fires only on exact equality.

enum class DividedDifferenceKind { first, second };

inline Complex divided_difference_first(const FunctionR2& f, double x1, double x2, double y) {
  if (x1 != x2) return (f(x1, y) - f(x2, y)) / (x1 - x2);
  if (!f.has_partial_x()) {
    std::ostringstream os;
    os << "divided_difference_first: coincident arguments x1 = x2 = " << x1 << " need partial_x of '"
       << f.label() << "'; supply analytic partials";
    throw CapabilityError(os.str());
  }
  return f.partial_x(x1, y);
}

inline Complex divided_difference_second(const FunctionR2& f, double x, double y1, double y2) {
  if (y1 != y2) return (f(x, y1) - f(x, y2)) / (y1 - y2);
  if (!f.has_partial_y()) {
    std::ostringstream os;
    os << "divided_difference_second: coincident arguments y1 = y2 = " << y1 << " need partial_y of '"
       << f.label() << "'; supply analytic partials";
    throw CapabilityError(os.str());
  }
  return f.partial_y(x, y1);
}

// (s, t) -> f(s, t) / (1 - i t). Fourier metadata is dropped.
inline FunctionR2 f_sharp(const FunctionR2& f) {
  auto w = [](double t) { return 1.0 / Complex(1.0, -t); };
  std::optional<ScalarFn> px, py;
  if (f.has_partial_x()) px = [f, w](double s, double t) { return f.partial_x(s, t) * w(t); };
  if (f.has_partial_y())
    py = [f, w](double s, double t) {
      const Complex wt = w(t);
      return f.partial_y(s, t) * wt + f(s, t) * kI * wt * wt;
    };
  return FunctionR2(
      "sharp(" + f.label() + ")", [f, w](double s, double t) { return f(s, t) * w(t); }, std::move(px),
      std::move(py));
}

// ---------------------------------------------------------------------------
// Sup-norm bounds for trigonometric polynomials.

inline constexpr int kDefaultSupGrid = 4096;

// [lower, upper] enclosing sup|f| for a mode-carrying f. upper = Σ|c_j|;
// lower = max(max_j |c_j|, max over a grid_n x grid_n sample grid). The grid
// covers one period of the lowest nonzero frequency component per axis.
// grid_n = 0 skips sampling.
inline Interval sup_norm(const FunctionR2& f, int grid_n = kDefaultSupGrid) {
  if (!f.has_modes())
    throw CapabilityError("sup_norm: function '" + f.label() + "' has no Fourier metadata");
  const auto& modes = *f.fourier_modes();
  double upper = 0.0;
  double lower = 0.0;
  for (const auto& m : modes) {
    upper += std::abs(m.c);
    lower = std::max(lower, std::abs(m.c));
  }
  if (modes.size() <= 1 || grid_n <= 0) return {lower, upper};

  double omega_min = std::numeric_limits<double>::infinity();
  for (const auto& m : modes) {
    if (m.a != 0) omega_min = std::min(omega_min, std::abs(m.a));
    if (m.b != 0) omega_min = std::min(omega_min, std::abs(m.b));
  }
  const double side = std::isfinite(omega_min) ? 2.0 * std::numbers::pi / omega_min : 1.0;
  const double h = side / grid_n;
  const std::size_t nm = modes.size();

  // Row-by-row separable evaluation: f(s_i, t_k) = Σ_j c_j e^{i a_j s_i} e^{i b_j t_k}.
  std::vector<Complex> eb(nm * grid_n);
  for (std::size_t j = 0; j < nm; ++j)
    for (int k = 0; k < grid_n; ++k) eb[j * grid_n + k] = std::exp(kI * (modes[j].b * (k * h)));
  std::vector<Complex> row(grid_n);
  std::vector<Complex> ca(nm);
  for (int i = 0; i < grid_n; ++i) {
    for (std::size_t j = 0; j < nm; ++j) ca[j] = modes[j].c * std::exp(kI * (modes[j].a * (i * h)));
    std::fill(row.begin(), row.end(), Complex(0.0, 0.0));
    for (std::size_t j = 0; j < nm; ++j) {
      const Complex* e = &eb[j * grid_n];
      for (int k = 0; k < grid_n; ++k) row[k] += ca[j] * e[k];
    }
    for (int k = 0; k < grid_n; ++k) lower = std::max(lower, std::abs(row[k]));
  }
  return {std::min(lower, upper), upper};
}

// ---------------------------------------------------------------------------
// Compact textual specs, e.g. "sum(plane_wave:1,0,scale(mode:0,3,1,0,0.5))".
//
//   zero | x | y | x2 | y2
//   const:re | plane_wave:a,b | mode:a,b,re,im
//   sum(f, ...) | trig_poly(f, ...) | scale(f,re[,im]) | dilate(f,lambda) | sharp(f)

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view s) : s_(s) {}

  FunctionR2 parse() {
    FunctionR2 f = term();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "function spec '" << s_ << "': " << what << " at offset " << pos_;
    throw ValidationError(os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a function name");
    return std::string(s_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  std::vector<double> numbers(std::size_t count) {
    std::vector<double> out{number()};
    while (out.size() < count) {
      expect(',');
      out.push_back(number());
    }
    return out;
  }

  FunctionR2 term() {
    const std::string name = ident();
    if (name == "zero") return catalog::zero();
    if (name == "x") return catalog::coordinate_x();
    if (name == "y") return catalog::coordinate_y();
    if (name == "x2") return catalog::square_x();
    if (name == "y2") return catalog::square_y();

    if (peek(':')) {
      ++pos_;
      if (name == "const") return catalog::constant(number());
      if (name == "plane_wave") {
        auto v = numbers(2);
        return catalog::plane_wave(v[0], v[1]);
      }
      if (name == "mode") {
        auto v = numbers(4);
        return catalog::mode(v[0], v[1], {v[2], v[3]});
      }
      fail("unknown leaf '" + name + "'");
    }

    expect('(');
    FunctionR2 result = catalog::zero();
    if (name == "sum" || name == "trig_poly") {
      std::vector<FunctionR2> terms{term()};
      while (peek(',')) {
        ++pos_;
        terms.push_back(term());
      }
      result = catalog::sum(terms);
    } else if (name == "scale") {
      FunctionR2 f = term();
      expect(',');
      const double re = number();
      double im = 0.0;
      if (peek(',')) {
        ++pos_;
        im = number();
      }
      result = catalog::scale(f, {re, im});
    } else if (name == "dilate") {
      FunctionR2 f = term();
      expect(',');
      result = catalog::dilate(f, number());
    } else if (name == "sharp") {
      result = f_sharp(term());
    } else {
      fail("unknown function '" + name + "'");
    }
    expect(')');
    return result;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FunctionR2 parse_function_spec(std::string_view spec) { return detail::SpecParser(spec).parse(); }

}  // namespace opint
