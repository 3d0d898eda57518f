#include "hamel/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/LU>

namespace hamel {

namespace {

constexpr int kStencil = 8;   // interpolation points per panel
constexpr int kFdStencil = 9; // finite-difference points
constexpr int kTailNodes = 5;

using PanelWeights = std::array<std::array<double, kStencil>, kStencil - 1>;

// Weights of int_{o}^{o+1} p(u) du for the degree-7 interpolant p through
// u = 0..7, one row per panel offset o.
const PanelWeights& panel_weights() {
  static const PanelWeights table = [] {
    PanelWeights out{};
    for (int o = 0; o < kStencil - 1; ++o) {
      Eigen::MatrixXd vander(kStencil, kStencil);
      Eigen::VectorXd moments(kStencil);
      const double shift = 3.5;  // centring keeps the Vandermonde well scaled
      for (int p = 0; p < kStencil; ++p) {
        for (int k = 0; k < kStencil; ++k) vander(p, k) = std::pow(k - shift, p);
        const double a = o - shift, b = o + 1 - shift;
        moments(p) = (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
      }
      Eigen::VectorXd w = vander.fullPivLu().solve(moments);
      for (int k = 0; k < kStencil; ++k) out[o][k] = w(k);
    }
    return out;
  }();
  return table;
}

void require_finite(const ComplexArray& f, const char* who) {
  if (!f.allFinite()) throw NumericalError(std::string(who) + ": non-finite samples");
}

Eigen::Index stencil_start(Eigen::Index j, Eigen::Index last) {
  return std::clamp<Eigen::Index>(j - (kStencil / 2 - 1), 0, last - (kStencil - 1));
}

}  // namespace

RadialGrid build_grid(double r_max, int nodes_per_decade, double tail_exponent_floor) {
  if (!(r_max > 1.0)) throw InvalidInput("build_grid: r_max must exceed 1");
  if (nodes_per_decade < 16) throw InvalidInput("build_grid: nodes_per_decade must be >= 16");
  const double decades = std::log10(r_max);
  // Guard against log10 round-off turning an exact product into ceil + 1.
  const double raw = nodes_per_decade * decades;
  Eigen::Index intervals = static_cast<Eigen::Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  if (intervals < kMinIntervals)
    throw InvalidInput("build_grid: fewer than 32 intervals; raise r_max or nodes_per_decade");

  RadialGrid g;
  g.r_max = r_max;
  g.log_step = std::log(r_max) / static_cast<double>(intervals);
  g.tail_exponent_floor = tail_exponent_floor;
  g.log_radius = RealArray::LinSpaced(intervals + 1, 0.0, std::log(r_max));
  for (Eigen::Index j = 0; j <= intervals; ++j) g.log_radius(j) = g.log_step * static_cast<double>(j);
  g.radius = g.log_radius.exp();
  g.radius(0) = 1.0;
  g.radius(intervals) = r_max;
  return g;
}

PowerLawTail fit_tail(const RadialGrid& grid, const ComplexArray& f) {
  const Eigen::Index last = grid.last();
  PowerLawTail tail{f(last), Complex(grid.tail_exponent_floor, 0.0)};
  if (f(last) == Complex(0.0)) return tail;
  for (int k = 0; k < kTailNodes; ++k)
    if (f(last - k) == Complex(0.0)) return tail;

  // Unwrapped complex logarithm along the last nodes.
  std::array<Complex, kTailNodes> logs{};
  const Eigen::Index first = last - (kTailNodes - 1);
  logs[0] = std::log(f(first));
  for (int k = 1; k < kTailNodes; ++k)
    logs[k] = logs[k - 1] + std::log(f(first + k) / f(first + k - 1));

  double xbar = 0.0;
  Complex lbar = 0.0;
  for (int k = 0; k < kTailNodes; ++k) {
    xbar += grid.log_radius(first + k);
    lbar += logs[k];
  }
  xbar /= kTailNodes;
  lbar /= static_cast<double>(kTailNodes);
  double sxx = 0.0;
  Complex sxl = 0.0;
  for (int k = 0; k < kTailNodes; ++k) {
    const double dx = grid.log_radius(first + k) - xbar;
    sxx += dx * dx;
    sxl += dx * (logs[k] - lbar);
  }
  Complex p = sxl / sxx;
  if (p.real() > grid.tail_exponent_floor) p.real(grid.tail_exponent_floor);
  tail.exponent = p;
  return tail;
}

ComplexArray integrate_out(const RadialGrid& grid, const ComplexArray& f, Complex zeta) {
  require_finite(f, "integrate_out");
  const Eigen::Index last = grid.last();
  const double h = grid.log_step;
  const auto& weights = panel_weights();
  const ComplexArray g = grid.radius.square().cast<Complex>() * f;

  // shift[d + 7] = exp(-zeta h d)
  std::array<Complex, 15> shift{};
  for (int d = -7; d <= 7; ++d) shift[d + 7] = std::exp(-zeta * h * static_cast<double>(d));

  ComplexArray out(grid.size());
  const PowerLawTail tail = fit_tail(grid, f);
  if (tail.value == Complex(0.0)) {
    out(last) = 0.0;
  } else {
    const Complex power = 2.0 + tail.exponent - zeta;
    if (!(power.real() < 0.0))
      throw NumericalError("integrate_out: divergent tail (integrand exponent >= -1)");
    out(last) = g(last) / (-power);
  }
  const Complex step = std::exp(-zeta * h);
  for (Eigen::Index j = last - 1; j >= 0; --j) {
    const Eigen::Index s = stencil_start(j, last);
    const auto& w = weights[j - s];
    Complex panel = 0.0;
    for (int k = 0; k < kStencil; ++k) panel += w[k] * g(s + k) * shift[s + k - j + 7];
    out(j) = h * panel + step * out(j + 1);
  }
  return out;
}

ComplexArray integrate_in(const RadialGrid& grid, const ComplexArray& f, Complex zeta) {
  require_finite(f, "integrate_in");
  const Eigen::Index last = grid.last();
  const double h = grid.log_step;
  const auto& weights = panel_weights();
  const ComplexArray g = grid.radius.square().cast<Complex>() * f;

  std::array<Complex, 15> shift{};
  for (int d = -7; d <= 7; ++d) shift[d + 7] = std::exp(-zeta * h * static_cast<double>(d));

  ComplexArray in(grid.size());
  in(0) = 0.0;
  const Complex step = std::exp(zeta * h);
  for (Eigen::Index j = 0; j < last; ++j) {
    const Eigen::Index s = stencil_start(j, last);
    const auto& w = weights[j - s];
    Complex panel = 0.0;
    for (int k = 0; k < kStencil; ++k) panel += w[k] * g(s + k) * shift[s + k - (j + 1) + 7];
    in(j + 1) = step * in(j) + h * panel;
  }
  return in;
}

Complex integrate_out(const RadialGrid& grid, const ComplexArray& f, Eigen::Index j, Complex zeta) {
  if (j < 0 || j > grid.last()) throw InvalidInput("integrate_out: node index out of range");
  return integrate_out(grid, f, zeta)(j);
}

Complex integrate_in(const RadialGrid& grid, const ComplexArray& f, Eigen::Index j, Complex zeta) {
  if (j < 0 || j > grid.last()) throw InvalidInput("integrate_in: node index out of range");
  return integrate_in(grid, f, zeta)(j);
}

namespace detail {

Eigen::MatrixXd fd_weights(double z, const Eigen::VectorXd& x, int m) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0;
  double c4 = x(0) - z;
  c(0, 0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Eigen::Index mn = std::min<Eigen::Index>(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - z;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (Eigen::Index k = mn; k >= 1; --k)
          c(i, k) = c1 * (static_cast<double>(k) * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (Eigen::Index k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - static_cast<double>(k) * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

}  // namespace detail

namespace {

// Derivatives in x = log r of order 1 and 2 at every node.
std::pair<ComplexArray, ComplexArray> log_derivatives(const RadialGrid& grid, const ComplexArray& f) {
  const Eigen::Index last = grid.last();
  const double h = grid.log_step;
  ComplexArray d1(grid.size()), d2(grid.size());
  Eigen::VectorXd offsets(kFdStencil);
  for (Eigen::Index j = 0; j <= last; ++j) {
    const Eigen::Index s = std::clamp<Eigen::Index>(j - kFdStencil / 2, 0, last - (kFdStencil - 1));
    for (int k = 0; k < kFdStencil; ++k) offsets(k) = static_cast<double>(s + k - j);
    const Eigen::MatrixXd w = detail::fd_weights(0.0, offsets, 2);
    Complex a = 0.0, b = 0.0;
    for (int k = 0; k < kFdStencil; ++k) {
      a += w(k, 1) * f(s + k);
      b += w(k, 2) * f(s + k);
    }
    d1(j) = a / h;
    d2(j) = b / (h * h);
  }
  return {d1, d2};
}

}  // namespace

ComplexArray differentiate(const RadialGrid& grid, const ComplexArray& f) {
  auto [dx, dxx] = log_derivatives(grid, f);
  return dx / grid.radius.cast<Complex>();
}

ComplexArray differentiate2(const RadialGrid& grid, const ComplexArray& f) {
  auto [dx, dxx] = log_derivatives(grid, f);
  return (dxx - dx) / grid.radius.square().cast<Complex>();
}

double log_log_slope(const RadialGrid& grid, const ComplexArray& f, double r_from) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    if (grid.radius(j) < r_from * (1.0 - 1e-12)) continue;
    const double mag = std::abs(f(j));
    if (!(mag > 0.0)) continue;
    const double x = grid.log_radius(j), y = std::log(mag);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw NumericalError("log_log_slope: fewer than two nonzero samples");
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace hamel
