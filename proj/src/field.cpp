#include "hamel/field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/QR>

#include "hamel/parallel.hpp"

namespace hamel {

namespace {

// Phase table e^{i n theta_k}, rows n = 0..cutoff.
Eigen::ArrayXXcd phases(int cutoff, int samples) {
  Eigen::ArrayXXcd e(cutoff + 1, samples);
  for (int n = 0; n <= cutoff; ++n)
    for (int k = 0; k < samples; ++k) e(n, k) = std::polar(1.0, kTwoPi * n * k / samples);
  return e;
}

// Real field sum_{|n|<=N} c_n e^{in theta} from the n >= 0 half.
double synth(const Eigen::ArrayXXcd& e, const Eigen::Ref<const Eigen::ArrayXcd>& c, int k) {
  double v = c(0).real();
  for (Eigen::Index n = 1; n < c.size(); ++n) v += 2.0 * (c(n) * e(n, k)).real();
  return v;
}

// Last two decades of the grid, at least 8 nodes.
Eigen::Index tail_start(const RadialGrid& g) {
  const double from = g.r_max / 100.0;
  Eigen::Index j = 0;
  while (j < g.last() && g.radius(j) < from * (1.0 - 1e-12)) ++j;
  return std::min<Eigen::Index>(j, g.size() - 8);
}

}  // namespace

int default_theta_points(const SpectralSolution& s) { return std::max(8, 4 * s.cutoff); }

PhysicalField reconstruct(const SpectralSolution& s, int theta_points) {
  const int m = theta_points > 0 ? theta_points : default_theta_points(s);
  const Eigen::Index nodes = s.grid.size();
  const Eigen::ArrayXXcd e = phases(s.cutoff, m);
  PhysicalField f;
  f.radius = s.grid.radius;
  f.theta = RealArray::LinSpaced(m, 0.0, kTwoPi * (m - 1) / m);
  f.ur.resize(nodes, m);
  f.utheta.resize(nodes, m);
  f.vorticity.resize(nodes, m);
  Eigen::ArrayXcd in(s.cutoff + 1);
  for (int n = 0; n <= s.cutoff; ++n) in(n) = kI * static_cast<double>(n);
  for (Eigen::Index j = 0; j < nodes; ++j) {
    const double r = s.grid.radius(j);
    const Eigen::ArrayXcd radial = in * s.gamma.col(j) / r;
    const Eigen::ArrayXcd angular = -s.dgamma.col(j);
    const Eigen::ArrayXcd vort = s.w.col(j);
    for (int k = 0; k < m; ++k) {
      f.ur(j, k) = -s.flow.flux / r + synth(e, radial, k);
      f.utheta(j, k) = s.flow.circulation / r + synth(e, angular, k);
      f.vorticity(j, k) = synth(e, vort, k);
    }
  }
  return f;
}

BoundaryTrace velocity_trace(const SpectralSolution& s, Eigen::Index node, int samples) {
  if (node < 0 || node > s.grid.last()) throw InvalidInput("velocity_trace: node out of range");
  if (samples < 1) throw InvalidInput("velocity_trace: samples must be positive");
  const Eigen::ArrayXXcd e = phases(s.cutoff, samples);
  const double r = s.grid.radius(node);
  Eigen::ArrayXcd radial(s.cutoff + 1);
  for (int n = 0; n <= s.cutoff; ++n) radial(n) = kI * static_cast<double>(n) * s.gamma(n, node) / r;
  const Eigen::ArrayXcd angular = -s.dgamma.col(node);
  BoundaryTrace t{std::vector<double>(samples), std::vector<double>(samples)};
  for (int k = 0; k < samples; ++k) {
    t.ur[k] = -s.flow.flux / r + synth(e, radial, k);
    t.utheta[k] = s.flow.circulation / r + synth(e, angular, k);
  }
  return t;
}

double ns_residual(const SpectralSolution& s) {
  const int m = default_theta_points(s);
  const int cutoff = s.cutoff;
  const Eigen::Index nodes = s.grid.size();
  const Eigen::ArrayXXcd e = phases(cutoff, m);
  const RealArray& r = s.grid.radius;

  ModeTable wrr(cutoff + 1, nodes);
  for (int n = 0; n <= cutoff; ++n) wrr.row(n) = differentiate(s.grid, s.dw.row(n).transpose()).transpose();

  Eigen::ArrayXcd in(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) in(n) = kI * static_cast<double>(n);

  const Eigen::Index lo = 4, hi = nodes - 4;
  std::vector<double> per_node(nodes, 0.0);
  parallel_for(static_cast<std::size_t>(hi - lo), [&](std::size_t idx) {
    const Eigen::Index j = lo + static_cast<Eigen::Index>(idx);
    const double rj = r(j);
    const Eigen::ArrayXcd w = s.w.col(j), wr = s.dw.col(j), ww = wrr.col(j);
    const Eigen::ArrayXcd wth = in * w, wthth = in * in * w;
    const Eigen::ArrayXcd gth = in * s.gamma.col(j), gr = s.dgamma.col(j);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t1 = synth(e, ww, k);
      const double t2 = (s.flow.flux + 1.0) * synth(e, wr, k) / rj;
      const double t3 = synth(e, wthth, k) / (rj * rj);
      const double t4 = -s.flow.circulation * synth(e, wth, k) / (rj * rj);
      const double t5 = -synth(e, gth, k) / rj * synth(e, wr, k);
      const double t6 = synth(e, gr, k) / rj * synth(e, wth, k);
      worst = std::max(worst, std::abs(t1 + t2 + t3 + t4 + t5 + t6));
      scale = std::max(scale, std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) +
                                  std::abs(t5) + std::abs(t6));
    }
    per_node[j] = scale > 0.0 ? worst / scale : 0.0;
  });
  return *std::max_element(per_node.begin(), per_node.end());
}

double divergence_residual(const SpectralSolution& s, int theta_points) {
  const int m = theta_points > 0 ? theta_points : default_theta_points(s);
  const Eigen::ArrayXXcd e = phases(s.cutoff, m);
  // r u_r has modes i n gamma_n; its FD radial derivative must cancel
  // d_theta u_theta = -i n gamma_n'.
  ModeTable div(s.cutoff + 1, s.grid.size());
  for (int n = 0; n <= s.cutoff; ++n) {
    const ComplexArray g = s.gamma.row(n).transpose();
    const ComplexArray fd = differentiate(s.grid, g);
    div.row(n) = (kI * static_cast<double>(n) * (fd - s.dgamma.row(n).transpose()) / s.grid.radius).transpose();
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.grid.size(); ++j)
    for (int k = 0; k < m; ++k) worst = std::max(worst, std::abs(synth(e, div.col(j), k)));
  return worst;
}

double asymptotic_circulation(const SpectralSolution& s) {
  const Eigen::Index start = tail_start(s.grid);
  const Eigen::Index len = s.grid.size() - start;
  const RealArray r = s.grid.radius.tail(len);
  const RealArray c = s.flow.circulation - r * s.dgamma.row(0).real().transpose().tail(len);
  if (!c.allFinite()) throw NumericalError("asymptotic_circulation: non-finite samples");
  const double spread = c.maxCoeff() - c.minCoeff();
  if (spread <= 1e-14 * std::max(1.0, std::abs(c.mean()))) return c(len - 1);

  // For fixed q the fit is linear in (c0, c1); scan q, then refine.
  auto fit = [&](double q, double& c0) {
    Eigen::MatrixXd a(len, 2);
    a.col(0).setOnes();
    a.col(1) = r.pow(-q).matrix();
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(c.matrix());
    c0 = coef(0);
    return (a * coef - c.matrix()).squaredNorm();
  };
  double best_q = 0.0, best = std::numeric_limits<double>::infinity(), c0 = 0.0;
  for (double logq = -3.0; logq <= 1.0; logq += 0.02) {
    const double q = std::pow(10.0, logq);
    const double err = fit(q, c0);
    if (err < best) {
      best = err;
      best_q = q;
    }
  }
  double lo = best_q / std::pow(10.0, 0.02), hi = best_q * std::pow(10.0, 0.02);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double ca, cb;
    if (fit(a, ca) < fit(b, cb)) hi = b; else lo = a;
  }
  best_q = 0.5 * (lo + hi);
  fit(best_q, c0);
  if (!(best_q > 0.0) || !std::isfinite(c0))
    throw NumericalError("asymptotic_circulation: non-convergent tail");
  return c0;
}

double predicted_decay(const ReferenceFlow& flow, int n, double alpha) {
  if (n == 0) {
    const double homogeneous = flow.flux > 2.0 ? 2.0 - flow.flux : -2.0 * alpha;
    return std::max(homogeneous, -2.0 * alpha);
  }
  const double m = std::abs(n);
  return std::max({-m, decaying_real_part(flow, n) + 2.0, -2.0 * alpha});
}

DecayProfile decay_fit(const SpectralSolution& s, double alpha) {
  DecayProfile p;
  const double largest = s.gamma.abs().maxCoeff();
  const Eigen::Index start = tail_start(s.grid);
  const Eigen::Index len = s.grid.size() - start;
  const RealArray x = s.grid.log_radius.tail(len);
  double beta0 = std::numeric_limits<double>::infinity();
  double beta_sup1 = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= s.cutoff; ++n) {
    ModeDecay d;
    d.n = n;
    d.predicted = predicted_decay(s.flow, n, alpha);
    const RealArray mag = s.gamma.row(n).abs().transpose().tail(len);
    if (!(largest > 0.0) || mag.maxCoeff() < 1e-13 * largest || (mag <= 0.0).any()) {
      d.skipped = true;
      p.skipped.push_back(n);
      p.modes.push_back(d);
      continue;
    }
    const RealArray y = mag.log();
    const double xm = x.mean(), ym = y.mean();
    const double slope = ((x - xm) * (y - ym)).sum() / (x - xm).square().sum();
    d.slope = slope;
    d.fit_residual = std::sqrt((y - ym - slope * (x - xm)).square().mean());
    d.margin = d.predicted - slope;
    beta0 = std::min(beta0, -slope);
    if (n == 1) p.beta1 = -slope;
    if (n >= 2) beta_sup1 = std::min(beta_sup1, -slope);
    p.modes.push_back(d);
  }
  p.beta0 = std::isfinite(beta0) ? beta0 : 0.0;
  p.beta_sup1 = std::isfinite(beta_sup1) ? beta_sup1 : 0.0;
  return p;
}

void write_field_csv(std::ostream& os, const PhysicalField& f) {
  os << "r,theta,u_r,u_theta,w\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < f.radius.size(); ++j)
    for (Eigen::Index k = 0; k < f.theta.size(); ++k)
      os << f.radius(j) << ',' << f.theta(k) << ',' << f.ur(j, k) << ',' << f.utheta(j, k) << ','
         << f.vorticity(j, k) << '\n';
}

}  // namespace hamel
