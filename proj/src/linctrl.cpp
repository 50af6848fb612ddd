#include "netctl/linctrl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "netctl/errors.hpp"
#include "netctl/quadrature.hpp"

namespace netctl {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068;
constexpr double kTheta13 = 5.371920351148152;

MatrixXd pade_low(const MatrixXd& a, const std::vector<double>& b) {
  const Index n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd odd = b[1] * ident;
  MatrixXd even = b[0] * ident;
  MatrixXd power = ident;
  for (std::size_t j = 2; j < b.size(); j += 2) {
    power = power * a2;
    even += b[j] * power;
    odd += b[j + 1] * power;
  }
  const MatrixXd u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

MatrixXd pade13(const MatrixXd& a) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0,
                                 7771770303897600.0,  1187353796428800.0,
                                 129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,
                                 1323241920.0,        40840800.0,
                                 960960.0,            16380.0,
                                 182.0,               1.0};
  const Index n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * ident);
  const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

[[noreturn]] void overflow(const char* what, double t_f, const MatrixXd& a) {
  std::ostringstream msg;
  msg << what << " overflowed (t_f=" << t_f
      << ", ||A||_1=" << a.cwiseAbs().colwise().sum().maxCoeff() << ")";
  throw NumericOverflowError(msg.str());
}

struct Flow {
  MatrixXd phi;  // e^{A t}
  MatrixXd w;
};

MatrixXd hamiltonian(const MatrixXd& a, const MatrixXd& bbt) {
  const Index n = a.rows();
  MatrixXd m = MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a;
  m.topRightCorner(n, n) = bbt;
  m.bottomRightCorner(n, n) = -a.transpose();
  return m;
}

Flow gramian_flow(const MatrixXd& a, const MatrixXd& bbt, double t_f) {
  const Index n = a.rows();
  const MatrixXd e = matrix_exponential(t_f * hamiltonian(a, bbt));
  Flow f;
  f.phi = e.topLeftCorner(n, n);
  MatrixXd w = e.topRightCorner(n, n) * f.phi.transpose();
  f.w = 0.5 * (w + w.transpose());
  if (!all_finite(f.w) || !all_finite(f.phi)) overflow("Gramian", t_f, a);
  return f;
}

void check_system(const MatrixXd& a, Index b_rows, double t_f) {
  if (a.rows() != a.cols()) throw DimensionError("system matrix is not square");
  if (b_rows != a.rows()) throw DimensionError("input matrix row count differs from state dimension");
  if (!(t_f > 0) || !std::isfinite(t_f)) throw ParameterError("t_f must be positive");
}

double scale_floor(const VectorXd& diag) {
  return 1e-14 * std::max(diag.maxCoeff(), 1e-300);
}

// Matrix-valued adaptive Simpson; the error test is entrywise relative to
// sqrt(d_i d_j) so that small but nonzero blocks are resolved too.
class GramianQuadrature {
 public:
  GramianQuadrature(const MatrixXd& a, const MatrixXd& bbt, double tol)
      : a_(a), bbt_(bbt), tol_(tol) {}

  MatrixXd integrate(double t_f) {
    // Coarse pass to fix the entrywise error scale.
    const int coarse = 16;
    const double h = t_f / coarse;
    MatrixXd est = MatrixXd::Zero(a_.rows(), a_.cols());
    for (int i = 0; i <= coarse; ++i) {
      const double weight = (i == 0 || i == coarse) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      est += weight * integrand(i * h);
    }
    est *= h / 3.0;
    VectorXd d = est.diagonal().cwiseMax(0.0);
    const double floor = scale_floor(d);
    scale_ = (d.cwiseSqrt() * d.cwiseSqrt().transpose()).cwiseMax(floor);

    const MatrixXd fa = integrand(0.0);
    const MatrixXd fm = integrand(0.5 * t_f);
    const MatrixXd fb = integrand(t_f);
    const MatrixXd whole = t_f / 6.0 * (fa + 4.0 * fm + fb);
    MatrixXd w = refine(0.0, t_f, fa, fm, fb, whole, tol_, 0);
    return 0.5 * (w + w.transpose());
  }

 private:
  MatrixXd integrand(double t) const {
    const MatrixXd e = matrix_exponential(t * a_);
    return e * bbt_ * e.transpose();
  }

  MatrixXd refine(double lo, double hi, const MatrixXd& flo, const MatrixXd& fmid,
                  const MatrixXd& fhi, const MatrixXd& whole, double tol,
                  int depth) const {
    const double mid = 0.5 * (lo + hi);
    const MatrixXd fl = integrand(0.5 * (lo + mid));
    const MatrixXd fr = integrand(0.5 * (mid + hi));
    const MatrixXd left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const MatrixXd right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    const MatrixXd delta = left + right - whole;
    const double err = delta.cwiseAbs().cwiseQuotient(scale_).maxCoeff();
    if (err <= 15.0 * tol || depth >= 40) return left + right + delta / 15.0;
    return refine(lo, mid, flo, fl, fmid, left, 0.5 * tol, depth + 1) +
           refine(mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth + 1);
  }

  const MatrixXd& a_;
  const MatrixXd& bbt_;
  double tol_;
  MatrixXd scale_;
};

struct Solve {
  VectorXd z;
  bool pseudo = false;
};

Solve solve_gramian(const MatrixXd& w, const VectorXd& v) {
  Solve s;
  Eigen::LLT<MatrixXd> llt(w);
  if (llt.info() == Eigen::Success) {
    s.z = llt.solve(v);
    if (s.z.allFinite()) return s;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w);
  const VectorXd& lam = eig.eigenvalues();
  const double cutoff = 1e-13 * lam.maxCoeff();
  VectorXd inv = VectorXd::Zero(lam.size());
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
  }
  const MatrixXd& q = eig.eigenvectors();
  s.z = q * inv.asDiagonal() * (q.transpose() * v);
  s.pseudo = true;
  return s;
}

double input_energy_quadrature(const MatrixXd& u, double h) {
  std::vector<double> power(static_cast<std::size_t>(u.cols()));
  for (Index k = 0; k < u.cols(); ++k) power[static_cast<std::size_t>(k)] = u.col(k).squaredNorm();
  return simpson(power, h);
}

// Costate samples lambda_k = e^{A^T (tf - t_k)} z, k = 0..steps, integrated
// backwards from tf so every step multiplies by the stable-direction flow.
MatrixXd costate_samples(const MatrixXd& phi_step, const VectorXd& z,
                         std::size_t steps) {
  MatrixXd lam(z.size(), static_cast<Index>(steps + 1));
  lam.col(static_cast<Index>(steps)) = z;
  const MatrixXd back = phi_step.transpose();
  for (Index k = static_cast<Index>(steps); k > 0; --k) {
    lam.col(k - 1) = back * lam.col(k);
  }
  return lam;
}

}  // namespace

MatrixXd matrix_exponential(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix exponential of a non-square matrix");
  if (m.size() == 0) return m;
  if (!m.allFinite()) throw DomainError("matrix exponential of a non-finite matrix");
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm <= kTheta3) return pade_low(m, {120, 60, 12, 1});
  if (norm <= kTheta5) return pade_low(m, {30240, 15120, 3360, 420, 30, 1});
  if (norm <= kTheta7) {
    return pade_low(m, {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1});
  }
  if (norm <= kTheta9) {
    return pade_low(m, {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                        30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});
  }
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  MatrixXd r = pade13(m / std::ldexp(1.0, s));
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

MatrixXd gramian(const MatrixXd& a, const MatrixXd& b, double t_f,
                 GramianMethod method) {
  check_system(a, b.rows(), t_f);
  const MatrixXd bbt = b * b.transpose();
  if (method == GramianMethod::BlockExponential) return gramian_flow(a, bbt, t_f).w;
  MatrixXd w = GramianQuadrature(a, bbt, 1e-10).integrate(t_f);
  if (!all_finite(w)) overflow("Gramian", t_f, a);
  return w;
}

MatrixXd gramian(const MatrixXd& a, const ControlMatrix& b, double t_f,
                 GramianMethod method) {
  return gramian(a, b.dense(), t_f, method);
}

double gramian_discrepancy(const MatrixXd& w1, const MatrixXd& w2) {
  if (w1.rows() != w2.rows() || w1.cols() != w2.cols()) {
    throw DimensionError("Gramians differ in shape");
  }
  const VectorXd d = w1.diagonal().cwiseMax(0.0);
  const MatrixXd scale =
      (d.cwiseSqrt() * d.cwiseSqrt().transpose()).cwiseMax(scale_floor(d));
  return (w1 - w2).cwiseAbs().cwiseQuotient(scale).maxCoeff();
}

double condition_number(const MatrixXd& w) {
  if (w.rows() != w.cols()) throw DimensionError("Gramian is not square");
  const double size = w.cwiseAbs().maxCoeff();
  if (!(size > 0)) return std::numeric_limits<double>::infinity();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * size) {
    throw ValidationError("Gramian is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 1e-300) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

void ControlProblem::validate() const {
  check_system(a, static_cast<Index>(b.n), t_f);
  if (x0.size() != a.rows() || xf.size() != a.rows()) {
    throw DimensionError("state vectors do not match the system dimension");
  }
  if (b.columns.empty()) throw ParameterError("control matrix has no columns");
  for (const auto& c : b.columns) {
    if (c.node >= b.n) throw ParameterError("input node outside the state dimension");
  }
}

ControlOutcome minimum_energy(const ControlProblem& p, const ControlOptions& options) {
  p.validate();
  if (options.grid_intervals < 2) throw ParameterError("time grid needs at least two intervals");
  const MatrixXd b = p.b.dense();
  const Flow flow = gramian_flow(p.a, b * b.transpose(), p.t_f);

  ControlOutcome out;
  out.w = flow.w;
  out.c_w = condition_number(flow.w);
  if (!std::isfinite(out.c_w)) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(flow.w);
    const VectorXd& lam = eig.eigenvalues();
    const double cutoff = std::max(1e-13 * lam.maxCoeff(), 1e-300);
    Index k = 0;
    while (k < lam.size() && lam(k) <= cutoff) ++k;
    throw UncontrollableError("Gramian is singular", eig.eigenvectors().leftCols(std::max<Index>(k, 1)));
  }
  out.controllable = out.c_w < options.cw_threshold;

  const VectorXd v = p.xf - flow.phi * p.x0;
  const Solve s = solve_gramian(flow.w, v);
  out.z = s.z;
  out.used_pseudo_inverse = s.pseudo;
  out.energy = v.dot(s.z);

  const std::size_t steps = options.grid_intervals;
  const double h = p.t_f / static_cast<double>(steps);
  const MatrixXd lam = costate_samples(matrix_exponential(h * p.a), s.z, steps);
  out.u_samples = b.transpose() * lam;
  out.times.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) out.times[k] = h * static_cast<double>(k);
  out.energy_quadrature = input_energy_quadrature(out.u_samples, h);
  return out;
}

ControlOutcome simulate_control(const ControlProblem& p, ControlOutcome out,
                                std::size_t steps, Integrator integrator) {
  p.validate();
  if (steps < 100) throw ParameterError("simulation needs at least 100 steps");
  if (out.z.size() != p.a.rows()) throw DimensionError("outcome does not belong to this problem");
  const Index n = p.a.rows();
  const MatrixXd b = p.b.dense();
  const double h = p.t_f / static_cast<double>(steps);

  MatrixXd step_flow, drive;
  if (integrator == Integrator::Costate) {
    const MatrixXd e = matrix_exponential(h * hamiltonian(p.a, b * b.transpose()));
    step_flow = e.topLeftCorner(n, n);
    drive = e.topRightCorner(n, n);
  } else {
    const Index m = b.cols();
    MatrixXd aug = MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = p.a;
    aug.topRightCorner(n, m) = b;
    const MatrixXd e = matrix_exponential(h * aug);
    step_flow = e.topLeftCorner(n, n);
    drive = e.topRightCorner(n, m);
  }
  const MatrixXd lam = costate_samples(step_flow, out.z, steps);
  out.u_samples = b.transpose() * lam;
  MatrixXd forcing;
  if (integrator == Integrator::Costate) {
    forcing = lam;
  } else {
    const Index k = static_cast<Index>(steps);
    forcing = 0.5 * (out.u_samples.leftCols(k) + out.u_samples.rightCols(k));
  }

  out.x_samples.resize(n, static_cast<Index>(steps + 1));
  out.x_samples.col(0) = p.x0;
  for (Index k = 0; k < static_cast<Index>(steps); ++k) {
    out.x_samples.col(k + 1) = step_flow * out.x_samples.col(k) + drive * forcing.col(k);
  }
  out.x_final = out.x_samples.col(static_cast<Index>(steps));
  if (!out.x_final.allFinite() || !out.u_samples.allFinite()) {
    overflow("state trajectory", p.t_f, p.a);
  }
  out.times.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) out.times[k] = h * static_cast<double>(k);
  out.energy_quadrature = input_energy_quadrature(out.u_samples, h);
  out.e_x = (out.x_final - p.xf).norm() / std::max(p.xf.norm(), 1.0);
  return out;
}

OracleEnergy oracle_energy(const ControlProblem& p, std::size_t k_steps) {
  p.validate();
  if (k_steps < 50) throw ParameterError("oracle needs at least 50 intervals");
  const Index n = p.a.rows();
  const MatrixXd b = p.b.dense();
  const Index m = b.cols();
  const double dt = p.t_f / static_cast<double>(k_steps);

  MatrixXd aug = MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = p.a;
  aug.topRightCorner(n, m) = b;
  const MatrixXd e = matrix_exponential(dt * aug);
  const MatrixXd phi = e.topLeftCorner(n, n);

  // Column block j maps the input held on interval j to the final state.
  const Index k = static_cast<Index>(k_steps);
  MatrixXd reach(n, k * m);
  MatrixXd block = e.topRightCorner(n, m) / std::sqrt(dt);
  for (Index j = k - 1; j >= 0; --j) {
    reach.middleCols(j * m, m) = block;
    block = phi * block;
  }
  const VectorXd v = p.xf - matrix_exponential(p.t_f * p.a) * p.x0;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(reach);
  OracleEnergy r;
  r.rank_deficient = cod.rank() < n;
  r.energy = cod.solve(v).squaredNorm();
  return r;
}

MatrixXd chain_matrix(std::size_t l, ChainDirection direction) {
  if (l < 1) throw ParameterError("chain needs at least one node");
  const Index n = static_cast<Index>(l);
  MatrixXd a = MatrixXd::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    a(i + 1, i) = 1.0;
    if (direction == ChainDirection::Bidirectional) a(i, i + 1) = 1.0;
  }
  return a;
}

double h_matrix_min_eigenvalue(const MatrixXd& a, const MatrixXd& w, double t_f) {
  const MatrixXd back = matrix_exponential(-t_f * a);
  MatrixXd h = back * w * back.transpose();
  h = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

ChainAnalytics chain_energy(std::size_t l, double t_f, ChainDirection direction) {
  if (l < 2 || l > 12) throw ParameterError("chain length must lie in [2, 12]");
  if (!(t_f > 0)) throw ParameterError("t_f must be positive");
  ChainAnalytics c;
  c.l = l;
  c.t_f = t_f;
  c.direction = direction;
  const Index n = static_cast<Index>(l);
  const MatrixXd a = chain_matrix(l, direction);
  MatrixXd b = MatrixXd::Zero(n, 1);
  b(0, 0) = 1.0;
  const Flow flow = gramian_flow(a, b * b.transpose(), t_f);
  const VectorXd v = -flow.phi.col(n - 1);
  c.e_l = v.dot(solve_gramian(flow.w, v).z);
  c.lambda_h_min = h_matrix_min_eigenvalue(a, flow.w, t_f);
  c.c_w = condition_number(flow.w);

  double fact = 1.0;
  for (std::size_t i = 2; i <= l; ++i) fact *= static_cast<double>(i);
  c.bound = static_cast<double>(l + 1) * fact * fact / std::pow(t_f, 2.0 * static_cast<double>(l));

  const double denom = static_cast<double>(l + 1);
  c.eigenvectors.resize(n, n);
  for (std::size_t i = 1; i <= l; ++i) {
    c.eigenvalues.push_back(2.0 * std::cos(std::numbers::pi * static_cast<double>(i) / denom));
    for (std::size_t j = 1; j <= l; ++j) {
      c.eigenvectors(static_cast<Index>(j - 1), static_cast<Index>(i - 1)) =
          std::sqrt(2.0 / denom) *
          std::sin(std::numbers::pi * static_cast<double>(i * j) / denom);
    }
  }
  return c;
}

VectorXd random_unit_vector(std::size_t n, Rng& rng) {
  VectorXd v(static_cast<Index>(n));
  do {
    for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

nlohmann::json to_json(const ControlOutcome& o) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  return {{"cw", num(o.c_w)},
          {"energy", num(o.energy)},
          {"energy_quadrature", num(o.energy_quadrature)},
          {"ex", num(o.e_x)},
          {"controllable", o.controllable},
          {"pseudo_inverse", o.used_pseudo_inverse}};
}

nlohmann::json to_json(const ChainAnalytics& c) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  return {{"l", c.l},
          {"tf", c.t_f},
          {"direction", c.direction == ChainDirection::Unidirectional ? "uni" : "bi"},
          {"energy", num(c.e_l)},
          {"lambda_h_min", num(c.lambda_h_min)},
          {"energy_times_lambda", num(c.e_l * c.lambda_h_min)},
          {"cw", num(c.c_w)},
          {"bound", num(c.bound)},
          {"eigenvalues", c.eigenvalues}};
}

}  // namespace netctl
