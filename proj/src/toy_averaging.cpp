#include "ellflow/toy_averaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ellflow {

Eigen::VectorXd ToySystem::kernel_projection(const Eigen::VectorXd& u) const {
  const Eigen::Index p = L.rows() / 4;
  const auto Qk = Q.leftCols(p);
  return Qk * (Qk.transpose() * u);
}

Eigen::VectorXd ToySystem::forcing(double t) const {
  return fa * std::cos(t) + fb * std::sin(2.0 * t);
}

Eigen::VectorXd ToySystem::free_solution(double omega, double t) const {
  const Eigen::Index n = L.rows(), p = n / 4;
  Eigen::VectorXd v = Q.transpose() * u0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const Eigen::Index j = p + 2 * static_cast<Eigen::Index>(i);
    const double a = omega * sigma[i] * t;
    const double c = std::cos(a), s = std::sin(a);
    const double v1 = v(j), v2 = v(j + 1);
    v(j) = c * v1 + s * v2;
    v(j + 1) = -s * v1 + c * v2;
  }
  return Q * v;
}

ToySystem make_toy_system(std::size_t n, std::uint64_t seed, bool with_forcing) {
  if (n == 0 || n % 4 != 0 || n > 64)
    throw std::invalid_argument("make_toy_system: n must be a multiple of 4 in [4, 64]");
  const Eigen::Index ni = static_cast<Eigen::Index>(n), p = ni / 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> freq(0.5, 2.0);

  Eigen::MatrixXd G(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) G(i, j) = gauss(rng);
  ToySystem sys;
  sys.Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(ni, ni);
  const std::size_t n_blocks = static_cast<std::size_t>((ni - p) / 2);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const double s = freq(rng);
    sys.sigma.push_back(s);
    const Eigen::Index j = p + 2 * static_cast<Eigen::Index>(i);
    S(j, j + 1) = s;
    S(j + 1, j) = -s;
  }
  sys.L = sys.Q * S * sys.Q.transpose();
  sys.C = 1.0 / *std::min_element(sys.sigma.begin(), sys.sigma.end());

  sys.u0.resize(ni);
  for (Eigen::Index i = 0; i < ni; ++i) sys.u0(i) = gauss(rng);
  sys.u0.normalize();
  sys.fa = Eigen::VectorXd::Zero(ni);
  sys.fb = Eigen::VectorXd::Zero(ni);
  if (with_forcing) {
    for (Eigen::Index i = 0; i < ni; ++i) sys.fa(i) = 0.5 * gauss(rng);
    for (Eigen::Index i = 0; i < ni; ++i) sys.fb(i) = 0.5 * gauss(rng);
  }
  return sys;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

ToyTrajectory integrate_toy(const ToySystem& sys, double omega, double T,
                            double tol) {
  const Eigen::Index n = sys.L.rows();
  // augmented state y = (u, int_0^t u); the integral gets solver-order accuracy
  Eigen::VectorXd y(2 * n);
  y.head(n) = sys.u0;
  y.tail(n).setZero();

  auto rhs = [&](double t, const Eigen::VectorXd& yy) {
    Eigen::VectorXd d(2 * n);
    d.head(n) = omega * (sys.L * yy.head(n)) + sys.forcing(t);
    d.tail(n) = yy.head(n);
    return d;
  };

  const double sig_max = *std::max_element(sys.sigma.begin(), sys.sigma.end());
  double h = std::min(T, 0.1 / (omega * sig_max + 1.0));
  double t = 0.0;
  ToyTrajectory traj;
  traj.M = sys.u0.norm();

  Eigen::VectorXd k1 = rhs(t, y);
  while (t < T) {
    if (t + h > T) h = T - t;
    const Eigen::VectorXd k2 = rhs(t + h / 5, y + h * (a21 * k1));
    const Eigen::VectorXd k3 = rhs(t + 0.3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 =
        rhs(t + 0.8 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = rhs(
        t + 8.0 / 9 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = rhs(t + h, y5);
    const Eigen::VectorXd err_vec =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      const double sc = tol + tol * std::abs(y(i));
      const double r = err_vec(i) / sc;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(2 * n));

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      traj.M = std::max(traj.M, y.head(n).norm());
      ++traj.steps;
      if (traj.steps > 100000000)
        throw std::runtime_error("integrate_toy: step limit exceeded");
    }
    const double fac =
        std::clamp(0.9 * std::pow(err > 0 ? 1.0 / err : 1e4, 0.2), 0.2, 5.0);
    h *= fac;
  }
  traj.u_final = y.head(n);
  traj.integral = y.tail(n);
  return traj;
}

ToyAveragingReport toy_averaging_verify(std::size_t n, std::uint64_t seed,
                                        const std::vector<double>& omegas,
                                        double T, bool with_forcing) {
  if (T <= 0.0) throw std::invalid_argument("toy_averaging_verify: T must be > 0");
  ToySystem sys = make_toy_system(n, seed, with_forcing);

  double m_prime = 0.0;
  for (int i = 0; i <= 2000; ++i)
    m_prime = std::max(m_prime, sys.forcing(T * i / 2000.0).norm());

  ToyAveragingReport report;
  report.n = n;
  report.seed = seed;
  report.T = T;
  report.C = sys.C;
  report.sigma = sys.sigma;
  for (double omega : omegas) {
    ToyTrajectory traj = integrate_toy(sys, omega, T);
    const Eigen::VectorXd avg = traj.integral / T;
    const double lhs = (avg - sys.kernel_projection(avg)).norm();
    const double rhs = (sys.C / omega) * (2.0 * traj.M / T + m_prime);
    const bool pass = lhs <= rhs * (1.0 + 1e-9);
    report.rows.push_back({omega, lhs, rhs, pass});
    report.all_pass = report.all_pass && pass;
  }
  return report;
}

}  // namespace ellflow
