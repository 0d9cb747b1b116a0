#include "kam/diophantine.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

#include "kam/errors.hpp"

namespace kam {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Nearest integer l to x and |x - l|, zeroed at the rounding level of x.
std::pair<long long, double> nearest(double x) {
  const double l = std::nearbyint(x);
  double d = std::abs(x - l);
  if (d <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) d = 0.0;
  return {static_cast<long long>(l), d};
}

// Calls f(k) for every k in Z^n with |k|_inf <= K (k = 0 included).
template <class F>
void for_each_mode(int n, int K, F&& f) {
  std::vector<int> k(n, -K);
  while (true) {
    f(k);
    int i = n - 1;
    while (i >= 0 && k[i] == K) k[i--] = -K;
    if (i < 0) return;
    ++k[i];
  }
}

bool positive_half(const std::vector<int>& k) {
  for (int v : k)
    if (v != 0) return v > 0;
  return false;
}

// h in Z^p with 1 <= |h|_1 <= 2.
std::vector<std::vector<int>> small_h(int p) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < p; ++i)
    for (int s : {1, -1, 2, -2}) {
      std::vector<int> h(p, 0);
      h[i] = s;
      out.push_back(h);
    }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          std::vector<int> h(p, 0);
          h[i] = si;
          h[j] = sj;
          out.push_back(h);
        }
  return out;
}

}  // namespace

std::vector<double> positive_arguments(const Eigen::MatrixXd& A) {
  std::vector<double> args;
  if (A.size() == 0) return args;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  const auto ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int j = 0; j < ev.size(); ++j)
    if (ev(j).imag() > 1e-12 * scale) args.push_back(std::arg(ev(j)));
  return args;
}

DiophantineReport verify_conditions(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& A, double tau,
                                    int K_check) {
  if (K_check < 1) throw ShapeError("verify_conditions: K_check must be >= 1");
  if (alpha.size() < 1) throw ShapeError("verify_conditions: alpha is empty");
  if (A.rows() != A.cols()) throw ShapeError("verify_conditions: A must be square");
  const int n = static_cast<int>(alpha.size());
  DiophantineReport rep;
  rep.tau = tau;
  rep.K_check = K_check;
  rep.gamma_tangential = std::numeric_limits<double>::infinity();
  rep.gamma_mixed = std::numeric_limits<double>::infinity();

  const std::vector<double> args = positive_arguments(A);
  rep.mixed_vacuous = args.empty();
  const auto hs = small_h(static_cast<int>(args.size()));
  DiophantineWorst wt, wm;

  for_each_mode(n, K_check, [&](const std::vector<int>& k) {
    double ka = 0.0;
    int norm = 0;
    for (int i = 0; i < n; ++i) {
      ka += k[i] * alpha(i);
      norm += std::abs(k[i]);
    }
    if (positive_half(k)) {
      const auto [l, d] = nearest(ka);
      const double v = d * std::pow(static_cast<double>(norm), tau);
      if (v < rep.gamma_tangential) {
        rep.gamma_tangential = v;
        wt = {k, l, {}, "tangential", v};
      }
    }
    for (const auto& h : hs) {
      double x = two_pi * ka;
      for (std::size_t j = 0; j < h.size(); ++j) x += h[j] * args[j];
      const auto [l, d] = nearest(x / two_pi);
      const double v = two_pi * d * std::pow(1.0 + norm, tau);
      if (v < rep.gamma_mixed) {
        rep.gamma_mixed = v;
        wm = {k, l, h, "mixed", v};
      }
    }
  });

  if (n == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (long long k = 1; k <= K_check; ++k) {
      const double d = nearest(k * alpha(0)).second;
      if (d < best) {
        best = d;
        rep.best_denominators.push_back(k);
      }
      if (d == 0.0) break;
    }
  }

  const bool mixed_wins = !rep.mixed_vacuous && rep.gamma_mixed < rep.gamma_tangential;
  rep.gamma_emp = mixed_wins ? rep.gamma_mixed : rep.gamma_tangential;
  rep.worst = mixed_wins ? wm : wt;
  return rep;
}

nlohmann::json diophantine_to_json(const DiophantineReport& r) {
  nlohmann::json j{{"gamma_emp", r.gamma_emp},
                   {"tau", r.tau},
                   {"K_check", r.K_check},
                   {"gamma_tangential", r.gamma_tangential},
                   {"mixed_vacuous", r.mixed_vacuous},
                   {"worst",
                    {{"k", r.worst.k},
                     {"l", r.worst.l},
                     {"h", r.worst.h},
                     {"condition", r.worst.condition},
                     {"value", r.worst.value}}}};
  if (r.mixed_vacuous)
    j["mixed"] = "vacuous: no eigenvalue with positive imaginary part";
  else
    j["gamma_mixed"] = r.gamma_mixed;
  if (!r.best_denominators.empty()) j["best_denominators"] = r.best_denominators;
  return j;
}

}  // namespace kam
