#pragma once

// Green functions of (-Delta)^m with Dirichlet data on spherical shells r0 < |x| < r1,
// one spherical-harmonic mode at a time, and their assembly through zonal kernels.
//
// In t = log(1/r) the q-th mode of (-Delta)^m is (-1)^m e^{2mt} P_q(d/dt) with the monic
// P_q(s) = prod_j (s - (q+n-2-2j)) (s + q + 2j), so the mode kernel w(t, tau) solves
// P_q w = (-1)^m e^{(n-2m) tau} delta(t - tau) with d^k w = 0 (k < m) at both ends.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "polyreg/counterexample.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/exppoly.hpp"
#include "polyreg/fundsol.hpp"
#include "polyreg/rational.hpp"

namespace polyreg {

using LD = long double;

struct ShellDomain {
  LD r0 = 1;
  LD r1 = 4;
  int n = 3;

  void validate() const {
    if (!(r0 > 0) || !(r1 > r0)) throw RangeError("shell needs 0 < r0 < r1");
    if (n < 2) throw RangeError("shell needs n >= 2");
  }
  // t-interval (T1, T0) = (log 1/r1, log 1/r0)
  [[nodiscard]] LD T1() const { return -std::log(r1); }
  [[nodiscard]] LD T0() const { return -std::log(r0); }
  [[nodiscard]] bool contains(LD r) const { return r > r0 && r < r1; }
  [[nodiscard]] LD distance(LD r) const { return std::min(r - r0, r1 - r); }
  // Image under x -> x/|x|^2.
  [[nodiscard]] ShellDomain kelvin() const { return {1 / r1, 1 / r0, n}; }
};

// Mode-q kernel on a shell, precomputed for all source positions tau.
class ModeGreen {
 public:
  ModeGreen(const ShellDomain& shell, int m, int q) : shell_(shell), m_(m), q_(q) {
    shell.validate();
    if (m < 1 || q < 0) throw RangeError("ModeGreen: need m >= 1 and q >= 0");
    const int n = shell.n;
    std::map<long, int> mult;
    for (int j = 0; j < m; ++j) {
      ++mult[static_cast<long>(q) + n - 2 - 2 * j];
      ++mult[-static_cast<long>(q) - 2 * j];
    }
    bool repeated = false;
    for (const auto& [s, k] : mult) {
      roots_.push_back({static_cast<LD>(s), k});
      repeated = repeated || k > 1;
    }
    scale_ = 1;
    for (const auto& r : roots_) scale_ = std::max(scale_, std::abs(r.s));
    build_fundamental(mult, repeated);
    build_basis();
  }

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] const ShellDomain& shell() const { return shell_; }
  [[nodiscard]] LD rcond() const { return rcond_; }

  // d^k F at x for the decaying fundamental solution F of P_q (right limit at 0 unless !right).
  [[nodiscard]] LD fundamental(LD x, unsigned k, bool right = true) const {
    if (exact_) return exact_eval_.derivative(x, k, right);
    LD acc = 0;
    if (x > 0 || (x == 0 && right)) {
      for (const auto& [s, kappa] : residues_)
        if (s < 0) acc += kappa * ipow(s, k) * std::exp(s * x);
    } else {
      for (const auto& [s, kappa] : residues_)
        if (s >= 0) acc -= kappa * ipow(s, k) * std::exp(s * x);
    }
    return acc;
  }

  // d_t^a d_tau^b w(t, tau).
  [[nodiscard]] LD operator()(LD t, LD tau, unsigned a = 0, unsigned b = 0) const {
    const int n = shell_.n;
    const LD J = (m_ % 2 == 0 ? 1.0L : -1.0L) * std::exp((n - 2 * m_) * tau);
    const LD rate = n - 2 * m_;
    LD total = 0, binom = 1;
    for (unsigned i = 0; i <= b; ++i) {
      if (i > 0) binom = binom * (b - i + 1) / i;
      const Eigen::Matrix<LD, Eigen::Dynamic, 1> c = coefficients(tau, i);
      LD bracket = (i % 2 == 0 ? 1 : -1) * fundamental(t - tau, a + i);
      for (std::size_t k = 0; k < basis_.size(); ++k) bracket += c(static_cast<Eigen::Index>(k)) * basis_derivative(k, t, a);
      total += binom * ipow(rate, b - i) * J * bracket;
    }
    return total;
  }

  // Largest violation of the imposed end conditions, relative to the kernel scale at tau.
  [[nodiscard]] LD boundary_residual(LD tau) const {
    LD worst = 0, ref = 0;
    for (unsigned k = 0; k < static_cast<unsigned>(2 * m_); ++k) {
      const LD sk = std::max<LD>(1, ipow(scale_, k));
      ref = std::max({ref, std::abs(fundamental(0, k)) / sk, std::abs(fundamental(0, k, false)) / sk});
    }
    for (unsigned k = 0; k < static_cast<unsigned>(m_); ++k) {
      const LD sk = ipow(scale_, k);
      worst = std::max(worst, std::abs((*this)(shell_.T1(), tau, k)) / std::max<LD>(1, sk));
      worst = std::max(worst, std::abs((*this)(shell_.T0(), tau, k)) / std::max<LD>(1, sk));
    }
    const LD J = std::exp((shell_.n - 2 * m_) * tau);
    return worst / (J * std::max(ref, std::numeric_limits<LD>::min()));
  }

 private:
  struct Root {
    LD s;
    int mult;
  };
  struct BasisFn {
    LD s;
    unsigned power;
    LD anchor;
  };

  static LD ipow(LD x, unsigned k) {
    LD r = 1;
    for (unsigned i = 0; i < k; ++i) r *= x;
    return r;
  }

  void build_fundamental(const std::map<long, int>& mult, bool repeated) {
    if (repeated) {
      DiffOp d;
      for (const auto& [s, k] : mult)
        for (int i = 0; i < k; ++i) d.roots.push_back(Rational(s));
      exact_ = true;
      exact_eval_ = ExpPolyEvaluator(fundamental_solution(d));
      return;
    }
    for (const auto& ri : roots_) {
      LD prod = 1;
      for (const auto& rj : roots_)
        if (rj.s != ri.s) prod *= ri.s - rj.s;
      residues_.emplace_back(ri.s, 1 / prod);
    }
  }

  // Exponential basis anchored where it is largest: e^{s(t - T0)} for s > 0, e^{s(t - T1)} otherwise.
  void build_basis() {
    const LD T0 = shell_.T0(), T1 = shell_.T1();
    for (const auto& r : roots_)
      for (int p = 0; p < r.mult; ++p) basis_.push_back({r.s, static_cast<unsigned>(p), r.s > 0 ? T0 : T1});
    const auto N = static_cast<Eigen::Index>(basis_.size());
    Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic> A(N, N);
    for (Eigen::Index row = 0; row < N; ++row) {
      const bool at_inner = row < m_;  // rows 0..m-1 at T1, m..2m-1 at T0
      const unsigned k = static_cast<unsigned>(at_inner ? row : row - m_);
      const LD T = at_inner ? T1 : T0;
      for (Eigen::Index col = 0; col < N; ++col)
        A(row, col) = basis_derivative(static_cast<std::size_t>(col), T, k) / ipow(scale_, k);
    }
    lu_ = A.fullPivLu();
    rcond_ = lu_.rcond();
    if (!lu_.isInvertible() || rcond_ < 1e-17L)
      throw IllConditioned("mode " + std::to_string(q_) + ": boundary matrix rcond " +
                           std::to_string(static_cast<double>(rcond_)));
  }

  [[nodiscard]] LD basis_derivative(std::size_t idx, LD t, unsigned k) const {
    const auto& bf = basis_[idx];
    const LD u = t - bf.anchor;
    // d^k (u^p e^{s u}) = e^{s u} sum_i C(k,i) p!/(p-i)! u^{p-i} s^{k-i}
    LD acc = 0, binom = 1, falling = 1;
    for (unsigned i = 0; i <= std::min(k, bf.power); ++i) {
      if (i > 0) {
        binom = binom * (k - i + 1) / i;
        falling *= bf.power - i + 1;
      }
      acc += binom * falling * ipow(u, bf.power - i) * ipow(bf.s, k - i);
    }
    return acc * std::exp(bf.s * u);
  }

  // j-th tau-derivative of the boundary coefficients c(tau).
  [[nodiscard]] Eigen::Matrix<LD, Eigen::Dynamic, 1> coefficients(LD tau, unsigned j) const {
    const auto N = static_cast<Eigen::Index>(basis_.size());
    Eigen::Matrix<LD, Eigen::Dynamic, 1> rhs(N);
    const LD sgn = j % 2 == 0 ? 1 : -1;
    for (Eigen::Index row = 0; row < N; ++row) {
      const bool at_inner = row < m_;
      const unsigned k = static_cast<unsigned>(at_inner ? row : row - m_);
      const LD T = at_inner ? shell_.T1() : shell_.T0();
      rhs(row) = -sgn * fundamental(T - tau, k + j) / ipow(scale_, k);
    }
    return lu_.solve(rhs);
  }

  ShellDomain shell_;
  int m_;
  int q_;
  std::vector<Root> roots_;
  std::vector<std::pair<LD, LD>> residues_;
  bool exact_ = false;
  ExpPolyEvaluator exact_eval_;
  std::vector<BasisFn> basis_;
  LD scale_ = 1;
  Eigen::FullPivLU<Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>> lu_;
  LD rcond_ = 0;
};

// ---- zonal kernels --------------------------------------------------------------

inline LD sphere_area(int n) {
  return 2 * std::pow(std::numbers::pi_v<LD>, n / 2.0L) / std::tgamma(n / 2.0L);
}

// Number of independent spherical harmonics of degree q on S^{n-1}.
inline LD harmonic_dimension(int q, int n) {
  auto binom = [](long a, long b) -> LD {
    if (a < b || b < 0) return 0;
    LD r = 1;
    for (long i = 1; i <= b; ++i) r = r * static_cast<LD>(a - b + i) / static_cast<LD>(i);
    return r;
  };
  return binom(q + n - 1, n - 1) - binom(q + n - 3, n - 1);
}

// Z_q(x) = N(q,n)/|S^{n-1}| P_q(x), P_q the Gegenbauer polynomial normalised by P_q(1) = 1.
class ZonalSequence {
 public:
  ZonalSequence(int n, LD x) : n_(n), x_(x), nu_(n / 2.0L - 1) {}
  // Z_q for consecutive q = 0, 1, 2, ...
  LD next() {
    LD P;
    if (q_ == 0) P = 1;
    else if (q_ == 1) P = x_;
    else {
      const LD q = q_ - 1;  // P_{q+1} from P_q, P_{q-1}
      P = ((2 * q + 2 * nu_) * x_ * p1_ - q * p0_) / (q + 2 * nu_);
    }
    p0_ = p1_;
    p1_ = P;
    const LD z = harmonic_dimension(q_, n_) / sphere_area(n_) * P;
    ++q_;
    return z;
  }

 private:
  int n_;
  LD x_;
  LD nu_;
  int q_ = 0;
  LD p0_ = 0, p1_ = 0;
};

// ---- assembly ---------------------------------------------------------------------

// Point pair in polar form and the orders of the radial derivatives d_r^a d_rho^b.
struct GreenQuery {
  LD r = 0;
  LD rho = 0;
  LD cos_angle = 1;
  unsigned dr = 0;
  unsigned drho = 0;
};

// d_r^k = (-1)^k e^{kt} sum_j c_j d_t^j, c from c'_j = k c_j + c_{j-1}.
inline std::vector<LD> radial_to_log(unsigned k) {
  std::vector<LD> c{1};
  for (unsigned step = 0; step < k; ++step) {
    std::vector<LD> next(c.size() + 1, 0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j] += step * c[j];
      next[j + 1] += c[j];
    }
    c = std::move(next);
  }
  return c;
}

// Mode contribution of a query before the zonal factor.
inline LD mode_value(const ModeGreen& g, const GreenQuery& qy) {
  const LD t = -std::log(qy.r), tau = -std::log(qy.rho);
  const auto cr = radial_to_log(qy.dr), cs = radial_to_log(qy.drho);
  LD acc = 0;
  for (std::size_t j = 0; j < cr.size(); ++j)
    for (std::size_t l = 0; l < cs.size(); ++l)
      if (cr[j] != 0 && cs[l] != 0) acc += cr[j] * cs[l] * g(t, tau, static_cast<unsigned>(j), static_cast<unsigned>(l));
  const LD sign = (qy.dr + qy.drho) % 2 == 0 ? 1 : -1;
  return sign * std::exp(qy.dr * t + qy.drho * tau) * acc;
}

struct AssemblyOptions {
  int q_start = 64;
  int q_cap = 1 << 19;
  LD rel_tol = 1e-6L;
  unsigned jobs = 1;
  int chunk = 2048;
};

struct AssembledValue {
  LD value = 0;
  int modes = 0;          // modes summed
  LD tail_estimate = 0;   // max(|S_Q - S_{Q/2}|, |last term|)
  bool converged = false;
};

namespace detail {

// Neumaier-compensated accumulator: the same order of additions gives the same bits.
struct Accumulator {
  LD sum = 0, comp = 0;
  void add(LD x) {
    const LD t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  [[nodiscard]] LD value() const { return sum + comp; }
};

}  // namespace detail

// Sum_q mode values times zonal kernels, doubling the truncation from q_start until the
// change falls below rel_tol. Mode solves run in fixed chunks, so the result does not
// depend on the number of threads.
inline std::vector<AssembledValue> assemble_green(const ShellDomain& shell, int m, const std::vector<GreenQuery>& queries,
                                                  const AssemblyOptions& opt = {}) {
  shell.validate();
  for (const auto& qy : queries)
    if (!shell.contains(qy.r) || !shell.contains(qy.rho)) throw RangeError("assemble_green: point outside the shell");
  const std::size_t nq = queries.size();
  std::vector<AssembledValue> out(nq);
  std::vector<detail::Accumulator> acc(nq);
  std::vector<ZonalSequence> zonal;
  for (const auto& qy : queries) zonal.emplace_back(shell.n, qy.cos_angle);
  std::vector<bool> done(nq, false);
  std::vector<LD> checkpoint(nq, 0), last(nq, 0);
  int next_check = opt.q_start;
  int q = 0;
  const unsigned jobs = std::max(1u, opt.jobs);
  while (q < opt.q_cap) {
    // evaluate one block of chunks in parallel
    const int block = opt.chunk * static_cast<int>(jobs);
    const int q_end = std::min(opt.q_cap, std::max(q + block, next_check));
    const int count = q_end - q;
    std::vector<LD> values(static_cast<std::size_t>(count) * nq, 0);
    std::vector<std::string> errors(jobs);
    auto work = [&](unsigned w) {
      try {
        for (int c = static_cast<int>(w) * opt.chunk; c < count; c += opt.chunk * static_cast<int>(jobs))
          for (int i = c; i < std::min(count, c + opt.chunk); ++i) {
            const ModeGreen g(shell, m, q + i);
            for (std::size_t k = 0; k < nq; ++k)
              if (!done[k]) values[static_cast<std::size_t>(i) * nq + k] = mode_value(g, queries[k]);
          }
      } catch (const std::exception& e) {
        errors[w] = e.what();
      }
    };
    if (jobs == 1) work(0);
    else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    }
    for (const auto& e : errors)
      if (!e.empty()) throw IllConditioned(e);
    for (int i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < nq; ++k) {
        const LD z = zonal[k].next();
        if (done[k]) continue;
        last[k] = values[static_cast<std::size_t>(i) * nq + k] * z;
        acc[k].add(last[k]);
      }
      ++q;
      if (q == next_check) {
        bool all = true;
        for (std::size_t k = 0; k < nq; ++k) {
          if (done[k]) continue;
          const LD v = acc[k].value();
          // an alternating non-decaying series can repeat at every checkpoint; the last term exposes it
          out[k] = {v, q, std::max(std::abs(v - checkpoint[k]), std::abs(last[k])), false};
          if (q > opt.q_start && out[k].tail_estimate <= opt.rel_tol * std::abs(v)) {
            out[k].converged = true;
            done[k] = true;
          }
          checkpoint[k] = v;
          all = all && done[k];
        }
        if (all) return out;
        next_check *= 2;
      }
    }
  }
  for (std::size_t k = 0; k < nq; ++k)
    if (!done[k]) out[k] = {acc[k].value(), q, std::max(std::abs(acc[k].value() - checkpoint[k]), std::abs(last[k])), false};
  return out;
}

inline AssembledValue assemble_green(const ShellDomain& shell, int m, const GreenQuery& qy,
                                     const AssemblyOptions& opt = {}) {
  return assemble_green(shell, m, std::vector<GreenQuery>{qy}, opt).front();
}

// Classical m = 1, n = 3 shell kernel, mode by mode (independent closed form).
inline LD classical_shell_mode(const ShellDomain& s, int q, LD r, LD rho) {
  const LD lo = std::min(r, rho), hi = std::max(r, rho);
  const LD u1 = std::pow(lo, q) - std::pow(s.r0, 2 * q + 1) * std::pow(lo, -q - 1);
  const LD u2 = std::pow(hi, -q - 1) - std::pow(s.r1, -2 * q - 1) * std::pow(hi, q);
  const LD ab = std::pow(s.r0 / s.r1, 2 * q + 1);
  return u1 * u2 / ((2 * q + 1) * (1 - ab));
}

// ---- decay fits -------------------------------------------------------------------

enum class Estimate { OffDiagonal, NearBoundary, MixedDerivative, LogLaw };

inline std::string to_string(Estimate e) {
  switch (e) {
    case Estimate::OffDiagonal: return "8.25";
    case Estimate::NearBoundary: return "8.43";
    case Estimate::MixedDerivative: return "8.5.1";
    case Estimate::LogLaw: return "8.7.1";
  }
  return "?";
}

inline Estimate parse_estimate(const std::string& s) {
  if (s == "8.25") return Estimate::OffDiagonal;
  if (s == "8.43") return Estimate::NearBoundary;
  if (s == "8.5.1") return Estimate::MixedDerivative;
  if (s == "8.7.1") return Estimate::LogLaw;
  throw ConfigError("unknown estimate '" + s + "'", 0, "estimate");
}

// Critical order: m - n/2 + 1/2 for odd n, m - n/2 for even n.
inline int critical_order(int m, int n) { return n % 2 == 1 ? m - (n - 1) / 2 : m - n / 2; }

struct DecaySample {
  LD x_r = 0, y_r = 0, cos_angle = 1;
  LD scale = 0;  // the varied quantity (|x - y|, d(y), or d)
  LD abscissa = 0;  // regression abscissa (log scale, or the log-law variable)
  LD value = 0;
  LD predicted_bound = 0;  // target bound with unit constant
  int modes = 0;
  bool converged = false;
};

struct DecayFit {
  Estimate estimate = Estimate::MixedDerivative;
  int m = 0, n = 0;
  ShellDomain shell;
  std::vector<DecaySample> samples;
  LD slope = 0, intercept = 0, r2 = 0;
  LD target = 0;
  LD tolerance = 0.05L;
  LD decades = 0;
  std::string criterion;
  bool pass = false;
};

struct LinearFit {
  LD slope = 0, intercept = 0, r2 = 0;
};

inline LinearFit least_squares(const std::vector<LD>& x, const std::vector<LD>& y) {
  const auto N = static_cast<LD>(x.size());
  LD sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const LD mx = sx / N, my = sy / N;
  LD sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1;
  return f;
}

struct SamplePlan {
  LD lo = 0;   // log10 of the smallest varied parameter
  LD hi = 0;   // log10 of the largest
  int per_decade = 12;
};

inline std::vector<LD> geometric(const SamplePlan& p) {
  std::vector<LD> v;
  const int count = static_cast<int>(std::lround((p.hi - p.lo) * p.per_decade)) + 1;
  for (int i = 0; i < count; ++i) v.push_back(std::pow(10.0L, p.lo + (p.hi - p.lo) * i / (count - 1)));
  return v;
}

// Default plans: one scale varies per fit.
inline SamplePlan default_plan(Estimate e) {
  switch (e) {
    case Estimate::MixedDerivative: return {-3.5L, -1.5L, 12};
    case Estimate::LogLaw: return {-3.0L, -1.0L, 12};
    case Estimate::OffDiagonal: return {-3.5L, -1.5L, 12};
    case Estimate::NearBoundary: return {-2.5L, -1.0L, 12};
  }
  return {};
}

inline LD distance(LD r, LD rho, LD c) { return std::sqrt(std::max<LD>(0, r * r + rho * rho - 2 * r * rho * c)); }

// Builds the sample geometry of an estimate, assembles the kernel and fits the exponent.
//   8.5.1: y at rho = sqrt(r0 r1), x at radius rho(1+s) and angle s; |d_r^l d_rho^l G| vs |x-y|, slope -1.
//   8.7.1: same geometry with s in the plan; |d_r^l d_rho^l G| regressed on log(1 + min d / |x-y|), R^2 > 0.99.
//   8.25:  x at sqrt(r0 r1), y at r0(1 + s) on the same ray; log|G| vs log d(y), slope >= l (|x-y| >= 25 d(y)).
//   8.43:  x at r0(1 + s), y at r0(1 + 3s/2) on the same ray; log|G| vs log d(x), slope 2m - n.
inline DecayFit fit_decay(const ShellDomain& shell, int m, Estimate est, const SamplePlan& plan,
                          const AssemblyOptions& opt = {}, LD tolerance = 0.05L) {
  shell.validate();
  const int n = shell.n;
  if (m < 1 || n > 2 * m + 1) throw RangeError("fit_decay: need 2 <= n <= 2m+1");
  const bool odd = n % 2 == 1;
  if ((est == Estimate::MixedDerivative || est == Estimate::OffDiagonal) && !odd)
    throw ParityError("estimate " + to_string(est) + " needs odd n");
  if (est == Estimate::LogLaw && odd) throw ParityError("estimate 8.7.1 needs even n");
  if (est == Estimate::NearBoundary && 2 * m < n) throw RangeError("estimate 8.43 needs 2m >= n");
  const int lam = critical_order(m, n);
  DecayFit fit;
  fit.estimate = est;
  fit.m = m;
  fit.n = n;
  fit.shell = shell;
  fit.tolerance = tolerance;
  const auto params = geometric(plan);
  if (params.size() < 8) throw InsufficientDecades("fit_decay: fewer than 8 samples");
  fit.decades = plan.hi - plan.lo;
  if (fit.decades < 1.5L) throw InsufficientDecades("fit_decay: the plan spans fewer than 1.5 decades");
  const LD mid = std::sqrt(shell.r0 * shell.r1);
  std::vector<GreenQuery> qs;
  for (LD s : params) {
    GreenQuery g;
    switch (est) {
      case Estimate::MixedDerivative:
      case Estimate::LogLaw:
        g = {mid * (1 + s), mid, std::cos(s), static_cast<unsigned>(lam), static_cast<unsigned>(lam)};
        break;
      case Estimate::OffDiagonal: g = {mid, shell.r0 * (1 + s), 1, 0, 0}; break;
      case Estimate::NearBoundary: g = {shell.r0 * (1 + s), shell.r0 * (1 + 1.5L * s), 1, 0, 0}; break;
    }
    qs.push_back(g);
  }
  const auto vals = assemble_green(shell, m, qs, opt);
  std::vector<LD> X, Y;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& g = qs[i];
    DecaySample smp;
    smp.x_r = g.r;
    smp.y_r = g.rho;
    smp.cos_angle = g.cos_angle;
    smp.value = vals[i].value;
    smp.modes = vals[i].modes;
    smp.converged = vals[i].converged;
    const LD dxy = distance(g.r, g.rho, g.cos_angle);
    const LD dmin = std::min(shell.distance(g.r), shell.distance(g.rho));
    switch (est) {
      case Estimate::MixedDerivative:
        smp.scale = dxy;
        smp.predicted_bound = 1 / dxy;
        X.push_back(std::log(dxy));
        Y.push_back(std::log(std::abs(smp.value)));
        break;
      case Estimate::LogLaw:
        smp.scale = dxy;
        smp.predicted_bound = std::log1p(dmin / dxy);
        X.push_back(smp.predicted_bound);
        Y.push_back(std::abs(smp.value));
        break;
      case Estimate::OffDiagonal: {
        const LD dy = shell.distance(g.rho);
        smp.scale = dy;
        smp.predicted_bound = std::pow(dy, lam) / std::pow(dxy, lam + n - 2 * m);
        X.push_back(std::log(dy));
        Y.push_back(std::log(std::abs(smp.value)));
        break;
      }
      case Estimate::NearBoundary:
        smp.scale = dmin;
        smp.predicted_bound = std::pow(dmin, 2 * m - n);
        X.push_back(std::log(dmin));
        Y.push_back(std::log(std::abs(smp.value)));
        break;
    }
    smp.abscissa = X.back();
    fit.samples.push_back(smp);
  }
  const auto lf = least_squares(X, Y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  bool converged = true;
  for (const auto& s : fit.samples) converged = converged && s.converged;
  switch (est) {
    case Estimate::MixedDerivative:
      fit.target = -1;
      fit.criterion = "|slope + 1| <= tolerance";
      fit.pass = std::abs(fit.slope - fit.target) <= fit.tolerance * std::abs(fit.target);
      break;
    case Estimate::LogLaw:
      fit.target = 0.99L;
      fit.criterion = "R^2 > 0.99 with positive coefficient";
      fit.pass = fit.r2 > fit.target && fit.slope > 0;
      break;
    case Estimate::OffDiagonal:
      fit.target = lam;
      fit.criterion = "slope >= lambda (1 - tolerance)";
      fit.pass = fit.slope >= fit.target * (1 - fit.tolerance);
      break;
    case Estimate::NearBoundary:
      fit.target = 2 * m - n;
      fit.criterion = "|slope - (2m - n)| <= tolerance max(1, 2m - n)";
      fit.pass = std::abs(fit.slope - fit.target) <= fit.tolerance * std::max<LD>(1, fit.target);
      break;
  }
  fit.pass = fit.pass && converged;
  return fit;
}

inline nlohmann::ordered_json to_json(const DecayFit& f, bool with_samples = true) {
  nlohmann::ordered_json j;
  j["estimate"] = to_string(f.estimate);
  j["m"] = f.m;
  j["n"] = f.n;
  j["shell"] = {{"r0", static_cast<double>(f.shell.r0)}, {"r1", static_cast<double>(f.shell.r1)}};
  j["slope"] = static_cast<double>(f.slope);
  j["intercept"] = static_cast<double>(f.intercept);
  j["r2"] = static_cast<double>(f.r2);
  j["target"] = static_cast<double>(f.target);
  j["criterion"] = f.criterion;
  j["decades"] = static_cast<double>(f.decades);
  int max_modes = 0;
  for (const auto& s : f.samples) max_modes = std::max(max_modes, s.modes);
  j["max_modes"] = max_modes;
  if (with_samples) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : f.samples)
      arr.push_back({{"x_r", static_cast<double>(s.x_r)},
                     {"y_r", static_cast<double>(s.y_r)},
                     {"cos_angle", static_cast<double>(s.cos_angle)},
                     {"value", static_cast<double>(s.value)},
                     {"predicted_bound", static_cast<double>(s.predicted_bound)},
                     {"abscissa", static_cast<double>(s.abscissa)},
                     {"modes", s.modes},
                     {"converged", s.converged}});
    j["samples"] = arr;
  }
  j["pass"] = f.pass;
  return j;
}

// ---- growth at the origin and Kelvin duality ---------------------------------------

// Exponent a_q with |w_q| ~ r^{a_q} as r -> 0 for sources away from the inner boundary:
// minus the largest of the m smallest characteristic roots.
inline int inner_growth_exponent(int m, int n, int q) {
  std::vector<long> roots;
  for (int j = 0; j < m; ++j) {
    roots.push_back(static_cast<long>(q) + n - 2 - 2 * j);
    roots.push_back(-static_cast<long>(q) - 2 * j);
  }
  std::sort(roots.begin(), roots.end());
  return static_cast<int>(-roots[static_cast<std::size_t>(m - 1)]);
}

struct GrowthFit {
  int q = 0;
  LD fitted = 0;  // slope of log(|w_q| r^{(n-1)/2}) against log r
  LD target = 0;  // a_q + (n-1)/2
  LD bound = 0;   // lambda + (n-1)/2, the growth every mode must at least have
  bool pass = false;
};

// Mode solutions on a shell with a tiny inner radius, source near the outer radius.
inline GrowthFit growth_fit(int m, int n, int q, LD inner_ratio = 1e-10L) {
  const ShellDomain shell{inner_ratio, 1, n};
  const ModeGreen g(shell, m, q);
  const LD tau = -std::log(0.5L);
  std::vector<LD> X, Y;
  for (LD e = -7; e <= -3 + 1e-9L; e += 0.25L) {
    const LD r = std::pow(10.0L, e);
    X.push_back(std::log(r));
    Y.push_back(std::log(std::abs(g(-std::log(r), tau))) + (n - 1) / 2.0L * std::log(r));
  }
  GrowthFit f;
  f.q = q;
  f.fitted = least_squares(X, Y).slope;
  f.target = inner_growth_exponent(m, n, q) + (n - 1) / 2.0L;
  f.bound = critical_order(m, n) + (n - 1) / 2.0L;
  f.pass = std::abs(f.fitted - f.target) <= 0.05L * std::abs(f.target) && f.fitted >= f.bound * (1 - 0.05L);
  return f;
}

struct KelvinCheck {
  LD max_rel_error = 0;  // w*(-t, -tau) against e^{(2m-n)(t+tau)} w(t, tau)
  LD inner_exponent = 0;  // fitted growth of w as r -> 0 on the original shell
  LD outer_exponent = 0;  // fitted decay of w* as R -> infinity on the inverted shell
  bool pass = false;
};

// Kelvin inversion x -> x/|x|^2 maps the shell to (1/r1, 1/r0) and t to -t.
inline KelvinCheck kelvin_check(int m, int n, int q, LD inner_ratio = 1e-10L) {
  const ShellDomain shell{inner_ratio, 1, n};
  const ShellDomain inv = shell.kelvin();
  const ModeGreen g(shell, m, q), gi(inv, m, q);
  KelvinCheck k;
  const LD tau = -std::log(0.5L);
  std::vector<LD> Xi, Yi, Xo, Yo;
  for (LD e = -7; e <= -3 + 1e-9L; e += 0.25L) {
    const LD r = std::pow(10.0L, e);
    const LD t = -std::log(r);
    const LD w = g(t, tau);
    const LD ws = gi(-t, -tau);
    const LD mapped = std::exp((2 * m - n) * (t + tau)) * w;
    k.max_rel_error = std::max(k.max_rel_error, std::abs(ws - mapped) / std::abs(mapped));
    Xi.push_back(std::log(r));
    Yi.push_back(std::log(std::abs(w)));
    Xo.push_back(std::log(1 / r));
    Yo.push_back(-std::log(std::abs(ws)));
  }
  k.inner_exponent = least_squares(Xi, Yi).slope;
  k.outer_exponent = least_squares(Xo, Yo).slope;
  // |w| ~ r^a near 0 becomes |w*| ~ R^{-(a + n - 2m)} near infinity
  k.pass = k.max_rel_error < 1e-8L && std::abs(k.outer_exponent - (k.inner_exponent + n - 2 * m)) < 1e-6L;
  return k;
}

}  // namespace polyreg
