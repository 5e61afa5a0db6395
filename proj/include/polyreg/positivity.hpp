#pragma once

// Positivity preservation along chains of second-order factors.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/exppoly.hpp"
#include "polyreg/fundsol.hpp"
#include "polyreg/rootsets.hpp"
#include "polyreg/symbols.hpp"

namespace polyreg {

struct SecondOrderFactors {
  Rational a, b, c, d;  // b < 0 <= a, d < 0 <= c

  [[nodiscard]] bool contained() const { return d <= b && a <= c; }
  void validate() const {
    if (!(b < 0 && a >= 0 && d < 0 && c >= 0))
      throw RangeError("second-order factors need b < 0 <= a and d < 0 <= c");
  }
};

enum class CertTier { Exact, Grid, None };

inline std::string to_string(CertTier t) {
  switch (t) {
    case CertTier::Exact: return "EXACT";
    case CertTier::Grid: return "GRID";
    case CertTier::None: return "NONE";
  }
  return "NONE";
}

struct Certificate {
  CertTier tier = CertTier::None;
  bool certified = false;
  bool atoms_ok = true;
  long double grid_min = 0;
  int tail_plus = 0;
  int tail_minus = 0;
};

struct PositivityOptions {
  long double window = 60;
  long double step = 1.0L / 128;
  long double tolerance = 1e-12L;
};

// Nonnegativity of a distribution: order-0 atoms of nonnegative weight plus a nonnegative smooth part.
inline Certificate certify_nonnegative(const PiecewiseExpPoly& f, const PositivityOptions& opt = {}) {
  Certificate c;
  for (const auto& a : f.atoms()) c.atoms_ok = c.atoms_ok && a.order == 0 && a.weight > 0;
  bool termwise = true;
  for (const auto& t : f.pos()) termwise = termwise && t.coeff > 0;
  for (const auto& t : f.neg()) termwise = termwise && (t.power % 2 == 0 ? t.coeff > 0 : t.coeff < 0);
  const auto lb = lower_bound(f, opt.window, opt.step);
  c.grid_min = f.pos().empty() && f.neg().empty() ? 0 : lb.min;
  c.tail_plus = lb.tail_plus;
  c.tail_minus = lb.tail_minus;
  if (!c.atoms_ok) return c;
  if (termwise) {
    c.tier = CertTier::Exact;
    c.certified = true;
    return c;
  }
  if (c.grid_min >= -opt.tolerance && c.tail_plus >= 0 && c.tail_minus >= 0) {
    c.tier = CertTier::Grid;
    c.certified = true;
  }
  return c;
}

// h_0 = kappa e^{a t} (t<0), kappa e^{b t} (t>0), kappa = 1/(b-a): (d-a)(d-b) h_0 = delta.
inline PiecewiseExpPoly step_fundamental(const Rational& a, const Rational& b) {
  const Rational kappa = Rational(1) / (b - a);
  return {{{kappa, a, 0}}, {{kappa, b, 0}}};
}

struct StepResult {
  PiecewiseExpPoly h;
  PiecewiseExpPoly g;
  Certificate certificate;
  bool contained = false;
  bool decays = false;  // g decays on both sides, so it can feed another step
};

inline StepResult step_second_order(const PiecewiseExpPoly& f, const SecondOrderFactors& fac,
                                    const PositivityOptions& opt = {}) {
  fac.validate();
  const bool f_ok = decays_both_sides(f);
  if (!f_ok) throw DecayContractViolation("step input must decay exponentially on both sides");
  StepResult r;
  r.h = convolve(f, step_fundamental(fac.a, fac.b));
  DiffOp q{1, {fac.c, fac.d}};
  r.g = apply_op(q, r.h);
  r.contained = fac.contained();
  // with exactly one of a, c zero the output keeps a constant tail; the next step's input check rejects it
  r.decays = (fac.a == 0) == (fac.c == 0) && decays_both_sides(r.g);
  r.certificate = certify_nonnegative(r.g, opt);
  return r;
}

struct ChainStage {
  SecondOrderFactors factors;
  PiecewiseExpPoly f_in;
  PiecewiseExpPoly h;
  PiecewiseExpPoly g;
  Certificate certificate;
  bool contained = false;
};

struct ChainTrace {
  int m = 0, n = 0, p = 0;
  int p0 = 0;
  std::vector<ChainStage> stages;
  PiecewiseExpPoly final_f;
  [[nodiscard]] bool certified() const {
    for (const auto& s : stages)
      if (!s.certificate.certified) return false;
    return true;
  }
};

// Runs f_{i+1} = (d - c_i)(d - d_i)(f_i * h_0(a_i, b_i)) over the paired roots of P (inner) and Q (outer).
inline ChainTrace run_chain(const RootPairing& P, const RootPairing& Q, const PositivityOptions& opt = {}) {
  const auto pp = P.pairs();
  const auto qq = Q.pairs();
  if (pp.size() != qq.size()) throw PairCountMismatch("chain: P and Q have different pair counts");
  ChainTrace tr;
  PiecewiseExpPoly f = PiecewiseExpPoly::delta();
  for (std::size_t i = 0; i < pp.size(); ++i) {
    SecondOrderFactors fac{pp[i].second, pp[i].first, qq[i].second, qq[i].first};
    auto st = step_second_order(f, fac, opt);
    tr.stages.push_back({fac, f, st.h, st.g, st.certificate, st.contained});
    f = st.g;
  }
  tr.final_f = f;
  return tr;
}

struct Branch {
  bool odd = true;
  int p0 = 0;
  int k = 0;  // largest admissible p
};

inline Branch branch_of(int m, int n) {
  require_dims(m, n, "positivity");
  Branch b;
  b.odd = n % 2 == 1;
  if (b.odd) {
    b.k = m - (n - 1) / 2;
    b.p0 = 0;
  } else {
    if (n > 2 * m) throw RangeError("even branch needs n <= 2m");
    b.k = m - n / 2;
    b.p0 = b.k % 2 == 0 ? 0 : 1;
  }
  return b;
}

inline std::vector<int> admissible_p(int m, int n) {
  const auto b = branch_of(m, n);
  std::vector<int> out;
  for (int p = b.p0; p <= b.k; p += b.odd ? 1 : 2) out.push_back(p);
  return out;
}

inline void validate_p(int m, int n, int p) {
  const auto b = branch_of(m, n);
  if (p < b.p0 || p > b.k) throw RangeError("p=" + std::to_string(p) + " outside the admissible range");
  if (!b.odd && (p - b.p0) % 2 != 0) throw ParityError("p must have the parity of m - n/2");
}

inline ChainTrace chain(int m, int n, int p, const PositivityOptions& opt = {}) {
  validate_p(m, n, p);
  const auto b = branch_of(m, n);
  ChainTrace tr = b.odd ? run_chain(roots_odd(m, n, 0), roots_odd(m, n, p), opt)
                        : run_chain(roots_even(m, n, b.p0).stripped(), roots_even(m, n, p).stripped(), opt);
  tr.m = m;
  tr.n = n;
  tr.p = p;
  tr.p0 = b.p0;
  return tr;
}

// The checking operator L(-d/dt, -p(p+n-2)) of the branch.
inline DiffOp headline_operator(int m, int n, int p) {
  return n % 2 == 1 ? odd_symbol(m, n, p) : even_symbol({m, n, p});
}

inline PiecewiseExpPoly headline_h(int m, int n) { return n % 2 == 1 ? h_odd(m, n) : h_even(m, n); }

struct HeadlineReport {
  int m = 0, n = 0, p = 0;
  PiecewiseExpPoly result;
  Certificate certificate;
  bool chain_certified = false;
  bool chain_matches = false;
  bool interlaced = false;
  [[nodiscard]] bool pass() const { return certificate.certified && chain_matches && chain_certified; }
};

inline HeadlineReport check_headline(int m, int n, int p, const PositivityOptions& opt = {}) {
  validate_p(m, n, p);
  const auto b = branch_of(m, n);
  HeadlineReport r;
  r.m = m;
  r.n = n;
  r.p = p;
  const DiffOp D = headline_operator(m, n, p);
  const PiecewiseExpPoly h = headline_h(m, n);
  if (!b.odd && !D.has_root(Rational(0)))
    throw RangeError("even checking operator does not annihilate constants");
  r.result = apply_op(D, h);
  r.certificate = certify_nonnegative(r.result, opt);
  const auto tr = chain(m, n, p, opt);
  r.chain_certified = tr.certified();
  r.chain_matches = tr.final_f == r.result;
  r.interlaced = b.odd ? interlace(roots_odd(m, n, 0), roots_odd(m, n, p))
                       : interlace(roots_even(m, n, b.p0).stripped(), roots_even(m, n, p).stripped());
  return r;
}

// Chain with the roles of P and Q exchanged: interlacing fails whenever p != p0.
inline ChainTrace negative_control(int m, int n, int p, const PositivityOptions& opt = {}) {
  validate_p(m, n, p);
  const auto b = branch_of(m, n);
  ChainTrace tr = b.odd ? run_chain(roots_odd(m, n, p), roots_odd(m, n, 0), opt)
                        : run_chain(roots_even(m, n, p).stripped(), roots_even(m, n, b.p0).stripped(), opt);
  tr.m = m;
  tr.n = n;
  tr.p = p;
  tr.p0 = b.p0;
  return tr;
}

inline nlohmann::ordered_json to_json(const Certificate& c) {
  return {{"tier", to_string(c.tier)},
          {"certified", c.certified},
          {"atoms_ok", c.atoms_ok},
          {"grid_min", static_cast<double>(c.grid_min)},
          {"tail_plus", c.tail_plus},
          {"tail_minus", c.tail_minus}};
}

inline nlohmann::ordered_json to_json(const ChainTrace& tr, bool with_distributions = false) {
  nlohmann::ordered_json j;
  j["m"] = tr.m;
  j["n"] = tr.n;
  j["p"] = tr.p;
  j["p0"] = tr.p0;
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : tr.stages) {
    nlohmann::ordered_json st;
    st["factors"] = {s.factors.a.get_str(), s.factors.b.get_str(), s.factors.c.get_str(), s.factors.d.get_str()};
    st["contained"] = s.contained;
    st["certificate"] = to_json(s.certificate);
    if (with_distributions) st["g"] = to_json(s.g);
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["certified"] = tr.certified();
  if (with_distributions) j["final"] = to_json(tr.final_f);
  return j;
}

inline nlohmann::ordered_json to_json(const HeadlineReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["n"] = r.n;
  j["p"] = r.p;
  auto atoms = nlohmann::ordered_json::array();
  for (const auto& a : r.result.atoms()) atoms.push_back({{"order", a.order}, {"weight", a.weight.get_str()}});
  j["atoms"] = atoms;
  j["certificate"] = to_json(r.certificate);
  j["chain_certified"] = r.chain_certified;
  j["chain_matches_direct"] = r.chain_matches;
  j["interlaced"] = r.interlaced;
  j["pass"] = r.pass();
  return j;
}

}  // namespace polyreg
