#pragma once

// Characteristic root sets of L(-d/dt, -p(p+n-2)) and their interval pairings.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/rational.hpp"
#include "polyreg/symbols.hpp"

namespace polyreg {

struct RootEntry {
  Rational value;
  int multiplicity = 1;
  friend bool operator==(const RootEntry&, const RootEntry&) = default;
};

struct RootBlock {
  std::string name;
  std::vector<RootEntry> entries;  // ascending
};

class RootPairing {
 public:
  RootPairing() = default;
  RootPairing(std::vector<Rational> roots, std::vector<RootBlock> blocks)
      : blocks_(std::move(blocks)) {
    for (const auto& r : roots) (r < 0 ? negatives_ : nonnegatives_).push_back(r);
    std::sort(negatives_.begin(), negatives_.end(), std::greater<>());
    std::sort(nonnegatives_.begin(), nonnegatives_.end());
  }

  // b_0 >= b_1 >= ... (descending) and a_0 <= a_1 <= ... (ascending), repeated by multiplicity.
  [[nodiscard]] const std::vector<Rational>& negatives() const { return negatives_; }
  [[nodiscard]] const std::vector<Rational>& nonnegatives() const { return nonnegatives_; }
  [[nodiscard]] const std::vector<RootBlock>& blocks() const { return blocks_; }

  [[nodiscard]] std::vector<Rational> multiset() const {
    std::vector<Rational> all = negatives_;
    all.insert(all.end(), nonnegatives_.begin(), nonnegatives_.end());
    std::sort(all.begin(), all.end());
    return all;
  }

  // Intervals [b_i, a_i]; requires equally many negatives and nonnegatives.
  [[nodiscard]] std::vector<std::pair<Rational, Rational>> pairs() const {
    if (negatives_.size() != nonnegatives_.size())
      throw PairCountMismatch("root set has " + std::to_string(negatives_.size()) + " negative and " +
                              std::to_string(nonnegatives_.size()) + " nonnegative roots");
    std::vector<std::pair<Rational, Rational>> out;
    for (std::size_t i = 0; i < negatives_.size(); ++i) out.emplace_back(negatives_[i], nonnegatives_[i]);
    return out;
  }

  // Removes the double zero root (the factor d^2); the original is left untouched.
  [[nodiscard]] RootPairing stripped() const {
    auto all = multiset();
    for (int k = 0; k < 2; ++k) {
      auto it = std::find(all.begin(), all.end(), Rational(0));
      if (it == all.end()) throw RangeError("stripped(): no double zero root present");
      all.erase(it);
    }
    return RootPairing(all, {});
  }

  [[nodiscard]] int multiplicity(const Rational& x) const {
    auto all = multiset();
    return static_cast<int>(std::count(all.begin(), all.end(), x));
  }

 private:
  std::vector<Rational> negatives_;
  std::vector<Rational> nonnegatives_;
  std::vector<RootBlock> blocks_;
};

namespace detail {

inline std::vector<RootEntry> collapse(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  std::vector<RootEntry> out;
  for (const auto& x : v) {
    if (!out.empty() && out.back().value == x) ++out.back().multiplicity;
    else out.push_back({x, 1});
  }
  return out;
}

}  // namespace detail

// k = m - (n-1)/2; roots {c_j + p} u {-c_j - 1 - p}, c_j = 2j - k.
inline RootPairing roots_odd(int m, int n, int p) {
  require_odd(n, "roots_odd");
  require_dims(m, n, "roots_odd");
  const int k = m - (n - 1) / 2;
  if (p < 0 || p > k)
    throw RangeError("roots_odd: p=" + std::to_string(p) + " outside [0," + std::to_string(k) + "]");
  std::vector<Rational> roots;
  for (int j = 0; j < m; ++j) {
    const int c = 2 * j - k;
    roots.emplace_back(c + p);
    roots.emplace_back(-c - 1 - p);
  }
  // lateral negative: -2(m-1)+k-p-1, ..., -k+p-3 (step 2); centre: [-k+p-1, k-p]; lateral positive
  std::vector<Rational> lneg, centre, lpos;
  for (const auto& r : roots) {
    if (r < Rational(-k + p - 1)) lneg.push_back(r);
    else if (r > Rational(k - p)) lpos.push_back(r);
    else centre.push_back(r);
  }
  return RootPairing(roots, {{"lateral_negative", detail::collapse(lneg)},
                             {"center", detail::collapse(centre)},
                             {"lateral_positive", detail::collapse(lpos)}});
}

// Roots +-B_j(p); p must share the parity of m - n/2.
inline RootPairing roots_even(int m, int n, int p) {
  require_even(n, "roots_even");
  if (m < 1 || n < 2 || n > 2 * m) throw RangeError("roots_even: need 2 <= n <= 2m");
  const int k = m - n / 2;
  if (p < 0 || p > k)
    throw RangeError("roots_even: p=" + std::to_string(p) + " outside [0," + std::to_string(k) + "]");
  if ((p - k) % 2 != 0) throw ParityError("roots_even: p must have the parity of m - n/2");
  std::vector<Rational> roots;
  for (int j = 0; j < m; ++j) {
    const Rational b(B_j(m, n, j, p));
    roots.push_back(-b);
    roots.push_back(b);
  }
  std::vector<Rational> left, doubles, right;
  for (const auto& e : detail::collapse(roots)) {
    for (int c = 0; c < e.multiplicity; ++c) {
      if (e.multiplicity == 2) doubles.push_back(e.value);
      else if (e.value < 0) left.push_back(e.value);
      else right.push_back(e.value);
    }
  }
  return RootPairing(roots, {{"single_negative", detail::collapse(left)},
                             {"double", detail::collapse(doubles)},
                             {"single_positive", detail::collapse(right)}});
}

// For m - n/2 odd and odd p, the odd-branch set at (n, p) is the even-branch set at (n+2, p-1).
inline bool even_branch_identification(int m, int n, int p) {
  if ((m - n / 2) % 2 == 0) throw ParityError("identification needs m - n/2 odd");
  return roots_even(m, n, p).multiset() == roots_even(m, n + 2, p - 1).multiset();
}

// Every inner interval [b_i, a_i] lies inside the outer [d_i, c_i].
inline bool interlace(const RootPairing& inner, const RootPairing& outer) {
  const auto pi = inner.pairs();
  const auto po = outer.pairs();
  if (pi.size() != po.size())
    throw PairCountMismatch("interlace: " + std::to_string(pi.size()) + " vs " + std::to_string(po.size()) +
                            " pairs");
  for (std::size_t i = 0; i < pi.size(); ++i)
    if (pi[i].first < po[i].first || pi[i].second > po[i].second) return false;
  return true;
}

inline nlohmann::ordered_json to_json(const RootPairing& r) {
  nlohmann::ordered_json j;
  auto list = [](const std::vector<Rational>& v) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
  };
  j["negatives"] = list(r.negatives());
  j["nonnegatives"] = list(r.nonnegatives());
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : r.blocks()) {
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : b.entries) entries.push_back({{"value", e.value.get_str()}, {"multiplicity", e.multiplicity}});
    blocks.push_back({{"name", b.name}, {"entries", entries}});
  }
  j["blocks"] = blocks;
  if (r.negatives().size() == r.nonnegatives().size()) {
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& [b, a] : r.pairs()) pairs.push_back({b.get_str(), a.get_str()});
    j["pairs"] = pairs;
  }
  return j;
}

}  // namespace polyreg
