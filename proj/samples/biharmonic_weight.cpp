// Fundamental solution of the biharmonic weight operator in R^4 and its positivity certificate.

#include <iostream>

#include "polyreg/fundsol.hpp"
#include "polyreg/positivity.hpp"

int main() {
  using namespace polyreg;
  const int m = 2, n = 4;
  const PiecewiseExpPoly h = h_even(m, n);
  std::cout << "h = " << describe(h) << "\n";
  const auto res = verify_fundamental(h, even_h_operator(m, n));
  std::cout << "residual zero: " << std::boolalpha << res.zero() << "\n";
  for (int p : admissible_p(m, n)) {
    const auto r = check_headline(m, n, p);
    std::cout << "p=" << p << " certified: " << r.pass() << " (" << to_string(r.certificate.tier) << ")\n";
  }
}
