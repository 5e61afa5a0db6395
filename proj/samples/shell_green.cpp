// Biharmonic Green function of the shell 1 < |x| < 4 in R^3, summed over spherical harmonics.

#include <cstdio>
#include <vector>

#include "polyreg/modalgreen.hpp"

int main() {
  using namespace polyreg;
  const ShellDomain shell{1, 4, 3};
  std::vector<GreenQuery> qs;
  for (long double r : {1.25L, 1.5L, 2.0L, 3.0L, 3.75L}) qs.push_back({r, 2.0L, 0.8L, 0, 0});
  const auto vals = assemble_green(shell, 2, qs);
  std::printf("%8s %8s %22s %8s\n", "|x|", "|y|", "G(x,y)", "modes");
  for (std::size_t i = 0; i < qs.size(); ++i)
    std::printf("%8.3Lf %8.3Lf %22.15Le %8d\n", qs[i].r, qs[i].rho, vals[i].value, vals[i].modes);
}
