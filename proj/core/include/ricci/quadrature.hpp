#pragma once

#include <vector>

namespace ricci {

struct GaussRule {
  std::vector<double> nodes;    // ascending on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

/// Same rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace ricci
