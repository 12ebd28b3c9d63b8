#pragma once

#include <array>
#include <string>
#include <vector>

#include "entbench/qstate.hpp"

// Two and three independently prepared pairs. Three-pair operators live on
// (A1 B1)(A2 B2)(A3 B3) and are capped at d = 3.

namespace entbench {

struct MultiSourceDefects {
  int d = 2;
  std::vector<double> p;
  std::vector<double> t;  // optional rescaled rates

  void validate() const;
};

// Flag: p1 p2/(d^2-1) <= (1-p1) p2 and <= p1 (1-p2).
FlaggedValue beta_two_source(int d, double p1, double p2);
double beta_two_source_local(int d, double p1, double p2);

// Coefficients of products of P_i / P_i^c indexed by bits (j k l), bit set
// meaning the complement on that pair: index 4j + 2k + l.
using ProductCoefficients = std::array<double, 8>;

ProductCoefficients t3_coefficients(int d);
ProductCoefficients app_t_coeffs(double beta1, double beta2, double beta3, double gamma, int d);
// sum_{jkl} c_{jkl} P^{(j)} (x) P^{(k)} (x) P^{(l)} on three pairs.
Operator product_combination(int d, const ProductCoefficients& c);
TestOperator t3_inv(int d);

// GHZ on A1 A2 A3 times its conjugate on B1 B2 B3, in pair-major order.
Ket ghz_seed(int d);

// Closed form from the three-pair operator; flag: all p_i <= (d-1)/d.
FlaggedValue beta_three_source(int d, double p1, double p2, double p3);
// The three-source formula with the triple-term denominator (d+1)^2 (d-1).
double beta_three_source_printed(int d, double p1, double p2, double p3);
std::string three_source_discrepancy_note(int d);

double poisson_two_source(double delta, double alpha, double t1p, double t2p);

}  // namespace entbench
