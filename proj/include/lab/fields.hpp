#pragma once

#include <string>
#include <vector>

#include "lab/mesh.hpp"

// Non-negative test functions evaluated through the ambient position of each
// vertex, so one definition works on every generator. The library covers the
// extremal profiles of the inequalities (Gaussians, the tilted exponential
// family) plus deliberately non-extremal fields.

namespace lab {

// f_alpha(x) = (alpha/pi)^{n/4} e^{-alpha |x - x0|^2 / 2}; x0 defaults to 0.
ScalarField gaussian_profile(const DiscreteSubmanifold& M, double alpha,
                             const std::vector<double>& x0 = {});

// (1 + c |x|^2) f_alpha(x), c >= 0.
ScalarField gaussian_poly(const DiscreteSubmanifold& M, double alpha, double c);

// Compactly supported spline bump (1 - (|x|/R)^2)^k for |x| < R, else 0;
// C^{k-1} across the support boundary with moderate derivatives, which keeps
// the gradient scheme accurate.
ScalarField bump(const DiscreteSubmanifold& M, double radius, int power = 3);

// (1 + eps sin(k x_0)) f_alpha(x); eps in [0, 1) keeps the field positive.
ScalarField perturbed_gaussian(const DiscreteSubmanifold& M, double alpha,
                               double eps, double k = 1.0);

// e^{alpha <x, x0> - alpha |x0|^2 / 2}, the equality family of the
// Gaussian-measure inequality.
ScalarField tilted_exponential(const DiscreteSubmanifold& M, double alpha,
                               const std::vector<double>& x0);

// e^{-lambda |x|^theta / theta}, theta > 0 (theta = p/(p-1) gives the
// L^p equality shape on flat charts).
ScalarField stretched_exponential(const DiscreteSubmanifold& M, double lambda,
                                  double theta);

struct NamedField {
    std::string name;
    ScalarField f;
};

// The six-field battery the scenario suite iterates over.
std::vector<NamedField> standard_test_fields(const DiscreteSubmanifold& M);

}  // namespace lab
