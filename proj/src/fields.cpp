#include "lab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace lab {

namespace {

double dist2_to(const DiscreteSubmanifold& M, int v, const std::vector<double>& x0) {
    double s = 0.0;
    for (int c = 0; c < M.N; ++c) {
        const double d = M.p(v)[c] - (c < static_cast<int>(x0.size()) ? x0[c] : 0.0);
        s += d * d;
    }
    return s;
}

ScalarField blank(const DiscreteSubmanifold& M) {
    ScalarField f;
    f.M = &M;
    f.v.assign(M.num_vertices(), 0.0);
    return f;
}

}  // namespace

ScalarField gaussian_profile(const DiscreteSubmanifold& M, double alpha,
                             const std::vector<double>& x0) {
    if (alpha <= 0.0) throw std::domain_error("gaussian_profile: alpha must be positive");
    ScalarField f = blank(M);
    const double amp = std::pow(alpha / M_PI, 0.25 * M.n);
    for (int v = 0; v < M.num_vertices(); ++v)
        f.v[v] = amp * std::exp(-0.5 * alpha * dist2_to(M, v, x0));
    return f;
}

ScalarField gaussian_poly(const DiscreteSubmanifold& M, double alpha, double c) {
    if (c < 0.0) throw std::domain_error("gaussian_poly: c must be non-negative");
    ScalarField f = gaussian_profile(M, alpha);
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r2 = M.norm_x(v) * M.norm_x(v);
        f.v[v] *= 1.0 + c * r2;
    }
    return f;
}

ScalarField bump(const DiscreteSubmanifold& M, double radius, int power) {
    if (radius <= 0.0 || power < 1)
        throw std::domain_error("bump: radius and power must be positive");
    ScalarField f = blank(M);
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r2 = M.norm_x(v) * M.norm_x(v);
        const double gap = 1.0 - r2 / (radius * radius);
        if (gap > 0.0) f.v[v] = std::pow(gap, power);
    }
    return f;
}

ScalarField perturbed_gaussian(const DiscreteSubmanifold& M, double alpha,
                               double eps, double k) {
    if (eps < 0.0 || eps >= 1.0)
        throw std::domain_error("perturbed_gaussian: eps must be in [0, 1)");
    ScalarField f = gaussian_profile(M, alpha);
    for (int v = 0; v < M.num_vertices(); ++v)
        f.v[v] *= 1.0 + eps * std::sin(k * M.p(v)[0]);
    return f;
}

ScalarField tilted_exponential(const DiscreteSubmanifold& M, double alpha,
                               const std::vector<double>& x0) {
    if (alpha <= 0.0)
        throw std::domain_error("tilted_exponential: alpha must be positive");
    ScalarField f = blank(M);
    double n0 = 0.0;
    for (double c : x0) n0 += c * c;
    for (int v = 0; v < M.num_vertices(); ++v) {
        double dot = 0.0;
        for (int c = 0; c < M.N && c < static_cast<int>(x0.size()); ++c)
            dot += M.p(v)[c] * x0[c];
        f.v[v] = std::exp(alpha * dot - 0.5 * alpha * n0);
    }
    return f;
}

ScalarField stretched_exponential(const DiscreteSubmanifold& M, double lambda,
                                  double theta) {
    if (lambda <= 0.0 || theta <= 0.0)
        throw std::domain_error("stretched_exponential: lambda, theta must be positive");
    ScalarField f = blank(M);
    for (int v = 0; v < M.num_vertices(); ++v)
        f.v[v] = std::exp(-lambda * std::pow(M.norm_x(v), theta) / theta);
    return f;
}

std::vector<NamedField> standard_test_fields(const DiscreteSubmanifold& M) {
    std::vector<NamedField> out;
    out.push_back({"gaussian_a1", gaussian_profile(M, 1.0)});
    std::vector<double> x0(M.N, 0.0);
    x0[0] = 0.8;
    out.push_back({"gaussian_a05_off", gaussian_profile(M, 0.5, x0)});
    out.push_back({"gaussian_poly", gaussian_poly(M, 0.6, 0.3)});
    out.push_back({"bump_r3", bump(M, 3.0)});
    out.push_back({"perturbed_gaussian", perturbed_gaussian(M, 1.0, 0.1, 2.0)});
    out.push_back({"stretched_exp", stretched_exponential(M, 1.0, 1.5)});
    return out;
}

}  // namespace lab
