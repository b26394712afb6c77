#pragma once

#include <string>
#include <vector>

#include "lab/mesh.hpp"

// Inf-convolution semigroup Q_t u = min_y (u(y) + d(x,y)^2 / (2t)) on discrete
// submanifolds, the Hamilton-Jacobi residual, and the two hypercontractivity
// reports with their sharpness probes. All exponential norms are evaluated in
// log-sum-exp form.

namespace lab {

enum class DistancePolicy {
    automatic,      // analytic on flat charts, graph otherwise
    graph,          // two-ring shortest paths per source, pruned by the
                    // current upper envelope
    analytic_flat,  // exact Euclidean distance, separable per-axis transform
};

struct HopfLaxTable {
    const DiscreteSubmanifold* M = nullptr;
    std::vector<double> times;    // times[0] == 0
    std::vector<ScalarField> q;   // q[i] holds Q_{times[i]} u
    ScalarField u;
    DistancePolicy policy = DistancePolicy::automatic;
    bool ill_posed = false;       // minimizers ran into the boundary collar
};

// times must start at 0 and increase strictly; u must be finite everywhere.
HopfLaxTable hopf_lax(const DiscreteSubmanifold& M, const ScalarField& u,
                      const std::vector<double>& times,
                      DistancePolicy policy = DistancePolicy::automatic);

// Forward-difference residual (Q_{t+dt} - Q_t)/dt + |grad Q_t|^2 / 2 for each
// interior time step; one field per step. Zero for smooth solutions.
std::vector<ScalarField> hamilton_jacobi_residual(const HopfLaxTable& table);

// Margin check for the concave-quadratic profile u = C - beta |x - x0|^2:
// beta must stay below 0.95 / (2t) or the inf-convolution degenerates.
bool quadratic_well_posed(double beta, double t);

struct HypercontractivityReport {
    std::string kind;  // "euclidean" or "gaussian"
    double a = 0.0;
    double b = 0.0;    // euclidean only
    std::vector<double> t;
    std::vector<double> q;        // integrability exponent at each time
    std::vector<double> F;        // ||e^{Q_t u}||_{L^q}
    std::vector<double> bound;
    std::vector<double> ratio;    // F / bound
    std::vector<char> monotone;   // per step: F did not increase
    double equality_profile_distance = 0.0;  // rms distance of u to the
                                             // extremal family
    bool ill_posed = false;

    std::string csv() const;          // t,q_t,F,bound,ratio,monotone_flag rows
    std::string json_summary() const;
};

// ||e^{Q_t u}||_{L^b(dvol)} against the volume-measure bound
// ||e^u||_{L^a} ((b-a)/(2 pi t))^{(n/2)(b-a)/(ab)} (a/b)^{(n/2)(a+b)/(ab)}
//   e^{t (supH^2/6)(a^2+ab+b^2)/(a^2 b^2)},
// with supH the analytic value carried by the generator.
HypercontractivityReport euclidean_hyper_report(const DiscreteSubmanifold& M,
                                                const ScalarField& u, double a,
                                                double b, double t);

// F(t) = ||e^{Q_t u}||_{L^{a + t/2}(dgamma_{1/4})} on generated shrinkers;
// flags non-monotone steps. u must pass the growth check
// |u| <= C1 + C2 |x|^theta with theta < 2 (theta = 2 allowed while
// (a + t/2) C2 < 1/4), otherwise throws.
HypercontractivityReport gaussian_hyper_report(const DiscreteSubmanifold& M,
                                               const ScalarField& u, double a,
                                               const std::vector<double>& times);

struct SharpnessProbeResult {
    bool found = false;
    double trial = 0.0;
    double t = 0.0;      // time at which the witness violates the trial bound
    double ratio = 0.0;  // worst left/bound ratio observed
    std::string notes;
};

// kind "euclidean_2pi": tests whether the 2 pi in the volume bound survives
// being replaced by `trial`; a witness appears when trial > 2 pi.
// kind "gaussian_factor2": tests the exponent growth rate a + t/trial under
// dgamma_{1/4}; a witness appears when trial < 2.
SharpnessProbeResult sharpness_probe(const std::string& kind, double trial);

}  // namespace lab
