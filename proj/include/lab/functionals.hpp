#pragma once

#include <string>
#include <vector>

#include "lab/mesh.hpp"

// Signed deficits (right side minus left side) of the entropy inequalities,
// the divergence identity and its saw-tooth counterexample, and the discrete
// integration-by-parts residual.

namespace lab {

struct DeficitReport {
    std::string name;
    double p = 2.0;
    double alpha = 0.0;  // 0 when the inequality has no alpha parameter
    double truncation = 0.0;
    int resolution = 0;
    double left = 0.0;
    double right = 0.0;
    double deficit = 0.0;  // right - left
    double norm_residual = 0.0;
    std::string notes;

    static std::string csv_header();
    std::string csv_row() const;
};

// f / (int |f|^p dmu)^{1/p}. Throws on an identically-zero field.
ScalarField normalize(const ScalarField& f, double p,
                      Measure mu = Measure::volume, double alpha = 0.0);

// |int |f|^p dmu - 1|
double lp_mass_residual(const ScalarField& f, double p,
                        Measure mu = Measure::volume, double alpha = 0.0);

// int |f|^p log |f|^p dmu with 0 log 0 = 0. Requires unit p-mass
// (residual <= 1e-6), otherwise throws.
double entropy(const ScalarField& f, double p, Measure mu = Measure::volume,
               double alpha = 0.0);

double dirichlet_energy(const ScalarField& f, double p);  // int |grad f|^p dvol
double curvature_energy(const ScalarField& f, double p);  // int |H|^p |f|^p dvol

// Entropy vs. (n/2) log((2/(pi e n)) int(|grad f|^2 + |H|^2 f^2 / 4)).
DeficitReport deficit_main(const ScalarField& f);

// Entropy vs. -n + (n/2) log(alpha/pi) + (1/alpha) int(|grad f|^2 + |H|^2 f^2 / 4).
DeficitReport deficit_parametric(const ScalarField& f, double alpha);

// Gaussian-measure version: entropy of phi^2 under dgamma_alpha vs.
// (1/alpha) int |grad phi|^2 dgamma + (1/(4 alpha)) int phi^2 |H + 2 alpha xPerp|^2 dgamma.
DeficitReport deficit_gaussian(const ScalarField& phi, double alpha);

// L^p entropy vs. (n/p) log((p^2/(2 pi e n))^{p/2} int |grad f|^p) on
// submanifolds with analytic H == 0; throws otherwise.
DeficitReport deficit_lp_minimal(const ScalarField& f, double p);

// L^p entropy vs. (n/p) log(c1 A int |grad f|^p + c2 B int |H|^p |f|^p) with
// c1, c2 the ((2p-3)/(p-1))-codimension factors.
DeficitReport deficit_lp_general(const ScalarField& f, double p);

// int [2 f <grad f, xT> + f^2 (n + <H, xPerp>)] dvol; the integrated
// tangential divergence of f^2 xT, zero for decaying f or closed surfaces.
double divergence_residual(const ScalarField& f);

struct SawMoment {
    double alpha = 0.0;
    double partial_sum = 0.0;
    double last_term = 0.0;
    bool converged = false;  // last ratios certify a geometric tail
};

struct SawReport {
    int n = 0;
    double beta = 0.0;
    std::vector<int> k;
    std::vector<double> R;
    std::vector<double> flux;       // h^2(R_k) R_k^n, 1 by construction
    double sum_delta = 0.0;         // partial sum of l_k^2 R_k^{n-1} delta_k
    double sum_inv_delta = 0.0;     // partial sum of l_k^2 R_k^{n-1} / delta_k
    std::vector<SawMoment> moments; // alpha in {0, 0.5, 0.9, 1.0}
};

// Saw-tooth profile with R_k = 2^k, l_k = R_k^{-n/2}, delta_k = k^beta / R_k:
// unit flux at every tooth while the alpha = 1 moment series diverges.
SawReport saw_counterexample(int n, double beta, int k_max);

// -p int f^{p-1} <grad f, grad u> - int f^p (Lap u); converges to zero for
// smooth u. f must vanish on the boundary collar of truncated patches.
double integration_by_parts_residual(const ScalarField& f, const ScalarField& u,
                                     double p);

}  // namespace lab
