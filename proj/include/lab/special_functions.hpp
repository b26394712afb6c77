#pragma once

#include <string>
#include <vector>

// Gamma-family kernels and every closed-form constant used by the
// inequality suite, plus the scanners that certify the appendix
// monotonicity statements and the parallelogram-type inequality.

namespace lab {

struct ScanReport {
    std::string name;
    std::string grid;               // human-readable grid description
    double worst_violation = 0.0;   // positive means a violation of that size
    std::vector<double> worst_location;
    double tolerance = 0.0;
    bool pass = true;

    std::string to_json() const;
};

// Gamma function and its logarithm. Domain: x > 0.
double gamma_fn(double x);
double log_gamma(double x);

// Digamma / trigamma via recurrence shift to x >= 10 plus the Bernoulli
// asymptotic series. Domain: x > 0, relative error <= 1e-10.
double digamma(double x);
double trigamma(double x);

// Volume of the unit ball in R^k: pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);
double log_unit_ball_volume(int k);

// Sharp constant L_{p,n} = (p/n)((p-1)/e)^{p-1} (omega_n Gamma(n/q+1))^{-p/n},
// q = p/(p-1). Computed in log-space.
double sharp_lsi_constant(double p, int n);
double log_sharp_lsi_constant(double p, int n);

// Integral of e^{-alpha |x|^q} over R^k: alpha^{-k/q} omega_k Gamma(k/q + 1).
double gaussian_integral(double alpha, int k, double q);

// K_{m,n,q} = omega_m Gamma(m/q+1) / (omega_{m+n} Gamma((m+n)/q+1))
//             * (m^m n^n / (m+n)^{m+n})^{1/2 - 1/q}, and its m -> inf limit.
double k_sequence(int m, int n, double q);
double log_k_sequence(int m, int n, double q);
double k_limit(int n, double q);
double log_k_limit(int n, double q);

// A_{n,p} = (p^2/(2 pi e n))^{p/2}
// B_{n,p} = (1+n)^{((1+n)/n)(p/2-1)} ((p-1)/n)((p-1)/(pe))^{p-1} pi^{-p/2}
struct GeneralConstants {
    double A;
    double B;
    double log_A;
    double log_B;
};
GeneralConstants general_constants(int n, double p);

// Certifies L_{p,n} <= (p/n)((p-1)/e)^{p-1} K_{m,n,q}^{p/n} <= A_{n,p}
// for one (p, n, m) triple; violation is the largest positive gap in
// log-space.
ScanReport constant_chain_check(double p, int n, int m);

// Slack of (3-q)|v|^q + q|w|^{q-2}<v,w> + |w|^q - |v+w|^q; the middle term
// is defined as 0 when w = 0.
double parallelogram_check(double q, const std::vector<double>& v,
                           const std::vector<double>& w);

// Unique root of psi(x) + x psi'(x) = 0 on (0, 1/2), bisected to 1e-10.
double digamma_root();

// Scanners for the two monotonicity statements. Both certify that adjacent
// differences along x stay above -1e-10; the second works on the log of the
// ratio Gamma(rx)/Gamma(x), which overflows double at the far grid end.
ScanReport monotone_gamma_power_scan();   // x -> G((x+t)/2)/G((x+t)/q) * G(x/q)/G(x/2) * (x^x/(x+t)^{x+t})^{1/2-1/q}
ScanReport monotone_gamma_ratio_scan();   // x -> Gamma(rx)/Gamma(x)

// Random-draw certification of the parallelogram inequality:
// `draws` samples of q uniform in (1,2], dimension k in {1..8}, v,w Gaussian.
ScanReport parallelogram_scan(unsigned long long seed, int draws);

}  // namespace lab
