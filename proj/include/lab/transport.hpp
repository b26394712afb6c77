#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lab/mesh.hpp"

namespace lab {

enum class CostConvention { quadratic, scalar_product };

// Ambient sample measure: points on a tensor grid (or anywhere), positive
// masses summing to one.  trim_radius records the truncation used when the
// measure was built from a trimmed Gaussian.
struct TargetMeasure {
    int N = 0;
    std::vector<double> points;  // count x N
    std::vector<double> mass;
    double trim_radius = 0.0;

    int count() const { return static_cast<int>(mass.size()); }
    const double* p(int j) const { return &points[static_cast<size_t>(j) * N]; }
};

// Gaussian weights (alpha/pi)^{N/2} exp(-alpha |y|^2) on a tensor grid over
// [-radius, radius]^N, trimmed to |y| <= radius and renormalized to 1.
TargetMeasure make_gaussian_target(int N, int per_axis, double radius,
                                   double alpha);

struct TransportInstance {
    const DiscreteSubmanifold* M = nullptr;
    std::vector<double> source_mass;
    TargetMeasure target;
    CostConvention cost = CostConvention::quadratic;
};

struct TransportPlan {
    struct Entry {
        int i = 0;
        int j = 0;
        double w = 0.0;
    };
    std::vector<Entry> support;
    double cost = 0.0;
    double duality_gap = 0.0;
    CostConvention convention = CostConvention::quadratic;
    // Dual potentials at source vertices and target points for the stated
    // convention; psi is the source-side potential.
    std::vector<double> psi;
    std::vector<double> psi_target;
};

// Exact optimal coupling by successive shortest augmenting paths on the
// bipartite flow network.  The two cost conventions differ by per-row and
// per-column constants, so the solved plan is certified optimal under both
// via shifted dual potentials; a certification failure throws.  The
// returned plan carries the duals for instance.cost.
// Throws std::invalid_argument for infeasible masses and std::length_error
// when #source * #target exceeds 4e6 entries.
TransportPlan solve_exact(const TransportInstance& inst);

struct CycleScanReport {
    int cycles_checked = 0;
    double worst_sum = 0.0;
    bool pass = true;
    std::vector<int> witness;  // support indices of the worst cycle
};

// Samples cycles of length <= cycle_length within the plan support and
// checks sum_i <y_i, x_i - x_{i+1}> >= -1e-9.
CycleScanReport cyclical_monotonicity_check(const TransportInstance& inst,
                                            const TransportPlan& plan,
                                            int num_cycles, int cycle_length,
                                            std::uint64_t seed);

struct StructureReport {
    double max_pythagoras_err = 0.0;
    // Discrete curl of the tangential barycentric map; only meaningful on
    // flat charts with n == 2.
    double curl_estimate = 0.0;
    bool curl_checked = false;
    // For n == 1: the first tangential component of the barycentric map is
    // non-decreasing along the chart up to this tolerance.
    double monotone_violation = 0.0;
    bool monotone_checked = false;
};

StructureReport structure_check(const TransportInstance& inst,
                                const TransportPlan& plan);

struct BalanceReport {
    double max_source_imbalance = 0.0;
    double max_target_imbalance = 0.0;
    // Plan mass binned by the normal coordinate of the target point versus
    // the target measure's own normal marginal, on flat charts.
    double max_fiber_mismatch = 0.0;
    bool fiber_checked = false;
};

BalanceReport monge_ampere_balance(const TransportInstance& inst,
                                   const TransportPlan& plan, int bins);

// det S <= (tr S / n)^n for random symmetric non-negative-definite matrices.
// Returns the worst slack (tr S / n)^n - det S, never below -1e-12 times the
// scale of the bound for genuine draws.
double det_trace_scan(int n, int draws, std::uint64_t seed);

std::string plan_csv(const TransportPlan& plan);
std::string plan_json_header(const TransportInstance& inst,
                             const TransportPlan& plan);

}  // namespace lab
