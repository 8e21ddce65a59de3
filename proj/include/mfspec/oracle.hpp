#pragma once

#include <string>

#include "mfspec/mfzeta.hpp"
#include "mfspec/variational.hpp"

namespace mfspec {

/// Naive value next to the fast one, with the deviation kept.
struct OracleReport {
    std::string quantity;
    double naive = 0.0;
    double fast = 0.0;
    double abs_deviation = 0.0;
    double rel_deviation = 0.0;
    /// Word length n, or 0 for grid scans.
    int n = 0;
    /// Grid step, or 0 for enumerations.
    double grid_step = 0.0;
    bool infeasible = false;
};

/// Literal word-by-word enumeration of the constrained cylinder sum: every
/// tail of every word is visited for both the level range and sup S_n phi.
double brute_constrained_sum(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                             ConstraintMode mode, std::uint64_t budget = kDefaultBudget);

struct BruteVariational {
    /// -inf when no grid point is feasible.
    double value = 0.0;
    std::vector<double> weights;
    bool feasible = false;
};

/// Scan of the Bernoulli simplex (N <= 3) at the given step. In box
/// coordinates thinner than step * (local level-map gradient) a grid point
/// is admitted within that distance, so that singleton boxes see their
/// neighbours; elsewhere membership is exact and the scan is a lower bound.
/// phi == nullptr selects the dimension form -h / int Lambda.
BruteVariational brute_variational(const ModelSpec& spec, const TargetBox& target, const PotentialTable* phi,
                                   double grid_step = 0.0);

/// Default grid step: 1e-3 for N = 2, 2e-3 for N = 3.
double default_grid_step(int alphabet_size);

OracleReport compare_constrained_sum(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                                     ConstraintMode mode, std::uint64_t budget = kDefaultBudget);

/// Dimension form when phi == nullptr, Bernoulli family.
OracleReport compare_variational(const ModelSpec& spec, const TargetBox& target, const PotentialTable* phi,
                                 double grid_step = 0.0);

}  // namespace mfspec
