#pragma once

#include <string>
#include <vector>

#include "mfspec/model.hpp"
#include "mfspec/variational.hpp"

namespace mfspec {

/// q-bracket cap: e^{60 * spread} exhausts double precision.
inline constexpr double kQCap = 60.0;

struct BetaPoint {
    std::vector<double> q;
    double beta = 0.0;
    /// alpha = -grad beta(q), the level map of the Gibbs weights.
    std::vector<double> alpha;
    ProductMeasureWeights gibbs_weights{std::vector<double>{1.0}};
    /// log sum_i exp(<q, Phi_i> + beta Lambda_i) at the returned beta.
    double residual = 0.0;
};

/// Root beta of sum_i prod_m p_{m,i}^{q_m} r_i^beta = 1 (depth-1 potentials).
BetaPoint beta(const ModelSpec& spec, std::span<const double> q, double tol = 1e-13);

/// grad beta(q) = -E_w[Phi] / E_w[Lambda] under the Gibbs weights w of bp;
/// every component is negative, alpha = -grad beta.
std::vector<double> beta_gradient(const ModelSpec& spec, const BetaPoint& bp);

/// Hessian of beta: -Cov_w(c_l, c_m) / E_w[Lambda], c_m = Phi_m + beta_m Lambda.
std::vector<std::vector<double>> beta_hessian(const ModelSpec& spec, const BetaPoint& bp);

/// Per-symbol level vectors v_i = (Phi_m(i) / Lambda(i))_m; the closure of
/// the attainable alpha set is their convex hull.
std::vector<std::vector<double>> symbol_levels(const ModelSpec& spec);

/// True when some Bernoulli measure has level map in the box (the box meets
/// the convex hull of the symbol levels).
bool box_meets_attainable(const ModelSpec& spec, const TargetBox& box);

enum class LegendreStatus { Interior, Boundary, Exterior };

struct LegendreResult {
    /// inf_q (<alpha, q> + beta(q)); -inf outside the attainable closure.
    double f = 0.0;
    std::vector<double> q_star;
    LegendreStatus status = LegendreStatus::Interior;
};

/// f(alpha) = inf_q (<alpha, q> + beta(q)). M = 1 by bisection on the
/// monotone map q -> alpha(q) inside |q| <= kQCap; M >= 2 by damped Newton.
/// At the boundary of the attainable range (M = 1) f is the similarity
/// dimension of the symbols attaining the extreme level.
LegendreResult legendre(const ModelSpec& spec, std::span<const double> alpha, double tol = 1e-13);

struct SpectrumPoint {
    std::vector<double> alpha;
    double f = 0.0;
    std::vector<double> q_at_min;
    LegendreStatus status = LegendreStatus::Interior;
};

struct SpectrumCurve {
    std::vector<SpectrumPoint> points;
    std::string model_label;
    /// "legendre" | "variational" | "zeta"
    std::string method;
};

SpectrumCurve spectrum_sweep(const ModelSpec& spec, const std::vector<std::vector<double>>& alpha_grid);

struct SupSpectrumResult {
    double value = 0.0;
    std::vector<double> argmax;
    /// False when the box misses the attainable closure (value -inf).
    bool attainable = true;
};

/// sup over alpha in the box of f(alpha). M = 1: f is concave with peak at
/// alpha(0), so the clamp of alpha(0) into the box is the maximizer. M = 2:
/// the dual inf_q [beta(q) + sup_{alpha in box} <alpha, q>] by nested
/// golden-section search.
SupSpectrumResult sup_spectrum(const ModelSpec& spec, const TargetBox& box);

/// max h(mu) + int phi dmu over the family subject to level_map(mu) in C.
VariationalResult variational_solve(const ModelSpec& spec, const TargetBox& box, const PotentialTable& phi,
                                    MeasureFamily family);

/// max -h(mu) / int Lambda dmu over the family subject to level_map(mu) in C.
VariationalResult variational_dimension(const ModelSpec& spec, const TargetBox& box, MeasureFamily family);

}  // namespace mfspec
