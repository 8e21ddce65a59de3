#include "mfspec/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mfspec/logsum.hpp"
#include "mfspec/pressure.hpp"

namespace mfspec {

namespace {

struct DepthOnePotentials {
    std::vector<double> lambda;
    /// phi[m][i]
    std::vector<std::vector<double>> phi;

    [[nodiscard]] std::size_t symbols() const { return lambda.size(); }
    [[nodiscard]] std::size_t measures() const { return phi.size(); }

    [[nodiscard]] double exponent(std::size_t i, std::span<const double> q, double b) const {
        double e = b * lambda[i];
        for (std::size_t m = 0; m < phi.size(); ++m) e += q[m] * phi[m][i];
        return e;
    }
};

DepthOnePotentials depth_one(const ModelSpec& spec) {
    const ModelPotentials pots = build_potentials(spec);
    if (pots.depth() != 1) throw DepthUnsupported("the Legendre route needs depth-1 potentials");
    DepthOnePotentials out;
    out.lambda.assign(pots.scaling.values().begin(), pots.scaling.values().end());
    for (const auto& t : pots.measures) out.phi.emplace_back(t.values().begin(), t.values().end());
    return out;
}

double log_partition(const DepthOnePotentials& d, std::span<const double> q, double b) {
    LogSumExp acc;
    for (std::size_t i = 0; i < d.symbols(); ++i) acc.add(d.exponent(i, q, b));
    return acc.value();
}

std::vector<double> gibbs(const DepthOnePotentials& d, std::span<const double> q, double b) {
    const double z = log_partition(d, q, b);
    std::vector<double> w(d.symbols());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(d.exponent(i, q, b) - z);
    return w;
}

BetaPoint beta_impl(const DepthOnePotentials& d, std::span<const double> q, double tol) {
    if (q.size() != d.measures()) throw ValidationError("q must have one coordinate per measure");
    auto g = [&](double b) { return log_partition(d, q, b); };
    double b = bowen_root(g, 0.0, 1.0, {.tol = tol, .max_span = 1e6});
    for (int it = 0; it < 3; ++it) {
        const auto w = gibbs(d, q, b);
        const double slope = cell_integral(d.lambda, w);
        const double next = b - g(b) / slope;
        if (!(std::abs(g(next)) < std::abs(g(b)))) break;
        b = next;
    }
    BetaPoint bp;
    bp.q.assign(q.begin(), q.end());
    bp.beta = b;
    bp.residual = g(b);
    auto w = gibbs(d, q, b);
    const double el = cell_integral(d.lambda, w);
    for (std::size_t m = 0; m < d.measures(); ++m) bp.alpha.push_back(cell_integral(d.phi[m], w) / el);
    bp.gibbs_weights = ProductMeasureWeights(std::move(w));
    return bp;
}

double value_at(const DepthOnePotentials& d, std::span<const double> alpha, std::span<const double> q,
                double tol) {
    double v = beta_impl(d, q, tol).beta;
    for (std::size_t m = 0; m < alpha.size(); ++m) v += alpha[m] * q[m];
    return v;
}

// Similarity dimension of the symbols whose level equals `level`.
double extreme_dimension(const DepthOnePotentials& d, double level, double slack) {
    std::vector<double> lam;
    for (std::size_t i = 0; i < d.symbols(); ++i) {
        if (std::abs(d.phi[0][i] / d.lambda[i] - level) <= slack) lam.push_back(d.lambda[i]);
    }
    auto pressure = [&](double s) {
        LogSumExp acc;
        for (double l : lam) acc.add(s * l);
        return acc.value();
    };
    return bowen_root(pressure, 0.0, 1.0, {.tol = 1e-14});
}

LegendreResult legendre_1d(const DepthOnePotentials& d, double alpha, double tol) {
    double amin = d.phi[0][0] / d.lambda[0];
    double amax = amin;
    for (std::size_t i = 1; i < d.symbols(); ++i) {
        amin = std::min(amin, d.phi[0][i] / d.lambda[i]);
        amax = std::max(amax, d.phi[0][i] / d.lambda[i]);
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(amax));
    LegendreResult res;
    if (alpha < amin - slack || alpha > amax + slack) {
        res.f = kNegInf;
        res.q_star = {alpha > amax ? -kQCap : kQCap};
        res.status = LegendreStatus::Exterior;
        return res;
    }
    const std::array<double, 1> a{alpha};
    if (amax - amin <= slack) {
        // beta is affine; every q attains the infimum.
        res.q_star = {0.0};
        res.f = value_at(d, a, res.q_star, tol);
        return res;
    }
    auto alpha_of = [&](double q) { return beta_impl(d, std::array<double, 1>{q}, tol).alpha[0]; };
    const double top = alpha_of(-kQCap);
    const double bottom = alpha_of(kQCap);
    if (alpha >= top || alpha <= bottom) {
        const bool upper = alpha >= top;
        const double extreme = upper ? amax : amin;
        res.status = LegendreStatus::Boundary;
        res.q_star = {upper ? -kQCap : kQCap};
        res.f = std::abs(alpha - extreme) <= slack ? extreme_dimension(d, extreme, slack)
                                                   : value_at(d, a, res.q_star, tol);
        return res;
    }
    // alpha(q) is decreasing.
    double lo = -kQCap, hi = kQCap;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double am = alpha_of(mid);
        if (am == alpha) {
            lo = hi = mid;
            break;
        }
        (am > alpha ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    res.q_star = {0.5 * (lo + hi)};
    res.f = value_at(d, a, res.q_star, tol);
    return res;
}

LegendreResult legendre_newton(const ModelSpec& spec, const DepthOnePotentials& d, std::span<const double> alpha,
                               double tol) {
    LegendreResult res;
    const auto m = static_cast<Eigen::Index>(alpha.size());
    if (!box_meets_attainable(spec, TargetBox::singleton({alpha.begin(), alpha.end()}))) {
        res.f = kNegInf;
        res.q_star.assign(alpha.size(), 0.0);
        res.status = LegendreStatus::Exterior;
        return res;
    }
    std::vector<double> q(alpha.size(), 0.0);
    double value = value_at(d, alpha, q, tol);
    double scale = 1.0;
    for (double a : alpha) scale = std::max(scale, std::abs(a));
    for (int it = 0; it < 200; ++it) {
        const BetaPoint bp = beta_impl(d, q, tol);
        Eigen::VectorXd grad(m);
        double gmax = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            grad(k) = alpha[static_cast<std::size_t>(k)] - bp.alpha[static_cast<std::size_t>(k)];
            gmax = std::max(gmax, std::abs(grad(k)));
        }
        if (gmax <= 1e-13 * scale) break;
        const auto h = beta_hessian(spec, bp);
        Eigen::MatrixXd hm(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) hm(i, j) = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        const double damp = 1e-12 * std::max(1.0, hm.trace());
        const Eigen::VectorXd dir = (hm + damp * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(-grad);
        double t = 1.0;
        bool moved = false;
        while (t > 1e-12) {
            std::vector<double> trial(q.size());
            double decrease = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k) {
                trial[k] = std::clamp(q[k] + t * dir(static_cast<Eigen::Index>(k)), -kQCap, kQCap);
                decrease += grad(static_cast<Eigen::Index>(k)) * (trial[k] - q[k]);
            }
            const double tv = value_at(d, alpha, trial, tol);
            if (tv <= value + 1e-4 * decrease) {
                moved = trial != q;
                q = std::move(trial);
                value = tv;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    res.q_star = q;
    res.f = value;
    const bool capped = std::any_of(q.begin(), q.end(), [](double x) { return std::abs(x) >= kQCap - 1e-9; });
    res.status = capped ? LegendreStatus::Boundary : LegendreStatus::Interior;
    return res;
}

VariationalResult solve_level_problem(const ModelSpec& spec, const TargetBox& box, const PotentialTable* phi,
                                      MeasureFamily family, VariationalForm form) {
    const ModelPotentials pots = build_potentials(spec);
    if (box.dimension() != pots.measures.size()) {
        throw ValidationError("target box dimension must equal the number of measures M");
    }
    CellProblem p;
    p.family = family;
    p.alphabet_size = spec.alphabet_size;
    p.lambda = cell_values(pots.scaling, family);
    std::vector<std::vector<double>> num;
    for (std::size_t m = 0; m < pots.measures.size(); ++m) {
        num.push_back(cell_values(pots.measures[m], family));
        add_ratio_bounds(p, num.back(), p.lambda, box.lo(m), box.hi(m));
    }
    if (phi != nullptr) {
        if (phi->alphabet_size() != spec.alphabet_size) throw ValidationError("potential alphabet mismatch");
        p.phi = cell_values(*phi, family);
    }
    VariationalResult res = solve_cell_problem(p, form);
    const double den = cell_integral(p.lambda, res.weights);
    for (const auto& n : num) res.level.push_back(cell_integral(n, res.weights) / den);
    return res;
}

}  // namespace

BetaPoint beta(const ModelSpec& spec, std::span<const double> q, double tol) {
    return beta_impl(depth_one(spec), q, tol);
}

std::vector<double> beta_gradient(const ModelSpec& spec, const BetaPoint& bp) {
    const DepthOnePotentials d = depth_one(spec);
    const auto& w = bp.gibbs_weights.weights();
    const double el = cell_integral(d.lambda, w);
    std::vector<double> grad;
    for (std::size_t m = 0; m < d.measures(); ++m) grad.push_back(-cell_integral(d.phi[m], w) / el);
    return grad;
}

std::vector<std::vector<double>> beta_hessian(const ModelSpec& spec, const BetaPoint& bp) {
    const DepthOnePotentials d = depth_one(spec);
    const auto& w = bp.gibbs_weights.weights();
    const double el = cell_integral(d.lambda, w);
    const auto grad = beta_gradient(spec, bp);
    const std::size_t mm = d.measures();
    std::vector<std::vector<double>> c(mm, std::vector<double>(d.symbols()));
    std::vector<double> mean(mm, 0.0);
    for (std::size_t m = 0; m < mm; ++m) {
        for (std::size_t i = 0; i < d.symbols(); ++i) c[m][i] = d.phi[m][i] + grad[m] * d.lambda[i];
        mean[m] = cell_integral(c[m], w);
    }
    std::vector<std::vector<double>> h(mm, std::vector<double>(mm, 0.0));
    for (std::size_t l = 0; l < mm; ++l) {
        for (std::size_t m = 0; m < mm; ++m) {
            double cov = 0.0;
            for (std::size_t i = 0; i < d.symbols(); ++i) cov += w[i] * (c[l][i] - mean[l]) * (c[m][i] - mean[m]);
            h[l][m] = -cov / el;
        }
    }
    return h;
}

std::vector<std::vector<double>> symbol_levels(const ModelSpec& spec) {
    const DepthOnePotentials d = depth_one(spec);
    std::vector<std::vector<double>> out(d.symbols());
    for (std::size_t i = 0; i < d.symbols(); ++i) {
        for (std::size_t m = 0; m < d.measures(); ++m) out[i].push_back(d.phi[m][i] / d.lambda[i]);
    }
    return out;
}

bool box_meets_attainable(const ModelSpec& spec, const TargetBox& box) {
    const auto levels = symbol_levels(spec);
    const std::size_t mm = box.dimension();
    if (mm == 1) {
        double amin = levels[0][0], amax = levels[0][0];
        for (const auto& v : levels) {
            amin = std::min(amin, v[0]);
            amax = std::max(amax, v[0]);
        }
        const double slack = 1e-12 * std::max(1.0, std::abs(amax));
        return box.lo(0) <= amax + slack && box.hi(0) >= amin - slack;
    }
    try {
        const PotentialTable zero(spec.alphabet_size, 1, std::vector<double>(static_cast<std::size_t>(spec.alphabet_size), 0.0));
        solve_level_problem(spec, box, &zero, MeasureFamily::Bernoulli, VariationalForm::Pressure);
        return true;
    } catch (const InfeasibleConstraint&) {
        return false;
    }
}

LegendreResult legendre(const ModelSpec& spec, std::span<const double> alpha, double tol) {
    const DepthOnePotentials d = depth_one(spec);
    if (alpha.size() != d.measures()) throw ValidationError("alpha must have one coordinate per measure");
    if (d.measures() == 1) return legendre_1d(d, alpha[0], tol);
    return legendre_newton(spec, d, alpha, tol);
}

SpectrumCurve spectrum_sweep(const ModelSpec& spec, const std::vector<std::vector<double>>& alpha_grid) {
    if (alpha_grid.empty()) throw ValidationError("alpha grid must be nonempty");
    SpectrumCurve curve;
    curve.model_label = spec.label;
    curve.method = "legendre";
    for (const auto& a : alpha_grid) {
        const LegendreResult r = legendre(spec, a);
        curve.points.push_back({a, r.f, r.q_star, r.status});
    }
    return curve;
}

SupSpectrumResult sup_spectrum(const ModelSpec& spec, const TargetBox& box) {
    const DepthOnePotentials d = depth_one(spec);
    const std::size_t mm = d.measures();
    if (box.dimension() != mm) throw ValidationError("target box dimension must equal the number of measures M");
    if (mm > 2) throw ValidationError("sup_spectrum supports M <= 2");
    SupSpectrumResult res;
    if (!box_meets_attainable(spec, box)) {
        res.value = kNegInf;
        res.attainable = false;
        return res;
    }
    const auto levels = symbol_levels(spec);
    std::vector<double> lo(mm), hi(mm);
    for (std::size_t m = 0; m < mm; ++m) {
        double vmin = levels[0][m], vmax = levels[0][m];
        for (const auto& v : levels) {
            vmin = std::min(vmin, v[m]);
            vmax = std::max(vmax, v[m]);
        }
        lo[m] = std::max(box.lo(m), vmin);
        hi[m] = std::max(lo[m], std::min(box.hi(m), vmax));
    }
    if (mm == 1) {
        const double peak = beta_impl(d, std::array<double, 1>{0.0}, 1e-13).alpha[0];
        res.argmax = {std::clamp(peak, lo[0], hi[0])};
        res.value = legendre_1d(d, res.argmax[0], 1e-13).f;
        return res;
    }
    // sup_{alpha in box} inf_q = inf_q sup_{alpha in box}: minimize the
    // convex function beta(q) + sum_m max(lo_m q_m, hi_m q_m).
    auto dual = [&](double q0, double q1) {
        const std::array<double, 2> q{q0, q1};
        double v = beta_impl(d, q, 1e-13).beta;
        for (std::size_t m = 0; m < 2; ++m) v += std::max(lo[m] * q[m], hi[m] * q[m]);
        return v;
    };
    auto inner = [&](double q0) {
        return golden_section_max([&](double q1) { return -dual(q0, q1); }, -kQCap, kQCap, 1.0);
    };
    const ScalarMaximum outer = golden_section_max([&](double q0) { return inner(q0).value; }, -kQCap, kQCap, 1.0);
    const std::array<double, 2> q{outer.x, inner(outer.x).x};
    const BetaPoint bp = beta_impl(d, q, 1e-13);
    res.value = -outer.value;
    for (std::size_t m = 0; m < 2; ++m) {
        if (q[m] > 1e-9) {
            res.argmax.push_back(hi[m]);
        } else if (q[m] < -1e-9) {
            res.argmax.push_back(lo[m]);
        } else {
            res.argmax.push_back(std::clamp(bp.alpha[m], lo[m], hi[m]));
        }
    }
    return res;
}

VariationalResult variational_solve(const ModelSpec& spec, const TargetBox& box, const PotentialTable& phi,
                                    MeasureFamily family) {
    return solve_level_problem(spec, box, &phi, family, VariationalForm::Pressure);
}

VariationalResult variational_dimension(const ModelSpec& spec, const TargetBox& box, MeasureFamily family) {
    return solve_level_problem(spec, box, nullptr, family, VariationalForm::Dimension);
}

}  // namespace mfspec
