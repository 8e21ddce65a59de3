#include "mfspec/variational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "mfspec/errors.hpp"

namespace mfspec {

namespace {

constexpr double kSlack = 1e-12;
constexpr double kGrid = 1e-2;
constexpr double kGolden = 0.6180339887498949;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double objective(const CellProblem& p, VariationalForm form, std::span<const double> w) {
    const double h = cell_entropy(p.family, p.alphabet_size, w);
    if (form == VariationalForm::Pressure) return h + cell_integral(p.phi, w);
    return -h / cell_integral(p.lambda, w);
}

// ---------------------------------------------------------------------------
// Exact geometry for charts of dimension <= 2.

struct Chart {
    std::vector<double> base;
    std::vector<std::vector<double>> dirs;
};

Chart make_chart(MeasureFamily family, int n) {
    if (family == MeasureFamily::Bernoulli) {
        if (n == 1) return {{1.0}, {}};
        if (n == 2) return {{0.0, 1.0}, {{1.0, -1.0}}};
        return {{0.0, 0.0, 1.0}, {{1.0, 0.0, -1.0}, {0.0, 1.0, -1.0}}};
    }
    if (n == 1) return {{1.0}, {}};
    // Q_00 = x0, Q_11 = x1, Q_01 = Q_10 = (1 - x0 - x1) / 2.
    return {{0.0, 0.5, 0.5, 0.0}, {{1.0, -0.5, -0.5, 0.0}, {0.0, -0.5, -0.5, 1.0}}};
}

bool has_exact_chart(MeasureFamily family, int n) {
    return family == MeasureFamily::Bernoulli ? n <= 3 : n <= 2;
}

std::vector<double> chart_point(const Chart& chart, std::span<const double> x) {
    std::vector<double> w = chart.base;
    for (std::size_t k = 0; k < chart.dirs.size(); ++k) {
        for (std::size_t c = 0; c < w.size(); ++c) w[c] += x[k] * chart.dirs[k][c];
    }
    for (double& v : w) v = std::max(0.0, v);
    return w;
}

struct HalfPlane {
    std::array<double, 2> a{0.0, 0.0};
    double b = 0.0;
};

HalfPlane to_chart(const Chart& chart, std::span<const double> row, double slack) {
    HalfPlane hp;
    for (std::size_t k = 0; k < chart.dirs.size(); ++k) hp.a[k] = cell_integral(row, chart.dirs[k]);
    hp.b = slack - cell_integral(row, chart.base);
    return hp;
}

std::vector<HalfPlane> chart_constraints(const CellProblem& p, const Chart& chart) {
    std::vector<HalfPlane> out;
    const int cells = p.cell_count();
    for (int c = 0; c < cells; ++c) {
        std::vector<double> row(static_cast<std::size_t>(cells), 0.0);
        row[static_cast<std::size_t>(c)] = -1.0;
        out.push_back(to_chart(chart, row, 0.0));
    }
    auto slack_of = [](const std::vector<double>& row) {
        double m = 1.0;
        for (double v : row) m = std::max(m, std::abs(v));
        return kSlack * m;
    };
    for (const auto& row : p.le_rows) out.push_back(to_chart(chart, row, slack_of(row)));
    for (const auto& row : p.eq_rows) {
        out.push_back(to_chart(chart, row, slack_of(row)));
        std::vector<double> neg(row.size());
        std::transform(row.begin(), row.end(), neg.begin(), [](double v) { return -v; });
        out.push_back(to_chart(chart, neg, slack_of(row)));
    }
    return out;
}

using Point = std::array<double, 2>;

std::vector<Point> clip(const std::vector<Point>& poly, const HalfPlane& hp) {
    std::vector<Point> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const double sp = hp.a[0] * p[0] + hp.a[1] * p[1] - hp.b;
        const double sq = hp.a[0] * q[0] + hp.a[1] * q[1] - hp.b;
        if (sp <= 0.0) out.push_back(p);
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
        }
    }
    return out;
}

VariationalResult solve_exact_chart(const CellProblem& p, VariationalForm form) {
    const Chart chart = make_chart(p.family, p.alphabet_size);
    const auto planes = chart_constraints(p, chart);
    const std::size_t d = chart.dirs.size();
    VariationalResult res;
    res.family = p.family;
    auto eval = [&](std::span<const double> x) { return objective(p, form, chart_point(chart, x)); };

    std::vector<double> best_x;
    if (d == 0) {
        for (const auto& hp : planes) {
            if (hp.b < 0.0) throw InfeasibleConstraint("no measure of the family satisfies the constraint");
        }
    } else if (d == 1) {
        double lo = -0.5, hi = 1.5;
        for (const auto& hp : planes) {
            if (hp.a[0] > 0.0) {
                hi = std::min(hi, hp.b / hp.a[0]);
            } else if (hp.a[0] < 0.0) {
                lo = std::max(lo, hp.b / hp.a[0]);
            } else if (hp.b < 0.0) {
                lo = 1.0;
                hi = 0.0;
            }
        }
        if (lo > hi) throw InfeasibleConstraint("no measure of the family satisfies the constraint");
        const ScalarMaximum m = golden_section_max([&](double x) { return eval(std::array<double, 1>{x}); }, lo, hi, kGrid);
        best_x = {m.x};
    } else {
        std::vector<Point> poly{{-0.5, -0.5}, {1.5, -0.5}, {1.5, 1.5}, {-0.5, 1.5}};
        for (const auto& hp : planes) {
            if (hp.a[0] == 0.0 && hp.a[1] == 0.0) {
                if (hp.b < 0.0) poly.clear();
            } else {
                poly = clip(poly, hp);
            }
            if (poly.empty()) throw InfeasibleConstraint("no measure of the family satisfies the constraint");
        }
        double x0_lo = std::numeric_limits<double>::infinity();
        double x0_hi = -x0_lo;
        for (const auto& v : poly) {
            x0_lo = std::min(x0_lo, v[0]);
            x0_hi = std::max(x0_hi, v[0]);
        }
        auto slice = [&](double x0) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            const std::size_t n = poly.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Point& a = poly[i];
                const Point& b = poly[(i + 1) % n];
                if (a[0] == x0) {
                    lo = std::min(lo, a[1]);
                    hi = std::max(hi, a[1]);
                }
                if ((a[0] - x0) * (b[0] - x0) < 0.0) {
                    const double y = a[1] + (x0 - a[0]) / (b[0] - a[0]) * (b[1] - a[1]);
                    lo = std::min(lo, y);
                    hi = std::max(hi, y);
                }
            }
            if (lo > hi) {
                // x0 outside by rounding: use the nearest vertex column.
                const auto it = std::min_element(poly.begin(), poly.end(), [&](const Point& u, const Point& v) {
                    return std::abs(u[0] - x0) < std::abs(v[0] - x0);
                });
                lo = hi = (*it)[1];
            }
            return std::pair{lo, hi};
        };
        auto inner = [&](double x0) {
            const auto [lo, hi] = slice(x0);
            return golden_section_max([&](double x1) { return eval(std::array<double, 2>{x0, x1}); }, lo, hi, kGrid);
        };
        const ScalarMaximum outer = golden_section_max([&](double x0) { return inner(x0).value; }, x0_lo, x0_hi, kGrid);
        best_x = {outer.x, inner(outer.x).x};
    }
    res.weights = chart_point(chart, best_x);
    res.value = objective(p, form, res.weights);
    res.entropy = cell_entropy(p.family, p.alphabet_size, res.weights);
    return res;
}

// ---------------------------------------------------------------------------
// Dual route for larger charts.

struct FamilyPressure {
    double value = 0.0;
    std::vector<double> w;
    Eigen::MatrixXd hessian;
};

// max_w [h(w) + psi . w] over the family, its maximizer and the Hessian
// in psi (covariance, or asymptotic covariance for Markov chains).
FamilyPressure family_pressure(MeasureFamily family, int n, std::span<const double> psi) {
    const double shift = *std::max_element(psi.begin(), psi.end());
    FamilyPressure out;
    if (family == MeasureFamily::Bernoulli) {
        double z = 0.0;
        out.w.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) z += (out.w[i] = std::exp(psi[i] - shift));
        for (double& v : out.w) v /= z;
        out.value = shift + std::log(z);
        const Eigen::Map<const Eigen::VectorXd> w(out.w.data(), static_cast<Eigen::Index>(out.w.size()));
        out.hessian = Eigen::MatrixXd(w.asDiagonal()) - w * w.transpose();
        return out;
    }
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = std::exp(psi[static_cast<std::size_t>(i * n + j)] - shift);
    }
    auto perron = [](const Eigen::MatrixXd& m, double& rho) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m);
        Eigen::Index k = 0;
        for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()(i).real() > es.eigenvalues()(k).real()) k = i;
        }
        rho = es.eigenvalues()(k).real();
        Eigen::VectorXd v = es.eigenvectors().col(k).real().cwiseAbs();
        return Eigen::VectorXd(v / v.sum());
    };
    double rho = 0.0, rho_left = 0.0;
    const Eigen::VectorXd v = perron(a, rho);
    const Eigen::VectorXd u = perron(a.transpose(), rho_left);
    out.value = shift + std::log(rho);
    const double norm = u.dot(v);
    const int cells = n * n;
    out.w.resize(static_cast<std::size_t>(cells));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out.w[static_cast<std::size_t>(i * n + j)] = u(i) * a(i, j) * v(j) / (rho * norm);
    }
    // Edge chain (i,j) -> (j,k) with probability P_jk = A_jk v_k / (rho v_j).
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(cells, cells);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) t(i * n + j, j * n + k) = a(j, k) * v(k) / (rho * v(j));
        }
    }
    const Eigen::Map<const Eigen::VectorXd> q(out.w.data(), cells);
    const Eigen::MatrixXd fundamental =
        (Eigen::MatrixXd::Identity(cells, cells) - t + Eigen::VectorXd::Ones(cells) * q.transpose())
            .partialPivLu()
            .inverse();
    const Eigen::MatrixXd c = q.asDiagonal() * (fundamental - Eigen::MatrixXd::Identity(cells, cells));
    out.hessian = Eigen::MatrixXd(q.asDiagonal()) - q * q.transpose() + c + c.transpose();
    return out;
}

struct DualSolution {
    double value = 0.0;
    std::vector<double> w;
};

// min over lambda (>= 0 on inequality rows) of max_w [h + (psi0 - A^T lambda) . w],
// by Levenberg-damped projected Newton.
DualSolution solve_dual(const CellProblem& p, std::span<const double> psi0) {
    const int cells = p.cell_count();
    const int n_le = static_cast<int>(p.le_rows.size());
    const int k = n_le + static_cast<int>(p.eq_rows.size());
    Eigen::MatrixXd rows(k, cells);
    for (int r = 0; r < k; ++r) {
        const auto& row = r < n_le ? p.le_rows[static_cast<std::size_t>(r)]
                                   : p.eq_rows[static_cast<std::size_t>(r - n_le)];
        for (int c = 0; c < cells; ++c) rows(r, c) = row[static_cast<std::size_t>(c)];
    }
    const Eigen::Map<const Eigen::VectorXd> psi_base(psi0.data(), cells);
    // Any feasible measure has h >= 0, so the optimum is at least min psi0.
    const double floor_value = psi_base.minCoeff() - 1.0;

    auto evaluate = [&](const Eigen::VectorXd& lambda) {
        const Eigen::VectorXd psi = psi_base - rows.transpose() * lambda;
        return family_pressure(p.family, p.alphabet_size, std::span<const double>(psi.data(), cells));
    };
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
    FamilyPressure cur = evaluate(lambda);
    if (k == 0) return {cur.value, cur.w};

    double damping = 1e-10;
    int stall = 0;
    for (int it = 0; it < 5000; ++it) {
        if (cur.value < floor_value) throw InfeasibleConstraint("no measure of the family satisfies the constraint");
        const Eigen::Map<const Eigen::VectorXd> w(cur.w.data(), cells);
        const Eigen::VectorXd grad = -(rows * w);
        const Eigen::MatrixXd hess = rows * cur.hessian * rows.transpose();
        std::vector<int> free;
        double pg = 0.0;
        for (int r = 0; r < k; ++r) {
            if (r >= n_le || lambda(r) > 0.0 || grad(r) < 0.0) {
                free.push_back(r);
                pg = std::max(pg, std::abs(grad(r)));
            }
        }
        if (pg < 1e-15) break;
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd hf(nf, nf);
        Eigen::VectorXd gf(nf);
        double scale = 1.0;
        for (Eigen::Index i = 0; i < nf; ++i) {
            gf(i) = grad(free[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < nf; ++j) hf(i, j) = hess(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
            scale = std::max(scale, hf(i, i));
        }
        bool accepted = false;
        FamilyPressure next;
        while (damping < 1e30) {
            const Eigen::MatrixXd m = hf + damping * scale * Eigen::MatrixXd::Identity(nf, nf);
            const Eigen::VectorXd step = m.ldlt().solve(-gf);
            Eigen::VectorXd trial = lambda;
            for (Eigen::Index i = 0; i < nf; ++i) {
                const int r = free[static_cast<std::size_t>(i)];
                trial(r) += step(i);
                if (r < n_le) trial(r) = std::max(0.0, trial(r));
            }
            next = evaluate(trial);
            if (std::isfinite(next.value) && next.value <= cur.value) {
                lambda = trial;
                accepted = true;
                damping = std::max(damping * 0.1, 1e-15);
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) break;
        const double gain = cur.value - next.value;
        cur = std::move(next);
        stall = gain <= 1e-15 * (1.0 + std::abs(cur.value)) ? stall + 1 : 0;
        if (stall >= 3) break;
    }
    if (cur.value < floor_value) throw InfeasibleConstraint("no measure of the family satisfies the constraint");
    return {cur.value, cur.w};
}

VariationalResult solve_dual_route(const CellProblem& p, VariationalForm form) {
    VariationalResult res;
    res.family = p.family;
    if (form == VariationalForm::Pressure) {
        res.weights = solve_dual(p, p.phi).w;
    } else {
        // Dinkelbach: theta <- -h(w)/int Lambda where w maximizes h + theta Lambda.
        double theta = 0.0;
        std::vector<double> psi(p.lambda.size());
        for (int it = 0; it < 200; ++it) {
            for (std::size_t c = 0; c < psi.size(); ++c) psi[c] = theta * p.lambda[c];
            res.weights = solve_dual(p, psi).w;
            const double next = objective(p, form, res.weights);
            const bool done = std::abs(next - theta) <= 1e-14 * (1.0 + std::abs(theta));
            theta = next;
            if (done) break;
        }
    }
    res.value = objective(p, form, res.weights);
    res.entropy = cell_entropy(p.family, p.alphabet_size, res.weights);
    return res;
}

}  // namespace

ScalarMaximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double grid_step) {
    ScalarMaximum best;
    bool seeded = false;
    auto consider = [&](double x) {
        const double v = f(x);
        if (!seeded || v > best.value) {
            best = {x, v};
            seeded = true;
        }
        return v;
    };
    if (!(hi - lo > 1e-15)) {
        consider(0.5 * (lo + hi));
        return best;
    }
    const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) / grid_step)));
    const double h = (hi - lo) / steps;
    int best_i = 0;
    for (int i = 0; i <= steps; ++i) {
        const double before = best.value;
        consider(i == steps ? hi : lo + i * h);
        if (best.value > before) best_i = i;
    }
    double a = lo + std::max(0, best_i - 1) * h;
    double b = best_i + 1 >= steps ? hi : lo + (best_i + 1) * h;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = consider(c);
    double fd = consider(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = consider(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = consider(d);
        }
    }
    return best;
}

int CellProblem::cell_count() const {
    return family == MeasureFamily::Bernoulli ? alphabet_size : alphabet_size * alphabet_size;
}

std::vector<double> cell_values(const PotentialTable& table, MeasureFamily family) {
    const int n = table.alphabet_size();
    if (family == MeasureFamily::Bernoulli) {
        if (table.depth() != 1) throw DepthUnsupported("Bernoulli family integrates depth-1 tables only");
        return std::vector<double>(table.values().begin(), table.values().end());
    }
    if (table.depth() > 2) throw DepthUnsupported("Markov1 family integrates tables of depth <= 2 only");
    std::vector<double> out(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out[static_cast<std::size_t>(i * n + j)] =
                table.depth() == 1 ? table.at_index(static_cast<std::size_t>(i))
                                   : table.at_index(static_cast<std::size_t>(i * n + j));
        }
    }
    return out;
}

double cell_entropy(MeasureFamily family, int alphabet_size, std::span<const double> w) {
    double h = 0.0;
    if (family == MeasureFamily::Bernoulli) {
        for (double v : w) h -= xlogx(v);
        return h;
    }
    const auto n = static_cast<std::size_t>(alphabet_size);
    for (std::size_t i = 0; i < n; ++i) {
        double pi = 0.0;
        for (std::size_t j = 0; j < n; ++j) pi += w[i * n + j];
        for (std::size_t j = 0; j < n; ++j) h -= xlogx(w[i * n + j]);
        h += xlogx(pi);
    }
    return h;
}

void add_ratio_bounds(CellProblem& p, std::span<const double> num, std::span<const double> den, double lo,
                      double hi) {
    auto row = [&](double level, double sign) {
        std::vector<double> r(num.size());
        for (std::size_t c = 0; c < num.size(); ++c) r[c] = sign * (num[c] - level * den[c]);
        return r;
    };
    if (lo == hi) {
        p.eq_rows.push_back(row(lo, 1.0));
        return;
    }
    // den . w < 0 flips the inequality when clearing the denominator.
    if (std::isfinite(lo)) p.le_rows.push_back(row(lo, 1.0));
    if (std::isfinite(hi)) p.le_rows.push_back(row(hi, -1.0));
}

void add_linear_bounds(CellProblem& p, std::span<const double> f, double lo, double hi) {
    auto row = [&](double level, double sign) {
        std::vector<double> r(f.size());
        for (std::size_t c = 0; c < f.size(); ++c) r[c] = sign * (f[c] - level);
        return r;
    };
    if (lo == hi) {
        p.eq_rows.push_back(row(lo, 1.0));
        return;
    }
    if (std::isfinite(lo)) p.le_rows.push_back(row(lo, -1.0));
    if (std::isfinite(hi)) p.le_rows.push_back(row(hi, 1.0));
}

VariationalResult solve_cell_problem(const CellProblem& problem, VariationalForm form) {
    if (problem.alphabet_size < 1) throw ValidationError("alphabet size must be positive");
    const auto cells = static_cast<std::size_t>(problem.cell_count());
    if (form == VariationalForm::Pressure && problem.phi.size() != cells) {
        throw ValidationError("objective potential has the wrong number of cells");
    }
    if (form == VariationalForm::Dimension) {
        if (problem.lambda.size() != cells) throw ValidationError("scaling potential has the wrong number of cells");
        if (*std::max_element(problem.lambda.begin(), problem.lambda.end()) >= 0.0) {
            throw ValidationError("scaling potential must be strictly negative");
        }
    }
    for (const auto* rows : {&problem.le_rows, &problem.eq_rows}) {
        for (const auto& r : *rows) {
            if (r.size() != cells) throw ValidationError("constraint row has the wrong number of cells");
        }
    }
    if (has_exact_chart(problem.family, problem.alphabet_size)) return solve_exact_chart(problem, form);
    return solve_dual_route(problem, form);
}

}  // namespace mfspec
