#include "mfspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mfspec {

namespace {

// Absolute slack on box membership so that ratios which agree with a box
// face up to summation-order rounding are classified identically.
constexpr double kContainSlack = 1e-12;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::vector<double> solve_stationary(const std::vector<std::vector<double>>& p) {
    const std::size_t n = p.size();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-13) return {};
        std::swap(a[pivot], a[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = std::max(0.0, a[i][n] / a[i][i]);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& x : pi) x /= total;
    return pi;
}

// Cesaro average of the uniform start; used when the chain is reducible and
// the stationary vector is not unique.
std::vector<double> cesaro_stationary(const std::vector<std::vector<double>>& p) {
    const std::size_t n = p.size();
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> avg(n, 0.0);
    constexpr int kSteps = 20000;
    for (int t = 0; t < kSteps; ++t) {
        for (std::size_t i = 0; i < n; ++i) avg[i] += v[i];
        std::vector<double> next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) next[j] += v[i] * p[i][j];
        }
        v = std::move(next);
    }
    for (double& x : avg) x /= kSteps;
    return avg;
}

}  // namespace

void ModelSpec::validate() const {
    if (alphabet_size < 2) throw ValidationError("alphabet size N must be at least 2");
    if (static_cast<int>(ratios.size()) != alphabet_size) {
        throw ValidationError("ratios must have N = " + std::to_string(alphabet_size) + " entries");
    }
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0 && ratios[i] < 1.0)) {
            throw ValidationError("ratio out of (0,1): ratios[" + std::to_string(i) + "] = " +
                                  std::to_string(ratios[i]));
        }
    }
    if (measures.empty()) throw ValidationError("at least one probability vector is required");
    for (std::size_t m = 0; m < measures.size(); ++m) {
        const auto& p = measures[m];
        if (static_cast<int>(p.size()) != alphabet_size) {
            throw ValidationError("measures[" + std::to_string(m) + "] must have N entries");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!(p[i] > 0.0)) {
                throw ValidationError("probability must be strictly positive: measures[" + std::to_string(m) +
                                      "][" + std::to_string(i) + "] = " + std::to_string(p[i]));
            }
        }
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9) {
            throw ValidationError("probability vector measures[" + std::to_string(m) + "] sums to " +
                                  std::to_string(total) + ", not 1");
        }
    }
    if (potential_depth < 1) throw ValidationError("potential_depth must be at least 1");
    if (scaling_table) {
        if (scaling_table->alphabet_size() != alphabet_size) {
            throw ValidationError("scaling_table alphabet does not match N");
        }
        if (scaling_table->max_value() >= 0.0) throw ValidationError("scaling_table entries must be negative");
    }
    if (!measure_tables.empty()) {
        if (measure_tables.size() != measures.size()) {
            throw ValidationError("measure_tables must have one table per probability vector");
        }
        for (const auto& t : measure_tables) {
            if (t.alphabet_size() != alphabet_size) throw ValidationError("measure_tables alphabet does not match N");
        }
    }
}

ModelSpec make_model(std::vector<double> ratios, std::vector<std::vector<double>> measures, std::string label) {
    ModelSpec spec;
    spec.label = std::move(label);
    spec.alphabet_size = static_cast<int>(ratios.size());
    spec.ratios = std::move(ratios);
    spec.measures = std::move(measures);
    spec.validate();
    return spec;
}

int ModelPotentials::depth() const {
    int d = scaling.depth();
    for (const auto& m : measures) d = std::max(d, m.depth());
    return d;
}

ModelPotentials build_potentials(const ModelSpec& spec) {
    spec.validate();
    ModelPotentials out;
    if (spec.scaling_table) {
        out.scaling = *spec.scaling_table;
    } else {
        std::vector<double> lam(spec.ratios.size());
        std::transform(spec.ratios.begin(), spec.ratios.end(), lam.begin(), [](double r) { return std::log(r); });
        out.scaling = PotentialTable::from_symbol_values(std::move(lam)).lifted(spec.potential_depth);
    }
    if (!spec.measure_tables.empty()) {
        out.measures = spec.measure_tables;
    } else {
        for (const auto& p : spec.measures) {
            std::vector<double> phi(p.size());
            std::transform(p.begin(), p.end(), phi.begin(), [](double x) { return std::log(x); });
            out.measures.push_back(PotentialTable::from_symbol_values(std::move(phi)).lifted(spec.potential_depth));
        }
    }
    return out;
}

TargetBox::TargetBox(std::vector<double> lo, std::vector<double> hi, double radius)
    : lo_(std::move(lo)), hi_(std::move(hi)), radius_(radius) {
    if (lo_.size() != hi_.size() || lo_.empty()) throw ValidationError("target box bounds must have equal positive length");
    for (std::size_t m = 0; m < lo_.size(); ++m) {
        if (!(lo_[m] <= hi_[m])) throw ValidationError("target box requires lo <= hi in every coordinate");
    }
    if (!(radius_ >= 0.0)) throw ValidationError("dilation radius must be non-negative");
}

TargetBox TargetBox::singleton(std::vector<double> point) {
    std::vector<double> copy = point;
    return TargetBox(std::move(point), std::move(copy));
}

TargetBox TargetBox::interval(double lo, double hi) { return TargetBox({lo}, {hi}); }

bool TargetBox::is_singleton() const { return radius_ == 0.0 && lo_ == hi_; }

TargetBox TargetBox::dilate(double r) const {
    if (!(r >= 0.0)) throw ValidationError("dilation radius must be non-negative");
    return TargetBox(lo_, hi_, radius_ + r);
}

bool TargetBox::contains(std::span<const double> point) const {
    return contains(point, point);
}

bool TargetBox::contains(std::span<const double> lo_box, std::span<const double> hi_box) const {
    for (std::size_t m = 0; m < lo_.size(); ++m) {
        if (lo_box[m] < lo(m) - kContainSlack || hi_box[m] > hi(m) + kContainSlack) return false;
    }
    return true;
}

double TargetBox::distance(std::span<const double> point) const {
    double d = 0.0;
    for (std::size_t m = 0; m < lo_.size(); ++m) {
        d = std::max({d, lo(m) - point[m], point[m] - hi(m)});
    }
    return d;
}

ProductMeasureWeights::ProductMeasureWeights(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ValidationError("weights must be non-empty");
    double total = 0.0;
    for (double x : w_) {
        if (!(x >= 0.0)) throw ValidationError("weights must be non-negative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("weights must sum to 1");
}

MarkovWeights::MarkovWeights(std::vector<std::vector<double>> transition, std::optional<std::vector<double>> stationary)
    : p_(std::move(transition)) {
    const std::size_t n = p_.size();
    if (n == 0) throw ValidationError("transition matrix must be non-empty");
    for (const auto& row : p_) {
        if (row.size() != n) throw ValidationError("transition matrix must be square");
        double total = 0.0;
        for (double x : row) {
            if (!(x >= 0.0)) throw ValidationError("transition probabilities must be non-negative");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ValidationError("transition rows must sum to 1");
    }
    if (stationary) {
        pi_ = std::move(*stationary);
        if (pi_.size() != n) throw ValidationError("stationary vector has wrong length");
    } else {
        pi_ = solve_stationary(p_);
        if (pi_.empty()) pi_ = cesaro_stationary(p_);
    }
}

MarkovWeights MarkovWeights::from_edge_measure(const std::vector<std::vector<double>>& edge) {
    const std::size_t n = edge.size();
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    std::vector<double> pi(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pi[i] = std::accumulate(edge[i].begin(), edge[i].end(), 0.0);
        total += pi[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        pi[i] /= total;
        const double row = std::accumulate(edge[i].begin(), edge[i].end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            p[i][j] = row > 0.0 ? edge[i][j] / row : 1.0 / static_cast<double>(n);
        }
        // Renormalise away rounding so the row-sum check is exact enough.
        const double s = std::accumulate(p[i].begin(), p[i].end(), 0.0);
        for (double& x : p[i]) x /= s;
    }
    return MarkovWeights(std::move(p), std::move(pi));
}

double entropy(const ProductMeasureWeights& mu) {
    double h = 0.0;
    for (double w : mu.weights()) h -= xlogx(w);
    return h;
}

double entropy(const MarkovWeights& mu) {
    double h = 0.0;
    const auto& p = mu.transition();
    const auto& pi = mu.stationary();
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (double x : p[i]) h -= pi[i] * xlogx(x);
    }
    return h;
}

double integrate(const ProductMeasureWeights& mu, const PotentialTable& phi) {
    if (phi.alphabet_size() != mu.alphabet_size()) throw ValidationError("alphabet mismatch in integrate");
    const auto& w = mu.weights();
    if (phi.depth() == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * phi.at_index(i);
        return s;
    }
    double s = 0.0;
    WordOdometer odo(phi.depth(), phi.alphabet_size());
    std::size_t index = 0;
    do {
        double mass = 1.0;
        for (int sym : odo.current()) mass *= w[static_cast<std::size_t>(sym)];
        s += mass * phi.at_index(index++);
    } while (odo.next());
    return s;
}

double integrate(const MarkovWeights& mu, const PotentialTable& phi) {
    if (phi.alphabet_size() != mu.alphabet_size()) throw ValidationError("alphabet mismatch in integrate");
    const auto& p = mu.transition();
    const auto& pi = mu.stationary();
    const std::size_t n = pi.size();
    if (phi.depth() == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += pi[i] * phi.at_index(i);
        return s;
    }
    if (phi.depth() == 2) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) s += pi[i] * p[i][j] * phi.at_index(i * n + j);
        }
        return s;
    }
    throw DepthUnsupported("Markov integration is exact only for depth <= 2");
}

namespace {

template <class Measure>
std::vector<double> level_map_impl(const Measure& mu, const ModelPotentials& pots) {
    const double denom = integrate(mu, pots.scaling);
    std::vector<double> out;
    out.reserve(pots.measures.size());
    for (const auto& phi : pots.measures) out.push_back(integrate(mu, phi) / denom);
    return out;
}

}  // namespace

std::vector<double> level_map(const ProductMeasureWeights& mu, const ModelPotentials& pots) {
    return level_map_impl(mu, pots);
}

std::vector<double> level_map(const MarkovWeights& mu, const ModelPotentials& pots) {
    return level_map_impl(mu, pots);
}

}  // namespace mfspec
