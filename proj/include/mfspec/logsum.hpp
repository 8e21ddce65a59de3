#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace mfspec {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Streaming log-sum-exp: keeps a running maximum and rescales the partial
/// sum whenever a larger term arrives.
class LogSumExp {
public:
    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term > max_) {
            sum_ = sum_ * std::exp(static_cast<long double>(max_ - log_term)) + 1.0L;
            max_ = log_term;
        } else {
            sum_ += std::exp(static_cast<long double>(log_term - max_));
        }
    }

    [[nodiscard]] double value() const {
        if (max_ == kNegInf) return kNegInf;
        return max_ + static_cast<double>(std::log(sum_));
    }

    [[nodiscard]] bool empty() const { return max_ == kNegInf; }

private:
    double max_ = kNegInf;
    long double sum_ = 0.0L;
};

/// Sum of exponentials against a fixed reference shift chosen by the caller
/// independently of which terms get admitted.
///
/// With a common shift, admitting a superset of terms in the same order can
/// never decrease the result (IEEE addition of non-negative values is
/// monotone), and admitting every term reproduces the unconstrained sum
/// bit for bit. Accumulation is in long double so terms far below the shift
/// survive; if everything still underflows the streaming sum takes over.
class ShiftedLogSum {
public:
    explicit ShiftedLogSum(double shift) : shift_(shift) {}

    void add(double log_term) {
        if (log_term == kNegInf) return;
        sum_ += std::exp(static_cast<long double>(log_term) - shift_);
        fallback_.add(log_term);
    }

    [[nodiscard]] double value() const {
        if (fallback_.empty()) return kNegInf;
        if (sum_ > 0.0L && std::isfinite(static_cast<double>(sum_))) {
            return static_cast<double>(static_cast<long double>(shift_) + std::log(sum_));
        }
        return fallback_.value();
    }

    [[nodiscard]] bool empty() const { return fallback_.empty(); }

private:
    double shift_;
    long double sum_ = 0.0L;
    LogSumExp fallback_;
};

inline double log_sum_exp(std::span<const double> xs) {
    LogSumExp acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace mfspec
