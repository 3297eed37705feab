#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace phaselab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp reduction: keeps the running maximum M and
// S = sum exp(x - M). Direct summation of exp(x) is forbidden throughout
// the library; the exponents scale with N.
struct StreamingLse {
    double max_term = kNegInf;
    double sum = 0.0;
    std::size_t count = 0;

    struct Added {
        double rescale;  // factor to apply to payload accumulators tied to this reduction
        double weight;   // exp(term - new max): weight of the just-added term
    };

    Added add(double term) {
        ++count;
        if (term == kNegInf) return {1.0, 0.0};
        if (term <= max_term) {
            const double w = std::exp(term - max_term);
            sum += w;
            return {1.0, w};
        }
        const double r = (max_term == kNegInf) ? 0.0 : std::exp(max_term - term);
        sum = sum * r + 1.0;
        max_term = term;
        return {r, 1.0};
    }

    bool empty() const { return max_term == kNegInf; }

    double value() const {
        if (empty()) return kNegInf;
        return max_term + std::log(sum);
    }
};

// log(exp(a) + exp(b)) with -inf handled.
inline double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

struct MeanStdError {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    double stddev = 0.0;     // sample standard deviation (n - 1 denominator)
    std::size_t n = 0;
};

inline MeanStdError mean_and_stderr(std::span<const double> values) {
    MeanStdError out;
    out.n = values.size();
    if (out.n == 0) return out;
    double s = 0.0;
    bool all_equal = true;
    for (double v : values) {
        s += v;
        all_equal = all_equal && v == values[0];
    }
    out.mean = s / static_cast<double>(out.n);
    if (out.n < 2) return out;
    if (all_equal) {  // degenerate sample: zero spread, no rounding residue
        out.mean = values[0];
        return out;
    }
    double ss = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        ss += d * d;
    }
    out.stddev = std::sqrt(ss / static_cast<double>(out.n - 1));
    out.std_error = out.stddev / std::sqrt(static_cast<double>(out.n));
    return out;
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// log k! for k = 0..n as cumulative sums; multinomial weights overflow
// naive arithmetic long before the combinatorial caps are reached.
inline std::vector<double> log_factorial_table(int n) {
    std::vector<double> lf(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 2; k <= n; ++k)
        lf[static_cast<std::size_t>(k)] = lf[static_cast<std::size_t>(k) - 1] + std::log(static_cast<double>(k));
    return lf;
}

inline double log_binomial(const std::vector<double>& lf, int n, int k) {
    return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(k)] -
           lf[static_cast<std::size_t>(n - k)];
}

}  // namespace phaselab
