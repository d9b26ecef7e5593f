#include "intensim/aux_indexes.hpp"

#include "intensim/error.hpp"

#include <cmath>

namespace intensim {

double sensi(double baseline, double candidate) {
    if (!std::isfinite(baseline) || !std::isfinite(candidate)) {
        throw InvalidArgument("sensi: scores must be finite");
    }
    if (baseline == 1.0) {
        throw UndefinedSensitivity("sensi is undefined when the baseline score equals 1");
    }
    return (baseline - candidate) / (1.0 - baseline);
}

SensiResult sensitivity(double baseline, double candidate) {
    return {baseline, candidate, sensi(baseline, candidate)};
}

int direc(const Image& x, const Image& y) {
    require_same_shape(x, y);
    // Pairwise differences summed in index order; differences are formed first
    // so swapping the arguments negates every term exactly.
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i] - y[i];
        const double t = sum + v;
        carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    const double total = sum + carry;
    const double tol = 1e-12 * static_cast<double>(x.size());
    if (total > tol) return 1;
    if (total < -tol) return -1;
    return 0;
}

}  // namespace intensim
