#pragma once

#include "intensim/image.hpp"

namespace intensim {

/// Sensitivity gain of a candidate score over a baseline score:
/// (baseline - candidate) / (1 - baseline). Positive when the candidate drops
/// further below 1 than the baseline does.
///
/// Throws UndefinedSensitivity when baseline == 1.
double sensi(double baseline, double candidate);

struct SensiResult {
    double baseline_score = 0.0;
    double candidate_score = 0.0;
    double sensi = 0.0;
};

SensiResult sensitivity(double baseline, double candidate);

/// Sign of sum_i (x_i - y_i): +1 when x carries more total intensity, -1 when
/// y does, 0 when |sum| <= 1e-12 * N. Raw (unnormalized) images are accepted.
int direc(const Image& x, const Image& y);

}  // namespace intensim
