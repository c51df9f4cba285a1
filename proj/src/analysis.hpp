// Copyright 2025 The swaplru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SWAPLRU_ANALYSIS_HPP
#define SWAPLRU_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace slru {

struct RatePoint {
    int d = 0;
    double p = 0.0;
    double re = 0.0;
    double eta = 0.0;
    std::string decoder;
    std::string variant;
    int64_t shots = 0;
    double failures = 0.0;  // may be a mean over observables

    double p_l() const { return shots > 0 ? failures / static_cast<double>(shots) : 0.0; }
    double stderr_() const;
    /// Merges another batch of the same cell.
    RatePoint& merge(const RatePoint& o);
};

/// 95% upper bound for a zero-failure point (rule of three).
double rule_of_three(int64_t shots);

struct FitResult {
    bool ok = false;
    std::string message;
    // Threshold fit.
    double p_th = 0.0, p_th_err = 0.0;
    double nu = 0.0, nu_err = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;
    double chi2 = 0.0;
    // Distance fit.
    double slope = 0.0, slope_err = 0.0;
    double intercept = 0.0;
    int used = 0;
    std::vector<std::string> warnings;

    std::string to_text() const;
};

/// Fits p_L = A + B x + C x^2 with x = (p - p_th) d^(1/nu).
FitResult fit_threshold(const std::vector<RatePoint>& points);

/// Ordinary least squares of log p_L on log (p / p_ref).
FitResult fit_distance(const std::vector<RatePoint>& points, double p_ref);

/// p values equally spaced in log scale over [10^lo, 10^hi] * p_ref.
std::vector<double> log_window(double p_ref, int count, double lo = -1.0, double hi = -0.6);

}  // namespace slru

#endif
