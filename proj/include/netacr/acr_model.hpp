#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netacr/coeffs.hpp"

namespace netacr {

/// Transient communication rate E(delta_0) .. E(delta_K).
struct AcrSeries {
    std::vector<double> values;
    std::optional<double> stationary;
    std::string method;
    std::vector<std::string> diagnostics;
};

/// E(delta_k) = 1 - sum_{n=1}^{min(k,T)} P_n E(delta_{k-n}), E(delta_0) = 1.
AcrSeries recursive_acr(const CoeffSet& coeffs, int horizon);

struct StationaryAcr {
    double value = 0.0;
    bool marginal = false;  ///< the recursion's characteristic polynomial fails the Jury test
};

/// 1 / (1 + sum_n P_n).
StationaryAcr stationary_acr(const CoeffSet& coeffs);

struct RecursionLimit {
    double value = 0.0;
    int steps = 0;
    bool converged = false;
};

/// Iterates the recursion until |E_k - E_{k-1}| < 1e-10 holds for T consecutive steps (or 10^4 steps).
RecursionLimit recursion_limit(const CoeffSet& coeffs);

struct JuryReport {
    bool stable = false;
    std::vector<std::vector<double>> rows;  ///< first row a_0..a_N, then each derived row
    std::vector<int> failed_rules;          ///< sorted rule numbers in 1..4; empty iff stable
};

/// Jury test on D(z) = a_0 + a_1 z + ... + a_N z^N; true iff every root lies strictly inside the unit circle.
JuryReport jury_stable(std::span<const double> poly);

/// Coefficients (a_0..a_T) = (P_T, ..., P_1, 1) of the recursion's characteristic polynomial.
std::vector<double> characteristic_polynomial(const CoeffSet& coeffs);

/// T x T transition matrix: ones on the superdiagonal, last row (-P_T, ..., -P_1).
Eigen::MatrixXd companion_matrix(const CoeffSet& coeffs);

}  // namespace netacr
