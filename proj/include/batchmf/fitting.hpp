// Estimating the batch service-time law from measurements: pick which batch
// sizes to measure (D-optimal subset selection), fit each candidate form by
// ordinary least squares on the per-k mean service times, and keep the form
// with the smallest squared residual in the original (seconds) space.
#pragma once

#include "batchmf/speedup.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace batchmf {

struct ServiceSample {
    int k = 0;
    std::vector<double> samples; // measured service times, seconds
    double mean() const;
    void validate() const; // k >= 1, at least one sample, all positive
};

// Feature row of the regression design matrix at batch size k.
using FeatureMap = std::function<Eigen::VectorXd(int)>;

// Feature map (1, k) of the linear service-time form.
Eigen::VectorXd linear_features(int k);

// Chooses budget batch sizes from candidates maximizing log det of the
// information matrix sum of phi(k) phi(k)^T. Auto runs exhaustive search
// when the number of subsets is at most 1e5 and greedy coordinate exchange
// with 10 seeded random restarts beyond that; Exhaustive and Exchange force
// the respective path (used to benchmark the heuristic against the optimum).
// The result is sorted ascending and invariant under permutation of
// candidates; ties resolve to the lexicographically smallest sorted subset.
enum class DesignMethod { Auto, Exhaustive, Exchange };

std::vector<int> design_select(const std::vector<int>& candidates, int budget,
                               const FeatureMap& phi, std::uint64_t seed = 1,
                               DesignMethod method = DesignMethod::Auto);

struct FormFit {
    SpeedupForm form = SpeedupForm::Linear;
    double p1 = 0.0;
    double p2 = 0.0;
    double residual = 0.0; // sum of squared errors against per-k means, seconds^2
};

// Least-squares parameter estimate of one form from the mean service time at
// each design point. Linear and Log regress the means on (k, 1) / (ln k, 1);
// Power regresses ln(mean) on (ln k, 1) and reports the residual recomputed
// in the original space. Throws NumericError when the design is rank
// deficient for the form.
FormFit ols_fit(SpeedupForm form, const std::vector<ServiceSample>& samples);

struct FitResult {
    std::vector<int> design;      // batch sizes used, ascending
    std::vector<FormFit> fits;    // successful fits, in form order
    std::vector<std::string> failures; // messages of forms that failed
    SpeedupForm selected = SpeedupForm::Linear;
    SpeedupModel model;           // selected form and parameters
    bool constraint_ok = false;   // a < 1 / alpha < 1 / c < 1 and g positive
};

// Fits all three forms on the given samples and selects the one with the
// smallest residual; ties break in the order Linear, Power, Log. Throws
// NumericError if no form can be fit.
FitResult select_model(const std::vector<ServiceSample>& samples);

// Reads measurement rows "k,service_time_seconds" (optional header line),
// grouping repeated k into one sample set. Throws ConfigError on malformed
// rows or non-positive values.
std::vector<ServiceSample> read_service_samples(std::istream& in);

} // namespace batchmf
