// Parametric batch-service-time laws. A SpeedupModel gives the time g(k) to
// serve (or form) a batch of k jobs; the corresponding rate is mu(k) = 1/g(k)
// batches per second. Three forms are supported:
//
//   Linear: g(k) = a*k + b
//   Power:  g(k) = gamma * k^alpha
//   Log:    g(k) = c * ln(k) + d
//
// Batching is only worthwhile when g is sub-additive (serving k1+k2 jobs in
// one batch is no slower than serving them as two batches), so the laws carry
// constraints (Linear a < 1, Power alpha < 1, Log c < 1) and an exhaustive
// sub-additivity check over a finite domain.
#pragma once

#include <string>

namespace batchmf {

enum class SpeedupForm { Linear, Power, Log };

struct SpeedupModel {
    SpeedupForm form = SpeedupForm::Linear;
    // Parameter slots by form: Linear (a, b), Power (gamma, alpha), Log (c, d).
    double p1 = 0.0;
    double p2 = 0.0;

    // g(k), seconds per batch of size k. Throws ConfigError for k < 1 or a
    // non-positive result.
    double eval(int k) const;

    // mu(k) = 1/g(k), batches per second.
    double rate(int k) const;

    // Checks the form constraint (a < 1 / alpha < 1 / c < 1) and positivity
    // of g over [1, max_k]. Throws ConfigError describing the violation.
    void validate(int max_k) const;

    std::string describe() const;

    bool operator==(const SpeedupModel&) const = default;
};

// Result of the exhaustive sub-additivity scan: ok, or the first violating
// pair (smallest k1, then smallest k2).
struct SubadditivityReport {
    bool ok = true;
    int k1 = 0;
    int k2 = 0;
};

// True iff g(k1+k2) <= g(k1)+g(k2) for all 1 <= k1 <= k2 with k1+k2 <= max_k.
SubadditivityReport check_subadditive(const SpeedupModel& model, int max_k);

} // namespace batchmf
