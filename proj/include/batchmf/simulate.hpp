// Event-driven simulation of the batch-service models and transient analysis
// of their exact chains. The simulator draws an exponential holding time at
// the total exit rate of the current state, then picks a transition with
// probability proportional to its rate, replaying the same event sequence for
// the same (config, seed). Transient laws come from uniformization of the
// generator, not from simulation.
#pragma once

#include "batchmf/config.hpp"
#include "batchmf/ctmc.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace batchmf {

struct SimulationOptions {
    std::uint64_t seed = 1;
    long long events = 1'000'000;
    // Leading fraction of events excluded from the throughput measurement.
    double warmup_fraction = 0.2;
    // Accumulate per-state time fractions after warm-up (small models only;
    // memory grows with the number of visited states).
    bool record_occupancy = false;
    // Keep the first trace_events transitions as (time, state after).
    long long trace_events = 0;
};

struct TraceRow {
    double t = 0.0;
    long long event = 0;
    StateTuple state{}; // state entered by this event
};

struct SimulationResult {
    long long events = 0;        // transitions executed
    double horizon = 0.0;        // total simulated time, warm-up included
    double measured_time = 0.0;  // time covered by the measurement window
    std::vector<long long> completions; // post-warm-up completed jobs, per type
    double throughput = 0.0;     // total completed jobs / measured_time
    double ci_half_width = 0.0;  // 95% half width from 30 batch means
    std::uint64_t seed = 0;
    // Post-warm-up fraction of time per state, when requested. Sums to 1.
    std::unordered_map<StateTuple, double, StateTupleHash> occupancy;
    std::vector<TraceRow> trace; // first trace_events transitions, when requested
};

SimulationResult simulate(const SystemConfig& config, const SimulationOptions& options = {});

// Scaled sample path w(t) = state(t)/n on the given time grid, for comparison
// against the deterministic drift limit. Requires instantaneous batching and
// ascending sample times; the path starts from the all-clients-active state.
// Each row holds the full scaled state tuple of the variant.
struct ScaledPath {
    std::vector<double> t;
    std::vector<std::vector<double>> w;
};

ScaledPath scaled_path(const SystemConfig& config, const std::vector<double>& times,
                       std::uint64_t seed);

// Transient law p_t of the chain at each requested time via uniformization:
// p_t = sum_j Poisson(Lambda*t, j) * p0 * P^j with P = I + Q/Lambda, the
// Poisson weights evaluated in log space and the series truncated once the
// accumulated mass reaches 1 - 1e-12. p0 defaults to a point mass on the
// all-clients-active state (index 0). tv(t) = 0.5 * || p_t - pi ||_1 against
// the stationary distribution of the model.
struct MixingCurve {
    std::vector<double> t;
    std::vector<double> tv;
};

MixingCurve mixing_curve(const MarkovModel& model, const std::vector<double>& times,
                         const Eigen::VectorXd* p0 = nullptr);

} // namespace batchmf
