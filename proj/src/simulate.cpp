#include "batchmf/simulate.hpp"
#include "batchmf/errors.hpp"

#include "transitions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <variant>

namespace batchmf {

namespace {

// (0,1] so log never sees zero.
inline double uniform01(std::mt19937_64& rng) {
    return (double((rng() >> 11)) + 1.0) * 0x1.0p-53;
}

struct PendingTransition {
    StateTuple next;
    double rate;
};

// Jobs returning to the thinking pool mark a service completion; x grows in
// no other transition. The second tuple slot distinguishes the type: type-1
// completions shrink the type-1 batch pool (slots 3+4), type-2 completions
// leave it unchanged.
inline void count_completions(Variant variant, const StateTuple& cur, const StateTuple& next,
                              std::vector<long long>& completions) {
    const int dx = next[0] - cur[0];
    if (dx <= 0)
        return;
    if (variant == Variant::Single) {
        completions[0] += dx;
        return;
    }
    const int pool_cur = cur[3] + cur[4];
    const int pool_next = next[3] + next[4];
    completions[pool_next < pool_cur ? 0 : 1] += dx;
}

template <class Params, class Enumerate>
SimulationResult run_events(Variant variant, int n_types, const Params& params,
                            Enumerate&& enumerate, const SimulationOptions& options) {
    if (options.events <= 0)
        throw ConfigError("event budget must be positive");
    if (!(options.warmup_fraction >= 0.0 && options.warmup_fraction < 1.0))
        throw ConfigError("warm-up fraction must lie in [0, 1)");

    constexpr int kBatches = 30;
    // 97.5% quantile of Student t with 29 degrees of freedom.
    constexpr double kT975 = 2.0452;

    std::mt19937_64 rng(options.seed);
    StateTuple state{0, 0, 0, 0, 0};
    state[0] = params.n;

    SimulationResult result;
    result.seed = options.seed;
    result.completions.assign(n_types, 0);

    const long long warm_events = llround(options.warmup_fraction * double(options.events));
    const long long meas_events = options.events - warm_events;
    std::array<double, kBatches> batch_time{};
    std::array<long long, kBatches> batch_jobs{};

    std::vector<PendingTransition> moves;
    moves.reserve(8);

    double t = 0.0;
    for (long long e = 0; e < options.events; ++e) {
        moves.clear();
        double total = 0.0;
        enumerate(state, params, [&](const StateTuple& next, double rate) {
            moves.push_back({next, rate});
            total += rate;
        });
        if (moves.empty())
            throw NumericError("simulation reached an absorbing state");

        const double dt = -std::log(uniform01(rng)) / total;
        double target = uniform01(rng) * total;
        size_t pick = 0;
        for (; pick + 1 < moves.size(); ++pick) {
            target -= moves[pick].rate;
            if (target <= 0.0)
                break;
        }
        const StateTuple next = moves[pick].next;

        if (e >= warm_events) {
            result.measured_time += dt;
            const long long before = result.completions[0] +
                                     (n_types > 1 ? result.completions[1] : 0);
            count_completions(variant, state, next, result.completions);
            const long long after = result.completions[0] +
                                    (n_types > 1 ? result.completions[1] : 0);
            const int b = std::min<long long>(kBatches - 1,
                                              (e - warm_events) * kBatches / meas_events);
            batch_time[b] += dt;
            batch_jobs[b] += after - before;
            if (options.record_occupancy)
                result.occupancy[state] += dt;
        }
        t += dt;
        state = next;
        if (e < options.trace_events)
            result.trace.push_back({t, e, state});
    }

    result.events = options.events;
    result.horizon = t;
    long long total_jobs = 0;
    for (long long c : result.completions)
        total_jobs += c;
    result.throughput = total_jobs / result.measured_time;

    if (meas_events >= kBatches) {
        double mean = 0.0;
        std::array<double, kBatches> rate{};
        for (int b = 0; b < kBatches; ++b) {
            rate[b] = batch_jobs[b] / batch_time[b];
            mean += rate[b];
        }
        mean /= kBatches;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b)
            var += (rate[b] - mean) * (rate[b] - mean);
        var /= kBatches - 1;
        result.ci_half_width = kT975 * std::sqrt(var / kBatches);
    } else {
        result.ci_half_width = std::numeric_limits<double>::quiet_NaN();
    }

    if (options.record_occupancy)
        for (auto& [s, frac] : result.occupancy)
            frac /= result.measured_time;
    return result;
}

} // namespace

SimulationResult simulate(const SystemConfig& config, const SimulationOptions& options) {
    return std::visit(
        [&](const auto& c) -> SimulationResult {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.validate();
                return run_events(Variant::Single, 1, make_params(c),
                                  [](const StateTuple& s, const SingleParams& p, auto&& fn) {
                                      for_each_transition_single(s, p, fn);
                                  },
                                  options);
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                c.validate();
                if (c.discipline == Discipline::Preemptive)
                    return run_events(Variant::TwoTypePreemptive, 2, make_params(c),
                                      [](const StateTuple& s, const TwoTypeParams& p, auto&& fn) {
                                          for_each_transition_two_preemptive(s, p, fn);
                                      },
                                      options);
                return run_events(Variant::TwoTypeNonPreemptive, 2, make_params(c),
                                  [](const StateTuple& s, const TwoTypeParams& p, auto&& fn) {
                                      for_each_transition_two_nonpreemptive(s, p, fn);
                                  },
                                  options);
            } else {
                throw ConfigError("simulation supports single-type and two-type models");
            }
        },
        config);
}

namespace {

template <class Params, class Enumerate>
ScaledPath run_path(const Params& params, Enumerate&& enumerate,
                    const std::vector<double>& times, std::uint64_t seed, int state_dim) {
    if (times.empty())
        throw ConfigError("sample times must be non-empty");
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
            throw ConfigError("sample times must be non-negative and strictly ascending");

    std::mt19937_64 rng(seed);
    StateTuple state{0, 0, 0, 0, 0};
    state[0] = params.n;
    const double inv_n = 1.0 / params.n;

    ScaledPath path;
    path.t.reserve(times.size());
    path.w.reserve(times.size());
    auto record = [&] {
        std::vector<double> w(state_dim);
        for (int i = 0; i < state_dim; ++i)
            w[i] = state[i] * inv_n;
        path.t.push_back(times[path.w.size()]);
        path.w.push_back(std::move(w));
    };

    std::vector<PendingTransition> moves;
    moves.reserve(8);
    double t = 0.0;
    size_t next_sample = 0;
    constexpr long long kEventCap = 200'000'000;

    for (long long e = 0; next_sample < times.size(); ++e) {
        if (e >= kEventCap)
            throw NumericError("scaled path exceeded the event cap before the last sample time");
        moves.clear();
        double total = 0.0;
        enumerate(state, params, [&](const StateTuple& next, double rate) {
            moves.push_back({next, rate});
            total += rate;
        });
        if (moves.empty())
            throw NumericError("simulation reached an absorbing state");

        const double dt = -std::log(uniform01(rng)) / total;
        while (next_sample < times.size() && times[next_sample] <= t + dt) {
            record();
            ++next_sample;
        }

        double target = uniform01(rng) * total;
        size_t pick = 0;
        for (; pick + 1 < moves.size(); ++pick) {
            target -= moves[pick].rate;
            if (target <= 0.0)
                break;
        }
        t += dt;
        state = moves[pick].next;
    }
    return path;
}

} // namespace

ScaledPath scaled_path(const SystemConfig& config, const std::vector<double>& times,
                       std::uint64_t seed) {
    return std::visit(
        [&](const auto& c) -> ScaledPath {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.validate();
                if (c.batching)
                    throw ConfigError("scaled paths require instantaneous batching");
                return run_path(make_params(c),
                                [](const StateTuple& s, const SingleParams& p, auto&& fn) {
                                    for_each_transition_single(s, p, fn);
                                },
                                times, seed, 3);
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                c.validate();
                if (c.batching1 || c.batching2)
                    throw ConfigError("scaled paths require instantaneous batching");
                if (c.discipline != Discipline::Preemptive)
                    throw ConfigError("scaled paths cover the preemptive two-type model");
                return run_path(make_params(c),
                                [](const StateTuple& s, const TwoTypeParams& p, auto&& fn) {
                                    for_each_transition_two_preemptive(s, p, fn);
                                },
                                times, seed, 4);
            } else {
                throw ConfigError("scaled paths support single-type and two-type models");
            }
        },
        config);
}

} // namespace batchmf
