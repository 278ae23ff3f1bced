#include "batchmf/ctmc.hpp"
#include "batchmf/errors.hpp"
#include "transitions.hpp"

#include <deque>
#include <ostream>

namespace batchmf {

namespace {

// BFS from the initial state; indices are assigned in discovery order.
// transitions(state, fn) enumerates jumps, completion(state) gives the
// throughput integrand.
template <class TransitionFn, class CompletionFn>
MarkovModel build_by_reachability(Variant variant, int state_dim, int n, int m,
                                  const StateTuple& initial, size_t state_cap,
                                  TransitionFn&& transitions, CompletionFn&& completion) {
    MarkovModel model;
    model.variant = variant;
    model.state_dim = state_dim;
    model.n = n;
    model.m = m;

    std::deque<int> frontier;
    model.states.push_back(initial);
    model.index.emplace(initial, 0);
    frontier.push_back(0);

    std::vector<Eigen::Triplet<double>> entries;
    while (!frontier.empty()) {
        const int row = frontier.front();
        frontier.pop_front();
        const StateTuple s = model.states[row];
        double exit_rate = 0.0;
        transitions(s, [&](const StateTuple& next, double rate) {
            auto [it, inserted] = model.index.emplace(next, int(model.states.size()));
            if (inserted) {
                if (model.states.size() >= state_cap)
                    throw ResourceError("state space exceeds the cap of " +
                                        std::to_string(state_cap) +
                                        " states; raise the cap or use the mean-field path");
                model.states.push_back(next);
                frontier.push_back(it->second);
            }
            entries.emplace_back(row, it->second, rate);
            exit_rate += rate;
        });
        if (exit_rate > 0.0)
            entries.emplace_back(row, row, -exit_rate);
    }

    const int N = int(model.states.size());
    model.generator.resize(N, N);
    model.generator.setFromTriplets(entries.begin(), entries.end());

    model.completion_rate.resize(N);
    for (int i = 0; i < N; ++i)
        model.completion_rate[i] = completion(model.states[i]);
    return model;
}

} // namespace

MarkovModel build_single(const SingleTypeConfig& config, size_t state_cap) {
    config.validate();
    const SingleParams P = make_params(config);
    return build_by_reachability(
        Variant::Single, 3, config.n, config.m, StateTuple{config.n, 0, 0, 0, 0}, state_cap,
        [&](const StateTuple& s, auto&& fn) { for_each_transition_single(s, P, fn); },
        [&](const StateTuple& s) { return completion_rate_single(s, P); });
}

MarkovModel build_two_type_preemptive(const TwoTypeConfig& config, size_t state_cap) {
    config.validate();
    if (config.discipline != Discipline::Preemptive)
        throw ConfigError("build_two_type_preemptive called with a non-preemptive config");
    const TwoTypeParams P = make_params(config);
    return build_by_reachability(
        Variant::TwoTypePreemptive, 4, config.n, config.m, StateTuple{config.n, 0, 0, 0, 0},
        state_cap,
        [&](const StateTuple& s, auto&& fn) { for_each_transition_two_preemptive(s, P, fn); },
        [&](const StateTuple& s) { return completion_rate_two_preemptive(s, P); });
}

MarkovModel build_two_type_nonpreemptive(const TwoTypeConfig& config, size_t state_cap) {
    config.validate();
    if (config.discipline != Discipline::NonPreemptive)
        throw ConfigError("build_two_type_nonpreemptive called with a preemptive config");
    const TwoTypeParams P = make_params(config);
    return build_by_reachability(
        Variant::TwoTypeNonPreemptive, 5, config.n, config.m, StateTuple{config.n, 0, 0, 0, 0},
        state_cap,
        [&](const StateTuple& s, auto&& fn) { for_each_transition_two_nonpreemptive(s, P, fn); },
        [&](const StateTuple& s) { return completion_rate_two_nonpreemptive(s, P); });
}

MarkovModel build_two_type(const TwoTypeConfig& config, size_t state_cap) {
    return config.discipline == Discipline::Preemptive
               ? build_two_type_preemptive(config, state_cap)
               : build_two_type_nonpreemptive(config, state_cap);
}

void write_matrix_market(const MarkovModel& model, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << model.size() << " " << model.size() << " " << model.generator.nonZeros() << "\n";
    out.precision(17);
    for (int row = 0; row < model.generator.outerSize(); ++row)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, row);
             it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

} // namespace batchmf
