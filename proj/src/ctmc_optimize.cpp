#include "batchmf/ctmc.hpp"
#include "batchmf/errors.hpp"
#include "batchmf/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <variant>

namespace batchmf {

namespace {

// Rethrows build/solve failures with the batch size stitched into the
// message so a sweep failure names its candidate.
template <typename Fn>
SweepRow eval_annotated(int k, Fn&& fn) {
    try {
        return fn(k);
    } catch (const ConfigError& e) {
        throw ConfigError("k=" + std::to_string(k) + ": " + e.what());
    } catch (const ResourceError& e) {
        throw ResourceError("k=" + std::to_string(k) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("k=" + std::to_string(k) + ": " + e.what());
    }
}

// Runs fn(k) for every k in ks. Results land at the position of k in ks, so
// the output is identical for any worker count.
template <typename Fn>
std::vector<SweepRow> run_candidates(const std::vector<int>& ks, int jobs, Fn&& fn) {
    std::vector<SweepRow> rows(ks.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < ks.size(); ++i)
            rows[i] = eval_annotated(ks[i], fn);
        return rows;
    }

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const size_t i = next.fetch_add(1);
            if (i >= ks.size())
                return;
            try {
                rows[i] = eval_annotated(ks[i], fn);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<size_t>(jobs, ks.size());
    pool.reserve(count);
    for (int t = 0; t < count; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
    return rows;
}

} // namespace

OptimizeResult optimize_batch_exact(const SystemConfig& base, int max_k,
                                    const OptimizeOptions& options) {
    if (std::holds_alternative<MultiTypeConfig>(base))
        throw ConfigError("exact optimization handles single-type and two-type models only");
    const int n = std::holds_alternative<SingleTypeConfig>(base)
                      ? std::get<SingleTypeConfig>(base).n
                      : std::get<TwoTypeConfig>(base).n;
    if (max_k < 1 || max_k > n)
        throw ConfigError("max_k must lie in [1, n], got " + std::to_string(max_k));

    auto evaluate = [&](int k) -> SweepRow {
        MarkovModel model;
        if (const auto* s = std::get_if<SingleTypeConfig>(&base)) {
            SingleTypeConfig c = *s;
            c.k = k;
            model = build_single(c, options.state_cap);
        } else {
            TwoTypeConfig c = std::get<TwoTypeConfig>(base);
            c.k1 = c.k2 = k;
            model = build_two_type(c, options.state_cap);
        }
        const StationaryResult st = solve_stationary(model);
        return {k, st.throughput, model.size(), st.residual};
    };

    std::vector<SweepRow> rows;
    const auto* single = std::get_if<SingleTypeConfig>(&base);
    if (options.prune_with_bound && single) {
        // Phase 1: solve the candidate with the largest throughput bound.
        // Every k whose bound falls strictly below that throughput cannot be
        // the argmax and is skipped; bounds tied with it are kept.
        std::vector<double> bound(max_k + 1);
        int k0 = 1;
        for (int k = 1; k <= max_k; ++k) {
            bound[k] = throughput_bound(single->n, single->m, k, single->lambda,
                                        single->service);
            if (bound[k] > bound[k0])
                k0 = k;
        }
        const SweepRow first = eval_annotated(k0, evaluate);

        std::vector<int> survivors;
        for (int k = 1; k <= max_k; ++k)
            if (k != k0 && bound[k] >= first.theta)
                survivors.push_back(k);

        rows = run_candidates(survivors, options.jobs, evaluate);
        rows.push_back(first);
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.k < b.k; });
    } else {
        std::vector<int> ks(max_k);
        for (int k = 1; k <= max_k; ++k)
            ks[k - 1] = k;
        rows = run_candidates(ks, options.jobs, evaluate);
    }

    OptimizeResult result;
    result.table = std::move(rows);
    result.k_star = result.table.front().k;
    result.theta_star = result.table.front().theta;
    for (const SweepRow& row : result.table) {
        if (row.theta > result.theta_star) {
            result.k_star = row.k;
            result.theta_star = row.theta;
        }
    }
    return result;
}

} // namespace batchmf
