// Exact continuous-time Markov chain analysis.
//
// Each model variant enumerates its reachable state space by breadth-first
// search from the all-clients-active initial state and assembles the sparse
// generator Q (rows are source states, rows sum to zero). Enumerating by
// reachability rather than by the constraint polytope means the chain is
// solved over exactly one communicating class.
//
// State tuples, by variant (unused trailing components are zero):
//   Single:               (x, y, zk)            x active clients, y jobs at
//                         the batcher, zk jobs in formed batches; z = zk/k
//                         batches at the servers, min(m, z) in service.
//   TwoTypePreemptive:    (x, y1, y2, z1k1)     z2k2 = n - x - y1 - y2 - z1k1
//                         implicit; v1 = min(m, z1) type-1 batches in
//                         service, v2 = min(max(0, m - z1), z2).
//   TwoTypeNonPreemptive: (x, y1, y2, u1k1, v1k1)  u1 type-1 batches queued,
//                         v1 in service; z2 implicit as above;
//                         v2 = min(m - v1, z2). Work conservation: u1 > 0
//                         implies v1 + v2 = m.
//
// Throughput is the stationary expectation of the per-state job completion
// rate: Single k*mu(k)*min(m,z); two-type k1*mu1*v1 + k2*mu2*v2.
#pragma once

#include "batchmf/config.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <unordered_map>
#include <vector>

namespace batchmf {

enum class Variant { Single, TwoTypePreemptive, TwoTypeNonPreemptive };

using StateTuple = std::array<int, 5>;

struct StateTupleHash {
    size_t operator()(const StateTuple& s) const {
        // FNV-1a over the five components.
        size_t h = 1469598103934665603ull;
        for (int v : s) {
            h ^= size_t(uint32_t(v));
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Hard ceiling on enumerated states unless the caller overrides it; beyond
// this the exact path is impractical and the mean-field module is the tool.
inline constexpr size_t kDefaultStateCap = 2'000'000;

struct MarkovModel {
    Variant variant = Variant::Single;
    int state_dim = 3; // meaningful components of each StateTuple
    int n = 0;
    int m = 0;
    std::vector<StateTuple> states;                          // BFS order
    std::unordered_map<StateTuple, int, StateTupleHash> index; // state -> row
    Eigen::SparseMatrix<double, Eigen::RowMajor> generator;  // Q
    std::vector<double> completion_rate; // per-state jobs/s; theta = pi . completion_rate

    size_t size() const { return states.size(); }
    // Row of a state, or -1 if it is not reachable.
    int index_of(const StateTuple& s) const {
        auto it = index.find(s);
        return it == index.end() ? -1 : it->second;
    }
};

struct StationaryResult {
    Eigen::VectorXd pi;
    double throughput = 0.0; // jobs/s
    // Rate-normalized residual ||pi Q||_inf / max_i |Q_ii|. Raw units would
    // scale with the largest rate in the model (1e8 and beyond for realistic
    // parameters), so the tolerance contract is on this relative quantity.
    double residual = 0.0;
};

MarkovModel build_single(const SingleTypeConfig& config, size_t state_cap = kDefaultStateCap);
MarkovModel build_two_type_preemptive(const TwoTypeConfig& config, size_t state_cap = kDefaultStateCap);
MarkovModel build_two_type_nonpreemptive(const TwoTypeConfig& config, size_t state_cap = kDefaultStateCap);
// Dispatches on config.discipline.
MarkovModel build_two_type(const TwoTypeConfig& config, size_t state_cap = kDefaultStateCap);

// Solves pi Q = 0, sum(pi) = 1 by replacing one balance equation with the
// normalization constraint. Auto picks dense LU below 2,000 states and
// sparse LU above, each with one step of iterative refinement; Dense and
// Sparse force the respective factorization (used to cross-check the two
// paths against each other). Throws NumericError (carrying the residual) if
// the factorization fails or the residual is out of tolerance.
enum class SolveMethod { Auto, Dense, Sparse };

StationaryResult solve_stationary(const MarkovModel& model,
                                  SolveMethod method = SolveMethod::Auto);

// True iff the transition graph (edges where rate > 0) is one strongly
// connected component: every state reaches state 0 and is reached from it.
bool check_irreducible(const MarkovModel& model);

struct SweepRow {
    int k = 0;
    double theta = 0.0;
    size_t states = 0;
    double residual = 0.0;
};

struct OptimizeOptions {
    size_t state_cap = kDefaultStateCap;
    // Skip k whose throughput upper bound min(k mu(k) m, n lambda mu(k) /
    // (lambda + mu(k))) falls strictly below an already-computed throughput.
    // The bound holds for any batching law, so pruning never changes the
    // argmax; pruned k simply have no row in the table. Single-type only.
    bool prune_with_bound = false;
    int jobs = 1; // parallel build+solve workers across k
};

struct OptimizeResult {
    int k_star = 1;
    double theta_star = 0.0;
    std::vector<SweepRow> table; // ascending k, evaluated candidates only
};

// Evaluates theta(k) for k = 1..max_k by build + solve and returns the
// argmax; ties break toward smaller k. Two-type configs sweep a uniform
// batch size k1 = k2 = k. Build/solve errors are rethrown annotated with the
// failing k.
OptimizeResult optimize_batch_exact(const SystemConfig& base, int max_k,
                                    const OptimizeOptions& options = {});

// Q in MatrixMarket coordinate format (1-based, general real).
void write_matrix_market(const MarkovModel& model, std::ostream& out);

} // namespace batchmf
