// Fluid-limit analysis: the deterministic ODE limits of the scaled chains as
// n grows with m = alpha*n servers, their closed-form fixed points, a
// stability classification for the two-type system, and the O(1) asymptotic
// batch-size optimizer. Batching is instantaneous in this regime; a rated
// batching law in the input is ignored (the caller may warn).
//
// Coordinates per variant:
//   single:    w = fraction of active clients.
//   two-type:  w1 = fraction of active clients, w2 = fraction of clients
//              with a type-1 job in the system.
//   multi:     w[i][j] = fraction of type-(i+1) jobs at or awaiting service
//              level j+1; the active fraction is 1 - sum(w). Note this
//              counts jobs, not active clients, so the single-type reduction
//              of the multi-type drift fixes 1 - w*, not w*.
#pragma once

#include "batchmf/config.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace batchmf {

struct MeanFieldSolution {
    std::vector<double> w;               // fixed point w*
    double alpha = 0.0;                  // m/n
    double throughput_per_client = 0.0;  // lambda * w1*
    double throughput_total = 0.0;       // n * lambda * w1*; 0 when n unknown
};

// w* = min( mu(k)/(lambda+mu(k)), alpha*k*mu(k)/lambda ). The first branch is
// client-bound (every batch finds a server), the second server-bound.
MeanFieldSolution fixed_point_single(double lambda, const SpeedupModel& service, int k,
                                     double alpha, int n = 0);

// Jensen upper bound on stationary throughput at any n:
// min( k*mu(k)*m, n*lambda*mu(k)/(lambda+mu(k)) ), jobs/s. Asymptotically
// tight: it equals n*lambda*w1* of the fixed point.
double throughput_bound(int n, int m, int k, double lambda, const SpeedupModel& service);

// f(w) = k*mu(k)*min(alpha, (1-w)/k) - lambda*w.
double drift_single(double w, double lambda, const SpeedupModel& service, int k, double alpha);

// Two-type rates with batch sizes fixed; alpha = m/n.
struct TwoTypeRates {
    double lambda = 1.0;
    double p = 0.5;
    int k1 = 1;
    int k2 = 1;
    double mu1 = 1.0; // mu1(k1)
    double mu2 = 1.0; // mu2(k2)
    double alpha = 1.0;
};

// Extracts rates from a config (mu_i evaluated at k_i, alpha = m/n). Rated
// batching laws are ignored here; *ignored_batching reports whether any were
// present.
TwoTypeRates make_two_type_rates(const TwoTypeConfig& config, bool* ignored_batching = nullptr);

// w1* = min( mu1*mu2 / (mu1*lambda*(1-p) + mu2*lambda*p + mu1*mu2),
//            k1*k2*mu1*mu2*alpha / (k1*mu1*lambda*(1-p) + k2*mu2*lambda*p) ),
// w2* = lambda*p*w1*/mu1.
MeanFieldSolution fixed_point_two_type(const TwoTypeRates& rates, int n = 0);

// f1 = -lambda*w1 + k1*mu1*min(alpha, w2/k1)
//      + k2*mu2*min(max(0, alpha - w2/k1), (1 - w1 - w2)/k2)
// f2 = lambda*p*w1 - k1*mu1*min(alpha, w2/k1)
std::array<double, 2> drift_two_type(double w1, double w2, const TwoTypeRates& rates);

// Stability classification of the two-type ODE in the transformed
// coordinates z1 = w1 + w2, z2 = w2. The attractor is the smaller of two
// candidate equilibria on the invariant line L2: z2 = eta*z1; L1 is the
// switching line z2 = (k1/k2)*(k2*alpha - 1 + z1) where the type-2 service
// term changes branch.
struct TwoTypeStability {
    int case_label = 0;   // 1: k1a>=1,k2a>=1  2: k1a>=1,k2a<1  3: both<1  4: k1a<1,k2a>=1
    double z11 = 0.0;     // client-bound candidate for z1
    double z12 = 0.0;     // server-bound candidate for z1
    double eta = 0.0;     // lambda*p / (mu1 + lambda*p)
    double z10 = 0.0;     // abscissa where L1 meets L2
    double z1_star = 0.0; // selected attractor, min(z11, z12)
    double z2_star = 0.0; // eta * z1_star
    std::array<double, 2> w_star{0.0, 0.0}; // inverse transform (w1, w2)
    bool degenerate = false; // a candidate denominator vanished
};

TwoTypeStability classify_two_type(const TwoTypeRates& rates);

// Multi-type drift, r types x d levels; see the header comment for the
// meaning of w. out[i][j] = mu[i][j] * min(w[i][j], k_i * max(0, alpha_j -
// sum_{l<i} w[l][j]/k_l)); level-1 inflow is lambda*p_i*(1 - sum(w)).
std::vector<std::vector<double>> drift_multi(const std::vector<std::vector<double>>& w,
                                             const MultiTypeConfig& config);

// Closed-form equilibrium for d = 1, uniform k: w* = A^{-1}c_a when
// <A^{-1}c_a, 1> < k*alpha, else B^{-1}c_b, with A_ij = -lambda*p_i -
// delta_ij*mu_i, B = A + mu_r e_r 1^T, c_a = -lambda*p, c_b = c_a +
// k*alpha*mu_r e_r. Both A and B must be nonsingular with spectra strictly
// in the left half plane.
struct MultiTypeEquilibrium {
    Eigen::MatrixXd A, B;
    Eigen::VectorXd c_a, c_b;
    double switch_sum = 0.0;    // <A^{-1}c_a, 1>
    double k_alpha = 0.0;
    bool client_bound = false;  // switch_sum < k_alpha, selecting A^{-1}c_a
    Eigen::VectorXd w_star;
    double max_re_eig_A = 0.0;
    double max_re_eig_B = 0.0;
    // Closed sums from the rates alone, for cross-checking the solves:
    // S/(1+S) and (S - k*alpha)/S with S = sum(lambda*p_i/mu_i).
    double sum_a_closed = 0.0;
    double sum_b_closed = 0.0;
};

MultiTypeEquilibrium multi_type_fixed_point(const MultiTypeConfig& config);

// Classic fixed-step 4th-order integration of dw/dt = f(w).
using DriftFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> w; // one row per time point
    bool converged = false;             // target reached and held
    double convergence_time = 0.0;
};

struct IntegrateOptions {
    double step = 0.0;          // 0: choose 0.005 / rate_scale
    double rate_scale = 1.0;    // Lipschitz-scale of f, used when step == 0
    std::optional<std::vector<double>> target; // stop once near this point
    double target_tol = 1e-8;   // sup-norm tolerance for "near"
    int sustain_steps = 10;     // consecutive steps within tol before stopping
    bool clamp_to_unit = true;  // clamp 1e-12 roundoff excursions into [0,1]
};

// Integrates over [0, T]. Throws NumericError if any component leaves
// [-1e-6, 1+1e-6] (step instability).
Trajectory integrate(const DriftFn& f, std::vector<double> w0, double T,
                     const IntegrateOptions& options = {});

// Maximizes w*(k) over integer k in [1, K]. When mu(k) is non-increasing and
// k*mu(k) non-decreasing on the grid (checked numerically), solves the
// branch-crossing equation mu(k)/(lambda+mu(k)) = alpha*k*mu(k)/lambda for
// real k (quadratic for the linear form, bisection otherwise) and compares
// floor/ceil; otherwise evaluates the whole grid. Ties break to smaller k.
struct AsymptoticOptimum {
    int k_star = 1;
    double w_star = 0.0;
    double throughput_per_client = 0.0; // lambda * w*(k*)
    bool used_crossing = false;         // closed-form path taken
    double k_real = 0.0;                // real crossing point when used
};

AsymptoticOptimum optimal_k_asymptotic(double lambda, const SpeedupModel& service, double alpha,
                                       int K);

// Best uniform batch size for the two-type system: evaluates the closed-form
// fixed point at k1 = k2 = k for each k in [1, K] (K must not exceed n) and
// keeps the k with the largest fraction of busy clients. Ties go to the
// smaller k. used_crossing stays false; w_star holds w1.
AsymptoticOptimum optimal_k_two_type_uniform(const TwoTypeConfig& base, int K);

// Exhaustive search over (k1, k2) in [1, K]^2 with the same objective.
struct TwoTypeJointOptimum {
    int k1_star = 1;
    int k2_star = 1;
    double w1_star = 0.0;
    double throughput_per_client = 0.0;
};

TwoTypeJointOptimum optimal_k_two_type_joint(const TwoTypeConfig& base, int K);

} // namespace batchmf
