// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL] line
// followed by the measured numbers; the exit code is the number of failures.
// These runs are deliberately heavier than the unit suite.
#include "batchmf/config.hpp"
#include "batchmf/ctmc.hpp"
#include "batchmf/errors.hpp"
#include "batchmf/fitting.hpp"
#include "batchmf/meanfield.hpp"
#include "batchmf/simulate.hpp"
#include "batchmf/speedup.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace batchmf;

namespace {

SpeedupModel linear(double a, double b) { return {SpeedupForm::Linear, a, b}; }

// Service and batching laws used throughout the n=1000-scale checks:
// 1/mu(k) = 3.6e-4 + 5.2e-5 k and 1/M(k) = 7.2e-6 + 1e-6 k, lambda = 5e3.
const double kLambda = 5000.0;
const SpeedupModel kService = linear(5.2e-5, 3.6e-4);
const SpeedupModel kBatching = linear(1e-6, 7.2e-6);

// Two-type variant: type 1 is five times faster, 20% of traffic.
const SpeedupModel kService1 = linear(1.06e-4, 1.08e-4);
const SpeedupModel kService2 = linear(5.3e-4, 5.4e-4);

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Collects requirements for one criterion; failures are listed in the detail
// block under the verdict line.
class Gate {
  public:
    explicit Gate(std::ostringstream& out) : out_(out) {}
    bool require(bool cond, const std::string& what) {
        if (!cond) {
            ok_ = false;
            out_ << "  unmet: " << what << "\n";
        }
        return cond;
    }
    void note(const std::string& line) { out_ << "  " << line << "\n"; }
    bool ok() const { return ok_; }

  private:
    std::ostringstream& out_;
    bool ok_ = true;
};

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Reference stationary solve: dense elimination of Q^T with the last row
// replaced by the normalization constraint (the library pins the first row).
Eigen::VectorXd dense_reference_pi(const MarkovModel& model) {
    const int N = int(model.size());
    Eigen::MatrixXd A = Eigen::MatrixXd(model.generator).transpose();
    A.row(N - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    b(N - 1) = 1.0;
    return Eigen::FullPivLU<Eigen::MatrixXd>(A).solve(b);
}

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 0.5 * (a - b).cwiseAbs().sum();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// ---- 1: random small chains, sparse factorization against dense elimination ----

bool criterion_1(std::ostringstream& out) {
    Gate gate(out);
    std::mt19937_64 rng(101);
    const auto start = std::chrono::steady_clock::now();

    double worst_tv = 0.0;
    int singles = 0, twos = 0;
    while (singles < 12) {
        SingleTypeConfig c;
        c.n = uniform_int(rng, 2, 24);
        c.k = uniform_int(rng, 1, std::min(c.n, 6));
        c.m = uniform_int(rng, 1, 5);
        c.lambda = uniform(rng, 0.2, 5.0);
        c.service = linear(uniform(rng, 0.05, 0.5), uniform(rng, 0.1, 1.0));
        if (singles % 2 == 0)
            c.batching = linear(uniform(rng, 0.02, 0.3), uniform(rng, 0.05, 0.5));
        const MarkovModel model = build_single(c);
        if (model.size() > 500)
            continue;
        const StationaryResult st = solve_stationary(model, SolveMethod::Sparse);
        worst_tv = std::max(worst_tv, tv_distance(st.pi, dense_reference_pi(model)));
        ++singles;
    }
    while (twos < 12) {
        TwoTypeConfig c;
        c.k1 = uniform_int(rng, 1, 3);
        c.k2 = uniform_int(rng, 1, 3);
        // Keep the population above the dead-end threshold n <= k1 + k2 - 2.
        c.n = uniform_int(rng, std::max(2, c.k1 + c.k2 - 1), 10);
        c.m = uniform_int(rng, 1, 3);
        c.lambda = uniform(rng, 0.2, 5.0);
        c.p = uniform(rng, 0.1, 0.9);
        c.service1 = linear(uniform(rng, 0.05, 0.5), uniform(rng, 0.1, 1.0));
        c.service2 = linear(uniform(rng, 0.05, 0.5), uniform(rng, 0.1, 1.0));
        if (twos % 2 == 0) {
            c.batching1 = linear(uniform(rng, 0.02, 0.3), uniform(rng, 0.05, 0.5));
            c.batching2 = linear(uniform(rng, 0.02, 0.3), uniform(rng, 0.05, 0.5));
        }
        c.discipline = twos % 2 == 0 ? Discipline::Preemptive : Discipline::NonPreemptive;
        const MarkovModel model = build_two_type(c);
        if (model.size() > 500)
            continue;
        const StationaryResult st = solve_stationary(model, SolveMethod::Sparse);
        worst_tv = std::max(worst_tv, tv_distance(st.pi, dense_reference_pi(model)));
        ++twos;
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    gate.note("24 configs, worst tv " + fmt(worst_tv) + ", elapsed " + fmt(elapsed) + " s");
    gate.require(worst_tv < 1e-10, "worst tv " + fmt(worst_tv) + " >= 1e-10");
    gate.require(elapsed < 10.0, "elapsed " + fmt(elapsed) + " s >= 10 s");
    return gate.ok();
}

// ---- 2: single circulating client against the renewal closed form --------------

bool criterion_2(std::ostringstream& out) {
    Gate gate(out);
    SingleTypeConfig c;
    c.n = 1;
    c.m = 1;
    c.k = 1;
    c.lambda = 1.0;
    c.service = linear(0.0, 1.0);
    c.batching = linear(0.0, 1.0);
    const double theta_unit = solve_stationary(build_single(c)).throughput;
    gate.note("unit rates: theta " + fmt(theta_unit) + " vs 1/3");
    gate.require(std::abs(theta_unit - 1.0 / 3.0) <= 1e-12,
                 "closed form missed at unit rates");

    SingleTypeConfig c2 = c;
    c2.lambda = 2.0;
    c2.batching = linear(0.0, 0.25); // M = 4
    c2.service = linear(0.0, 0.2);   // mu = 5
    const double want = 1.0 / (1.0 / 2.0 + 1.0 / 4.0 + 1.0 / 5.0);
    const double theta2 = solve_stationary(build_single(c2)).throughput;
    gate.require(rel_diff(theta2, want) <= 1e-12, "closed form missed at mixed rates");

    SimulationOptions opt;
    opt.events = 1'000'000;
    const SimulationResult sim = simulate(SystemConfig{c}, opt);
    const double sim_err = rel_diff(sim.throughput, 1.0 / 3.0);
    gate.note("simulated " + fmt(sim.throughput) + ", relative error " + fmt(sim_err));
    gate.require(sim_err <= 0.02, "simulation off by " + fmt(sim_err) + " > 2%");
    return gate.ok();
}

// ---- 3: exact vs drift-limit batch-size optimum at n = 1000 --------------------

bool criterion_3(std::ostringstream& out) {
    Gate gate(out);
    const int n = 1000;
    const struct {
        int m, kmax;
    } setups[] = {{4, 330}, {8, 220}, {16, 130}};

    for (const auto& setup : setups) {
        SingleTypeConfig c;
        c.n = n;
        c.m = setup.m;
        c.lambda = kLambda;
        c.k = 1;
        c.service = kService;
        c.batching = kBatching;

        OptimizeOptions opts;
        opts.prune_with_bound = true;
        const OptimizeResult exact = optimize_batch_exact(SystemConfig{c}, setup.kmax, opts);

        const double alpha = double(setup.m) / n;
        const AsymptoticOptimum mf =
            optimal_k_asymptotic(kLambda, kService, alpha, setup.kmax);
        const double theta_mf = n * kLambda * mf.w_star;
        const int k_gap = std::abs(mf.k_star - exact.k_star);
        const double theta_gap =
            std::abs(theta_mf - exact.theta_star) / exact.theta_star;

        gate.note("m=" + std::to_string(setup.m) + ": exact k* " +
                  std::to_string(exact.k_star) + " theta " + fmt(exact.theta_star) +
                  "; drift-limit k* " + std::to_string(mf.k_star) + " theta " +
                  fmt(theta_mf) + "; k gap " + std::to_string(k_gap) +
                  ", theta gap " + fmt(100.0 * theta_gap) + "%");
        gate.require(k_gap <= 2, "m=" + std::to_string(setup.m) + " argmax gap " +
                                     std::to_string(k_gap) + " > 2");
        gate.require(theta_gap <= 0.03, "m=" + std::to_string(setup.m) +
                                            " throughput gap " +
                                            fmt(100.0 * theta_gap) + "% > 3%");
    }
    return gate.ok();
}

// ---- 4: exponential contraction of single-type trajectories --------------------

bool criterion_4(std::ostringstream& out) {
    Gate gate(out);
    std::mt19937_64 rng(404);
    double worst_excess = -1.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double lambda = uniform(rng, 0.5, 3.0);
        const SpeedupModel svc = linear(uniform(rng, 0.05, 0.4), uniform(rng, 0.1, 1.0));
        const int k = uniform_int(rng, 1, 6);
        const double alpha = uniform(rng, 0.05, 1.5);
        const double w0 = uniform(rng, 0.0, 1.0);
        const double w_star = fixed_point_single(lambda, svc, k, alpha).w[0];

        DriftFn f = [&](const std::vector<double>& w) {
            return std::vector<double>{drift_single(w[0], lambda, svc, k, alpha)};
        };
        IntegrateOptions opts;
        opts.rate_scale = lambda + k * svc.rate(k) + 1.0;
        const Trajectory traj = integrate(f, {w0}, 14.0 / lambda, opts);

        const double phi0 = std::abs(w0 - w_star);
        for (size_t i = 0; i < traj.t.size(); ++i) {
            const double phi = std::abs(traj.w[i][0] - w_star);
            const double bound = phi0 * std::exp(-lambda * traj.t[i]) + 1e-6;
            worst_excess = std::max(worst_excess, phi - bound);
        }
    }
    gate.note("50 starts, worst bound excess " + fmt(worst_excess));
    gate.require(worst_excess <= 0.0, "contraction bound violated by " + fmt(worst_excess));
    return gate.ok();
}

// ---- 5: two-type global attraction and fixed-point residuals -------------------

TwoTypeRates random_two_type(std::mt19937_64& rng, bool server_heavy) {
    TwoTypeRates r;
    r.lambda = uniform(rng, 0.5, 3.0);
    r.p = uniform(rng, 0.05, 0.95);
    r.k1 = uniform_int(rng, 1, 6);
    r.k2 = uniform_int(rng, 1, 6);
    r.mu1 = uniform(rng, 0.3, 3.3);
    r.mu2 = uniform(rng, 0.3, 3.3);
    r.alpha = server_heavy ? uniform(rng, 0.4, 1.4) : uniform(rng, 0.01, 0.25);
    return r;
}

bool criterion_5(std::ostringstream& out) {
    Gate gate(out);
    std::mt19937_64 rng(505);

    double worst_end = 0.0;
    int converged = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const TwoTypeRates r = random_two_type(rng, trial % 2 == 0);
        const MeanFieldSolution sol = fixed_point_two_type(r);

        // Random start on the simplex w1 + w2 <= 1.
        double w1 = uniform(rng, 0.0, 1.0);
        double w2 = uniform(rng, 0.0, 1.0 - w1);

        DriftFn f = [&](const std::vector<double>& w) {
            const auto d = drift_two_type(w[0], w[1], r);
            return std::vector<double>{d[0], d[1]};
        };
        IntegrateOptions opts;
        opts.rate_scale = r.lambda + r.mu1 + r.mu2;
        opts.target = sol.w;
        const Trajectory traj = integrate(f, {w1, w2}, 300.0, opts);
        if (traj.converged)
            ++converged;
        const double end = std::max(std::abs(traj.w.back()[0] - sol.w[0]),
                                    std::abs(traj.w.back()[1] - sol.w[1]));
        worst_end = std::max(worst_end, end);
    }
    gate.note("100 starts: " + std::to_string(converged) +
              " hit the target band, worst terminal gap " + fmt(worst_end));
    gate.require(worst_end <= 1e-6, "terminal gap " + fmt(worst_end) + " > 1e-6");

    double worst_res = 0.0;
    int client_branch = 0, server_branch = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const TwoTypeRates r = random_two_type(rng, trial % 2 == 0);
        const MeanFieldSolution sol = fixed_point_two_type(r);
        const auto d = drift_two_type(sol.w[0], sol.w[1], r);
        worst_res = std::max(worst_res, std::max(std::abs(d[0]), std::abs(d[1])));

        const double client =
            r.mu1 * r.mu2 /
            (r.mu1 * r.lambda * (1.0 - r.p) + r.mu2 * r.lambda * r.p + r.mu1 * r.mu2);
        if (std::abs(sol.w[0] - client) <= 1e-12 * client)
            ++client_branch;
        else
            ++server_branch;
    }
    gate.note("1000 draws: residual max " + fmt(worst_res) + ", branches " +
              std::to_string(client_branch) + " client / " + std::to_string(server_branch) +
              " server");
    gate.require(worst_res < 1e-10, "fixed-point residual " + fmt(worst_res) + " >= 1e-10");
    gate.require(client_branch >= 100 && server_branch >= 100,
                 "both minimum branches must appear at least 100 times");
    return gate.ok();
}

// ---- 6: multi-type switching equilibrium, attraction, and spectra --------------

bool criterion_6(std::ostringstream& out) {
    Gate gate(out);
    std::mt19937_64 rng(606);

    double worst_end = 0.0, worst_branch = 0.0, worst_eig = -1e300;
    int client_bound = 0;
    for (int trial = 0; trial < 200; ++trial) {
        MultiTypeConfig c;
        c.r = trial % 2 == 0 ? 2 : 3;
        c.d = 1;
        c.n = 1000;
        c.lambda = uniform(rng, 0.4, 3.4);
        std::vector<double> raw(c.r);
        double sum = 0.0;
        for (double& v : raw) {
            v = uniform(rng, 0.1, 1.1);
            sum += v;
        }
        c.p.resize(c.r);
        for (int i = 0; i < c.r; ++i)
            c.p[i] = raw[size_t(i)] / sum;
        const int k = uniform_int(rng, 1, 6);
        c.k.assign(c.r, k);
        c.mu.resize(c.r);
        for (auto& row : c.mu)
            row = {uniform(rng, 0.4, 3.4)};
        const double alpha = trial % 4 < 2 ? uniform(rng, 0.02, 0.3) : uniform(rng, 0.5, 1.5);
        c.servers = {std::max(1, int(std::lround(alpha * c.n)))};

        const MultiTypeEquilibrium eq = multi_type_fixed_point(c);
        worst_eig = std::max(worst_eig, std::max(eq.max_re_eig_A, eq.max_re_eig_B));
        if (eq.client_bound)
            ++client_bound;

        // The reported point must equal the branch selected by the switching sum.
        const Eigen::VectorXd wa = eq.A.fullPivLu().solve(eq.c_a);
        const Eigen::VectorXd wb = eq.B.fullPivLu().solve(eq.c_b);
        const bool take_a = wa.sum() < eq.k_alpha;
        gate.require(take_a == eq.client_bound, "switching condition disagrees on draw " +
                                                    std::to_string(trial));
        const Eigen::VectorXd& expect = take_a ? wa : wb;
        worst_branch = std::max(worst_branch, (eq.w_star - expect).cwiseAbs().maxCoeff());

        // Integrate from a random simplex start.
        std::vector<double> w0(c.r);
        double total = 0.0;
        for (double& v : w0) {
            v = -std::log(uniform(rng, 1e-9, 1.0));
            total += v;
        }
        const double scale = uniform(rng, 0.0, 1.0) / total;
        for (double& v : w0)
            v *= scale;

        DriftFn f = [&](const std::vector<double>& w) {
            std::vector<std::vector<double>> grouped(size_t(c.r));
            for (int i = 0; i < c.r; ++i)
                grouped[size_t(i)] = {w[size_t(i)]};
            const auto d = drift_multi(grouped, c);
            std::vector<double> flat(size_t(c.r));
            for (int i = 0; i < c.r; ++i)
                flat[size_t(i)] = d[size_t(i)][0];
            return flat;
        };
        std::vector<double> target(size_t(c.r));
        for (int i = 0; i < c.r; ++i)
            target[size_t(i)] = eq.w_star(i);
        IntegrateOptions opts;
        opts.rate_scale = c.lambda + 4.0;
        opts.target = target;
        const Trajectory traj = integrate(f, w0, 200.0, opts);
        double end = 0.0;
        for (int i = 0; i < c.r; ++i)
            end = std::max(end, std::abs(traj.w.back()[size_t(i)] - eq.w_star(i)));
        worst_end = std::max(worst_end, end);
    }
    gate.note("200 draws: worst terminal gap " + fmt(worst_end) + ", worst branch mismatch " +
              fmt(worst_branch) + ", max Re(eig) " + fmt(worst_eig) + ", " +
              std::to_string(client_bound) + " client-bound");
    gate.require(worst_end <= 1e-6, "ODE limit missed the equilibrium by " + fmt(worst_end));
    gate.require(worst_branch <= 1e-8, "closed form drifted from the branch solve");
    gate.require(worst_eig < 0.0, "a branch matrix has a non-negative eigenvalue");
    return gate.ok();
}

// ---- 7: per-client throughput approaches the drift limit as n grows ------------

bool criterion_7(std::ostringstream& out) {
    Gate gate(out);
    const double alpha = 0.04;
    const int k = 10;
    const double w_star = fixed_point_single(kLambda, kService, k, alpha).w[0];
    const double limit = kLambda * w_star;
    gate.note("per-client limit " + fmt(limit) + " at alpha " + fmt(alpha));

    std::vector<double> gaps;
    for (int n : {50, 200, 800}) {
        SingleTypeConfig c;
        c.n = n;
        c.m = int(std::lround(alpha * n));
        c.lambda = kLambda;
        c.k = k;
        c.service = kService; // instantaneous batching
        const double per_client = solve_stationary(build_single(c)).throughput / n;
        gaps.push_back(std::abs(per_client - limit));
        gate.note("n=" + std::to_string(n) + ": theta/n " + fmt(per_client) + ", gap " +
                  fmt(gaps.back()));
    }
    gate.require(gaps[0] > gaps[1] && gaps[1] > gaps[2],
                 "gap sequence is not strictly decreasing");
    return gate.ok();
}

// ---- 8: scaled simulation paths against the integrated drift -------------------

bool criterion_8(std::ostringstream& out) {
    Gate gate(out);
    const double alpha = 0.04;
    const int k = 10;
    const double horizon = 2e-3;

    std::vector<double> times;
    for (int j = 0; j < 50; ++j)
        times.push_back(horizon * j / 49.0);

    DriftFn f = [&](const std::vector<double>& w) {
        return std::vector<double>{drift_single(w[0], kLambda, kService, k, alpha)};
    };
    IntegrateOptions opts;
    opts.step = 1e-6;
    const Trajectory ode = integrate(f, {1.0}, horizon, opts);
    auto ode_at = [&](double t) {
        const auto it = std::lower_bound(ode.t.begin(), ode.t.end(), t);
        const size_t hi = std::min(size_t(it - ode.t.begin()), ode.t.size() - 1);
        if (hi == 0)
            return ode.w[0][0];
        const size_t lo = hi - 1;
        const double span = ode.t[hi] - ode.t[lo];
        const double frac = span > 0.0 ? (t - ode.t[lo]) / span : 0.0;
        return ode.w[lo][0] + frac * (ode.w[hi][0] - ode.w[lo][0]);
    };

    std::vector<double> medians;
    for (int n : {100, 400, 1600}) {
        SingleTypeConfig c;
        c.n = n;
        c.m = int(std::lround(alpha * n));
        c.lambda = kLambda;
        c.k = k;
        c.service = kService;
        std::vector<double> sups;
        for (int seed = 1; seed <= 20; ++seed) {
            const ScaledPath path = scaled_path(SystemConfig{c}, times, std::uint64_t(seed));
            double sup = 0.0;
            for (size_t j = 0; j < times.size(); ++j)
                sup = std::max(sup, std::abs(path.w[j][0] - ode_at(times[j])));
            sups.push_back(sup);
        }
        std::sort(sups.begin(), sups.end());
        medians.push_back(0.5 * (sups[9] + sups[10]));
        gate.note("n=" + std::to_string(n) + ": median sup gap " + fmt(medians.back()));
    }
    gate.require(medians[0] > medians[1] && medians[1] > medians[2],
                 "median sup-norm gaps do not decrease with n");
    return gate.ok();
}

// ---- 9: sharp throughput drops where the batch count crosses the servers -------

bool criterion_9(std::ostringstream& out) {
    Gate gate(out);
    SingleTypeConfig c;
    c.n = 300;
    c.m = 4;
    c.lambda = kLambda;
    c.service = kService;
    c.batching = kBatching;

    auto theta_at = [&](int k) {
        SingleTypeConfig ck = c;
        ck.k = k;
        return solve_stationary(build_single(ck)).throughput;
    };
    const double t74 = theta_at(74), t75 = theta_at(75), t76 = theta_at(76);
    const double t99 = theta_at(99), t100 = theta_at(100), t101 = theta_at(101);

    const double drop76 = (t75 - t76) / t75;
    const double drop101 = (t100 - t101) / t100;
    const double step75 = std::abs(t75 - t74) / t74;
    const double step100 = std::abs(t100 - t99) / t99;
    gate.note("drop at 76: " + fmt(100.0 * drop76) + "%, at 101: " + fmt(100.0 * drop101) +
              "%; smooth steps " + fmt(100.0 * step75) + "% and " + fmt(100.0 * step100) + "%");
    gate.require(drop76 > 0.05, "no sharp drop from k=75 to k=76");
    gate.require(drop101 > 0.05, "no sharp drop from k=100 to k=101");
    gate.require(step75 < 0.05, "k=74 to k=75 is not smooth");
    gate.require(step100 < 0.05, "k=99 to k=100 is not smooth");
    return gate.ok();
}

// ---- 10: preemptive vs non-preemptive gap at the optimal batch size ------------

bool criterion_10(std::ostringstream& out) {
    Gate gate(out);
    std::vector<double> gaps;
    for (int n : {50, 100, 300}) {
        TwoTypeConfig c;
        c.n = n;
        c.m = 4;
        c.lambda = kLambda;
        c.p = 0.2;
        c.k1 = 1;
        c.k2 = 1;
        c.service1 = kService1;
        c.service2 = kService2;

        const AsymptoticOptimum opt = optimal_k_two_type_uniform(c, std::min(n, 150));
        c.k1 = c.k2 = opt.k_star;

        c.discipline = Discipline::Preemptive;
        const double pre = solve_stationary(build_two_type(c)).throughput;
        c.discipline = Discipline::NonPreemptive;
        const double non = solve_stationary(build_two_type(c)).throughput;
        gaps.push_back(std::abs(pre - non) / std::max(pre, non));
        gate.note("n=" + std::to_string(n) + ": k* " + std::to_string(opt.k_star) +
                  ", preemptive " + fmt(pre) + ", non-preemptive " + fmt(non) +
                  ", relative gap " + fmt(gaps.back()));
    }
    gate.require(gaps[1] <= gaps[0] + 1e-9 && gaps[2] <= gaps[1] + 1e-9,
                 "discipline gap grows with n");
    return gate.ok();
}

// ---- 11: transient distribution mixes monotonically and quickly ----------------

bool criterion_11(std::ostringstream& out) {
    Gate gate(out);
    const int n = 300, m = 10;
    const AsymptoticOptimum opt =
        optimal_k_asymptotic(kLambda, kService, double(m) / n, n);

    SingleTypeConfig c;
    c.n = n;
    c.m = m;
    c.lambda = kLambda;
    c.k = opt.k_star;
    c.service = kService;
    c.batching = kBatching;
    const MarkovModel model = build_single(c);

    std::vector<double> times;
    for (int j = 0; j <= 50; ++j)
        times.push_back(0.05 * j / 50.0);
    const MixingCurve curve = mixing_curve(model, times);

    bool in_range = true, monotone = true;
    for (size_t i = 0; i < curve.tv.size(); ++i) {
        in_range = in_range && curve.tv[i] >= 0.0 && curve.tv[i] <= 1.0;
        if (i > 0)
            monotone = monotone && curve.tv[i] <= curve.tv[i - 1] + 1e-9;
    }
    gate.note("k* " + std::to_string(opt.k_star) + ", " + std::to_string(model.size()) +
              " states, tv(0) " + fmt(curve.tv.front()) + ", tv(0.05) " +
              fmt(curve.tv.back()));
    gate.require(in_range, "tv left [0, 1]");
    gate.require(monotone, "tv is not non-increasing");
    gate.require(curve.tv.back() < 0.05, "tv(0.05) " + fmt(curve.tv.back()) + " >= 0.05");
    return gate.ok();
}

// ---- 12: design exchange heuristic against exhaustive enumeration --------------

bool criterion_12(std::ostringstream& out) {
    Gate gate(out);
    auto log_det = [](const std::vector<int>& subset) {
        Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
        for (int k : subset) {
            const Eigen::VectorXd f = linear_features(k);
            info += f * f.transpose();
        }
        return std::log(info.determinant());
    };

    std::vector<std::vector<int>> grids;
    for (int g = 2; g <= 15; ++g) {
        std::vector<int> grid;
        for (int i = 1; i <= g; ++i)
            grid.push_back(i);
        grids.push_back(grid);
    }
    std::mt19937_64 rng(1212);
    for (int size = 3; size <= 15; ++size) {
        std::vector<int> pool(100);
        for (int i = 0; i < 100; ++i)
            pool[size_t(i)] = i + 1;
        std::shuffle(pool.begin(), pool.end(), rng);
        grids.emplace_back(pool.begin(), pool.begin() + size);
    }
    std::vector<int> geometric;
    for (int v = 1; geometric.size() < 15; v *= 2)
        geometric.push_back(v);
    grids.push_back(geometric);

    int pairs = 0;
    double worst_deficit = -1e300;
    bool extremes_ok = true;
    for (const std::vector<int>& grid : grids) {
        for (int budget = 2; budget <= int(grid.size()); ++budget) {
            const std::vector<int> exhaustive =
                design_select(grid, budget, linear_features, 1, DesignMethod::Exhaustive);
            const std::vector<int> exchange =
                design_select(grid, budget, linear_features, 1, DesignMethod::Exchange);
            worst_deficit =
                std::max(worst_deficit, log_det(exhaustive) - log_det(exchange));
            ++pairs;
            if (budget == 2) {
                const int lo = *std::min_element(grid.begin(), grid.end());
                const int hi = *std::max_element(grid.begin(), grid.end());
                extremes_ok =
                    extremes_ok && exhaustive == std::vector<int>{lo, hi};
            }
        }
    }
    gate.note(std::to_string(pairs) + " grid/budget pairs, worst heuristic deficit " +
              fmt(worst_deficit));
    gate.require(worst_deficit <= 1e-9,
                 "exchange fell below exhaustive by " + fmt(worst_deficit));
    gate.require(extremes_ok, "a two-point design was not the extreme batch sizes");
    return gate.ok();
}

// ---- 13: fitting recovers each generating form, with and without noise ---------

bool criterion_13(std::ostringstream& out) {
    Gate gate(out);
    const std::vector<int> design = {1, 2, 4, 8, 16};
    const std::vector<SpeedupModel> generators = {
        linear(0.5, 1.0),
        {SpeedupForm::Power, 2.0, 0.5},
        {SpeedupForm::Log, 0.3, 0.9},
    };

    double worst_param = 0.0;
    bool forms_ok = true;
    for (const SpeedupModel& gen : generators) {
        std::vector<ServiceSample> samples;
        for (int k : design)
            samples.push_back({k, {gen.eval(k), gen.eval(k), gen.eval(k)}});
        const FitResult fit = select_model(samples);
        forms_ok = forms_ok && fit.selected == gen.form;
        worst_param = std::max({worst_param, std::abs(fit.model.p1 - gen.p1),
                                std::abs(fit.model.p2 - gen.p2)});
    }
    gate.note("noiseless: worst parameter error " + fmt(worst_param));
    gate.require(forms_ok, "a noiseless fit selected the wrong form");
    gate.require(worst_param <= 1e-8, "parameter error " + fmt(worst_param) + " > 1e-8");

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const SpeedupModel& gen : generators) {
        int hits = 0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<ServiceSample> samples;
            for (int k : design) {
                std::vector<double> obs;
                for (int rep = 0; rep < 10; ++rep)
                    obs.push_back(gen.eval(k) * (1.0 + 0.05 * gauss(rng)));
                samples.push_back({k, obs});
            }
            if (select_model(samples).selected == gen.form)
                ++hits;
        }
        gate.note(gen.describe() + ": selected " + std::to_string(hits) + "/100 under noise");
        gate.require(hits >= 90, gen.describe() + " selection rate " +
                                     std::to_string(hits) + "% < 90%");
    }
    return gate.ok();
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool(std::ostringstream&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "sparse stationary solve matches dense elimination on random chains", criterion_1},
        {2, "single-client throughput matches the renewal closed form", criterion_2},
        {3, "drift-limit batch optimum tracks the exact optimum at n=1000", criterion_3},
        {4, "single-type trajectories contract exponentially", criterion_4},
        {5, "two-type trajectories reach the closed-form equilibrium", criterion_5},
        {6, "multi-type equilibria switch correctly and attract globally", criterion_6},
        {7, "per-client throughput gap shrinks as n grows", criterion_7},
        {8, "scaled simulation paths converge to the integrated drift", criterion_8},
        {9, "throughput drops sharply where batch counts cross the server count", criterion_9},
        {10, "priority discipline gap shrinks at the optimal batch size", criterion_10},
        {11, "transient law mixes monotonically and quickly at the optimal k", criterion_11},
        {12, "design exchange heuristic matches exhaustive enumeration", criterion_12},
        {13, "form fitting recovers generators exactly and under noise", criterion_13},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::fprintf(stderr, "running criterion %d...\n", c.id);
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail << "  exception: " << e.what() << "\n";
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.title);
        std::fputs(detail.str().c_str(), stdout);
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - size_t(failures),
                criteria.size());
    return failures;
}
