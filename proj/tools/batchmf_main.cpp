// Command-line front end: loads a JSON model description and runs the exact,
// mean-field, simulation, transient, or fitting analysis against it, writing
// plot-ready CSV/JSON. Every command is deterministic for a fixed
// (config, flags, seed); runs with --out also drop a manifest.json recording
// how they were invoked.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 resource limit
// (state-space cap), 4 numeric failure.

#include "batchmf/config.hpp"
#include "batchmf/ctmc.hpp"
#include "batchmf/errors.hpp"
#include "batchmf/fitting.hpp"
#include "batchmf/meanfield.hpp"
#include "batchmf/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace batchmf;

namespace {

size_t state_cap_from_env() {
    const char* raw = std::getenv("BATCHMF_STATE_CAP");
    if (!raw)
        return kDefaultStateCap;
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || cap == 0)
        throw ConfigError("BATCHMF_STATE_CAP must be a positive integer, got \"" +
                          std::string(raw) + "\"");
    return size_t(cap);
}

void override_k(SystemConfig& config, int k) {
    std::visit(
        [k](auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.k = k;
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                c.k1 = c.k2 = k;
            } else {
                for (int& ki : c.k)
                    ki = k;
            }
        },
        config);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Writes the reproducibility record next to a command's outputs.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed, const json& overrides) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config_path;
    manifest["out"] = out_dir.string();
    manifest["seed"] = seed;
    manifest["overrides"] = overrides;
    std::ofstream f(out_dir / "manifest.json");
    f << manifest.dump(2) << "\n";
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out + ": " + ec.message());
    return dir;
}

SystemConfig load_config(const std::string& path, std::optional<int> k) {
    SystemConfig config = parse_config_file(path);
    if (k)
        override_k(config, *k);
    return config;
}

MarkovModel build_exact(const SystemConfig& config, size_t cap) {
    return std::visit(
        [cap](const auto& c) -> MarkovModel {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>)
                return build_single(c, cap);
            else if constexpr (std::is_same_v<T, TwoTypeConfig>)
                return build_two_type(c, cap);
            else
                throw ConfigError("exact analysis handles single-type and two-type models; "
                                  "use the meanfield command for the multi-type model");
        },
        config);
}

int config_batch_size(const SystemConfig& config) {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>)
                return c.k;
            else if constexpr (std::is_same_v<T, TwoTypeConfig>)
                return c.k1;
            else
                return c.k.front();
        },
        config);
}

std::string sweep_csv_exact(const std::vector<SweepRow>& rows) {
    std::string csv = "k,theta,states,residual\n";
    for (const SweepRow& r : rows)
        csv += std::to_string(r.k) + "," + format_double(r.theta) + "," +
               std::to_string(r.states) + "," + format_double(r.residual) + "\n";
    return csv;
}

void emit(const std::string& text, const std::optional<fs::path>& file) {
    std::cout << text;
    if (file) {
        std::ofstream f(*file);
        f << text;
    }
}

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const std::string& config_path, std::optional<int> k,
                const std::string& out) {
    const SystemConfig config = load_config(config_path, k);
    const MarkovModel model = build_exact(config, state_cap_from_env());
    const StationaryResult st = solve_stationary(model);
    const bool irreducible = check_irreducible(model);

    std::string csv = "k,theta,states,residual\n";
    csv += std::to_string(config_batch_size(config)) + "," + format_double(st.throughput) +
           "," + std::to_string(model.size()) + "," + format_double(st.residual) + "\n";

    std::optional<fs::path> csv_file;
    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        csv_file = dir / "analysis.csv";
        std::ofstream q(dir / "q.mtx");
        write_matrix_market(model, q);
        json overrides;
        if (k)
            overrides["k"] = *k;
        write_manifest(dir, "analyze", config_path, 0, overrides);
    }
    emit(csv, csv_file);
    std::cout << "irreducible," << (irreducible ? "true" : "false") << "\n";
    return 0;
}

// ---- meanfield -------------------------------------------------------------

json meanfield_report(const SystemConfig& config) {
    return std::visit(
        [&](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            json rep;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.validate();
                const double alpha = double(c.m) / c.n;
                const auto sol = fixed_point_single(c.lambda, c.service, c.k, alpha, c.n);
                rep["model"] = "single";
                rep["k"] = c.k;
                rep["alpha"] = alpha;
                rep["w_star"] = sol.w;
                rep["throughput_per_client"] = sol.throughput_per_client;
                rep["throughput_total"] = sol.throughput_total;
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                bool ignored = false;
                const TwoTypeRates rates = make_two_type_rates(c, &ignored);
                const auto sol = fixed_point_two_type(rates, c.n);
                const auto stab = classify_two_type(rates);
                rep["model"] = "two_type";
                rep["k1"] = c.k1;
                rep["k2"] = c.k2;
                rep["alpha"] = rates.alpha;
                rep["w_star"] = sol.w;
                rep["throughput_per_client"] = sol.throughput_per_client;
                rep["throughput_total"] = sol.throughput_total;
                rep["case"] = stab.case_label;
                rep["z1_star"] = stab.z1_star;
                rep["z2_star"] = stab.z2_star;
                rep["eta"] = stab.eta;
                if (ignored)
                    rep["note"] = "batching laws are not part of the drift limit; ignored";
            } else {
                const MultiTypeEquilibrium eq = multi_type_fixed_point(c);
                rep["model"] = "multi_type";
                rep["k"] = c.k.front();
                rep["w_star"] = std::vector<double>(eq.w_star.data(),
                                                    eq.w_star.data() + eq.w_star.size());
                rep["branch"] = eq.client_bound ? "A" : "B";
                rep["switch_sum"] = eq.switch_sum;
                rep["k_alpha"] = eq.k_alpha;
                rep["max_re_eig_A"] = eq.max_re_eig_A;
                rep["max_re_eig_B"] = eq.max_re_eig_B;
                rep["throughput_total"] = c.lambda * (1.0 - eq.w_star.sum()) * c.n;
            }
            return rep;
        },
        config);
}

// Drift of the loaded model as a flat-vector function, with a conservative
// Lipschitz scale for step-size control.
std::pair<DriftFn, double> drift_of(const SystemConfig& config) {
    return std::visit(
        [](const auto& c) -> std::pair<DriftFn, double> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.validate();
                const double alpha = double(c.m) / c.n;
                const double mu = c.service.rate(c.k);
                auto f = [c, alpha](const std::vector<double>& w) {
                    return std::vector<double>{
                        drift_single(w[0], c.lambda, c.service, c.k, alpha)};
                };
                return {f, c.lambda + mu};
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                const TwoTypeRates r = make_two_type_rates(c);
                auto f = [r](const std::vector<double>& w) {
                    const auto d = drift_two_type(w[0], w[1], r);
                    return std::vector<double>{d[0], d[1]};
                };
                const double scale =
                    r.lambda + r.mu1 + r.mu2 * (1.0 + std::max(1.0, double(r.k2) / r.k1));
                return {f, scale};
            } else {
                c.validate();
                const MultiTypeConfig cfg = c;
                auto f = [cfg](const std::vector<double>& flat) {
                    std::vector<std::vector<double>> w(cfg.r, std::vector<double>(cfg.d));
                    for (int i = 0; i < cfg.r; ++i)
                        for (int j = 0; j < cfg.d; ++j)
                            w[i][j] = flat[size_t(i) * cfg.d + j];
                    const auto dw = drift_multi(w, cfg);
                    std::vector<double> out(flat.size());
                    for (int i = 0; i < cfg.r; ++i)
                        for (int j = 0; j < cfg.d; ++j)
                            out[size_t(i) * cfg.d + j] = dw[i][j];
                    return out;
                };
                double mu_max = 0.0;
                for (const auto& row : cfg.mu)
                    for (double mu : row)
                        mu_max = std::max(mu_max, mu);
                return {f, cfg.lambda + 2.0 * mu_max};
            }
        },
        config);
}

std::vector<double> initial_point(const SystemConfig& config) {
    return std::visit(
        [](const auto& c) -> std::vector<double> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleTypeConfig>)
                return {1.0}; // every client active
            else if constexpr (std::is_same_v<T, TwoTypeConfig>)
                return {1.0, 0.0};
            else
                return std::vector<double>(size_t(c.r) * c.d, 0.0); // no jobs in system
        },
        config);
}

int cmd_meanfield(const std::string& config_path, std::optional<int> k, const std::string& out,
                  double tmax, int points) {
    const SystemConfig config = load_config(config_path, k);
    const json rep = meanfield_report(config);
    std::cout << rep.dump(2) << "\n";

    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        auto [drift, scale] = drift_of(config);
        const std::vector<double> w0 = initial_point(config);
        // Attraction is exponential at rate lambda, so 25 per-client cycles
        // reach every fixed point to solver precision.
        const double lambda = std::visit([](const auto& c) { return c.lambda; }, config);
        const double horizon = tmax > 0.0 ? tmax : 25.0 / lambda;
        IntegrateOptions opt;
        opt.rate_scale = scale;
        const Trajectory traj = integrate(drift, w0, horizon, opt);

        std::ostringstream csv;
        csv << "t";
        for (size_t i = 0; i < w0.size(); ++i)
            csv << ",w" << i + 1;
        csv << "\n";
        const size_t stride = std::max<size_t>(1, traj.t.size() / size_t(points));
        for (size_t s = 0; s < traj.t.size(); s += stride) {
            csv << format_double(traj.t[s]);
            for (double wi : traj.w[s])
                csv << "," << format_double(wi);
            csv << "\n";
        }
        std::ofstream f(dir / "trajectory.csv");
        f << csv.str();
        std::ofstream r(dir / "equilibrium.json");
        r << rep.dump(2) << "\n";
        json overrides;
        if (k)
            overrides["k"] = *k;
        overrides["tmax"] = horizon;
        overrides["points"] = points;
        write_manifest(dir, "meanfield", config_path, 0, overrides);
    }
    return 0;
}

// ---- optimize / sweep ------------------------------------------------------

json meanfield_optimum(const SystemConfig& config, int kmax) {
    return std::visit(
        [&](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            json rep;
            if constexpr (std::is_same_v<T, SingleTypeConfig>) {
                c.validate();
                const auto best =
                    optimal_k_asymptotic(c.lambda, c.service, double(c.m) / c.n, kmax);
                rep["k_star"] = best.k_star;
                rep["theta_star"] = double(c.n) * best.throughput_per_client;
                rep["w_star"] = best.w_star;
                rep["used_crossing"] = best.used_crossing;
            } else if constexpr (std::is_same_v<T, TwoTypeConfig>) {
                const auto best = optimal_k_two_type_uniform(c, kmax);
                rep["k_star"] = best.k_star;
                rep["theta_star"] = double(c.n) * best.throughput_per_client;
                rep["w_star"] = best.w_star;
                rep["used_crossing"] = best.used_crossing;
            } else {
                throw ConfigError("optimize supports single-type and two-type models");
            }
            return rep;
        },
        config);
}

int cmd_optimize(const std::string& config_path, int kmax, const std::string& method,
                 int jobs, bool prune, const std::string& out) {
    const SystemConfig config = load_config(config_path, std::nullopt);
    if (kmax < 1)
        throw ConfigError("--kmax must be >= 1");

    json rep;
    rep["method"] = method;
    rep["kmax"] = kmax;
    std::optional<OptimizeResult> exact;

    if (method == "exact" || method == "both") {
        OptimizeOptions opt;
        opt.state_cap = state_cap_from_env();
        opt.prune_with_bound = prune;
        opt.jobs = jobs;
        exact = optimize_batch_exact(config, kmax, opt);
        rep["exact"]["k_star"] = exact->k_star;
        rep["exact"]["theta_star"] = exact->theta_star;
    }
    if (method == "meanfield" || method == "both")
        rep["meanfield"] = meanfield_optimum(config, kmax);
    if (method == "both")
        rep["k_gap"] = std::abs(rep["exact"]["k_star"].get<int>() -
                                rep["meanfield"]["k_star"].get<int>());
    if (!(method == "exact" || method == "meanfield" || method == "both"))
        throw ConfigError("--method must be exact, meanfield, or both");

    std::cout << rep.dump(2) << "\n";
    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        if (exact) {
            std::ofstream f(dir / "sweep.csv");
            f << sweep_csv_exact(exact->table);
        }
        std::ofstream r(dir / "optimum.json");
        r << rep.dump(2) << "\n";
        json overrides;
        overrides["kmax"] = kmax;
        overrides["method"] = method;
        overrides["jobs"] = jobs;
        if (prune)
            overrides["prune"] = true;
        write_manifest(dir, "optimize", config_path, 0, overrides);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, int kmax, const std::string& method,
              long long events, std::uint64_t seed, int jobs, const std::string& out) {
    const SystemConfig config = load_config(config_path, std::nullopt);
    if (kmax < 1)
        throw ConfigError("--kmax must be >= 1");

    std::string csv;
    if (method == "exact") {
        OptimizeOptions opt;
        opt.state_cap = state_cap_from_env();
        opt.jobs = jobs;
        csv = sweep_csv_exact(optimize_batch_exact(config, kmax, opt).table);
    } else if (method == "meanfield") {
        csv = "k,theta\n";
        for (int k = 1; k <= kmax; ++k) {
            SystemConfig c = config;
            override_k(c, k);
            const json rep = meanfield_report(c);
            csv += std::to_string(k) + "," +
                   format_double(rep.at("throughput_total").get<double>()) + "\n";
        }
    } else if (method == "simulate") {
        csv = "k,throughput,ci_lo,ci_hi\n";
        for (int k = 1; k <= kmax; ++k) {
            SystemConfig c = config;
            override_k(c, k);
            SimulationOptions opt;
            opt.seed = seed;
            opt.events = events;
            const SimulationResult r = simulate(c, opt);
            csv += std::to_string(k) + "," + format_double(r.throughput) + "," +
                   format_double(r.throughput - r.ci_half_width) + "," +
                   format_double(r.throughput + r.ci_half_width) + "\n";
        }
    } else {
        throw ConfigError("--method must be exact, meanfield, or simulate");
    }

    std::optional<fs::path> file;
    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        file = dir / ("sweep_" + method + ".csv");
        json overrides;
        overrides["kmax"] = kmax;
        overrides["method"] = method;
        if (method == "simulate") {
            overrides["events"] = events;
            overrides["seed"] = seed;
        }
        write_manifest(dir, "sweep", config_path, seed, overrides);
    }
    emit(csv, file);
    return 0;
}

// ---- simulate / mixing -----------------------------------------------------

int cmd_simulate(const std::string& config_path, std::optional<int> k, long long events,
                 std::uint64_t seed, long long trace, const std::string& out) {
    const SystemConfig config = load_config(config_path, k);
    SimulationOptions opt;
    opt.seed = seed;
    opt.events = events;
    opt.trace_events = trace;
    const SimulationResult r = simulate(config, opt);

    json rep;
    rep["events"] = r.events;
    rep["horizon"] = r.horizon;
    rep["measured_time"] = r.measured_time;
    rep["completions"] = r.completions;
    rep["throughput"] = r.throughput;
    rep["ci_half_width"] = r.ci_half_width;
    rep["seed"] = r.seed;
    std::cout << rep.dump(2) << "\n";

    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        std::ofstream f(dir / "simulation.json");
        f << rep.dump(2) << "\n";
        if (!r.trace.empty()) {
            std::ofstream tr(dir / "trace.csv");
            tr << "t,event,s0,s1,s2,s3,s4\n";
            for (const TraceRow& row : r.trace) {
                tr << format_double(row.t) << "," << row.event;
                for (int v : row.state)
                    tr << "," << v;
                tr << "\n";
            }
        }
        json overrides;
        if (k)
            overrides["k"] = *k;
        overrides["events"] = events;
        if (trace > 0)
            overrides["trace"] = trace;
        write_manifest(dir, "simulate", config_path, seed, overrides);
    }
    return 0;
}

int cmd_mixing(const std::string& config_path, std::optional<int> k, double tmax, int points,
               const std::string& out) {
    if (!(tmax > 0.0))
        throw ConfigError("--tmax must be > 0");
    if (points < 2)
        throw ConfigError("--points must be >= 2");
    const SystemConfig config = load_config(config_path, k);
    const MarkovModel model = build_exact(config, state_cap_from_env());

    std::vector<double> times(points);
    for (int i = 0; i < points; ++i)
        times[i] = tmax * double(i) / (points - 1);
    const MixingCurve curve = mixing_curve(model, times);

    std::string csv = "t,tv\n";
    for (size_t i = 0; i < curve.t.size(); ++i)
        csv += format_double(curve.t[i]) + "," + format_double(curve.tv[i]) + "\n";

    std::optional<fs::path> file;
    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        file = dir / "mixing.csv";
        json overrides;
        if (k)
            overrides["k"] = *k;
        overrides["tmax"] = tmax;
        overrides["points"] = points;
        write_manifest(dir, "mixing", config_path, 0, overrides);
    }
    emit(csv, file);
    return 0;
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(const std::string& csv_path, int budget, int kmax, std::uint64_t seed,
            const std::string& out) {
    std::ifstream in(csv_path);
    if (!in)
        throw ConfigError("cannot open measurement file " + csv_path);
    std::vector<ServiceSample> samples = read_service_samples(in);
    if (kmax > 0)
        std::erase_if(samples, [kmax](const ServiceSample& s) { return s.k > kmax; });
    if (samples.empty())
        throw ConfigError("no usable measurements in " + csv_path);

    std::vector<int> candidates;
    for (const ServiceSample& s : samples)
        candidates.push_back(s.k);

    std::vector<int> design = candidates;
    if (budget > 0 && budget < int(candidates.size()))
        design = design_select(candidates, budget, linear_features, seed);

    std::vector<ServiceSample> chosen;
    for (const ServiceSample& s : samples)
        if (std::find(design.begin(), design.end(), s.k) != design.end())
            chosen.push_back(s);

    const FitResult fit = select_model(chosen);

    json rep;
    rep["design"] = fit.design;
    for (const FormFit& f : fit.fits) {
        json entry;
        entry["params"] = {f.p1, f.p2};
        entry["residual"] = f.residual;
        rep["fits"][f.form == SpeedupForm::Linear ? "linear"
                    : f.form == SpeedupForm::Power ? "power"
                                                   : "log"] = entry;
    }
    rep["selected"] = fit.model.describe();
    rep["constraint_ok"] = fit.constraint_ok;
    if (!fit.failures.empty())
        rep["failures"] = fit.failures;
    std::cout << rep.dump(2) << "\n";

    if (!out.empty()) {
        const fs::path dir = prepare_out_dir(out);
        std::ofstream f(dir / "fit.json");
        f << rep.dump(2) << "\n";
        json overrides;
        overrides["budget"] = budget;
        if (kmax > 0)
            overrides["kmax"] = kmax;
        write_manifest(dir, "fit", csv_path, seed, overrides);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"throughput analysis of closed batch-service queueing systems"};
    app.require_subcommand(1);

    std::string config_path, out, method = "exact";
    int k = 0, kmax = 0, points = 50, jobs = 1;
    long long events = 1'000'000, trace = 0;
    std::uint64_t seed = 1;
    double tmax = 0.0;
    bool prune = false;

    auto* analyze = app.add_subcommand("analyze", "stationary throughput of the exact chain");
    analyze->add_option("--config", config_path, "model JSON")->required();
    analyze->add_option("--k", k, "override batch size");
    analyze->add_option("--out", out, "output directory (analysis.csv, q.mtx)");

    auto* optimize = app.add_subcommand("optimize", "best batch size in [1, kmax]");
    optimize->add_option("--config", config_path, "model JSON")->required();
    optimize->add_option("--kmax", kmax, "largest batch size to consider")->required();
    optimize->add_option("--method", method, "exact | meanfield | both");
    optimize->add_option("--jobs", jobs, "parallel solve workers");
    optimize->add_flag("--prune", prune, "skip k ruled out by the throughput bound");
    optimize->add_option("--out", out, "output directory (sweep.csv, optimum.json)");

    auto* meanfield = app.add_subcommand("meanfield", "drift fixed point and trajectory");
    meanfield->add_option("--config", config_path, "model JSON")->required();
    meanfield->add_option("--k", k, "override batch size");
    meanfield->add_option("--tmax", tmax, "integration horizon, seconds");
    meanfield->add_option("--points", points, "trajectory rows to keep");
    meanfield->add_option("--out", out, "output directory (trajectory.csv, equilibrium.json)");

    auto* simulate_cmd = app.add_subcommand("simulate", "event-driven stochastic simulation");
    simulate_cmd->add_option("--config", config_path, "model JSON")->required();
    simulate_cmd->add_option("--k", k, "override batch size");
    simulate_cmd->add_option("--events", events, "event budget");
    simulate_cmd->add_option("--seed", seed, "RNG seed");
    simulate_cmd->add_option("--trace", trace, "record the first N events");
    simulate_cmd->add_option("--out", out, "output directory (simulation.json, trace.csv)");

    auto* mixing = app.add_subcommand("mixing", "total variation distance to stationarity");
    mixing->add_option("--config", config_path, "model JSON")->required();
    mixing->add_option("--k", k, "override batch size");
    mixing->add_option("--tmax", tmax, "largest time, seconds")->required();
    mixing->add_option("--points", points, "grid size");
    mixing->add_option("--out", out, "output directory (mixing.csv)");

    auto* fit = app.add_subcommand("fit", "estimate the service-time law from measurements");
    fit->add_option("--config", config_path, "measurement CSV (k,service_time_seconds)")
        ->required();
    fit->add_option("--k", k, "design budget (measured batch sizes to keep)");
    fit->add_option("--kmax", kmax, "ignore measurements above this batch size");
    fit->add_option("--seed", seed, "RNG seed for design restarts");
    fit->add_option("--out", out, "output directory (fit.json)");

    auto* sweep = app.add_subcommand("sweep", "throughput table over k = 1..kmax");
    sweep->add_option("--config", config_path, "model JSON")->required();
    sweep->add_option("--kmax", kmax, "largest batch size")->required();
    sweep->add_option("--method", method, "exact | meanfield | simulate");
    sweep->add_option("--events", events, "events per simulated k");
    sweep->add_option("--seed", seed, "RNG seed");
    sweep->add_option("--jobs", jobs, "parallel solve workers");
    sweep->add_option("--out", out, "output directory (sweep_<method>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const std::optional<int> k_opt = k > 0 ? std::optional<int>(k) : std::nullopt;
        if (analyze->parsed())
            return cmd_analyze(config_path, k_opt, out);
        if (optimize->parsed())
            return cmd_optimize(config_path, kmax, method, jobs, prune, out);
        if (meanfield->parsed())
            return cmd_meanfield(config_path, k_opt, out, tmax, points);
        if (simulate_cmd->parsed())
            return cmd_simulate(config_path, k_opt, events, seed, trace, out);
        if (mixing->parsed())
            return cmd_mixing(config_path, k_opt, tmax, points, out);
        if (fit->parsed())
            return cmd_fit(config_path, k, kmax, seed, out);
        if (sweep->parsed())
            return cmd_sweep(config_path, kmax, method, events, seed, jobs, out);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "hint: the meanfield subcommand handles populations of any size\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
