// System configurations for the three model families.
//
// The closed system has n clients cycling through three stations: an active
// (producer) phase generating jobs at per-client rate lambda, a batcher that
// merges k same-type jobs into one batch, and m parallel servers processing
// batches at rate mu(k) each. A client stays blocked until its job's batch
// completes, so the population is conserved.
//
// Batching is either Rated (a finite-rate law: forming a batch takes
// 1/M(k) seconds, M(k) = 1/batching.eval(k)) or Instantaneous (jobs join a
// full batch the moment k of them are present). Mean-field analyses always
// assume instantaneous batching; the exact models accept both.
//
// All configs are plain value types; validate() enforces the documented
// invariants and is called by every analysis entry point and by the JSON
// parser. JSON parse errors report the offending path and reason, and
// unknown fields are rejected.
#pragma once

#include "batchmf/speedup.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace batchmf {

enum class Discipline { Preemptive, NonPreemptive };

// One job type, one server pool.
struct SingleTypeConfig {
    int n = 1;            // clients
    int m = 1;            // servers
    double lambda = 1.0;  // per-client job generation rate, 1/s
    int k = 1;            // batch size
    SpeedupModel service; // batch service time g(k); mu(k) = 1/g(k)
    std::optional<SpeedupModel> batching; // batch formation time; empty = instantaneous

    void validate() const;
    bool operator==(const SingleTypeConfig&) const = default;
};

// Two job types; type 1 has priority (preemptive or non-preemptive).
struct TwoTypeConfig {
    int n = 1;
    int m = 1;
    double lambda = 1.0;
    double p = 0.5;       // probability a produced job is type 1
    int k1 = 1;
    int k2 = 1;
    SpeedupModel service1;
    SpeedupModel service2;
    std::optional<SpeedupModel> batching1;
    std::optional<SpeedupModel> batching2;
    Discipline discipline = Discipline::Preemptive;

    void validate() const;
    bool operator==(const TwoTypeConfig&) const = default;
};

// r job types, d service levels, preemptive priority by type index
// (lower index preempts higher). Used by the mean-field module only.
struct MultiTypeConfig {
    int r = 1;
    int d = 1;
    int n = 1;
    double lambda = 1.0;
    std::vector<double> p;             // r entries, sums to 1
    std::vector<int> k;                // r entries, per-type batch size
    std::vector<std::vector<double>> mu; // r rows, d columns: mu[i][j], batches/s
    std::vector<int> servers;          // d entries: m_j

    // alpha_j = m_j / n.
    std::vector<double> alpha() const;

    void validate() const;
    bool operator==(const MultiTypeConfig&) const = default;
};

using SystemConfig = std::variant<SingleTypeConfig, TwoTypeConfig, MultiTypeConfig>;

// JSON I/O. parse_config rejects unknown fields and reports errors as
// "$.path.to.field: reason". Round-tripping through to_json/parse_config
// preserves every field exactly.
SystemConfig parse_config(const std::string& json_text);
SystemConfig parse_config_file(const std::string& path);
std::string to_json(const SystemConfig& config);

} // namespace batchmf
