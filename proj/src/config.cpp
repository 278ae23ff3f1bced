#include "batchmf/config.hpp"
#include "batchmf/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace batchmf {

void SingleTypeConfig::validate() const {
    if (n < 1) throw ConfigError("n must be >= 1, got " + std::to_string(n));
    if (m < 1) throw ConfigError("m must be >= 1, got " + std::to_string(m));
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0, got " + std::to_string(lambda));
    if (k < 1 || k > n)
        throw ConfigError("batch size k must satisfy 1 <= k <= n, got k = " +
                          std::to_string(k) + " with n = " + std::to_string(n));
    service.validate(n);
    if (batching) batching->validate(n);
}

void TwoTypeConfig::validate() const {
    if (n < 1) throw ConfigError("n must be >= 1, got " + std::to_string(n));
    if (m < 1) throw ConfigError("m must be >= 1, got " + std::to_string(m));
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0, got " + std::to_string(lambda));
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1], got " + std::to_string(p));
    if (k1 < 1 || k1 > n)
        throw ConfigError("k1 must satisfy 1 <= k1 <= n, got k1 = " + std::to_string(k1));
    if (k2 < 1 || k2 > n)
        throw ConfigError("k2 must satisfy 1 <= k2 <= n, got k2 = " + std::to_string(k2));
    service1.validate(n);
    service2.validate(n);
    if (batching1) batching1->validate(n);
    if (batching2) batching2->validate(n);
}

std::vector<double> MultiTypeConfig::alpha() const {
    std::vector<double> a(servers.size());
    for (size_t j = 0; j < servers.size(); ++j)
        a[j] = double(servers[j]) / double(n);
    return a;
}

void MultiTypeConfig::validate() const {
    if (r < 1) throw ConfigError("r must be >= 1, got " + std::to_string(r));
    if (d < 1) throw ConfigError("d must be >= 1, got " + std::to_string(d));
    if (n < 1) throw ConfigError("n must be >= 1, got " + std::to_string(n));
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0, got " + std::to_string(lambda));
    if (int(p.size()) != r)
        throw ConfigError("p must have r = " + std::to_string(r) + " entries, got " +
                          std::to_string(p.size()));
    if (int(k.size()) != r)
        throw ConfigError("k must have r = " + std::to_string(r) + " entries, got " +
                          std::to_string(k.size()));
    if (int(mu.size()) != r)
        throw ConfigError("mu must have r = " + std::to_string(r) + " rows, got " +
                          std::to_string(mu.size()));
    if (int(servers.size()) != d)
        throw ConfigError("servers must have d = " + std::to_string(d) + " entries, got " +
                          std::to_string(servers.size()));
    double psum = 0.0;
    for (int i = 0; i < r; ++i) {
        if (!(p[i] >= 0.0)) throw ConfigError("p[" + std::to_string(i) + "] must be >= 0");
        psum += p[i];
        if (k[i] < 1) throw ConfigError("k[" + std::to_string(i) + "] must be >= 1");
        if (int(mu[i].size()) != d)
            throw ConfigError("mu[" + std::to_string(i) + "] must have d = " + std::to_string(d) +
                              " entries, got " + std::to_string(mu[i].size()));
        for (int j = 0; j < d; ++j)
            if (!(mu[i][j] > 0.0))
                throw ConfigError("mu[" + std::to_string(i) + "][" + std::to_string(j) +
                                  "] must be > 0, got " + std::to_string(mu[i][j]));
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw ConfigError("type probabilities must sum to 1 within 1e-12, got " +
                          std::to_string(psum));
    for (int j = 0; j < d; ++j)
        if (servers[j] < 1)
            throw ConfigError("servers[" + std::to_string(j) + "] must be >= 1");
}

namespace {

// --- parsing helpers -------------------------------------------------------
// Every accessor carries the JSON path so errors read "$.service.a: ...".

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw ConfigError(path + ": " + reason);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown_fields(const json& j, const std::string& path,
                           const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            fail(path + "." + it.key(), "unknown field");
    }
}

const json& require_field(const json& j, const std::string& path, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double get_number(const json& j, const std::string& path, const std::string& key) {
    const json& v = require_field(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key) {
    const json& v = require_field(j, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key) {
    const json& v = require_field(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

SpeedupModel parse_speedup(const json& j, const std::string& path) {
    require_object(j, path);
    std::string form = get_string(j, path, "form");
    SpeedupModel model;
    if (form == "linear") {
        reject_unknown_fields(j, path, {"form", "a", "b"});
        model.form = SpeedupForm::Linear;
        model.p1 = get_number(j, path, "a");
        model.p2 = get_number(j, path, "b");
    } else if (form == "power") {
        reject_unknown_fields(j, path, {"form", "gamma", "alpha"});
        model.form = SpeedupForm::Power;
        model.p1 = get_number(j, path, "gamma");
        model.p2 = get_number(j, path, "alpha");
    } else if (form == "log") {
        reject_unknown_fields(j, path, {"form", "c", "d"});
        model.form = SpeedupForm::Log;
        model.p1 = get_number(j, path, "c");
        model.p2 = get_number(j, path, "d");
    } else {
        fail(path + ".form", "expected one of \"linear\", \"power\", \"log\", got \"" + form + "\"");
    }
    return model;
}

std::optional<SpeedupModel> parse_optional_speedup(const json& j, const std::string& path,
                                                   const std::string& key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return parse_speedup(*it, path + "." + key);
}

SingleTypeConfig parse_single(const json& j) {
    reject_unknown_fields(j, "$", {"model", "n", "m", "lambda", "k", "service", "batching"});
    SingleTypeConfig c;
    c.n = get_int(j, "$", "n");
    c.m = get_int(j, "$", "m");
    c.lambda = get_number(j, "$", "lambda");
    c.k = get_int(j, "$", "k");
    c.service = parse_speedup(require_field(j, "$", "service"), "$.service");
    c.batching = parse_optional_speedup(j, "$", "batching");
    c.validate();
    return c;
}

TwoTypeConfig parse_two_type(const json& j) {
    reject_unknown_fields(j, "$", {"model", "n", "m", "lambda", "p", "k1", "k2", "service1",
                                   "service2", "batching1", "batching2", "discipline"});
    TwoTypeConfig c;
    c.n = get_int(j, "$", "n");
    c.m = get_int(j, "$", "m");
    c.lambda = get_number(j, "$", "lambda");
    c.p = get_number(j, "$", "p");
    c.k1 = get_int(j, "$", "k1");
    c.k2 = get_int(j, "$", "k2");
    c.service1 = parse_speedup(require_field(j, "$", "service1"), "$.service1");
    c.service2 = parse_speedup(require_field(j, "$", "service2"), "$.service2");
    c.batching1 = parse_optional_speedup(j, "$", "batching1");
    c.batching2 = parse_optional_speedup(j, "$", "batching2");
    std::string disc = get_string(j, "$", "discipline");
    if (disc == "preemptive") c.discipline = Discipline::Preemptive;
    else if (disc == "non_preemptive") c.discipline = Discipline::NonPreemptive;
    else fail("$.discipline", "expected \"preemptive\" or \"non_preemptive\", got \"" + disc + "\"");
    c.validate();
    return c;
}

MultiTypeConfig parse_multi_type(const json& j) {
    reject_unknown_fields(j, "$", {"model", "r", "d", "n", "lambda", "p", "k", "mu", "servers"});
    MultiTypeConfig c;
    c.r = get_int(j, "$", "r");
    c.d = get_int(j, "$", "d");
    c.n = get_int(j, "$", "n");
    c.lambda = get_number(j, "$", "lambda");

    auto get_number_array = [&](const std::string& key) {
        const json& v = require_field(j, "$", key);
        if (!v.is_array()) fail("$." + key, "expected an array");
        std::vector<double> out;
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail("$." + key + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    };
    auto get_int_array = [&](const std::string& key) {
        const json& v = require_field(j, "$", key);
        if (!v.is_array()) fail("$." + key, "expected an array");
        std::vector<int> out;
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer())
                fail("$." + key + "[" + std::to_string(i) + "]", "expected an integer");
            out.push_back(v[i].get<int>());
        }
        return out;
    };

    c.p = get_number_array("p");
    c.k = get_int_array("k");
    c.servers = get_int_array("servers");

    const json& mu = require_field(j, "$", "mu");
    if (!mu.is_array()) fail("$.mu", "expected an array of arrays");
    for (size_t i = 0; i < mu.size(); ++i) {
        const json& row = mu[i];
        std::string rpath = "$.mu[" + std::to_string(i) + "]";
        if (!row.is_array()) fail(rpath, "expected an array");
        std::vector<double> out;
        for (size_t jj = 0; jj < row.size(); ++jj) {
            if (!row[jj].is_number())
                fail(rpath + "[" + std::to_string(jj) + "]", "expected a number");
            out.push_back(row[jj].get<double>());
        }
        c.mu.push_back(std::move(out));
    }
    c.validate();
    return c;
}

json speedup_to_json(const SpeedupModel& m) {
    switch (m.form) {
    case SpeedupForm::Linear: return {{"form", "linear"}, {"a", m.p1}, {"b", m.p2}};
    case SpeedupForm::Power:  return {{"form", "power"}, {"gamma", m.p1}, {"alpha", m.p2}};
    case SpeedupForm::Log:    return {{"form", "log"}, {"c", m.p1}, {"d", m.p2}};
    }
    return {};
}

} // namespace

SystemConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("$: invalid JSON: ") + e.what());
    }
    require_object(j, "$");
    std::string model = get_string(j, "$", "model");
    if (model == "single") return parse_single(j);
    if (model == "two_type") return parse_two_type(j);
    if (model == "multi_type") return parse_multi_type(j);
    fail("$.model", "expected one of \"single\", \"two_type\", \"multi_type\", got \"" + model + "\"");
}

SystemConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const SystemConfig& config) {
    json j;
    if (const auto* s = std::get_if<SingleTypeConfig>(&config)) {
        j = {{"model", "single"}, {"n", s->n}, {"m", s->m}, {"lambda", s->lambda}, {"k", s->k},
             {"service", speedup_to_json(s->service)}};
        if (s->batching) j["batching"] = speedup_to_json(*s->batching);
    } else if (const auto* t = std::get_if<TwoTypeConfig>(&config)) {
        j = {{"model", "two_type"}, {"n", t->n}, {"m", t->m}, {"lambda", t->lambda}, {"p", t->p},
             {"k1", t->k1}, {"k2", t->k2},
             {"service1", speedup_to_json(t->service1)},
             {"service2", speedup_to_json(t->service2)},
             {"discipline", t->discipline == Discipline::Preemptive ? "preemptive" : "non_preemptive"}};
        if (t->batching1) j["batching1"] = speedup_to_json(*t->batching1);
        if (t->batching2) j["batching2"] = speedup_to_json(*t->batching2);
    } else {
        const auto& m = std::get<MultiTypeConfig>(config);
        j = {{"model", "multi_type"}, {"r", m.r}, {"d", m.d}, {"n", m.n}, {"lambda", m.lambda},
             {"p", m.p}, {"k", m.k}, {"mu", m.mu}, {"servers", m.servers}};
    }
    return j.dump(2);
}

} // namespace batchmf
