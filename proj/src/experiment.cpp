#include "aoi/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "aoi/policy_io.hpp"

#ifndef AOI_BUILD_TAG
#define AOI_BUILD_TAG "unknown"
#endif

namespace aoi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

template <class T>
T parse_int(const std::string& key, const std::string& text) {
    T v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        return parse_double(text);
    } catch (const PolicyFormatError&) {
        throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
    }
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& t : split_list(text, ',')) out.push_back(parse_real(key, t));
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
    return s;
}

}  // namespace

double ExperimentSpec::effective_gamma() const {
    if (gamma) return *gamma;
    if (budget) return static_cast<double>(*budget) / num_sensors;
    throw ConfigError("one of 'budget' or 'gamma' is required");
}

void ExperimentSpec::validate() const {
    if (budget.has_value() == gamma.has_value()) throw ConfigError("give exactly one of 'budget' or 'gamma'");
    if (num_sensors < 1 || num_users < 1) throw ConfigError("num_sensors and num_users must be positive");
    if (delta_max < 2) throw ConfigError("delta_max must be at least 2");
    if (battery_capacity < 1) throw ConfigError("battery_capacity must be at least 1");
    if (request_probs.empty()) throw ConfigError("request_probs is empty");
    if (harvest_rule != "round_robin") throw ConfigError("unknown harvest_rule '" + harvest_rule + "'");
    if (harvest_rates.empty() && harvest_set.empty()) throw ConfigError("harvest_set is empty");
    static const std::set<std::string> known{"exact", "relaxed", "rtt", "greedy"};
    for (const auto& p : policies)
        if (!known.count(p)) throw ConfigError("unknown policy '" + p + "'");
    if (horizon < 1 || episodes < 1) throw ConfigError("horizon and episodes must be positive");
    if (!(theta > 0.0) || !(epsilon > 0.0) || !(eta_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
    for (int k : sweep_k)
        if (k < 1) throw ConfigError("sweep_k entries must be positive");
    try {
        build_network(*this).validate();
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
}

ExperimentSpec parse_spec(const std::string& text) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"num_sensors", [&](auto& k, auto& v) { spec.num_sensors = parse_int<int>(k, v); }},
        {"num_users", [&](auto& k, auto& v) { spec.num_users = parse_int<int>(k, v); }},
        {"budget", [&](auto& k, auto& v) { spec.budget = parse_int<int>(k, v); }},
        {"gamma", [&](auto& k, auto& v) { spec.gamma = parse_real(k, v); }},
        {"delta_max", [&](auto& k, auto& v) { spec.delta_max = parse_int<int>(k, v); }},
        {"battery_capacity", [&](auto& k, auto& v) { spec.battery_capacity = parse_int<int>(k, v); }},
        {"request_prob", [&](auto& k, auto& v) { spec.request_probs = {{parse_real(k, v)}}; }},
        {"request_probs",
         [&](auto& k, auto& v) {
             spec.request_probs.clear();
             for (const auto& row : split_list(v, ';')) spec.request_probs.push_back(parse_reals(k, row));
         }},
        {"harvest_rule", [&](auto&, auto& v) { spec.harvest_rule = v; }},
        {"harvest_set", [&](auto& k, auto& v) { spec.harvest_set = parse_reals(k, v); }},
        {"harvest_rates", [&](auto& k, auto& v) { spec.harvest_rates = parse_reals(k, v); }},
        {"policies", [&](auto&, auto& v) { spec.policies = split_list(v, ','); }},
        {"horizon", [&](auto& k, auto& v) { spec.horizon = parse_int<std::int64_t>(k, v); }},
        {"episodes", [&](auto& k, auto& v) { spec.episodes = parse_int<int>(k, v); }},
        {"seed", [&](auto& k, auto& v) { spec.seed = parse_int<std::uint64_t>(k, v); }},
        {"theta", [&](auto& k, auto& v) { spec.theta = parse_real(k, v); }},
        {"epsilon", [&](auto& k, auto& v) { spec.epsilon = parse_real(k, v); }},
        {"eta_tol", [&](auto& k, auto& v) { spec.eta_tol = parse_real(k, v); }},
        {"max_iterations", [&](auto& k, auto& v) { spec.max_iterations = parse_int<int>(k, v); }},
        {"sweep_k",
         [&](auto& k, auto& v) {
             spec.sweep_k.clear();
             for (const auto& t : split_list(v, ',')) spec.sweep_k.push_back(parse_int<int>(k, t));
         }},
        {"sweep_gamma", [&](auto& k, auto& v) { spec.sweep_gamma = parse_reals(k, v); }},
        {"out_dir", [&](auto&, auto& v) { spec.out_dir = v; }},
    };

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (key == "request_prob") key = "request_probs";
        if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        it->second(it->first, value);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

std::string serialize_spec(const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "num_sensors = " << spec.num_sensors << '\n';
    os << "num_users = " << spec.num_users << '\n';
    if (spec.budget) os << "budget = " << *spec.budget << '\n';
    if (spec.gamma) os << "gamma = " << format_double(*spec.gamma) << '\n';
    os << "delta_max = " << spec.delta_max << '\n';
    os << "battery_capacity = " << spec.battery_capacity << '\n';
    os << "request_probs = ";
    for (std::size_t i = 0; i < spec.request_probs.size(); ++i) os << (i ? ";" : "") << join(spec.request_probs[i]);
    os << '\n';
    os << "harvest_rule = " << spec.harvest_rule << '\n';
    os << "harvest_set = " << join(spec.harvest_set) << '\n';
    if (!spec.harvest_rates.empty()) os << "harvest_rates = " << join(spec.harvest_rates) << '\n';
    os << "policies = ";
    for (std::size_t i = 0; i < spec.policies.size(); ++i) os << (i ? "," : "") << spec.policies[i];
    os << '\n';
    os << "horizon = " << spec.horizon << '\n';
    os << "episodes = " << spec.episodes << '\n';
    os << "seed = " << spec.seed << '\n';
    os << "theta = " << format_double(spec.theta) << '\n';
    os << "epsilon = " << format_double(spec.epsilon) << '\n';
    os << "eta_tol = " << format_double(spec.eta_tol) << '\n';
    os << "max_iterations = " << spec.max_iterations << '\n';
    if (!spec.sweep_k.empty()) {
        os << "sweep_k = ";
        for (std::size_t i = 0; i < spec.sweep_k.size(); ++i) os << (i ? "," : "") << spec.sweep_k[i];
        os << '\n';
    }
    if (!spec.sweep_gamma.empty()) os << "sweep_gamma = " << join(spec.sweep_gamma) << '\n';
    os << "out_dir = " << spec.out_dir << '\n';
    return os.str();
}

std::string spec_hash(const ExperimentSpec& spec) {
    // where the results go does not change what they are
    ExperimentSpec keyed = spec;
    keyed.out_dir = ".";
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialize_spec(keyed)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> round_robin_rates(const std::vector<double>& set, int num_sensors) {
    if (set.empty()) throw ConfigError("harvest_set is empty");
    std::vector<double> out(num_sensors);
    for (int k = 0; k < num_sensors; ++k) out[k] = set[k % set.size()];
    return out;
}

NetworkConfig build_network(const ExperimentSpec& spec, std::optional<int> num_sensors, std::optional<double> gamma) {
    const int K = num_sensors.value_or(spec.num_sensors);
    NetworkConfig cfg;
    cfg.num_users = spec.num_users;
    cfg.delta_max = spec.delta_max;
    if (!gamma && !num_sensors && spec.budget) {
        cfg.budget = *spec.budget;
    } else {
        const double g = gamma.value_or(spec.effective_gamma());
        const double m = g * K;
        if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
            throw ConfigError("gamma * K = " + format_double(m) + " is not an integer budget");
        cfg.budget = static_cast<int>(std::lround(m));
    }

    std::vector<double> rates;
    if (!spec.harvest_rates.empty()) {
        if (static_cast<int>(spec.harvest_rates.size()) != K)
            throw ConfigError("harvest_rates lists " + std::to_string(spec.harvest_rates.size()) +
                              " rates for " + std::to_string(K) + " sensors");
        rates = spec.harvest_rates;
    } else {
        rates = round_robin_rates(spec.harvest_set, K);
    }

    const auto& rows = spec.request_probs;
    if (rows.size() != 1 && static_cast<int>(rows.size()) != K)
        throw ConfigError("request_probs needs one row or one row per sensor");
    for (int k = 0; k < K; ++k) {
        const auto& row = rows.size() == 1 ? rows[0] : rows[k];
        std::vector<double> p;
        if (row.size() == 1)
            p.assign(spec.num_users, row[0]);
        else if (static_cast<int>(row.size()) == spec.num_users)
            p = row;
        else
            throw ConfigError("request_probs row needs one value or one per user");
        cfg.sensors.push_back(SensorParams{rates[k], spec.battery_capacity, std::move(p)});
    }
    return cfg;
}

RelaxedOptions relaxed_options(const ExperimentSpec& spec) {
    RelaxedOptions o;
    o.rvia.theta = spec.theta;
    o.rvia.max_iterations = spec.max_iterations;
    o.rvia.exec = kernels::Exec::parallel;
    o.epsilon = spec.epsilon;
    o.eta_tolerance = spec.eta_tol;
    return o;
}

SimOptions sim_options(const ExperimentSpec& spec) {
    SimOptions o;
    o.horizon = spec.horizon;
    o.episodes = spec.episodes;
    o.seed = spec.seed;
    return o;
}

const char* build_tag() { return AOI_BUILD_TAG; }

}  // namespace aoi
