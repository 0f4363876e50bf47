#include "aoi/policy_io.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace aoi {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

bool next_line(std::istream& is, std::string& line) {
    if (!std::getline(is, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void expect_line(std::istream& is, const std::string& want) {
    std::string line;
    if (!next_line(is, line) || line != want)
        throw PolicyFormatError("expected '" + want + "', got '" + line + "'");
}

// "# a=1 b=2" -> {a: 1, b: 2}
std::map<std::string, std::string> parse_meta(const std::string& line) {
    if (line.rfind("# ", 0) != 0) throw PolicyFormatError("expected a metadata line, got '" + line + "'");
    std::map<std::string, std::string> kv;
    std::istringstream is(line.substr(2));
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw PolicyFormatError("malformed metadata token '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

const std::string& meta(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw PolicyFormatError("missing metadata key '" + key + "'");
    return it->second;
}

long parse_long(const std::string& text) {
    long v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) throw PolicyFormatError("bad integer '" + text + "'");
    return v;
}

std::string bits_of(const PolicyTable& t) {
    std::string s(t.size(), '0');
    for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] ? '1' : '0';
    return s;
}

PolicyTable table_of(const std::string& bits, double mu) {
    PolicyTable t;
    t.mu = mu;
    t.actions.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw PolicyFormatError("policy bits must be 0 or 1");
        t.actions.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return t;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) throw PolicyFormatError("bad number '" + text + "'");
    return v;
}

void write_joint_policy(std::ostream& os, const JointPolicy& policy) {
    os << "# aoi-joint-policy v1\n";
    os << "# sensors=" << policy.num_sensors << " budget=" << policy.budget << " states=" << policy.actions.size()
       << '\n';
    os << "state,bits\n";
    std::string bits(policy.num_sensors, '0');
    for (std::size_t s = 0; s < policy.actions.size(); ++s) {
        for (int k = 0; k < policy.num_sensors; ++k) bits[k] = action_bit(policy.actions[s], k) ? '1' : '0';
        os << s << ',' << bits << '\n';
    }
}

JointPolicy read_joint_policy(std::istream& is) {
    expect_line(is, "# aoi-joint-policy v1");
    std::string line;
    if (!next_line(is, line)) throw PolicyFormatError("truncated joint policy header");
    const auto kv = parse_meta(line);
    JointPolicy p;
    p.num_sensors = static_cast<int>(parse_long(meta(kv, "sensors")));
    p.budget = static_cast<int>(parse_long(meta(kv, "budget")));
    const long states = parse_long(meta(kv, "states"));
    if (p.num_sensors < 1 || p.num_sensors > kMaxJointSensors || states < 1)
        throw PolicyFormatError("joint policy header out of range");
    expect_line(is, "state,bits");
    p.actions.resize(states);
    for (long s = 0; s < states; ++s) {
        if (!next_line(is, line)) throw PolicyFormatError("joint policy ends early");
        const auto f = split(line, ',');
        if (f.size() != 2 || parse_long(f[0]) != s || static_cast<int>(f[1].size()) != p.num_sensors)
            throw PolicyFormatError("malformed joint policy row " + std::to_string(s));
        JointAction a = 0;
        for (int k = 0; k < p.num_sensors; ++k) {
            if (f[1][k] == '1')
                a |= JointAction{1} << k;
            else if (f[1][k] != '0')
                throw PolicyFormatError("policy bits must be 0 or 1");
        }
        p.actions[s] = a;
    }
    try {
        p.validate();
    } catch (const ModelError& e) {
        throw PolicyFormatError(e.what());
    }
    return p;
}

MixedPolicySet to_policy_set(const RelaxedSolution& solution) {
    MixedPolicySet set;
    set.policies = solution.policies;
    set.lower_bound = solution.lower_bound;
    set.command_rate = solution.command_rate;
    set.mu_star = solution.mu_star;
    set.constraint_active = solution.constraint_active;
    return set;
}

void write_mixed_policies(std::ostream& os, const MixedPolicySet& set) {
    os << "# aoi-mixed-policy v1\n";
    os << "# sensors=" << set.policies.size() << " lower_bound=" << format_double(set.lower_bound)
       << " command_rate=" << format_double(set.command_rate) << " mu_star=" << format_double(set.mu_star)
       << " constraint_active=" << (set.constraint_active ? 1 : 0) << '\n';
    os << "sensor,eta,mu_lower,mu_upper,lower,upper\n";
    for (std::size_t k = 0; k < set.policies.size(); ++k) {
        const auto& p = set.policies[k];
        os << k << ',' << format_double(p.eta) << ',' << format_double(p.lower.mu) << ','
           << format_double(p.upper.mu) << ',' << bits_of(p.lower) << ',' << bits_of(p.upper) << '\n';
    }
}

MixedPolicySet read_mixed_policies(std::istream& is) {
    expect_line(is, "# aoi-mixed-policy v1");
    std::string line;
    if (!next_line(is, line)) throw PolicyFormatError("truncated mixed policy header");
    const auto kv = parse_meta(line);
    MixedPolicySet set;
    const long sensors = parse_long(meta(kv, "sensors"));
    set.lower_bound = parse_double(meta(kv, "lower_bound"));
    set.command_rate = parse_double(meta(kv, "command_rate"));
    set.mu_star = parse_double(meta(kv, "mu_star"));
    set.constraint_active = parse_long(meta(kv, "constraint_active")) != 0;
    if (sensors < 1) throw PolicyFormatError("mixed policy needs at least one sensor");
    expect_line(is, "sensor,eta,mu_lower,mu_upper,lower,upper");
    for (long k = 0; k < sensors; ++k) {
        if (!next_line(is, line)) throw PolicyFormatError("mixed policy ends early");
        const auto f = split(line, ',');
        if (f.size() != 6 || parse_long(f[0]) != k || f[4].size() != f[5].size())
            throw PolicyFormatError("malformed mixed policy row " + std::to_string(k));
        MixedPolicy p{table_of(f[4], parse_double(f[2])), table_of(f[5], parse_double(f[3])), parse_double(f[1])};
        if (!(p.eta >= 0.0 && p.eta <= 1.0)) throw PolicyFormatError("mixing factor outside [0, 1]");
        set.policies.push_back(std::move(p));
    }
    return set;
}

}  // namespace aoi
