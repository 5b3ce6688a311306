#pragma once

// Flat section/key-value run configuration with a canonical text form.
//
//   # comment
//   [experiment]
//   means = 0, -0.3, -0.3          (or: arms = 10 / gap = 0.3)
//   noise = gaussian
//   horizon = 10000
//   replications = 1000
//   seed = 2016
//   checkpoints = 1000, 10000      (optional; default geometric grid)
//
//   [policy ocucb-n]
//   kind = ocucb-n                 (optional when the name is a kind)
//   eta = 2
//   rho = 0.5
//   drop_log_factors = false
//
//   [check walks]
//   type = maximal | lil | tau | alpha_beta
//   ...                            (keys per type, see CheckSpec)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ocucb/conc.hpp"
#include "ocucb/rng.hpp"
#include "ocucb/sim.hpp"

namespace ocucb {

enum class CheckType { Maximal, Lil, Tau, AlphaBeta };

inline std::string_view to_string(CheckType type)
{
    switch (type) {
    case CheckType::Maximal: return "maximal";
    case CheckType::Lil: return "lil";
    case CheckType::Tau: return "tau";
    case CheckType::AlphaBeta: return "alpha_beta";
    }
    return "?";
}

inline CheckType parse_check_type(std::string_view name)
{
    if (name == "maximal") return CheckType::Maximal;
    if (name == "lil") return CheckType::Lil;
    if (name == "tau") return CheckType::Tau;
    if (name == "alpha_beta") return CheckType::AlphaBeta;
    throw std::invalid_argument("unknown check type '" + std::string(name) +
                                "' (expected maximal, lil, tau or alpha_beta)");
}

/// One concentration check. Keys used per type:
///   maximal:    n, epsilon (one per n), replications, noise, seed
///   lil:        eta (grid), floor, horizon, replications, noise, seed
///   tau:        delta, b (grid, crossed), eta, c_fit, horizon, replications, noise, seed
///   alpha_beta: delta, rho (grid, crossed), lambdas, eta, c_fit, c_fit_beta,
///               horizon, replications, noise, seed
/// horizon = 0 in tau/alpha_beta picks max(400, ceil(400 / delta^2)) per delta.
struct CheckSpec {
    std::string name;
    CheckType type = CheckType::Maximal;
    std::vector<std::uint64_t> ns;
    std::vector<double> epsilons;
    std::vector<double> etas;
    double floor = 0.01;
    std::vector<double> deltas;
    std::vector<double> bs;
    std::vector<double> rhos;
    std::vector<double> lambdas;
    double eta = 2.0;
    double c_fit = 1.0;
    double c_fit_beta = 1.0;
    std::uint64_t horizon = 0;
    std::uint64_t replications = 10000;
    NoiseKind noise = NoiseKind::UnitGaussian;
    std::uint64_t seed = 0;

    friend bool operator==(const CheckSpec&, const CheckSpec&) = default;
};

struct RunConfig {
    std::optional<ExperimentConfig> experiment;
    std::vector<CheckSpec> checks;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline std::string format_double(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RunConfig parse()
    {
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            const auto nl = text_.find('\n', pos);
            std::string_view line = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_;
            handle(line);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        finish_section();
        if (!config_.experiment && config_.checks.empty()) {
            throw ConfigError("", "config has neither an [experiment] nor a [check] section", 0);
        }
        if (!policies_.empty() && !config_.experiment) {
            throw ConfigError("policy", "policy sections need an [experiment] section", lines_["policy " + policies_.front().name]);
        }
        if (config_.experiment) {
            config_.experiment->policies = policies_;
            if (!saw_horizon_) throw ConfigError("horizon", "missing key", experiment_line_);
            try {
                config_.experiment->validate();
            } catch (const ConfigError& e) {
                const auto it = lines_.find(e.field());
                const std::string msg = e.what();
                throw ConfigError(e.field(), msg.substr(msg.find(": ") + 2),
                                  it == lines_.end() ? experiment_line_ : it->second);
            }
        }
        return std::move(config_);
    }

private:
    enum class Section { None, Experiment, Policy, Check };

    [[noreturn]] void fail(const std::string& field, const std::string& message) const
    {
        throw ConfigError(field, message, line_);
    }

    void handle(std::string_view raw)
    {
        const auto hash = raw.find('#');
        const std::string_view line = trim(raw.substr(0, hash));
        if (line.empty()) return;
        if (line.front() == '[') {
            if (line.back() != ']') fail("section", "unterminated section header");
            open_section(trim(line.substr(1, line.size() - 2)));
            return;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail("", "empty key");
        if (section_ == Section::None) fail(key, "key outside of any section");
        if (!seen_.insert(key).second) fail(key, "duplicate key");
        if (value.empty()) fail(key, "empty value");
        switch (section_) {
        case Section::Experiment: experiment_key(key, value); break;
        case Section::Policy: policy_key(key, value); break;
        case Section::Check: check_key(key, value); break;
        case Section::None: break;
        }
    }

    void open_section(std::string_view header)
    {
        finish_section();
        seen_.clear();
        const auto space = header.find_first_of(" \t");
        const std::string_view kind = header.substr(0, space);
        const std::string_view name = space == std::string_view::npos ? std::string_view{} : trim(header.substr(space));
        if (kind == "experiment") {
            if (!name.empty()) fail("experiment", "the experiment section takes no name");
            if (config_.experiment) fail("experiment", "duplicate [experiment] section");
            config_.experiment.emplace();
            config_.experiment->replications = 1;
            experiment_line_ = line_;
            section_ = Section::Experiment;
        } else if (kind == "policy") {
            if (name.empty()) fail("policy", "policy section needs a name: [policy NAME]");
            policies_.push_back({std::string(name), PolicyKind::OcucbN, {}});
            policy_kind_set_ = false;
            section_name_ = "policy " + std::string(name);
            lines_[section_name_] = line_;
            section_line_ = line_;
            section_ = Section::Policy;
        } else if (kind == "check") {
            if (name.empty()) fail("check", "check section needs a name: [check NAME]");
            for (char ch : name) {
                const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                                ch == '-' || ch == '_' || ch == '.' || ch == '+';
                if (!ok) fail("check " + std::string(name), "check names may only use [A-Za-z0-9._+-]");
            }
            for (const auto& c : config_.checks) {
                if (c.name == name) fail("check " + std::string(name), "duplicate check name");
            }
            config_.checks.push_back({});
            config_.checks.back().name = std::string(name);
            section_name_ = "check " + std::string(name);
            section_line_ = line_;
            section_ = Section::Check;
        } else {
            fail("section", "unknown section [" + std::string(header) + "]");
        }
    }

    void finish_section()
    {
        if (section_ == Section::Policy) {
            PolicySpec& p = policies_.back();
            if (!policy_kind_set_) {
                try {
                    p.kind = parse_policy_kind(p.name);
                } catch (const std::invalid_argument&) {
                    throw ConfigError(section_name_ + ".kind", "missing key (the name is not a policy kind)",
                                      section_line_);
                }
            }
        } else if (section_ == Section::Check) {
            validate_check(config_.checks.back());
        }
        section_ = Section::None;
    }

    template <typename T>
    T number(const std::string& key, std::string_view v) const
    {
        T out{};
        if constexpr (std::is_floating_point_v<T>) {
            if (v == "inf" || v == "+inf") return std::numeric_limits<T>::infinity();
        }
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            fail(key, "cannot parse '" + std::string(v) + "' as " +
                          (std::is_floating_point_v<T> ? "a number" : "a nonnegative integer"));
        }
        if constexpr (std::is_floating_point_v<T>) {
            if (std::isnan(out)) fail(key, "NaN is not allowed");
        }
        return out;
    }

    template <typename T>
    std::vector<T> list(const std::string& key, std::string_view v) const
    {
        std::vector<T> out;
        for (auto item : split_list(v)) {
            if (item.empty()) fail(key, "empty list entry");
            out.push_back(number<T>(key, item));
        }
        return out;
    }

    bool boolean(const std::string& key, std::string_view v) const
    {
        if (v == "true") return true;
        if (v == "false") return false;
        fail(key, "expected true or false");
    }

    NoiseKind noise(const std::string& key, std::string_view v) const
    {
        try {
            return parse_noise_kind(v);
        } catch (const std::invalid_argument& e) {
            fail(key, e.what());
        }
    }

    double finite(const std::string& key, std::string_view v) const
    {
        const double x = number<double>(key, v);
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    void experiment_key(const std::string& key, std::string_view v)
    {
        ExperimentConfig& e = *config_.experiment;
        lines_[key] = line_;
        if (key == "means") {
            e.instance.means = list<double>(key, v);
        } else if (key == "arms") {
            e.instance.arms = number<std::size_t>(key, v);
        } else if (key == "gap") {
            e.instance.gap = finite(key, v);
        } else if (key == "noise") {
            e.instance.noise = noise(key, v);
        } else if (key == "horizon") {
            e.horizon = number<std::uint64_t>(key, v);
            saw_horizon_ = true;
        } else if (key == "replications") {
            e.replications = number<std::uint64_t>(key, v);
        } else if (key == "seed") {
            e.seed = number<std::uint64_t>(key, v);
        } else if (key == "checkpoints") {
            e.checkpoints = list<std::uint64_t>(key, v);
        } else {
            fail(key, "unknown key in [experiment]");
        }
    }

    void policy_key(const std::string& key, std::string_view v)
    {
        PolicySpec& p = policies_.back();
        if (key == "kind") {
            try {
                p.kind = parse_policy_kind(v);
            } catch (const std::invalid_argument& e) {
                fail(key, e.what());
            }
            policy_kind_set_ = true;
        } else if (key == "eta") {
            p.params.eta = number<double>(key, v);
            if (!(p.params.eta > 1.0) || !std::isfinite(p.params.eta)) fail(key, "eta must exceed 1");
        } else if (key == "rho") {
            p.params.rho = number<double>(key, v);
            if (!(p.params.rho >= 0.0 && p.params.rho <= 1.0)) fail(key, "rho must lie in [0, 1]");
        } else if (key == "drop_log_factors") {
            p.params.drop_log_factors = boolean(key, v);
        } else {
            fail(key, "unknown key in [" + section_name_ + "]");
        }
    }

    void check_key(const std::string& key, std::string_view v)
    {
        CheckSpec& c = config_.checks.back();
        if (key == "type") {
            try {
                c.type = parse_check_type(v);
            } catch (const std::invalid_argument& e) {
                fail(key, e.what());
            }
        } else if (key == "n") {
            c.ns = list<std::uint64_t>(key, v);
        } else if (key == "epsilon") {
            c.epsilons = list<double>(key, v);
        } else if (key == "eta") {
            const auto xs = list<double>(key, v);
            for (double x : xs) {
                if (!(x > 1.0) || !std::isfinite(x)) fail(key, "eta must exceed 1");
            }
            c.etas = xs;
            c.eta = xs.front();
        } else if (key == "floor") {
            c.floor = finite(key, v);
        } else if (key == "delta") {
            c.deltas = list<double>(key, v);
        } else if (key == "b") {
            c.bs = list<double>(key, v);
        } else if (key == "rho") {
            c.rhos = list<double>(key, v);
        } else if (key == "lambdas") {
            c.lambdas = list<double>(key, v);
        } else if (key == "c_fit") {
            c.c_fit = finite(key, v);
        } else if (key == "c_fit_beta") {
            c.c_fit_beta = finite(key, v);
        } else if (key == "horizon") {
            c.horizon = number<std::uint64_t>(key, v);
        } else if (key == "replications") {
            c.replications = number<std::uint64_t>(key, v);
        } else if (key == "noise") {
            c.noise = noise(key, v);
        } else if (key == "seed") {
            c.seed = number<std::uint64_t>(key, v);
        } else {
            fail(key, "unknown key in [" + section_name_ + "]");
        }
        key_lines_[key] = line_;
    }

    // Keys are checked against the type once the section is complete.
    void validate_check(CheckSpec& c)
    {
        auto at = [&](const std::string& key) {
            const auto it = key_lines_.find(key);
            return it == key_lines_.end() ? section_line_ : it->second;
        };
        auto err = [&](const std::string& key, const std::string& msg) {
            throw ConfigError(section_name_ + "." + key, msg, at(key));
        };
        if (!seen_.count("type")) err("type", "missing key");
        std::vector<std::string> allowed{"type", "replications", "noise", "seed"};
        switch (c.type) {
        case CheckType::Maximal: allowed.insert(allowed.end(), {"n", "epsilon"}); break;
        case CheckType::Lil: allowed.insert(allowed.end(), {"eta", "floor", "horizon"}); break;
        case CheckType::Tau: allowed.insert(allowed.end(), {"delta", "b", "eta", "c_fit", "horizon"}); break;
        case CheckType::AlphaBeta:
            allowed.insert(allowed.end(), {"delta", "rho", "lambdas", "eta", "c_fit", "c_fit_beta", "horizon"});
            break;
        }
        for (const auto& key : seen_) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                err(key, "not used by a " + std::string(to_string(c.type)) + " check");
            }
        }
        if (c.replications < 1) err("replications", "replications must be at least 1");
        if (c.type != CheckType::Lil) {
            if (c.etas.size() > 1) err("eta", "a single eta is expected");
            c.etas.clear();
        } else {
            c.eta = 2.0;
        }
        auto require = [&](const std::string& key) {
            if (!seen_.count(key)) err(key, "missing key");
        };
        auto positive = [&](const std::string& key, const std::vector<double>& xs) {
            for (double x : xs) {
                if (!(x > 0.0) || !std::isfinite(x)) err(key, "values must be positive and finite");
            }
        };
        switch (c.type) {
        case CheckType::Maximal:
            require("n");
            require("epsilon");
            if (c.ns.size() != c.epsilons.size()) err("epsilon", "need one epsilon per n");
            for (auto n : c.ns) {
                if (n < 1) err("n", "n must be at least 1");
            }
            positive("epsilon", c.epsilons);
            break;
        case CheckType::Lil:
            require("eta");
            if (!seen_.count("horizon")) c.horizon = 10000;
            if (c.horizon < 1) err("horizon", "horizon must be at least 1");
            break;
        case CheckType::Tau:
            require("delta");
            require("b");
            require("c_fit");
            positive("delta", c.deltas);
            for (double b : c.bs) {
                if (!(b > 1.0) || !std::isfinite(b)) err("b", "b must exceed 1");
            }
            if (!(c.c_fit > 0.0)) err("c_fit", "c_fit must be positive");
            break;
        case CheckType::AlphaBeta:
            require("delta");
            require("rho");
            require("lambdas");
            require("c_fit");
            positive("delta", c.deltas);
            for (double r : c.rhos) {
                if (!(r >= 0.5 && r <= 1.0)) err("rho", "rho must lie in [1/2, 1]");
            }
            for (double l : c.lambdas) {
                if (!(l >= 1.0)) err("lambdas", "lambdas must lie in [1, inf]");
            }
            if (!(c.c_fit > 0.0)) err("c_fit", "c_fit must be positive");
            if (!seen_.count("c_fit_beta")) c.c_fit_beta = c.c_fit;
            if (!(c.c_fit_beta > 0.0)) err("c_fit_beta", "c_fit_beta must be positive");
            break;
        }
        key_lines_.clear();
    }

    std::string_view text_;
    std::size_t line_ = 0;
    Section section_ = Section::None;
    std::string section_name_;
    std::size_t section_line_ = 0;
    std::size_t experiment_line_ = 0;
    bool saw_horizon_ = false;
    bool policy_kind_set_ = false;
    std::set<std::string> seen_;
    std::map<std::string, std::size_t> lines_;
    std::map<std::string, std::size_t> key_lines_;
    std::vector<PolicySpec> policies_;
    RunConfig config_;
};

}  // namespace detail

/// Throws ConfigError carrying the line number and field of the first problem.
inline RunConfig parse_config(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical text: fixed key order, 17 significant digits, defaults spelled out.
inline std::string serialize_config(const RunConfig& config)
{
    std::ostringstream out;
    if (config.experiment) {
        const ExperimentConfig& e = *config.experiment;
        out << "[experiment]\n";
        if (!e.instance.means.empty()) {
            out << "means = " << detail::join(e.instance.means) << "\n";
        } else {
            out << "arms = " << e.instance.arms << "\n";
            out << "gap = " << format_double(e.instance.gap) << "\n";
        }
        out << "noise = " << to_string(e.instance.noise) << "\n";
        out << "horizon = " << e.horizon << "\n";
        out << "replications = " << e.replications << "\n";
        out << "seed = " << e.seed << "\n";
        if (!e.checkpoints.empty()) out << "checkpoints = " << detail::join(e.checkpoints) << "\n";
        for (const auto& p : e.policies) {
            out << "\n[policy " << p.name << "]\n";
            out << "kind = " << to_string(p.kind) << "\n";
            out << "eta = " << format_double(p.params.eta) << "\n";
            out << "rho = " << format_double(p.params.rho) << "\n";
            out << "drop_log_factors = " << (p.params.drop_log_factors ? "true" : "false") << "\n";
        }
    }
    for (const auto& c : config.checks) {
        if (config.experiment || &c != &config.checks.front()) out << "\n";
        out << "[check " << c.name << "]\n";
        out << "type = " << to_string(c.type) << "\n";
        switch (c.type) {
        case CheckType::Maximal:
            out << "n = " << detail::join(c.ns) << "\n";
            out << "epsilon = " << detail::join(c.epsilons) << "\n";
            break;
        case CheckType::Lil:
            out << "eta = " << detail::join(c.etas) << "\n";
            out << "floor = " << format_double(c.floor) << "\n";
            out << "horizon = " << c.horizon << "\n";
            break;
        case CheckType::Tau:
            out << "delta = " << detail::join(c.deltas) << "\n";
            out << "b = " << detail::join(c.bs) << "\n";
            out << "eta = " << format_double(c.eta) << "\n";
            out << "c_fit = " << format_double(c.c_fit) << "\n";
            out << "horizon = " << c.horizon << "\n";
            break;
        case CheckType::AlphaBeta:
            out << "delta = " << detail::join(c.deltas) << "\n";
            out << "rho = " << detail::join(c.rhos) << "\n";
            out << "lambdas = " << detail::join(c.lambdas) << "\n";
            out << "eta = " << format_double(c.eta) << "\n";
            out << "c_fit = " << format_double(c.c_fit) << "\n";
            out << "c_fit_beta = " << format_double(c.c_fit_beta) << "\n";
            out << "horizon = " << c.horizon << "\n";
            break;
        }
        out << "replications = " << c.replications << "\n";
        out << "noise = " << to_string(c.noise) << "\n";
        out << "seed = " << c.seed << "\n";
    }
    return out.str();
}

/// FNV-1a of the canonical text as 16 hex digits.
inline std::string config_hash(const RunConfig& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_config(config))));
    return buf;
}

/// Replaces the master seed of the experiment and every check.
inline void override_seed(RunConfig& config, std::uint64_t seed)
{
    if (config.experiment) config.experiment->seed = seed;
    for (auto& c : config.checks) c.seed = seed;
}

}  // namespace ocucb
