#include "mathverify/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mathverify {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

}  // namespace

KvConfig KvConfig::from_string(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

KvConfig KvConfig::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + *v + "'");
    }
}

long KvConfig::get_long(const std::string& key, long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        long n = std::stol(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing characters");
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + *v + "'");
    }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + *v + "'");
}

EquivConfig equiv_config_from(const KvConfig& kv) {
    EquivConfig cfg;
    cfg.rel_tol = kv.get_double("rel_tol", cfg.rel_tol);
    cfg.abs_tol = kv.get_double("abs_tol", cfg.abs_tol);
    cfg.n_points = static_cast<int>(kv.get_long("n_points", cfg.n_points));
    cfg.seed = static_cast<uint64_t>(kv.get_long("seed", static_cast<long>(cfg.seed)));
    cfg.strip_percent = kv.get_bool("strip_percent", cfg.strip_percent);
    cfg.degree_coercion = kv.get_bool("degree_coercion", cfg.degree_coercion);
    if (auto phrases = kv.get("marker_phrases")) {
        cfg.marker_phrases.clear();
        std::istringstream in(*phrases);
        std::string item;
        while (std::getline(in, item, ',')) {
            std::string t = trim(item);
            if (!t.empty()) cfg.marker_phrases.push_back(t);
        }
        if (cfg.marker_phrases.empty())
            throw ConfigError("config key 'marker_phrases': no phrases given");
    }
    if (cfg.n_points < 1) throw ConfigError("config key 'n_points': must be >= 1");
    return cfg;
}

std::optional<EndpointConfig> endpoint_config_from(const KvConfig& kv, bool apply_env) {
    EndpointConfig cfg;
    cfg.base_url = kv.get_or("judge_base_url", "");
    cfg.model = kv.get_or("judge_model", "");
    cfg.api_key = kv.get_or("judge_api_key", "");
    cfg.timeout_s = kv.get_double("judge_timeout_s", cfg.timeout_s);
    cfg.max_retries = static_cast<int>(kv.get_long("judge_max_retries", cfg.max_retries));
    cfg.max_in_flight =
        static_cast<int>(kv.get_long("judge_max_in_flight", cfg.max_in_flight));
    if (apply_env) {
        if (auto v = env("JUDGE_BASE_URL")) cfg.base_url = *v;
        if (auto v = env("JUDGE_MODEL")) cfg.model = *v;
        if (auto v = env("JUDGE_API_KEY")) cfg.api_key = *v;
    }
    if (cfg.base_url.empty()) return std::nullopt;
    return cfg;
}

ServiceOptions service_options_from(const KvConfig& kv, bool apply_env) {
    ServiceOptions o;
    o.listen_host = kv.get_or("listen_host", o.listen_host);
    o.listen_port = static_cast<int>(kv.get_long("listen_port", o.listen_port));
    o.mode = kv.get_or("mode", o.mode);
    o.equiv = equiv_config_from(kv);
    o.judge = endpoint_config_from(kv, apply_env);
    o.cache_size = static_cast<size_t>(kv.get_long("cache_size", static_cast<long>(o.cache_size)));
    o.monitor.window = static_cast<int>(kv.get_long("monitor_window", o.monitor.window));
    o.monitor.threshold = kv.get_double("monitor_threshold", o.monitor.threshold);
    o.audit_log_path = kv.get_or("audit_log", "");
    o.trace_path = kv.get_or("trace_path", "");
    o.fail_on_judge_error = kv.get_bool("fail_on_judge_error", o.fail_on_judge_error);
    o.max_body_bytes =
        static_cast<size_t>(kv.get_long("max_body_bytes", static_cast<long>(o.max_body_bytes)));
    o.correct_reward = kv.get_double("correct_reward", o.correct_reward);
    o.incorrect_reward = kv.get_double("incorrect_reward", o.incorrect_reward);
    if (o.mode != "rule" && o.mode != "hybrid")
        throw ConfigError("config key 'mode': expected 'rule' or 'hybrid'");
    if (o.mode == "hybrid" && !o.judge)
        throw ConfigError("hybrid mode requires a judge endpoint (judge_base_url)");
    if (o.correct_reward <= o.incorrect_reward)
        throw ConfigError("correct_reward must exceed incorrect_reward");
    if (o.monitor.window < 1) throw ConfigError("config key 'monitor_window': must be >= 1");
    return o;
}

}  // namespace mathverify
