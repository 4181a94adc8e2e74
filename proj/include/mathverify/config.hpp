// config.hpp - Flat key=value configuration with typed accessors.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "mathverify/judge_client.hpp"
#include "mathverify/rule_verifier.hpp"

namespace mathverify {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "key = value" lines; '#' starts a comment; blank lines ignored.
class KvConfig {
public:
    static KvConfig load_file(const std::string& path);
    static KvConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Keys: rel_tol, abs_tol, n_points, seed, strip_percent, degree_coercion,
// marker_phrases (comma-separated).
EquivConfig equiv_config_from(const KvConfig& kv);

// Keys: judge_base_url, judge_model, judge_api_key, judge_timeout_s,
// judge_max_retries, judge_max_in_flight. Environment variables
// JUDGE_BASE_URL / JUDGE_MODEL / JUDGE_API_KEY take precedence when set.
// Returns nullopt when no base URL is configured anywhere.
std::optional<EndpointConfig> endpoint_config_from(const KvConfig& kv,
                                                   bool apply_env = true);

struct MonitorOptions {
    int window = 20;
    double threshold = 0.15;
};

struct ServiceOptions {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8700;
    std::string mode = "rule";  // rule | hybrid
    EquivConfig equiv;
    std::optional<EndpointConfig> judge;
    size_t cache_size = 100000;
    MonitorOptions monitor;
    std::string audit_log_path;  // empty disables the judge audit log
    std::string trace_path;      // optional trace persistence
    bool fail_on_judge_error = false;  // true -> 503 instead of rule-only fallback
    size_t max_body_bytes = 256 * 1024;
    double correct_reward = 1.0;
    double incorrect_reward = 0.0;
};

// Throws ConfigError on contradictions (hybrid mode without a judge).
ServiceOptions service_options_from(const KvConfig& kv, bool apply_env = true);

}  // namespace mathverify
