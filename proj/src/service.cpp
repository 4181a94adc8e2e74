#include "mathverify/service.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mathverify/hash.hpp"
#include "mathverify/hybrid.hpp"
#include "mathverify/monitor.hpp"

namespace mathverify {

namespace {

// One JSONL line per judge consultation; the audit trail for post-hoc
// hacking analysis.
class AuditLog {
public:
    explicit AuditLog(const std::string& path) {
        if (!path.empty()) out_.open(path, std::ios::app | std::ios::binary);
    }

    void record(const JudgeRequest& req, const JudgeDecision& d) {
        if (!out_.is_open()) return;
        nlohmann::ordered_json line;
        line["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(build_prompt(req))));
        line["prompt_hash"] = hex;
        line["decision"] = to_string(d.value);
        line["latency_ms"] = d.latency_ms;
        line["token_count"] = d.token_count;
        std::lock_guard<std::mutex> lk(m_);
        out_ << line.dump() << "\n";
        out_.flush();
    }

private:
    std::mutex m_;
    std::ofstream out_;
};

struct FieldError {
    std::string field;
    std::string message;
};

// Returns nullopt and fills err on schema violations.
std::optional<BatchItem> parse_verify_body(const nlohmann::json& obj, FieldError& err) {
    if (!obj.is_object()) {
        err = {"", "request body must be a JSON object"};
        return std::nullopt;
    }
    BatchItem item;
    auto gt = obj.find("ground_truth");
    if (gt == obj.end()) {
        err = {"ground_truth", "missing required field"};
        return std::nullopt;
    }
    if (!gt->is_string()) {
        err = {"ground_truth", "must be a string"};
        return std::nullopt;
    }
    item.ground_truth = gt->get<std::string>();
    if (item.ground_truth.empty()) {
        err = {"ground_truth", "must be non-empty"};
        return std::nullopt;
    }
    auto resp = obj.find("response");
    if (resp == obj.end()) {
        err = {"response", "missing required field"};
        return std::nullopt;
    }
    if (!resp->is_string()) {
        err = {"response", "must be a string"};
        return std::nullopt;
    }
    item.response = resp->get<std::string>();
    if (auto q = obj.find("question"); q != obj.end()) {
        if (!q->is_string() && !q->is_null()) {
            err = {"question", "must be a string"};
            return std::nullopt;
        }
        if (q->is_string()) item.question = q->get<std::string>();
    }
    return item;
}

nlohmann::ordered_json error_json(const FieldError& err, int index = -1) {
    nlohmann::ordered_json j;
    j["error"] = err.message;
    if (!err.field.empty()) j["field"] = err.field;
    if (index >= 0) j["index"] = index;
    return j;
}

}  // namespace

struct RewardService::Impl {
    ServiceOptions opts;
    std::unique_ptr<HybridVerifier> verifier;
    std::unique_ptr<AuditLog> audit;
    httplib::Server server;
    RewardTrace trace;
    std::mutex trace_mutex;
    std::thread worker;
    int bound_port = 0;

    explicit Impl(ServiceOptions o, JudgeFn judge_override) : opts(std::move(o)) {
        audit = std::make_unique<AuditLog>(opts.audit_log_path);
        JudgeFn judge;
        if (opts.mode == "hybrid") {
            JudgeFn base = judge_override;
            if (!base) base = make_http_judge(*opts.judge);
            AuditLog* log = audit.get();
            judge = [base, log](const JudgeRequest& req) {
                JudgeDecision d = base(req);
                log->record(req, d);
                return d;
            };
        }
        HybridConfig hc;
        hc.equiv = opts.equiv;
        hc.cache_capacity = opts.cache_size;
        verifier = std::make_unique<HybridVerifier>(hc, judge);
        if (!opts.trace_path.empty()) {
            std::ifstream probe(opts.trace_path);
            if (probe.good()) trace = load_trace(opts.trace_path);
        }
        install_routes();
    }

    nlohmann::ordered_json judgment_json(const Judgment& j) {
        RewardSpec spec{opts.correct_reward, opts.incorrect_reward};
        nlohmann::ordered_json out;
        out["verdict"] = to_string(j.verdict);
        out["reward"] = reward(j, spec);
        out["provenance"] = to_string(j.provenance);
        out["basis"] = j.basis;
        out["latency_ms"] = j.elapsed_ms;
        return out;
    }

    bool judge_failed(const Judgment& j) const {
        return opts.fail_on_judge_error && j.basis == "judge_error";
    }

    void install_routes() {
        server.set_payload_max_length(opts.max_body_bytes);

        server.Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded()) {
                res.status = 400;
                res.set_content(error_json({"", "invalid JSON"}).dump(), "application/json");
                return;
            }
            FieldError err;
            auto item = parse_verify_body(body, err);
            if (!item) {
                res.status = 400;
                res.set_content(error_json(err).dump(), "application/json");
                return;
            }
            Judgment j = verifier->verify(item->question, item->ground_truth, item->response);
            if (judge_failed(j)) {
                res.status = 503;
                res.set_content(error_json({"", "judge endpoint unreachable"}).dump(),
                                "application/json");
                return;
            }
            res.set_content(judgment_json(j).dump(), "application/json");
        });

        server.Post("/verify_batch", [this](const httplib::Request& req,
                                            httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_array()) {
                res.status = 400;
                res.set_content(error_json({"", "request body must be a JSON array"}).dump(),
                                "application/json");
                return;
            }
            std::vector<BatchItem> items;
            items.reserve(body.size());
            for (size_t i = 0; i < body.size(); ++i) {
                FieldError err;
                auto item = parse_verify_body(body[i], err);
                if (!item) {
                    res.status = 400;
                    res.set_content(error_json(err, static_cast<int>(i)).dump(),
                                    "application/json");
                    return;
                }
                items.push_back(std::move(*item));
            }
            auto judgments = verifier->verify_batch(items);
            nlohmann::ordered_json out = nlohmann::ordered_json::array();
            for (const auto& j : judgments) {
                if (judge_failed(j)) {
                    res.status = 503;
                    res.set_content(error_json({"", "judge endpoint unreachable"}).dump(),
                                    "application/json");
                    return;
                }
                out.push_back(judgment_json(j));
            }
            res.set_content(out.dump(), "application/json");
        });

        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            nlohmann::ordered_json j;
            j["status"] = "ok";
            j["mode"] = opts.mode;
            res.set_content(j.dump(), "application/json");
        });

        server.Get("/monitor", [this](const httplib::Request&, httplib::Response& res) {
            GapStats stats;
            {
                std::lock_guard<std::mutex> lk(trace_mutex);
                stats = gap_stats(trace, opts.monitor.window, opts.monitor.threshold);
            }
            nlohmann::ordered_json j;
            j["oracle_points"] = stats.oracle_points;
            j["window"] = opts.monitor.window;
            j["threshold"] = opts.monitor.threshold;
            auto opt_num = [](const std::optional<double>& v) {
                return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
            };
            j["last_window_mean_gap"] = opt_num(stats.last_window_mean);
            j["min_window_mean_gap"] = opt_num(stats.min_window_mean);
            j["max_window_mean_gap"] = opt_num(stats.max_window_mean);
            if (stats.alert) {
                j["alert"] = {{"first_flag_step", stats.alert->first_flag_step},
                              {"window_mean_gap", stats.alert->window_mean_gap},
                              {"threshold", stats.alert->threshold},
                              {"window", stats.alert->window}};
            } else {
                j["alert"] = nullptr;
            }
            res.set_content(j.dump(), "application/json");
        });

        server.Post("/trace", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                res.status = 400;
                res.set_content(error_json({"", "request body must be a JSON object"}).dump(),
                                "application/json");
                return;
            }
            if (!body.contains("step") || !body["step"].is_number_integer()) {
                res.status = 400;
                res.set_content(error_json({"step", "must be an integer"}).dump(),
                                "application/json");
                return;
            }
            if (!body.contains("train_reward") || !body["train_reward"].is_number()) {
                res.status = 400;
                res.set_content(error_json({"train_reward", "must be a number"}).dump(),
                                "application/json");
                return;
            }
            TracePoint p;
            p.step = body["step"].get<long>();
            p.train_reward = body["train_reward"].get<double>();
            if (body.contains("oracle_reward") && body["oracle_reward"].is_number())
                p.oracle_reward = body["oracle_reward"].get<double>();
            try {
                std::lock_guard<std::mutex> lk(trace_mutex);
                trace.append(p);
                if (!opts.trace_path.empty()) {
                    std::ofstream f(opts.trace_path, std::ios::app | std::ios::binary);
                    nlohmann::ordered_json line;
                    line["step"] = p.step;
                    line["train_reward"] = p.train_reward;
                    line["oracle_reward"] = p.oracle_reward
                                                ? nlohmann::ordered_json(*p.oracle_reward)
                                                : nlohmann::ordered_json(nullptr);
                    f << line.dump() << "\n";
                }
            } catch (const std::invalid_argument& ex) {
                res.status = 400;
                res.set_content(error_json({"step", ex.what()}).dump(), "application/json");
                return;
            }
            res.set_content("{\"status\":\"ok\"}", "application/json");
        });
    }
};

RewardService::RewardService(ServiceOptions options, JudgeFn judge_override)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(judge_override))) {}

RewardService::~RewardService() { stop(); }

const ServiceOptions& RewardService::options() const { return impl_->opts; }

void RewardService::run() {
    if (!impl_->server.bind_to_port(impl_->opts.listen_host, impl_->opts.listen_port))
        throw ConfigError("cannot bind " + impl_->opts.listen_host + ":" +
                          std::to_string(impl_->opts.listen_port));
    impl_->bound_port = impl_->opts.listen_port;
    impl_->server.listen_after_bind();
}

int RewardService::start_background() {
    int port = impl_->server.bind_to_any_port(impl_->opts.listen_host);
    if (port <= 0) throw ConfigError("cannot bind an ephemeral port");
    impl_->bound_port = port;
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void RewardService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace mathverify
