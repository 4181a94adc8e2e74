#include "mathverify/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mathverify/config.hpp"
#include "mathverify/eval_harness.hpp"
#include "mathverify/hybrid.hpp"
#include "mathverify/monitor.hpp"
#include "mathverify/prober.hpp"
#include "mathverify/service.hpp"

namespace mathverify {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
    std::string config_path;
    std::string verifier = "rule";
    std::string judge_config_path;
};

KvConfig load_kv(const std::string& path) {
    if (path.empty()) return {};
    return KvConfig::load_file(path);
}

nlohmann::ordered_json judgment_json(const Judgment& j) {
    nlohmann::ordered_json out;
    out["verdict"] = to_string(j.verdict);
    out["reward"] = reward(j);
    out["provenance"] = to_string(j.provenance);
    out["basis"] = j.basis;
    out["latency_ms"] = j.elapsed_ms;
    return out;
}

// Builds the selected verifier. "hybrid" and "model" need a judge endpoint
// from the config file or JUDGE_* environment variables.
VerifierFn build_verifier(const std::string& kind, const KvConfig& kv) {
    EquivConfig equiv = equiv_config_from(kv);
    if (kind == "rule") {
        return [equiv](const std::string&, const std::string& gt, const std::string& resp) {
            return verify_rule(resp, gt, equiv);
        };
    }
    auto endpoint = endpoint_config_from(kv);
    if (!endpoint)
        throw ConfigError("verifier '" + kind +
                          "' requires a judge endpoint (judge_base_url or JUDGE_BASE_URL)");
    HybridConfig hc;
    hc.equiv = equiv;
    JudgeFn judge = make_http_judge(*endpoint);
    if (kind == "hybrid") {
        auto verifier = std::make_shared<HybridVerifier>(hc, judge);
        return [verifier](const std::string& q, const std::string& gt,
                          const std::string& resp) { return verifier->verify(q, gt, resp); };
    }
    if (kind == "model") {
        return [judge, hc](const std::string& q, const std::string& gt,
                           const std::string& resp) {
            return verify_model(q, gt, resp, judge, hc);
        };
    }
    throw ConfigError("unknown verifier '" + kind + "'");
}

int run_verify(const CommonOpts& common, const std::string& question,
               const std::string& gt, const std::string& response) {
    KvConfig kv = load_kv(common.config_path);
    VerifierFn verifier = build_verifier(common.verifier, kv);
    Judgment j = verifier(question, gt, response);
    std::cout << judgment_json(j).dump(2) << "\n";
    return kExitOk;
}

int run_eval(const CommonOpts& common, const std::string& records_path,
             const std::string& report_path, bool annotate, const std::string& out_path) {
    KvConfig kv = load_kv(!common.judge_config_path.empty() ? common.judge_config_path
                                                            : common.config_path);
    auto records = load_records(records_path);

    if (annotate) {
        if (out_path.empty()) throw ConfigError("--annotate requires --out");
        auto endpoint = endpoint_config_from(kv);
        if (!endpoint) throw ConfigError("annotation requires a judge endpoint");
        JudgeFn judge = make_http_judge(*endpoint);
        HybridConfig hc;
        hc.equiv = equiv_config_from(kv);
        hc.template_kind = PromptTemplate::WithQuestion;
        size_t unlabeled = 0;
        for (auto& r : records) {
            JudgeRequest req;
            req.question = r.question;
            req.ground_truth = r.ground_truth;
            req.candidate = candidate_for_judge(r.response, hc.equiv, hc.raw_tail_limit);
            req.template_kind =
                r.question.empty() ? PromptTemplate::WithoutQuestion : PromptTemplate::WithQuestion;
            req.decode = hc.decode;
            try {
                JudgeDecision d = judge(req);
                if (d.value == DecisionValue::Yes) {
                    r.gold_label = VerdictValue::Correct;
                } else if (d.value == DecisionValue::No) {
                    r.gold_label = VerdictValue::Incorrect;
                } else {
                    ++unlabeled;
                }
            } catch (const TransportError&) {
                ++unlabeled;
            }
            r.extra["annotator"] = endpoint->model;
        }
        if (unlabeled)
            std::cerr << "warning: " << unlabeled << " record(s) left unlabeled\n";
        write_records(out_path, records);
        std::cout << "annotated " << (records.size() - unlabeled) << "/" << records.size()
                  << " records -> " << out_path << "\n";
        return kExitOk;
    }

    VerifierFn verifier = build_verifier(common.verifier, kv);
    MetricsReport report = evaluate(records, verifier);
    RenderedReport rendered = render_report(report);
    std::cout << rendered.text;
    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report: " + report_path);
        f << rendered.json << "\n";
    }
    return kExitOk;
}

int run_probe_build(const std::string& samples_path, uint64_t seed,
                    const std::string& out_path) {
    auto samples = load_samples(samples_path);
    auto records = build_adversarial_dataset(samples, seed);
    write_adversarial_records(out_path, records);
    std::cout << "wrote " << records.size() << " adversarial records ("
              << samples.size() << " samples x " << kAllPatternKinds.size()
              << " patterns) -> " << out_path << "\n";
    return kExitOk;
}

int run_probe_run(const CommonOpts& common, const std::string& dataset_path,
                  const std::string& report_path, bool record_weighted) {
    KvConfig kv = load_kv(!common.judge_config_path.empty() ? common.judge_config_path
                                                            : common.config_path);
    auto records = load_adversarial_records(dataset_path);
    VerifierFn verifier = build_verifier(common.verifier, kv);
    AttackReport report = attack_success_rate(verifier, records);
    std::string json = render_attack_report_json(report, record_weighted);
    std::cout << json << "\n";
    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report: " + report_path);
        f << json << "\n";
    }
    return kExitOk;
}

int run_monitor(const std::string& trace_path, int window, double threshold) {
    RewardTrace trace = load_trace(trace_path);
    GapStats stats = gap_stats(trace, window, threshold);
    nlohmann::ordered_json j;
    j["points"] = trace.points().size();
    j["oracle_points"] = stats.oracle_points;
    j["window"] = window;
    j["threshold"] = threshold;
    if (stats.alert) {
        j["alert"] = {{"first_flag_step", stats.alert->first_flag_step},
                      {"window_mean_gap", stats.alert->window_mean_gap},
                      {"threshold", stats.alert->threshold},
                      {"window", stats.alert->window}};
    } else {
        j["alert"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int run_serve(const std::string& config_path, const std::string& listen,
              const std::string& mode) {
    KvConfig kv = load_kv(config_path);
    if (!listen.empty()) {
        size_t colon = listen.rfind(':');
        if (colon == std::string::npos)
            throw ConfigError("--listen expects host:port");
        kv.set("listen_host", listen.substr(0, colon));
        kv.set("listen_port", listen.substr(colon + 1));
    }
    if (!mode.empty()) kv.set("mode", mode);
    ServiceOptions opts = service_options_from(kv);
    RewardService service(std::move(opts));
    std::cerr << "listening on " << service.options().listen_host << ":"
              << service.options().listen_port << " (" << service.options().mode
              << " mode)\n";
    service.run();
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Math answer verification toolkit"};
    app.require_subcommand(1);

    CommonOpts common;

    // verify
    auto* verify = app.add_subcommand("verify", "Verify one response against a ground truth");
    std::string v_question, v_gt, v_response;
    verify->add_option("--question,-q", v_question, "Original question (optional)");
    verify->add_option("--gt,-g", v_gt, "Ground-truth answer")->required();
    verify->add_option("--response,-r", v_response, "Model response")->required();
    verify->add_option("--config,-c", common.config_path, "Config file (key = value)");
    verify->add_option("--verifier", common.verifier, "rule | hybrid | model")
        ->check(CLI::IsMember({"rule", "hybrid", "model"}));

    // eval
    auto* eval = app.add_subcommand("eval", "Score a verifier on labeled records");
    std::string e_records, e_report, e_out;
    bool e_annotate = false;
    eval->add_option("--records", e_records, "JSONL of labeled records")->required();
    eval->add_option("--verifier", common.verifier, "rule | hybrid | model")
        ->check(CLI::IsMember({"rule", "hybrid", "model"}));
    eval->add_option("--judge-config", common.judge_config_path, "Judge endpoint config");
    eval->add_option("--config,-c", common.config_path, "Config file");
    eval->add_option("--report", e_report, "Write the JSON report here");
    eval->add_flag("--annotate", e_annotate,
                   "Label records via the judge instead of evaluating");
    eval->add_option("--out", e_out, "Output path for --annotate");

    // probe (build) + probe run
    auto* probe = app.add_subcommand("probe", "Build or run the adversarial dataset");
    std::string p_samples, p_out;
    uint64_t p_seed = 0;
    probe->add_option("--samples", p_samples, "JSONL of (question, ground_truth) samples");
    probe->add_option("--seed", p_seed, "Generation seed");
    probe->add_option("--out", p_out, "Output dataset path");
    auto* probe_run = probe->add_subcommand("run", "Measure attack success rates");
    std::string pr_dataset, pr_report;
    bool pr_weighted = false;
    probe_run->add_option("--dataset", pr_dataset, "Adversarial dataset JSONL")->required();
    probe_run->add_option("--verifier", common.verifier, "rule | hybrid | model")
        ->check(CLI::IsMember({"rule", "hybrid", "model"}));
    probe_run->add_option("--judge-config", common.judge_config_path, "Judge endpoint config");
    probe_run->add_option("--config,-c", common.config_path, "Config file");
    probe_run->add_option("--report", pr_report, "Write the JSON report here");
    probe_run->add_flag("--record-weighted", pr_weighted,
                        "Also report the per-record weighted rate");

    // monitor
    auto* monitor = app.add_subcommand("monitor", "Inspect a reward trace for divergence");
    std::string m_trace;
    int m_window = 20;
    double m_threshold = 0.15;
    monitor->add_option("--trace", m_trace, "Trace JSONL")->required();
    monitor->add_option("--window", m_window, "Sliding window size");
    monitor->add_option("--threshold", m_threshold, "Mean-gap alert threshold");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP reward service");
    std::string s_config, s_listen, s_mode;
    serve->add_option("--config,-c", s_config, "Service config file");
    serve->add_option("--listen", s_listen, "host:port override");
    serve->add_option("--mode", s_mode, "rule | hybrid")
        ->check(CLI::IsMember({"rule", "hybrid"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand(verify))
            return run_verify(common, v_question, v_gt, v_response);
        if (app.got_subcommand(eval))
            return run_eval(common, e_records, e_report, e_annotate, e_out);
        if (app.got_subcommand(probe)) {
            if (probe->got_subcommand(probe_run))
                return run_probe_run(common, pr_dataset, pr_report, pr_weighted);
            if (p_samples.empty() || p_out.empty())
                throw CLI::ValidationError("probe", "--samples and --out are required");
            return run_probe_build(p_samples, p_seed, p_out);
        }
        if (app.got_subcommand(monitor)) return run_monitor(m_trace, m_window, m_threshold);
        if (app.got_subcommand(serve)) return run_serve(s_config, s_listen, s_mode);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args);
}

}  // namespace mathverify
