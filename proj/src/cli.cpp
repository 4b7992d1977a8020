#include "txnforge/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "txnforge/abm.hpp"
#include "txnforge/detectors/decision_tree.hpp"
#include "txnforge/detectors/gmm.hpp"
#include "txnforge/detectors/isolation_forest.hpp"
#include "txnforge/errors.hpp"
#include "txnforge/features.hpp"
#include "txnforge/io_export.hpp"
#include "txnforge/metrics.hpp"
#include "txnforge/rng.hpp"

namespace txnforge::cli {

namespace {

using nlohmann::json;

std::optional<std::uint64_t> env_seed() {
    const char* env = std::getenv("TXNFORGE_SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    std::uint64_t value = 0;
    const std::string_view sv(env);
    const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
        throw ConfigError("TXNFORGE_SEED is not an unsigned integer: '" + std::string(sv) + "'");
    return value;
}

struct GenerateOpts {
    std::string model;
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out = "artifacts";
};

int cmd_generate(const GenerateOpts& opts) {
    auto loaded = io::load_config(opts.config_path);
    auto config = loaded.config;
    config.model_kind = abm::model_kind_from_string(opts.model);
    if (opts.seed_given) config.seed = opts.seed;
    else if (!loaded.has_seed) {
        if (const auto env = env_seed()) config.seed = *env;
    }

    const auto run = abm::run_model(config);
    io::write_run(run, opts.out);

    std::size_t suspicious_events = 0;
    for (const auto& ev : run.events)
        if (ev.sender_label == abm::AgentLabel::suspicious) ++suspicious_events;
    const double fraction = run.events.empty()
                                ? 0.0
                                : static_cast<double>(suspicious_events) /
                                      static_cast<double>(run.events.size());
    std::printf("agents=%zu events=%zu suspicious_event_fraction=%.4f\n", run.agents.size(),
                run.events.size(), fraction);
    return 0;
}

struct FeaturesOpts {
    std::string in_dir;
    std::string out_file;
    bool circular_mean = false;
};

int cmd_features(const FeaturesOpts& opts) {
    const auto run = io::read_run(opts.in_dir);
    std::vector<features::AgentFeatures> rows;
    if (!run.agents.empty()) rows = features::extract_features(run, opts.circular_mean);
    io::write_features_csv(rows, opts.out_file);

    for (const auto label : {abm::AgentLabel::normal, abm::AgentLabel::suspicious}) {
        std::size_t agents = 0;
        std::size_t timed = 0;
        double time_sum = 0.0;
        double txns = 0.0;
        double in_deg = 0.0;
        double out_deg = 0.0;
        for (const auto& f : rows) {
            if (f.label != label) continue;
            ++agents;
            txns += f.num_txns;
            in_deg += f.in_degree;
            out_deg += f.out_degree;
            if (f.txn_mean_time) {
                ++timed;
                time_sum += *f.txn_mean_time;
            }
        }
        std::string time_text = "-";
        if (timed > 0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", time_sum / static_cast<double>(timed));
            time_text = buf;
        }
        const double denom = agents > 0 ? static_cast<double>(agents) : 1.0;
        std::printf("class=%s agents=%zu txn_mean_time=%s num_txns=%.3f in_degree=%.3f "
                    "out_degree=%.3f\n",
                    std::string(abm::to_string(label)).c_str(), agents, time_text.c_str(),
                    txns / denom, in_deg / denom, out_deg / denom);
    }
    return 0;
}

struct DetectOpts {
    std::string algo;
    std::string features_path;
    std::string feature_set;
    std::string granularity = "agent";
    std::string out = "report.json";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int max_depth = 1;
    int components = 2;
    double contamination = 0.1;
    int trees = 100;
    int subsample = 256;
    double holdout = 0.0;
};

struct DetectData {
    Matrix x;
    std::vector<int> truth;
    std::vector<long long> ids;  // agent ids, or event row indices
    std::vector<std::uint32_t> dropped_ids;
    std::vector<std::string> columns;
};

// Event-granularity input: the raw transactions.csv, one observation per
// event, single feature = step.
DetectData load_event_data(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read events file: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        (line != "step,time_hhmm,sender_id,receiver_id,amount,sender_label" &&
         line != "step,time_hhmm,sender_id,receiver_id,amount,sender_label\r"))
        throw DataError("bad transactions header in " + path.string());

    DetectData data;
    data.columns = {"step"};
    std::vector<double> steps;
    long long row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int i = 0; i < 5; ++i) {
            const auto pos = line.find(',', start);
            if (pos == std::string::npos) throw DataError("bad transactions row: '" + line + "'");
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        fields.push_back(line.substr(start));
        int step = 0;
        const auto res =
            std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), step);
        if (res.ec != std::errc{}) throw DataError("bad step: '" + fields[0] + "'");
        steps.push_back(static_cast<double>(step));
        data.truth.push_back(abm::label_from_string(fields[5]) == abm::AgentLabel::suspicious
                                 ? 1
                                 : 0);
        data.ids.push_back(row++);
    }
    if (steps.empty()) throw DataError("no events in " + path.string());
    data.x = Matrix(steps.size(), 1);
    data.x.data = std::move(steps);
    return data;
}

DetectData load_agent_data(const std::filesystem::path& path, features::FeatureSet set) {
    const auto rows = io::read_features_csv(path);
    auto sel = features::select_columns(rows, set);
    DetectData data;
    data.x = std::move(sel.x);
    data.truth = std::move(sel.labels);
    data.ids.assign(sel.agent_ids.begin(), sel.agent_ids.end());
    data.dropped_ids = std::move(sel.dropped_ids);
    data.columns = std::move(sel.column_names);
    return data;
}

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), x.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < x.cols; ++c) out.at(i, c) = x.at(rows[i], c);
    return out;
}

int cmd_detect(const DetectOpts& opts) {
    std::uint64_t seed = 42;
    if (opts.seed_given) seed = opts.seed;
    else if (const auto env = env_seed()) seed = *env;

    DetectData data;
    if (opts.granularity == "event") {
        if (opts.feature_set != "time")
            throw UnsupportedError("event granularity supports only --feature-set time");
        data = load_event_data(opts.features_path);
    } else {
        data = load_agent_data(opts.features_path,
                               features::feature_set_from_string(opts.feature_set));
    }
    const std::string input_hash = io::hash_file(opts.features_path);
    const std::size_t n = data.x.rows;

    std::vector<std::size_t> train_idx(n);
    std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
    std::vector<std::size_t> eval_idx = train_idx;
    if (opts.holdout > 0.0) {
        if (opts.holdout >= 1.0) throw ParamError("--holdout must be in [0, 1)");
        const auto n_eval =
            static_cast<std::size_t>(std::floor(opts.holdout * static_cast<double>(n)));
        if (n_eval == 0 || n_eval >= n)
            throw ParamError("--holdout leaves no usable train/eval split");
        std::vector<std::size_t> shuffled(n);
        std::iota(shuffled.begin(), shuffled.end(), std::size_t{0});
        Rng64 rng(mix_seed(seed, 0x486f6c646f7574ULL));  // dedicated holdout stream
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = rng.uniform_below(i + 1);
            std::swap(shuffled[i], shuffled[j]);
        }
        eval_idx.assign(shuffled.begin(),
                        shuffled.begin() + static_cast<std::ptrdiff_t>(n_eval));
        train_idx.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_eval),
                         shuffled.end());
        std::sort(eval_idx.begin(), eval_idx.end());
        std::sort(train_idx.begin(), train_idx.end());
    }
    const bool split = opts.holdout > 0.0;
    const Matrix x_train = split ? take_rows(data.x, train_idx) : data.x;
    const Matrix x_eval = split ? take_rows(data.x, eval_idx) : data.x;
    std::vector<int> y_train;
    y_train.reserve(train_idx.size());
    for (auto r : train_idx) y_train.push_back(data.truth[r]);

    std::vector<int> predicted;
    json params;
    if (opts.algo == "dtree") {
        const auto tree = detectors::dtree_fit(x_train, y_train, opts.max_depth, seed);
        predicted = tree.predict(x_eval);
        params = json{{"max_depth", opts.max_depth},
                      {"thresholds", tree.internal_thresholds()},
                      {"leaves", tree.leaf_count()}};
    } else if (opts.algo == "gmm") {
        detectors::GmmParams p;
        p.n_components = opts.components;
        p.seed = seed;
        const auto model = detectors::gmm_fit_predict(x_train, p);
        predicted = split ? detectors::gmm_predict(model, x_eval) : model.labels;
        params = json{{"n_components", opts.components},
                      {"tol", p.tol},
                      {"max_iters", p.max_iters},
                      {"iterations", model.iterations},
                      {"converged", model.converged},
                      {"weights", model.weights},
                      {"suspicious_component", model.suspicious_component}};
    } else if (opts.algo == "iforest") {
        detectors::IForestParams p;
        p.n_trees = opts.trees;
        p.subsample_size = opts.subsample;
        p.contamination = opts.contamination;
        p.seed = seed;
        const auto model = detectors::iforest_fit(x_train, p);
        const auto scored = detectors::iforest_score(model, x_eval, opts.contamination);
        predicted = scored.flags;
        params = json{{"n_trees", p.n_trees},
                      {"subsample_size", model.effective_subsample},
                      {"contamination", p.contamination},
                      {"depth_limit", model.depth_limit},
                      {"flagged", scored.n_flagged}};
    } else {
        throw ParamError("unknown algorithm: " + opts.algo);
    }

    std::vector<int> y_eval;
    y_eval.reserve(eval_idx.size());
    for (auto r : eval_idx) y_eval.push_back(data.truth[r]);
    const auto cm = metrics::confusion(predicted, y_eval);
    const auto bundle = metrics::compute_metrics(cm);

    json predictions = json::array();
    for (std::size_t i = 0; i < eval_idx.size(); ++i)
        predictions.push_back(json{{"id", data.ids[eval_idx[i]]},
                                   {"truth", y_eval[i]},
                                   {"predicted", predicted[i]}});

    const json report{
        {"algorithm", opts.algo},
        {"params", params},
        {"feature_set", opts.feature_set},
        {"granularity", opts.granularity},
        {"columns", data.columns},
        {"seed", seed},
        {"input_file", std::filesystem::path(opts.features_path).filename().string()},
        {"input_hash", input_hash},
        {"holdout", opts.holdout},
        {"rows_total", n},
        {"rows_evaluated", eval_idx.size()},
        {"dropped_ids", data.dropped_ids},
        {"confusion", json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}}},
        {"metrics", json{{"accuracy", bundle.accuracy},
                         {"precision", bundle.precision},
                         {"recall", bundle.recall},
                         {"f1", bundle.f1},
                         {"mcc", bundle.mcc}}},
        {"predictions", predictions}};

    std::ofstream out(opts.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + opts.out);
    out << report.dump(2) << "\n";
    out.flush();
    if (!out) throw IoError("write failed: " + opts.out);

    std::printf("tp=%lld fp=%lld tn=%lld fn=%lld\n", static_cast<long long>(cm.tp),
                static_cast<long long>(cm.fp), static_cast<long long>(cm.tn),
                static_cast<long long>(cm.fn));
    std::printf("mcc=%.6f\n", bundle.mcc);
    return 0;
}

struct CompareOpts {
    std::string a_path;
    std::string b_path;
    std::string column;
    bool as_json = false;
};

std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    const std::string& column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            header.push_back(line.substr(start));
            break;
        }
        header.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw DataError("unknown column '" + column + "' in " + path.string());
    const auto col = static_cast<std::size_t>(it - header.begin());

    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t field = 0;
        std::size_t pos = 0;
        std::string cell;
        while (true) {
            const auto next = line.find(',', pos);
            const auto end = next == std::string::npos ? line.size() : next;
            if (field == col) {
                cell = line.substr(pos, end - pos);
                break;
            }
            if (next == std::string::npos) break;
            pos = next + 1;
            ++field;
        }
        if (field != col) throw DataError("short row in " + path.string() + ": '" + line + "'");
        if (cell.empty()) continue;  // absent optional values are skipped
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
            throw DataError("non-numeric value in column '" + column + "': '" + cell + "'");
        values.push_back(v);
    }
    return values;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int cmd_compare(const CompareOpts& opts) {
    const auto a = read_csv_column(opts.a_path, opts.column);
    const auto b = read_csv_column(opts.b_path, opts.column);
    const auto ks = metrics::ks_two_sample(a, b);
    if (opts.as_json) {
        const json out{{"column", opts.column},
                       {"d", ks.d},
                       {"p_value", ks.p_value},
                       {"n_a", a.size()},
                       {"n_b", b.size()}};
        std::printf("%s\n", out.dump(2).c_str());
    } else {
        std::printf("D=%s p=%s\n", shortest(ks.d).c_str(), shortest(ks.p_value).c_str());
    }
    return 0;
}

struct PlotOpts {
    std::string in_dir;
    std::string out_file;
    int bin_hours = 1;
};

int cmd_plot(const PlotOpts& opts) {
    const auto run = io::read_run(opts.in_dir);
    io::plot_histogram_svg(run, opts.out_file, opts.bin_hours);
    std::printf("wrote %s\n", opts.out_file.c_str());
    return 0;
}

} // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"deterministic transaction simulator and outlier-detection benchmark"};
    app.require_subcommand(1);
    int rc = 0;

    GenerateOpts gen_opts;
    auto* gen = app.add_subcommand("generate", "simulate a run and write its artifacts");
    gen->add_option("--model", gen_opts.model, "model kind")
        ->required()
        ->check(CLI::IsMember({"simple", "graph"}));
    gen->add_option("--config", gen_opts.config_path, "model config JSON")->required();
    auto* gen_seed = gen->add_option("--seed", gen_opts.seed, "override the run seed");
    gen->add_option("--out", gen_opts.out, "output directory")->capture_default_str();
    gen->callback([&] {
        gen_opts.seed_given = gen_seed->count() > 0;
        rc = cmd_generate(gen_opts);
    });

    FeaturesOpts feat_opts;
    auto* feat = app.add_subcommand("features", "extract per-agent features from artifacts");
    feat->add_option("--in", feat_opts.in_dir, "artifact directory")->required();
    feat->add_option("--out", feat_opts.out_file, "features.csv path")->required();
    feat->add_flag("--circular-mean", feat_opts.circular_mean,
                   "average transaction steps on the 24h circle");
    feat->callback([&] { rc = cmd_features(feat_opts); });

    DetectOpts det_opts;
    auto* det = app.add_subcommand("detect", "run a detector and write a report");
    det->add_option("--algo", det_opts.algo, "detector")
        ->required()
        ->check(CLI::IsMember({"dtree", "gmm", "iforest"}));
    det->add_option("--features", det_opts.features_path,
                    "features.csv (or transactions.csv for --granularity event)")
        ->required();
    det->add_option("--feature-set", det_opts.feature_set, "feature columns")
        ->required()
        ->check(CLI::IsMember({"time", "all", "in_degree", "out_degree"}));
    det->add_option("--granularity", det_opts.granularity, "classify agents or raw events")
        ->check(CLI::IsMember({"agent", "event"}))
        ->capture_default_str();
    det->add_option("--out", det_opts.out, "report path")->capture_default_str();
    auto* det_seed = det->add_option("--seed", det_opts.seed, "detector seed");
    det->add_option("--max-depth", det_opts.max_depth, "dtree depth")->capture_default_str();
    det->add_option("--components", det_opts.components, "gmm components")
        ->capture_default_str();
    det->add_option("--contamination", det_opts.contamination, "iforest outlier fraction")
        ->capture_default_str();
    det->add_option("--trees", det_opts.trees, "iforest tree count")->capture_default_str();
    det->add_option("--subsample", det_opts.subsample, "iforest subsample size")
        ->capture_default_str();
    det->add_option("--holdout", det_opts.holdout,
                    "evaluate on this held-out fraction instead of the training data")
        ->capture_default_str();
    det->callback([&] {
        det_opts.seed_given = det_seed->count() > 0;
        rc = cmd_detect(det_opts);
    });

    CompareOpts cmp_opts;
    auto* cmp = app.add_subcommand("compare", "two-sample KS test between CSV columns");
    cmp->add_option("--a", cmp_opts.a_path, "first CSV")->required();
    cmp->add_option("--b", cmp_opts.b_path, "second CSV")->required();
    cmp->add_option("--column", cmp_opts.column, "column name")->required();
    cmp->add_flag("--json", cmp_opts.as_json, "emit JSON");
    cmp->callback([&] { rc = cmd_compare(cmp_opts); });

    PlotOpts plot_opts;
    auto* plot = app.add_subcommand("plot", "hourly class histogram SVG");
    plot->add_option("--in", plot_opts.in_dir, "artifact directory")->required();
    plot->add_option("--out", plot_opts.out_file, "SVG path")->required();
    plot->add_option("--bin-hours", plot_opts.bin_hours, "hours per bar")
        ->capture_default_str();
    plot->callback([&] { rc = cmd_plot(plot_opts); });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ParamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const UnsupportedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return rc;
}

} // namespace txnforge::cli
