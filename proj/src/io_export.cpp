#include "txnforge/io_export.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "txnforge/errors.hpp"

namespace txnforge::io {

namespace {

using nlohmann::json;

std::string format_amount(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::optional<std::string> read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

// Splits file content into lines, tolerating a missing trailing newline.
std::vector<std::string> split_lines(const std::string& content) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        auto pos = content.find('\n', start);
        if (pos == std::string::npos) pos = content.size();
        std::string line = content.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = pos + 1;
    }
    return lines;
}

long long parse_int(const std::string& text, const std::string& what) {
    long long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw DataError("bad integer for " + what + ": '" + text + "'");
    return value;
}

double parse_double(const std::string& text, const std::string& what) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw DataError("bad number for " + what + ": '" + text + "'");
    return value;
}

void check_known_keys(const json& obj, std::initializer_list<const char*> allowed,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

json params_to_json(const abm::AgentTypeParams& p) {
    // label is implied by whether this sits under normal_params or
    // suspicious_params.
    return json{{"mean_hour", p.mean_hour},
                {"mean_num_txns", p.mean_num_txns},
                {"amount_mean", p.amount_mean},
                {"amount_std", p.amount_std},
                {"pair_prob_same_type", p.pair_prob_same_type}};
}

abm::AgentTypeParams params_from_json(const json& obj, abm::AgentLabel label,
                                      const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    check_known_keys(obj,
                     {"mean_hour", "mean_num_txns", "amount_mean", "amount_std",
                      "pair_prob_same_type"},
                     where);
    abm::AgentTypeParams p = abm::default_params(label);
    try {
        if (obj.contains("mean_hour")) p.mean_hour = obj.at("mean_hour").get<double>();
        if (obj.contains("mean_num_txns"))
            p.mean_num_txns = obj.at("mean_num_txns").get<double>();
        if (obj.contains("amount_mean")) p.amount_mean = obj.at("amount_mean").get<double>();
        if (obj.contains("amount_std")) p.amount_std = obj.at("amount_std").get<double>();
        if (obj.contains("pair_prob_same_type"))
            p.pair_prob_same_type = obj.at("pair_prob_same_type").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return p;
}

json config_to_json(const abm::ModelConfig& config) {
    return json{{"model_kind", std::string(abm::to_string(config.model_kind))},
                {"n_normal", config.n_normal},
                {"n_suspicious", config.n_suspicious},
                {"normal_params", params_to_json(config.normal_params)},
                {"suspicious_params", params_to_json(config.suspicious_params)},
                {"seed", config.seed},
                {"steps", config.steps},
                {"minutes_per_step", config.minutes_per_step},
                {"uniform_partner", config.uniform_partner}};
}

} // namespace

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    if (!text) throw DataError("cannot read file: " + path.string());
    return fnv1a64_hex(*text);
}

std::string step_to_hhmm(int step) {
    if (step < 0 || step >= 96) throw ParamError("step_to_hhmm: step out of [0,96)");
    char buf[6];
    std::snprintf(buf, sizeof buf, "%02d:%02d", step / 4, (step % 4) * 15);
    return buf;
}

RunArtifacts write_run(const abm::SimRun& run, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    RunArtifacts art;
    art.dir = dir;

    auto emit = [&](const std::string& name, const std::string& content, std::size_t rows) {
        write_text_file(dir / name, content);
        art.files[name] = FileStamp{fnv1a64_hex(content), rows};
    };

    std::string txns = "step,time_hhmm,sender_id,receiver_id,amount,sender_label\n";
    for (const auto& ev : run.events) {
        txns += std::to_string(ev.step);
        txns += ',';
        txns += step_to_hhmm(ev.step);
        txns += ',';
        txns += std::to_string(ev.sender_id);
        txns += ',';
        if (ev.receiver_id) txns += std::to_string(*ev.receiver_id);
        txns += ',';
        if (ev.amount) txns += format_amount(*ev.amount);
        txns += ',';
        txns += abm::to_string(ev.sender_label);
        txns += '\n';
    }
    emit("transactions.csv", txns, run.events.size());

    std::string agents = "agent_id,label\n";
    for (const auto& a : run.agents) {
        agents += std::to_string(a.id);
        agents += ',';
        agents += abm::to_string(a.label);
        agents += '\n';
    }
    emit("agents.csv", agents, run.agents.size());

    if (run.config.model_kind == abm::ModelKind::graph) {
        std::string edges = "source,target,step,amount\n";
        for (const auto& ev : run.events) {
            if (!ev.receiver_id || !ev.amount)
                throw DataError("graph run event missing receiver or amount");
            edges += std::to_string(ev.sender_id);
            edges += ',';
            edges += std::to_string(*ev.receiver_id);
            edges += ',';
            edges += std::to_string(ev.step);
            edges += ',';
            edges += format_amount(*ev.amount);
            edges += '\n';
        }
        emit("edges.csv", edges, run.events.size());
    }

    emit("config.json", config_to_json(run.config).dump(2) + "\n", 0);

    json manifest;
    for (const auto& [name, stamp] : art.files)
        manifest["files"][name] = json{{"hash", stamp.hash}, {"rows", stamp.rows}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return art;
}

abm::SimRun read_run(const std::filesystem::path& dir) {
    abm::SimRun run;
    run.config = load_config(dir / "config.json").config;

    const auto agents_text = read_text_file(dir / "agents.csv");
    if (!agents_text) throw DataError("missing artifact: " + (dir / "agents.csv").string());
    const auto agent_lines = split_lines(*agents_text);
    if (agent_lines.empty() || agent_lines[0] != "agent_id,label")
        throw DataError("bad agents.csv header in " + dir.string());
    for (std::size_t i = 1; i < agent_lines.size(); ++i) {
        const auto fields = split_csv_line(agent_lines[i]);
        if (fields.size() != 2) throw DataError("bad agents.csv row: '" + agent_lines[i] + "'");
        abm::Agent a;
        a.id = static_cast<std::uint32_t>(parse_int(fields[0], "agent_id"));
        a.label = abm::label_from_string(fields[1]);
        if (a.id != run.agents.size())
            throw DataError("agents.csv ids must be dense and ascending from 0");
        run.agents.push_back(a);
    }

    const auto txn_text = read_text_file(dir / "transactions.csv");
    if (!txn_text) throw DataError("missing artifact: " + (dir / "transactions.csv").string());
    const auto txn_lines = split_lines(*txn_text);
    if (txn_lines.empty() ||
        txn_lines[0] != "step,time_hhmm,sender_id,receiver_id,amount,sender_label")
        throw DataError("bad transactions.csv header in " + dir.string());
    for (std::size_t i = 1; i < txn_lines.size(); ++i) {
        const auto fields = split_csv_line(txn_lines[i]);
        if (fields.size() != 6)
            throw DataError("bad transactions.csv row: '" + txn_lines[i] + "'");
        abm::TransactionEvent ev;
        ev.step = static_cast<int>(parse_int(fields[0], "step"));
        ev.sender_id = static_cast<std::uint32_t>(parse_int(fields[2], "sender_id"));
        if (!fields[3].empty())
            ev.receiver_id = static_cast<std::uint32_t>(parse_int(fields[3], "receiver_id"));
        if (!fields[4].empty()) ev.amount = parse_double(fields[4], "amount");
        ev.sender_label = abm::label_from_string(fields[5]);
        if (ev.sender_id >= run.agents.size())
            throw DataError("transactions.csv references unknown agent " +
                            std::to_string(ev.sender_id));
        if (ev.sender_label != run.agents[ev.sender_id].label)
            throw DataError("transactions.csv label disagrees with agents.csv for agent " +
                            std::to_string(ev.sender_id));
        run.events.push_back(ev);
    }
    return run;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
    const auto text = read_text_file(dir / "manifest.json");
    if (!text) throw DataError("missing artifact: " + (dir / "manifest.json").string());
    json manifest;
    try {
        manifest = json::parse(*text);
    } catch (const json::exception& e) {
        throw DataError("bad manifest.json: " + std::string(e.what()));
    }
    std::vector<std::string> bad;
    if (!manifest.contains("files")) return bad;
    for (const auto& [name, entry] : manifest.at("files").items()) {
        const auto content = read_text_file(dir / name);
        if (!content || fnv1a64_hex(*content) != entry.at("hash").get<std::string>())
            bad.push_back(name);
    }
    return bad;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    if (!text) throw ConfigError("cannot read config: " + path.string());
    json obj;
    try {
        obj = json::parse(*text);
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
    }
    if (!obj.is_object()) throw ConfigError("config root must be an object: " + path.string());
    check_known_keys(obj,
                     {"model_kind", "n_normal", "n_suspicious", "normal_params",
                      "suspicious_params", "seed", "steps", "minutes_per_step",
                      "uniform_partner"},
                     "config");

    LoadedConfig loaded;
    auto& config = loaded.config;
    try {
        if (obj.contains("model_kind")) {
            config.model_kind =
                abm::model_kind_from_string(obj.at("model_kind").get<std::string>());
            loaded.has_model_kind = true;
        }
        if (obj.contains("n_normal")) config.n_normal = obj.at("n_normal").get<int>();
        if (obj.contains("n_suspicious"))
            config.n_suspicious = obj.at("n_suspicious").get<int>();
        if (obj.contains("normal_params"))
            config.normal_params = params_from_json(obj.at("normal_params"),
                                                    abm::AgentLabel::normal, "normal_params");
        if (obj.contains("suspicious_params"))
            config.suspicious_params = params_from_json(
                obj.at("suspicious_params"), abm::AgentLabel::suspicious, "suspicious_params");
        if (obj.contains("seed")) {
            config.seed = obj.at("seed").get<std::uint64_t>();
            loaded.has_seed = true;
        }
        if (obj.contains("steps")) config.steps = obj.at("steps").get<int>();
        if (obj.contains("minutes_per_step"))
            config.minutes_per_step = obj.at("minutes_per_step").get<int>();
        if (obj.contains("uniform_partner"))
            config.uniform_partner = obj.at("uniform_partner").get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError("bad config value in " + path.string() + ": " + e.what());
    }
    return loaded;
}

void save_config(const abm::ModelConfig& config, const std::filesystem::path& path) {
    write_text_file(path, config_to_json(config).dump(2) + "\n");
}

void export_graph_dot(const abm::SimRun& run, const std::filesystem::path& path,
                      std::optional<int> window_start_hour) {
    if (run.config.model_kind != abm::ModelKind::graph)
        throw UnsupportedError("DOT export requires a graph run");
    int lo = 0;
    int hi = 96;
    if (window_start_hour) {
        if (*window_start_hour < 0 || *window_start_hour > 23)
            throw ParamError("window start hour must be in [0,24)");
        lo = *window_start_hour * 4;
        hi = lo + 4;
    }

    std::vector<const abm::TransactionEvent*> events;
    for (const auto& ev : run.events)
        if (ev.step >= lo && ev.step < hi) events.push_back(&ev);

    std::vector<std::uint32_t> node_ids;
    if (window_start_hour) {
        std::set<std::uint32_t> involved;
        for (const auto* ev : events) {
            involved.insert(ev->sender_id);
            if (ev->receiver_id) involved.insert(*ev->receiver_id);
        }
        node_ids.assign(involved.begin(), involved.end());
    } else {
        node_ids.reserve(run.agents.size());
        for (const auto& a : run.agents) node_ids.push_back(a.id);
    }

    std::string out = "digraph txnforge {\n";
    for (auto id : node_ids) {
        out += "  ";
        out += std::to_string(id);
        if (run.agents[id].label == abm::AgentLabel::suspicious) out += " [class=\"suspicious\"]";
        out += ";\n";
    }
    for (const auto* ev : events) {
        out += "  ";
        out += std::to_string(ev->sender_id);
        out += " -> ";
        out += std::to_string(ev->receiver_id.value_or(ev->sender_id));
        out += " [step=";
        out += std::to_string(ev->step);
        if (ev->amount) {
            out += ", amount=\"";
            out += format_amount(*ev->amount);
            out += '"';
        }
        out += "];\n";
    }
    out += "}\n";
    write_text_file(path, out);
}

void plot_histogram_svg(const abm::SimRun& run, const std::filesystem::path& path,
                        int bin_hours) {
    if (bin_hours < 1 || 24 % bin_hours != 0)
        throw ParamError("bin_hours must divide 24");
    const int n_bins = 24 / bin_hours;

    std::vector<long long> normal_counts(static_cast<std::size_t>(n_bins), 0);
    std::vector<long long> susp_counts(static_cast<std::size_t>(n_bins), 0);
    for (const auto& ev : run.events) {
        const auto bin = static_cast<std::size_t>((ev.step / 4) / bin_hours);
        if (ev.sender_label == abm::AgentLabel::suspicious) ++susp_counts[bin];
        else ++normal_counts[bin];
    }
    long long max_count = 1;
    for (int b = 0; b < n_bins; ++b)
        max_count = std::max({max_count, normal_counts[static_cast<std::size_t>(b)],
                              susp_counts[static_cast<std::size_t>(b)]});

    const double left = 56.0;
    const double top = 20.0;
    const double plot_w = 560.0;
    const double plot_h = 320.0;
    const double width = left + plot_w + 24.0;
    const double height = top + plot_h + 48.0;
    const double bar_w = plot_w / n_bins;

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
           fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
    svg += "  <style>text { font: 12px sans-serif; fill: #333; }</style>\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
           "\" fill=\"white\"/>\n";

    auto bars = [&](const std::vector<long long>& counts, const char* cls, const char* fill,
                    const char* opacity) {
        std::string out;
        for (int b = 0; b < n_bins; ++b) {
            const auto count = counts[static_cast<std::size_t>(b)];
            const double h = plot_h * static_cast<double>(count) / static_cast<double>(max_count);
            const double x = left + bar_w * b;
            const double y = top + plot_h - h;
            out += "  <rect class=\"" + std::string(cls) + "\" data-hour=\"" +
                   std::to_string(b * bin_hours) + "\" data-count=\"" + std::to_string(count) +
                   "\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(bar_w) +
                   "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" fill-opacity=\"" +
                   opacity + "\"/>\n";
        }
        return out;
    };
    svg += bars(normal_counts, "normal", "#4878a8", "1");
    svg += bars(susp_counts, "suspicious", "#c44e52", "0.75");

    svg += "  <line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" +
           fmt(left + plot_w) + "\" y2=\"" + fmt(top + plot_h) +
           "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    svg += "  <line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) +
           "\" y2=\"" + fmt(top + plot_h) + "\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    const int label_every = bin_hours == 1 ? 2 : 1;
    for (int b = 0; b < n_bins; b += label_every) {
        const double x = left + bar_w * b;
        svg += "  <text x=\"" + fmt(x) + "\" y=\"" + fmt(top + plot_h + 16.0) +
               "\" text-anchor=\"middle\">" + std::to_string(b * bin_hours) + "</text>\n";
    }
    svg += "  <text x=\"" + fmt(left + plot_w / 2.0) + "\" y=\"" + fmt(top + plot_h + 36.0) +
           "\" text-anchor=\"middle\">hour of day</text>\n";
    svg += "  <text x=\"" + fmt(left - 8.0) + "\" y=\"" + fmt(top + 4.0) +
           "\" text-anchor=\"end\">" + std::to_string(max_count) + "</text>\n";
    svg += "  <text x=\"" + fmt(left - 8.0) + "\" y=\"" + fmt(top + plot_h) +
           "\" text-anchor=\"end\">0</text>\n";
    svg += "</svg>\n";
    write_text_file(path, svg);
}

void write_features_csv(const std::vector<features::AgentFeatures>& rows,
                        const std::filesystem::path& path) {
    std::string out = "agent_id,label,txn_mean_time,num_txns,in_degree,out_degree\n";
    for (const auto& f : rows) {
        out += std::to_string(f.agent_id);
        out += ',';
        out += abm::to_string(f.label);
        out += ',';
        if (f.txn_mean_time) out += format_shortest(*f.txn_mean_time);
        out += ',';
        out += std::to_string(f.num_txns);
        out += ',';
        out += std::to_string(f.in_degree);
        out += ',';
        out += std::to_string(f.out_degree);
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<features::AgentFeatures> read_features_csv(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    if (!text) throw DataError("cannot read features file: " + path.string());
    const auto lines = split_lines(*text);
    if (lines.empty() || lines[0] != "agent_id,label,txn_mean_time,num_txns,in_degree,out_degree")
        throw DataError("bad features header in " + path.string());
    std::vector<features::AgentFeatures> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 6) throw DataError("bad features row: '" + lines[i] + "'");
        features::AgentFeatures f;
        f.agent_id = static_cast<std::uint32_t>(parse_int(fields[0], "agent_id"));
        f.label = abm::label_from_string(fields[1]);
        if (!fields[2].empty()) f.txn_mean_time = parse_double(fields[2], "txn_mean_time");
        f.num_txns = static_cast<int>(parse_int(fields[3], "num_txns"));
        f.in_degree = static_cast<int>(parse_int(fields[4], "in_degree"));
        f.out_degree = static_cast<int>(parse_int(fields[5], "out_degree"));
        rows.push_back(f);
    }
    return rows;
}

} // namespace txnforge::io
