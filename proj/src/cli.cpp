#include "casework/cli.hpp"

#include "casework/api.hpp"
#include "casework/config.hpp"
#include "casework/errors.hpp"
#include "casework/pipeline.hpp"
#include "casework/serialization.hpp"
#include "casework/store.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include <CLI11.hpp>

namespace casework {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

struct Common {
    std::optional<std::string> config_path;

    Config load() const {
        return load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    }
};

void print_coverage(std::ostream& out, const std::vector<CaseRecord>& records) {
    out << "Feature extraction coverage (n=" << records.size() << ")\n";
    for (const auto& row : extraction_coverage(records)) {
        out << "  " << pad(row.feature, 26);
        if (row.feature == "Average") {
            out << fmt("%5.1f%%", row.percent) << "\n";
        } else {
            out << fmt("%5.1f%%", row.percent) << " (" << row.count << "/" << records.size() << ")\n";
        }
    }
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
    std::vector<std::string> paths;
    std::string db;
    std::optional<std::string> org;
    std::optional<int> year;
    bool whole_doc_fallback = false;
};

int cmd_ingest(const IngestArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
    const Config config = common.load();
    const Extractor extractor(config.extraction);
    IngestOptions options{a.org, a.year, a.whole_doc_fallback};

    std::vector<DocumentResult> results(a.paths.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(a.paths.size(), std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < a.paths.size(); i = next++) {
                results[i] = process_document(a.paths[i], config, extractor, options);
            }
        });
    }
    for (auto& t : pool) t.join();

    Store store = Store::open(a.db);
    bool failed = false;
    std::vector<CaseRecord> stored;
    std::map<std::string, std::string> owner;  // case id -> source path
    for (const auto& r : results) {
        if (r.error) {
            err << r.source.string() << ": " << *r.error << "\n";
            failed = true;
            continue;
        }
        out << r.source.string() << ": " << r.records.size() << " cases (" << r.source_org << ", " << r.year << ", "
            << r.char_count << " chars)\n";
        for (const auto& issue : r.issues) {
            auto& stream = issue.issue.severity == IssueSeverity::error ? err : out;
            stream << "  " << to_string(issue.issue.severity) << " " << issue.case_id << " " << issue.issue.field
                   << ": " << issue.issue.message << "\n";
            if (issue.issue.severity == IssueSeverity::error) failed = true;
        }
        for (const auto& rec : r.records) {
            const auto [it, fresh] = owner.emplace(rec.case_id, r.source.string());
            if (!fresh) {
                out << "  warning " << rec.case_id << ": also produced by " << it->second << ", later one kept\n";
            }
            try {
                store.upsert_case(rec);
                stored.push_back(rec);
            } catch (const Error& e) {
                err << "  " << e.kind() << " " << rec.case_id << ": " << e.what() << "\n";
                failed = true;
            }
        }
    }
    out << stored.size() << " cases stored\n";
    print_coverage(out, stored);
    return failed ? 1 : 0;
}

// ----------------------------------------------------------------- analyze

void print_analysis(std::ostream& out, const Analysis& a) {
    const auto& c = a.clusters;
    out << "Clusters (n=" << c.total_cases << ", threshold " << fmt("%.2f", c.threshold) << ", "
        << fmt("%.2f", c.elapsed_ms) << " ms)\n";
    out << "  " << pad("Cluster", 16) << pad("Cases", 8) << pad("Coverage", 10) << "Avg. similarity\n";
    for (const auto& s : c.clusters) {
        out << "  " << pad(s.name, 16) << pad(std::to_string(s.count()), 8) << pad(fmt("%.1f%%", s.coverage_percent), 10)
            << (s.avg_similarity ? fmt("%.3f", *s.avg_similarity) : std::string("-")) << "\n";
        for (const auto& g : s.groups) {
            out << "    " << g.group_id << ": " << g.member_case_ids.size() << " cases, mean similarity "
                << fmt("%.3f", g.mean_pairwise_similarity) << " - " << g.description << "\n";
        }
        if (!s.ungrouped.empty()) out << "    ungrouped: " << s.ungrouped.size() << "\n";
    }

    const auto& t = a.triage_summary;
    out << "Priority triage (n=" << t.count << ")\n";
    if (t.count > 0) {
        out << "  range " << fmt("%.1f", t.min) << "-" << fmt("%.1f", t.max) << ", mean " << fmt("%.2f", t.mean)
            << ", std " << fmt("%.2f", t.stddev) << "\n";
    }
    const auto band_line = [&](const char* name, const char* range, std::size_t n) {
        out << "  " << pad(name, 8) << pad(range, 9) << pad(std::to_string(n), 6)
            << fmt("%.1f%%", percent_of(n, t.count)) << "\n";
    };
    band_line("High", "[8,10]", t.high);
    band_line("Medium", "[6,8)", t.medium);
    band_line("Low", "[5,6)", t.low);
    const std::size_t top = std::min<std::size_t>(10, a.triage.size());
    for (std::size_t i = 0; i < top; ++i) {
        const auto& r = a.triage[i];
        out << "  #" << r.rank << " " << r.case_id << " " << fmt("%.2f", r.normalized_score) << " ("
            << to_string(r.band) << ")\n";
    }

    const auto& in = a.insights;
    const auto list = [&](const char* title, const std::vector<TagCount>& rows) {
        out << title << ":";
        if (rows.empty()) out << " none";
        for (const auto& r : rows) out << " " << r.tag << " " << r.count << " (" << fmt("%.1f%%", r.percent) << ")";
        out << "\n";
    };
    out << "Insights (n=" << in.total_cases << ")\n";
    list("  platforms", in.platform_stats);
    list("  severity", in.severity_distribution);
    list("  topics", in.topic_stats);
    out << "  registered offenders: " << in.patterns.rso_count << " (" << fmt("%.1f%%", in.patterns.rso_percent)
        << "), stranger " << in.patterns.stranger_count << ", family " << in.patterns.family_count << "\n";
    out << "  keywords:";
    for (const auto& k : in.keywords_global) out << " " << k.token << "(" << k.frequency << ")";
    out << "\n";
}

struct AnalyzeArgs {
    std::string db;
    std::optional<double> threshold;
    std::optional<std::string> report;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
    Config config = common.load();
    if (a.threshold) {
        if (!(*a.threshold > 0.0 && *a.threshold <= config.clustering.weights.sum())) {
            err << "invalid_argument: --threshold must lie in (0, " << config.clustering.weights.sum() << "]\n";
            return 1;
        }
        config.clustering.threshold = *a.threshold;
    }
    const auto records = Store::open_read_only(a.db).query_cases();
    const auto analysis = analyze(records, config);
    print_analysis(out, analysis);

    const std::string report_path = a.report ? *a.report : a.db + ".report.json";
    Json coverage = Json::array();
    for (const auto& row : extraction_coverage(records)) {
        coverage.push_back(Json{{"feature", row.feature}, {"count", row.count}, {"percent", row.percent}});
    }
    const Json report{{"total_cases", records.size()},
                      {"coverage", std::move(coverage)},
                      {"clusters", analysis.clusters},
                      {"triage", Json{{"summary", analysis.triage_summary}, {"results", analysis.triage}}},
                      {"insights", analysis.insights}};
    std::ofstream file(report_path, std::ios::binary);
    if (!file || !(file << report.dump(2) << "\n")) {
        err << "io_error: cannot write report " << report_path << "\n";
        return 1;
    }
    out << "report written to " << report_path << "\n";
    return 0;
}

// ------------------------------------------------------------------- audit

int cmd_audit(const std::string& db, const std::string& case_id, std::ostream& out, std::ostream& err) {
    const auto record = Store::open_read_only(db).fetch_case(case_id);
    if (!record) {
        err << "case_not_found: " << case_id << "\n";
        return 1;
    }
    out << record->case_id << " | " << record->source_org << " | " << record->month << " " << record->year << "\n";
    out << "---- raw text (" << record->raw_text.size() << " bytes)\n" << record->raw_text << "\n----\n";
    out << "spans: " << record->spans.size() << "\n";
    bool mismatch = false;
    for (std::size_t i = 0; i < record->spans.size(); ++i) {
        const auto& s = record->spans[i];
        const bool ok = s.start < s.end && s.end <= record->raw_text.size() &&
                        record->raw_text.compare(s.start, s.end - s.start, s.matched_text) == 0;
        mismatch = mismatch || !ok;
        out << "  [" << i + 1 << "] " << s.start << "-" << s.end << " " << pad(s.feature_path, 34) << " "
            << pad(s.rule_id, 36) << " \"" << s.matched_text << "\"" << (ok ? "" : "  MISMATCH") << "\n";
    }
    if (mismatch) {
        err << "span_mismatch: at least one span does not match the stored text\n";
        return 1;
    }
    return 0;
}

// ------------------------------------------------------------------- bench

int cmd_bench(const std::string& db, int runs, const Common& common, std::ostream& out, std::ostream& err) {
    const Config config = common.load();
    const auto records = Store::open_read_only(db).query_cases();
    if (records.empty()) {
        err << "empty_input: no cases in " << db << "\n";
        return 1;
    }
    const Extractor extractor(config.extraction);
    const auto n = static_cast<double>(records.size());

    std::mt19937_64 rng(std::random_device{}());
    const auto scratch =
        std::filesystem::temp_directory_path() / ("casework_bench_" + std::to_string(rng()) + ".db");

    double extract_ms = 0, store_ms = 0, cluster_ms = 0, triage_ms = 0, insights_ms = 0;
    for (int run = 0; run < runs; ++run) {
        std::vector<CaseRecord> rebuilt;
        rebuilt.reserve(records.size());
        auto t0 = Clock::now();
        for (const auto& r : records) rebuilt.push_back(rebuild_record(r, extractor).record);
        extract_ms += ms_since(t0);

        std::filesystem::remove(scratch);
        {
            Store store = Store::open(scratch);
            t0 = Clock::now();
            for (const auto& r : rebuilt) store.upsert_case(r);
            store_ms += ms_since(t0);
        }
        std::filesystem::remove(scratch);

        t0 = Clock::now();
        const auto clusters = cluster_all(rebuilt, config.clustering);
        cluster_ms += ms_since(t0);

        t0 = Clock::now();
        const auto ranked = rank_cases(rebuilt, config.triage);
        triage_ms += ms_since(t0);

        t0 = Clock::now();
        const auto insights = compute_insights(rebuilt, clusters.all_groups(), config.insights);
        insights_ms += ms_since(t0);
    }
    const double r = runs;
    extract_ms /= r;
    store_ms /= r;
    cluster_ms /= r;
    triage_ms /= r;
    insights_ms /= r;
    const double total = extract_ms + store_ms + cluster_ms + triage_ms + insights_ms;

    out << "bench: " << records.size() << " cases, " << runs << " run(s)\n";
    out << "  " << pad("Feature extraction (per case)", 34) << fmt("%.3f ms", extract_ms / n) << "\n";
    out << "  " << pad("Case storage (per case)", 34) << fmt("%.3f ms", store_ms / n) << "\n";
    out << "  " << pad("Clustering (all cases)", 34) << fmt("%.3f ms", cluster_ms) << "\n";
    out << "  " << pad("Triage (all cases)", 34) << fmt("%.3f ms", triage_ms) << "\n";
    out << "  " << pad("Insights (all cases)", 34) << fmt("%.3f ms", insights_ms) << "\n";
    out << "  " << pad("End-to-end throughput", 34) << fmt("%.1f cases/second", total > 0 ? 1000.0 * n / total : 0.0)
        << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Case report pipeline: ingest, analyze, serve and audit case records"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "Configuration file (JSON merge patch over the defaults)");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Ingest documents into a case database");
    ingest_cmd->add_option("paths", ingest.paths, "Plain-text or PDF documents")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--db", ingest.db, "Database file")->required();
    ingest_cmd->add_option("--org", ingest.org, "Source organization (default: detected from file name)");
    ingest_cmd->add_option("--year", ingest.year, "Report year when the file name has none")
        ->check(CLI::Range(1000, 9999));
    ingest_cmd->add_flag("--whole-doc-fallback", ingest.whole_doc_fallback,
                         "Treat a document without date markers as a single case");

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "Cluster, triage and summarize stored cases");
    analyze_cmd->add_option("--db", analyze_args.db, "Database file")->required();
    analyze_cmd->add_option("--threshold", analyze_args.threshold, "Sub-group similarity threshold");
    analyze_cmd->add_option("--report", analyze_args.report, "JSON report path (default: <db>.report.json)");

    std::string serve_db, bind = "127.0.0.1:8080";
    std::optional<std::string> static_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the read-only HTTP API");
    serve_cmd->add_option("--db", serve_db, "Database file")->required();
    serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
    serve_cmd->add_option("--static", static_dir, "Directory of dashboard assets to serve at /");

    std::string merge_dest, merge_src;
    auto* merge_cmd = app.add_subcommand("merge", "Copy cases from one database into another");
    merge_cmd->add_option("--dest", merge_dest, "Destination database")->required();
    merge_cmd->add_option("--src", merge_src, "Source database")->required()->check(CLI::ExistingFile);

    std::string audit_db, audit_case;
    auto* audit_cmd = app.add_subcommand("audit", "Print a case with its highlight spans");
    audit_cmd->add_option("--db", audit_db, "Database file")->required();
    audit_cmd->add_option("--case", audit_case, "Case id")->required();

    std::string bench_db;
    int bench_runs = 3;
    auto* bench_cmd = app.add_subcommand("bench", "Time every pipeline stage on stored cases");
    bench_cmd->add_option("--db", bench_db, "Database file")->required();
    bench_cmd->add_option("--runs", bench_runs, "Repetitions to average")->check(CLI::Range(1, 1000))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ingest, common, out, err);
        if (*analyze_cmd) return cmd_analyze(analyze_args, common, out, err);
        if (*serve_cmd) {
            ApiConfig api{bind, serve_db, static_dir ? std::optional<std::filesystem::path>(*static_dir) : std::nullopt};
            const Config config = common.load();
            out << "serving " << serve_db << " on http://" << bind << "\n" << std::flush;
            if (!serve(api, config)) {
                err << "io_error: cannot bind " << bind << "\n";
                return 1;
            }
            return 0;
        }
        if (*merge_cmd) {
            Store dest = Store::open(merge_dest);
            const auto report = merge_databases(dest, merge_src);
            out << "copied " << report.copied << ", skipped " << report.skipped_collisions.size() << "\n";
            for (const auto& id : report.skipped_collisions) out << "  collision kept destination: " << id << "\n";
            return 0;
        }
        if (*audit_cmd) return cmd_audit(audit_db, audit_case, out, err);
        if (*bench_cmd) return cmd_bench(bench_db, bench_runs, common, out, err);
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace casework
