// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "casework/batcher.hpp"
#include "casework/cli.hpp"
#include "casework/cluster.hpp"
#include "casework/config.hpp"
#include "casework/extractor.hpp"
#include "casework/insights.hpp"
#include "casework/pipeline.hpp"
#include "casework/store.hpp"
#include "casework/triage.hpp"

#include "support/oracles.hpp"
#include "support/pdf_writer.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace casework;
namespace ct = casework::testing;

namespace {

struct Outcome {
    enum class Status { pass, fail, skip } status = Status::pass;
    std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::skip, std::move(d)}; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<CaseRecord> random_records(std::uint64_t seed, int n, int first = 0) {
    std::mt19937_64 rng(seed);
    std::vector<CaseRecord> out;
    for (int i = 0; i < n; ++i) out.push_back(ct::random_record(rng, first + i));
    return out;
}

std::vector<double> weight_vector(const SimilarityWeights& w) {
    std::vector<double> v;
    for (const auto d : kDimensions) v.push_back(w[d]);
    return v;
}

int run_cli_quiet(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "casework");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    return code;
}

Outcome jaccard_oracle() {
    std::mt19937_64 rng(500);
    const SimilarityWeights w;
    const auto wv = weight_vector(w);
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 500; ++i) {
        const auto a = ct::random_features(rng);
        const auto b = ct::random_features(rng);
        worst = std::max(worst, std::fabs(weighted_similarity(a, b, w).total - ct::oracle_similarity(a, b, wv)));
    }
    const double ms = ms_since(t0);
    const std::string d = "500 pairs, max |delta| " + fmt("%.3g", worst) + ", " + fmt("%.1f ms", ms);
    return worst <= 1e-12 && ms < 1000.0 ? pass(d) : fail(d);
}

Outcome hand_cases() {
    const SimilarityWeights w;
    FeatureSet full;
    full.platforms = {"facebook"};
    full.case_topics = {"online_digital"};
    full.investigation_type = {"undercover"};
    full.severity_indicators = {"infant"};
    const double identical = weighted_similarity(full, full, w).total;

    CaseDimensions a, b;
    a[Dimension::platforms] = {"chat"};
    b[Dimension::platforms] = {"chat"};
    a[Dimension::topics] = {"possession"};
    b[Dimension::topics] = {"possession"};
    a[Dimension::demographics] = {"rso:true"};
    b[Dimension::demographics] = {"rso:false"};
    a[Dimension::relationship] = {"stranger"};
    b[Dimension::relationship] = {"father"};
    const double partial = weighted_similarity(a, b, w).total;

    // Adding a dimension absent on both sides must not move the score.
    FeatureSet x = full, y = full;
    x.severity_indicators.clear();
    y.severity_indicators.clear();
    x.platforms = {"chat"};
    const auto sx = weighted_similarity(x, y, w);
    const bool absent_neutral =
        !sx[Dimension::severity].present && std::fabs(sx.total - (1.0 - w.severity - w.platforms)) < 1e-12;

    const std::string d = "identical " + fmt("%.2f", identical) + ", platforms+topics " + fmt("%.2f", partial) +
                          ", both-absent neutral " + (absent_neutral ? "yes" : "no");
    const bool ok = std::fabs(identical - 1.0) < 1e-12 && std::fabs(partial - 0.45) < 1e-12 && absent_neutral;
    return ok ? pass(d) : fail(d);
}

Outcome totality() {
    std::string d;
    bool ok = true;
    for (const int n : {1, 10, 200}) {
        const auto records = random_records(static_cast<std::uint64_t>(1000 + n), n);
        const auto report = cluster_all(records, ClusterConfig{});
        const auto* general = report.find("General");
        const bool good = general && general->count() == static_cast<std::size_t>(n) &&
                          std::fabs(general->coverage_percent - 100.0) < 1e-9;
        ok = ok && good;
        d += (d.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " " +
             (general ? fmt("%.1f%%", general->coverage_percent) : std::string("missing"));
    }
    return ok ? pass(d) : fail(d);
}

Outcome subgroup_semantics() {
    const auto records = random_records(200, 200);
    const ClusterConfig cfg;
    const auto result = form_subgroups(records, cfg.threshold, cfg.weights);
    std::vector<std::vector<std::string>> got;
    for (const auto& g : result.groups) got.push_back(g.member_case_ids);
    std::sort(got.begin(), got.end());
    const auto want = ct::oracle_components(records, cfg.threshold, weight_vector(cfg.weights));

    std::map<std::string, const CaseRecord*> by_id;
    for (const auto& r : records) by_id[r.case_id] = &r;
    std::size_t lonely = 0;
    for (const auto& g : result.groups) {
        for (const auto& id : g.member_case_ids) {
            bool linked = false;
            for (const auto& other : g.member_case_ids) {
                if (other != id) {
                    linked = linked || weighted_similarity(by_id[id]->features, by_id[other]->features, cfg.weights)
                                               .total >= cfg.threshold;
                }
            }
            lonely += !linked;
        }
    }
    const std::string d = std::to_string(got.size()) + " groups vs oracle " + std::to_string(want.size()) +
                          ", members without neighbour " + std::to_string(lonely);
    return got == want && lonely == 0 ? pass(d) : fail(d);
}

Outcome triage_normalization() {
    const std::vector<double> raw{0.2, 0.5, 0.8};
    const auto n = normalize(raw);
    const bool example = n[0] == 5.0 && std::fabs(n[1] - 7.5) < 1e-12 && n[2] == 10.0;
    const std::vector<double> flat{0.4, 0.4, 0.4};
    const auto f = normalize(flat);
    const bool degenerate = std::all_of(f.begin(), f.end(), [](double v) { return v == 5.0; });

    const auto records = random_records(300, 200);
    const auto base = rank_cases(records);
    TriageConfig scaled;
    scaled.weights = TriageWeights{}.scaled(2.5);
    const auto other = rank_cases(records, scaled);
    bool in_range = true, same_order = true;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < base.size(); ++i) {
        in_range = in_range && base[i].normalized_score >= 5.0 && base[i].normalized_score <= 10.0;
        same_order = same_order && base[i].case_id == other[i].case_id;
        ids.push_back(base[i].case_id);
    }
    std::vector<double> wv;
    for (const auto fct : kTriageFactors) wv.push_back(TriageWeights{}[fct]);
    const bool raw_order = ids == ct::oracle_ranking(records, wv);

    const std::string d = std::string("example ") + (example ? "ok" : "bad") + ", degenerate " +
                          (degenerate ? "ok" : "bad") + ", range " + (in_range ? "ok" : "bad") + ", raw order " +
                          (raw_order ? "ok" : "bad") + ", scaling " + (same_order ? "ok" : "bad");
    return example && degenerate && in_range && raw_order && same_order ? pass(d) : fail(d);
}

Outcome batching() {
    std::mt19937_64 rng(50);
    std::size_t segments = 0;
    for (int i = 0; i < 50; ++i) {
        const auto doc = ct::make_document(rng, 2 + i % 8, 2011 + i % 4);
        const auto markers = find_markers(doc.text);
        const auto segs = batch_cases(doc.text, doc.org, std::to_string(doc.year));
        if (segs.size() != markers.size()) return fail("document " + std::to_string(i) + ": segment/marker mismatch");
        std::string joined;
        for (const auto& s : segs) joined += doc.text.substr(s.start_offset, s.end_offset - s.start_offset);
        if (joined != doc.text.substr(markers.front().start_offset)) {
            return fail("document " + std::to_string(i) + ": concatenation differs");
        }
        segments += segs.size();
    }
    return pass("50 documents, " + std::to_string(segments) + " segments reconstructed");
}

Outcome provenance() {
    const Extractor extractor(default_config().extraction);
    std::mt19937_64 rng(729);
    std::size_t cases = 0, exact = 0, bad_spans = 0, spans = 0;
    for (int d = 0; d < 40; ++d) {
        const auto doc = ct::make_document(rng, 6, 2012);
        const auto segs = batch_cases(doc.text, doc.org, "2012");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto rec = extractor.build(segs[i]).record;
            ++cases;
            exact += rec.features == doc.cases[i].expected;
            for (const auto& s : rec.spans) {
                ++spans;
                bad_spans += s.end > rec.raw_text.size() ||
                             rec.raw_text.compare(s.start, s.end - s.start, s.matched_text) != 0;
            }
        }
    }
    const double recall = cases ? static_cast<double>(exact) / static_cast<double>(cases) : 0.0;
    const std::string d = std::to_string(cases) + " cases, recall " + fmt("%.3f", recall) + ", " +
                          std::to_string(spans) + " spans, " + std::to_string(bad_spans) + " invalid";
    return exact == cases && bad_spans == 0 ? pass(d) : fail(d);
}

Outcome tag_filtering() {
    const auto records = random_records(730, 200);
    const auto vocab = tag_vocabulary(default_config().extraction);
    std::vector<TagRef> tags;
    for (const auto& [cat, values] : vocab) {
        for (const auto& v : values) tags.push_back({cat, v});
    }
    std::mt19937_64 rng(731);
    std::uniform_int_distribution<std::size_t> pick(0, tags.size() - 1);
    std::size_t mismatches = 0, grew = 0;
    for (int q = 0; q < 100; ++q) {
        TagQuery query;
        const int k = 1 + q % 3;
        for (int i = 0; i < k; ++i) query.selected_tags.insert(tags[pick(rng)]);

        // per-tag sets, intersected independently
        std::set<std::string> expected;
        bool first = true;
        for (const auto& t : query.selected_tags) {
            std::set<std::string> with;
            for (const auto& r : records) {
                if (has_tag(r, t)) with.insert(r.case_id);
            }
            if (first) {
                expected = with;
                first = false;
            } else {
                std::set<std::string> both;
                std::set_intersection(expected.begin(), expected.end(), with.begin(), with.end(),
                                      std::inserter(both, both.end()));
                expected = both;
            }
        }
        std::set<std::string> got;
        for (const auto& m : filter_by_tags(records, query, vocab)) got.insert(m.record->case_id);
        mismatches += got != expected;

        auto bigger = query;
        bigger.selected_tags.insert(tags[pick(rng)]);
        grew += filter_by_tags(records, bigger, vocab).size() > got.size();
    }
    const std::string d = "100 queries, " + std::to_string(mismatches) + " mismatches, " + std::to_string(grew) +
                          " grew after adding a tag";
    return mismatches == 0 && grew == 0 ? pass(d) : fail(d);
}

Outcome store_round_trip() {
    ct::TempDir dir;
    const auto a = random_records(731, 60, 0);
    const auto b = random_records(732, 40, 5000);
    std::size_t differing = 0;
    {
        auto store = Store::open(dir / "a.db");
        for (const auto& r : a) store.upsert_case(r);
        for (const auto& r : a) differing += store.fetch_case(r.case_id) != std::optional<CaseRecord>(r);
    }
    {
        auto store = Store::open(dir / "b.db");
        for (const auto& r : b) store.upsert_case(r);
    }
    auto dest = Store::open(dir / "a.db");
    const auto merged = dest.merge_from(dir / "b.db");
    std::size_t missing = 0;
    for (const auto* set : {&a, &b}) {
        for (const auto& r : *set) missing += dest.fetch_case(r.case_id) != std::optional<CaseRecord>(r);
    }

    std::mt19937_64 rng(733);
    const auto doc = ct::make_document(rng, 10, 2012);
    const auto path = dir / "2012 azicac.txt";
    ct::write_file(path, doc.text);
    const auto db = (dir / "ingest.db").string();
    run_cli_quiet({"ingest", path.string(), "--db", db});
    const auto once = Store::open_read_only(db).query_cases();
    run_cli_quiet({"ingest", path.string(), "--db", db});
    const auto twice = Store::open_read_only(db).query_cases();
    const bool idempotent = once.size() == 10 && once == twice;

    const std::string d = std::to_string(differing) + " round-trip diffs, merge copied " +
                          std::to_string(merged.copied) + " with " + std::to_string(missing) +
                          " missing, double ingest " + (idempotent ? "idempotent" : "changed");
    return differing == 0 && merged.copied == b.size() && missing == 0 && idempotent ? pass(d) : fail(d);
}

Outcome throughput() {
    ct::TempDir dir;
    std::mt19937_64 rng(47);
    const auto doc = ct::make_document(rng, 47, 2013);
    const auto path = dir / "2013 azicac.txt";
    ct::write_file(path, doc.text);
    const auto db = (dir / "bench.db").string();
    if (run_cli_quiet({"ingest", path.string(), "--db", db}) != 0) return fail("ingest of the bench corpus failed");

    std::string out;
    if (run_cli_quiet({"bench", "--db", db, "--runs", "3"}, &out) != 0) return fail("bench command failed");
    const auto pos = out.find("End-to-end throughput");
    double rate = 0.0;
    if (pos != std::string::npos) {
        const auto num = out.find_first_of("0123456789", pos);
        rate = std::atof(out.c_str() + num);
    }

    const auto records = Store::open_read_only(db).query_cases();
    double cluster_ms = 0.0;
    for (int i = 0; i < 3; ++i) cluster_ms = std::max(cluster_ms, cluster_all(records, default_config().clustering).elapsed_ms);
    const std::string d = std::to_string(records.size()) + " cases, " + fmt("%.1f cases/s", rate) +
                          ", clustering " + fmt("%.2f ms", cluster_ms);
    return records.size() == 47 && rate >= 10.0 && cluster_ms < 100.0 ? pass(d) : fail(d);
}

// Real-report reproduction; needs the four public reports, so it only runs
// when CASEWORK_REPORTS_DIR points at them and never gates the exit code.
Outcome published_reports() {
    const char* dir_env = std::getenv("CASEWORK_REPORTS_DIR");
    if (!dir_env) return skip("set CASEWORK_REPORTS_DIR to the four source PDFs to run");
    const Config config = default_config();
    const Extractor extractor(config.extraction);
    std::vector<CaseRecord> records;
    for (const auto& entry : std::filesystem::directory_iterator(dir_env)) {
        if (format_for_path(entry.path()) != SourceFormat::pdf) continue;
        auto result = process_document(entry.path(), config, extractor, {});
        records.insert(records.end(), result.records.begin(), result.records.end());
    }
    const auto coverage = extraction_coverage(records);
    const auto clusters = cluster_all(records, config.clustering);
    std::string d = std::to_string(records.size()) + " cases; clusters";
    for (const auto& c : clusters.clusters) d += " " + c.name + "=" + std::to_string(c.count());
    for (const auto& row : coverage) {
        if (row.feature == "Relationship to victim" || row.feature == "Prosecution outcome" ||
            row.feature == "Case topics") {
            d += "; " + row.feature + " " + fmt("%.1f%%", row.percent);
        }
    }
    return records.size() == 47 ? pass(d) : fail(d);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
        bool gated;
    };
    const std::vector<Criterion> criteria{
        {"jaccard_oracle_equivalence", jaccard_oracle, true},
        {"similarity_hand_cases", hand_cases, true},
        {"cluster_totality", totality, true},
        {"subgroup_semantics", subgroup_semantics, true},
        {"triage_normalization", triage_normalization, true},
        {"batching_reconstruction", batching, true},
        {"provenance_and_recall", provenance, true},
        {"tag_filtering", tag_filtering, true},
        {"store_round_trip", store_round_trip, true},
        {"throughput_sanity", throughput, true},
        {"published_reports_reproduction", published_reports, false},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* label = o.status == Outcome::Status::pass   ? "PASS"
                            : o.status == Outcome::Status::skip ? "SKIP"
                                                                : "FAIL";
        if (o.status == Outcome::Status::fail && !c.gated) label = "FAIL (not gated)";
        std::cout << label << " " << c.name << ": " << o.detail << "\n";
        failures += o.status == Outcome::Status::fail && c.gated;
    }
    std::cout << (failures == 0 ? "all gated criteria passed" : std::to_string(failures) + " gated criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
