#include "casework/pipeline.hpp"

#include "casework/batcher.hpp"
#include "casework/errors.hpp"
#include "casework/insights.hpp"

#include <cmath>
#include <cstdio>

namespace casework {

DocumentResult process_document(const std::filesystem::path& source, const Config& config,
                                const Extractor& extractor, const IngestOptions& options) {
    DocumentResult out;
    out.source = source;
    try {
        const auto doc = make_ingestor(format_for_path(source), config.org_patterns)->ingest(source);
        out.source_org = options.org ? *options.org : doc.source_org;
        out.char_count = doc.char_count;
        const auto year = doc.report_year ? doc.report_year : options.year;
        if (!year) {
            out.error = "missing_year: no year in file name; pass --year";
            return out;
        }
        out.year = *year;
        char year_text[16];
        std::snprintf(year_text, sizeof year_text, "%04d", *year);

        std::vector<CaseSegment> segments;
        try {
            segments = batch_cases(doc.cleaned_text, out.source_org, year_text);
        } catch (const NoMarkersFound&) {
            if (!options.whole_doc_fallback) throw;
            segments.push_back(whole_document_segment(doc.cleaned_text, out.source_org, year_text));
        }

        for (const auto& seg : segments) {
            auto built = extractor.build(seg);
            for (auto& issue : built.issues) out.issues.push_back(CaseIssue{seg.case_id, issue});
            if (!has_errors(built.issues)) out.records.push_back(std::move(built.record));
        }
    } catch (const Error& e) {
        out.error = e.kind() + ": " + e.what();
    } catch (const std::exception& e) {
        out.error = std::string("error: ") + e.what();
    }
    return out;
}

CaseBuild rebuild_record(const CaseRecord& record, const Extractor& extractor) {
    CaseSegment seg;
    seg.case_id = record.case_id;
    seg.text = record.raw_text;
    seg.month = record.month;
    seg.year = std::to_string(record.year);
    seg.batch_year = seg.year;
    seg.source_org = record.source_org;
    seg.end_offset = record.raw_text.size();
    auto built = extractor.build(seg);
    built.record.created_at = record.created_at;
    return built;
}

std::vector<CoverageRow> extraction_coverage(const std::vector<CaseRecord>& records) {
    struct Probe {
        const char* name;
        bool (*has)(const FeatureSet&);
    };
    static const Probe probes[] = {
        {"Relationship to victim", [](const FeatureSet& f) { return !f.relationship_to_victim.empty(); }},
        {"Prosecution outcome", [](const FeatureSet& f) { return !f.prosecution.empty(); }},
        {"Case topics", [](const FeatureSet& f) { return !f.case_topics.empty(); }},
        {"Severity indicators", [](const FeatureSet& f) { return !f.severity_indicators.empty(); }},
        {"Investigation type", [](const FeatureSet& f) { return !f.investigation_type.empty(); }},
        {"Perpetrator demographics", [](const FeatureSet& f) { return f.perpetrator_age.has_value(); }},
        {"Platforms used", [](const FeatureSet& f) { return !f.platforms.empty(); }},
        {"Victim count", [](const FeatureSet& f) { return f.victim_count.has_value(); }},
        {"Evidence volume",
         [](const FeatureSet& f) {
             return f.evidence_images || f.evidence_videos || f.evidence_storage || f.evidence_messages;
         }},
    };
    std::vector<CoverageRow> rows;
    double sum = 0.0;
    for (const auto& p : probes) {
        CoverageRow row{p.name, 0, 0.0};
        for (const auto& r : records) row.count += p.has(r.features) ? 1 : 0;
        row.percent = percent_of(row.count, records.size());
        sum += row.percent;
        rows.push_back(row);
    }
    const double avg = std::round(10.0 * sum / static_cast<double>(std::size(probes))) / 10.0;
    rows.push_back(CoverageRow{"Average", 0, avg});
    return rows;
}

Analysis analyze(const std::vector<CaseRecord>& records, const Config& config) {
    Analysis a;
    a.clusters = cluster_all(records, config.clustering);
    a.triage = rank_cases(records, config.triage);
    a.triage_summary = summarize(a.triage);
    a.insights = compute_insights(records, a.clusters.all_groups(), config.insights);
    return a;
}

}  // namespace casework
