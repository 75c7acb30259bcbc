#pragma once

#include "casework/case_record.hpp"
#include "casework/cluster.hpp"
#include "casework/config.hpp"
#include "casework/extractor.hpp"
#include "casework/ingest.hpp"
#include "casework/insights.hpp"
#include "casework/triage.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace casework {

struct IngestOptions {
    std::optional<std::string> org;  // overrides filename detection
    std::optional<int> year;         // used when the filename carries no year
    bool whole_doc_fallback = false;
};

struct CaseIssue {
    std::string case_id;
    ValidationIssue issue;
};

struct DocumentResult {
    std::filesystem::path source;
    std::string source_org;
    int year = 0;
    std::size_t char_count = 0;
    std::vector<CaseRecord> records;  // only records without error-level issues
    std::vector<CaseIssue> issues;
    std::optional<std::string> error;  // document-level failure (kind: message)
};

/// Ingest, batch and extract one document. Never throws for document
/// problems; they are reported in `error`.
DocumentResult process_document(const std::filesystem::path& source, const Config& config,
                                const Extractor& extractor, const IngestOptions& options);

/// Re-runs extraction on stored cases (segment text = raw_text).
CaseBuild rebuild_record(const CaseRecord& record, const Extractor& extractor);

struct CoverageRow {
    std::string feature;
    std::size_t count = 0;
    double percent = 0.0;
};

/// Share of cases with each feature populated, in the report's row order,
/// plus the unweighted average as the last row.
std::vector<CoverageRow> extraction_coverage(const std::vector<CaseRecord>& records);

struct Analysis {
    ClusterReport clusters;
    std::vector<PriorityResult> triage;
    TriageSummary triage_summary;
    InsightReport insights;
};

Analysis analyze(const std::vector<CaseRecord>& records, const Config& config);

}  // namespace casework
