#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

enum class StorageUnit { GB, TB };

std::string_view to_string(StorageUnit unit);
std::optional<StorageUnit> parse_storage_unit(std::string_view text);

struct StorageVolume {
    double magnitude = 0.0;
    StorageUnit unit = StorageUnit::GB;

    bool operator==(const StorageVolume&) const = default;
};

inline constexpr std::string_view kDefaultRelationship = "stranger";

/// Structured and semantic features of one case. Sets are ordered so every
/// serialization of a FeatureSet is byte-deterministic.
struct FeatureSet {
    // perpetrator context
    std::optional<int> perpetrator_age;
    bool registered_sex_offender = false;
    std::string relationship_to_victim{kDefaultRelationship};

    // victim context
    std::optional<int> victim_count;
    std::set<int> victim_ages;
    std::optional<std::string> victim_gender;

    // technology and law enforcement
    std::set<std::string> platforms;
    std::set<std::string> investigation_type;  // empty == not stated
    std::set<std::string> agencies;
    std::set<std::string> prosecution;
    std::vector<std::string> charges;
    std::optional<std::string> jail_info;

    // evidence
    std::optional<std::int64_t> evidence_images;
    std::optional<std::int64_t> evidence_videos;
    std::optional<StorageVolume> evidence_storage;
    std::optional<std::int64_t> evidence_messages;

    // content classification
    std::set<std::string> severity_indicators;
    std::set<std::string> case_topics;
    std::set<std::string> severity_phrases;

    bool operator==(const FeatureSet&) const = default;
};

/// Byte range [start, end) of a case's raw text that justifies one feature.
struct HighlightSpan {
    std::string case_id;
    std::string feature_path;  // e.g. "severity_indicators.infant"
    std::size_t start = 0;
    std::size_t end = 0;
    std::string matched_text;
    std::string rule_id;

    bool operator==(const HighlightSpan&) const = default;
};

enum class IssueSeverity { warning, error };

struct ValidationIssue {
    IssueSeverity severity = IssueSeverity::warning;
    std::string field;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

std::string_view to_string(IssueSeverity severity);
bool has_errors(const std::vector<ValidationIssue>& issues);

struct CaseRecord {
    std::string case_id;
    std::string source_org;
    int year = 0;
    std::string month;  // capitalized English month name
    std::string raw_text;
    FeatureSet features;
    std::vector<HighlightSpan> spans;
    std::string created_at;

    bool operator==(const CaseRecord&) const = default;
};

/// Closed vocabularies for the set-valued features. Extraction tables may
/// only emit values drawn from these (agencies are config-defined instead).
namespace vocab {
const std::set<std::string>& platforms();
const std::set<std::string>& investigation_types();
const std::set<std::string>& prosecution();
const std::set<std::string>& severity_indicators();
const std::set<std::string>& case_topics();
const std::set<std::string>& severity_phrases();
}  // namespace vocab

}  // namespace casework
