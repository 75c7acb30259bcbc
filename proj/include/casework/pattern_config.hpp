#pragma once

#include <map>
#include <string>
#include <vector>

namespace casework {

/// One extraction rule. `id` is stable across releases and is what a
/// HighlightSpan reports as `rule_id`.
struct PatternRule {
    std::string id;
    std::string pattern;

    bool operator==(const PatternRule&) const = default;
};

/// Canonical tag value -> rules that emit it.
using TagTable = std::map<std::string, std::vector<PatternRule>>;

/// Every pattern table the extractor uses. Regex families are matched
/// case-insensitively with ECMAScript syntax; `semantic` and
/// `severity_phrases` hold keyword patterns (literal text plus `[a-b]`
/// character classes) matched against lowercased text.
struct ExtractionConfig {
    std::vector<PatternRule> perpetrator_age;
    std::vector<PatternRule> victim_count;
    std::vector<PatternRule> victim_ages;
    std::vector<PatternRule> evidence_images;
    std::vector<PatternRule> evidence_videos;
    std::vector<PatternRule> evidence_messages;
    std::vector<PatternRule> evidence_storage;  // group 1 magnitude, group 2 unit
    std::vector<PatternRule> charges;           // group 1 charge text
    std::vector<PatternRule> jail_info;         // group 1 jail text
    std::vector<PatternRule> registered_sex_offender;

    TagTable platforms;
    TagTable prosecution;
    TagTable investigation_type;
    TagTable agencies;
    TagTable victim_gender;

    /// category ("severity_indicators", "case_topics") -> feature -> keywords.
    /// Keyword order matters: the first keyword found supplies the span.
    std::map<std::string, TagTable> semantic;
    /// case_topics feature whose matched keyword becomes relationship_to_victim.
    std::string relationship_topic = "family";

    TagTable severity_phrases;  // whole-word keyword patterns

    bool operator==(const ExtractionConfig&) const = default;
};

}  // namespace casework
