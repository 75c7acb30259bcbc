#pragma once

#include "casework/case_record.hpp"
#include "casework/cluster.hpp"
#include "casework/pattern_config.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

struct TagCount {
    std::string tag;
    std::size_t count = 0;
    double percent = 0.0;  // of all cases, one decimal

    bool operator==(const TagCount&) const = default;
};

struct PairCount {
    std::string first;
    std::string second;
    std::size_t count = 0;

    bool operator==(const PairCount&) const = default;
};

struct KeywordCount {
    std::string token;
    std::size_t frequency = 0;

    bool operator==(const KeywordCount&) const = default;
};

struct PatternSummary {
    std::size_t rso_count = 0;
    double rso_percent = 0.0;
    std::size_t stranger_count = 0;  // cases tagged with the stranger topic
    std::size_t family_count = 0;    // cases tagged with the family topic
    std::optional<std::string> dominant_case_type;

    bool operator==(const PatternSummary&) const = default;
};

struct InsightConfig {
    std::size_t keyword_min_length = 4;
    std::size_t top_k_global = 20;
    std::size_t top_k_group = 10;
    std::set<std::string> stopwords;

    bool operator==(const InsightConfig&) const = default;
};

struct InsightReport {
    std::size_t total_cases = 0;
    std::vector<TagCount> platform_stats;
    std::vector<TagCount> severity_distribution;
    std::vector<TagCount> topic_stats;
    std::vector<TagCount> agency_stats;
    std::vector<TagCount> year_counts;  // tag is the year
    std::map<int, std::vector<TagCount>> platform_trends;  // year -> platforms (percent of that year's cases)
    std::vector<PairCount> topic_cooccurrence;
    std::vector<PairCount> platform_severity;
    PatternSummary patterns;
    std::vector<KeywordCount> keywords_global;
    std::map<std::string, std::vector<KeywordCount>> keywords_per_group;  // group_id -> keywords
};

/// count / total as a percentage rounded to one decimal; 0 when total is 0.
double percent_of(std::size_t count, std::size_t total);

/// Case types considered for PatternSummary::dominant_case_type.
const std::vector<std::string>& case_type_topics();

InsightReport compute_insights(const std::vector<CaseRecord>& records, const std::vector<SubGroup>& groups,
                               const InsightConfig& config = {});

/// Lowercase alphabetic tokens of at least `keyword_min_length` letters,
/// stopwords removed, ranked by frequency then alphabetically.
/// Throws std::invalid_argument when top_k is 0.
std::vector<KeywordCount> extract_keywords(const std::vector<std::string>& texts, std::size_t top_k,
                                           const InsightConfig& config = {});

enum class TagCategory { case_topics, severity_indicators, platforms, investigation_types, relationships, rso };

std::string_view to_string(TagCategory category);
std::optional<TagCategory> parse_tag_category(std::string_view text);

struct TagRef {
    TagCategory category = TagCategory::case_topics;
    std::string tag;

    auto operator<=>(const TagRef&) const = default;
};

struct TagQuery {
    std::set<TagRef> selected_tags;
};

/// Selectable tags per category. Relationships are "stranger" plus the
/// literal keywords of the relationship topic; rso is {"true", "false"}.
std::map<TagCategory, std::set<std::string>> tag_vocabulary(const ExtractionConfig& config);

struct FilterMatch {
    const CaseRecord* record = nullptr;
    std::vector<HighlightSpan> spans;       // spans justifying the selected tags
    std::vector<TagRef> default_justified;  // tags that hold by default and carry no span
};

/// Cases carrying every selected tag, in input order. Throws InvalidQuery on
/// an empty query and UnknownTag for a tag outside `vocabulary`.
std::vector<FilterMatch> filter_by_tags(const std::vector<CaseRecord>& records, const TagQuery& query,
                                        const std::map<TagCategory, std::set<std::string>>& vocabulary);

/// Whether `record` carries `tag`.
bool has_tag(const CaseRecord& record, const TagRef& tag);

}  // namespace casework
