#pragma once

#include "casework/batcher.hpp"
#include "casework/case_record.hpp"
#include "casework/keyword_pattern.hpp"
#include "casework/pattern_config.hpp"

#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

struct StructuredExtraction {
    FeatureSet features;  // only the regex-driven fields are populated
    std::vector<HighlightSpan> spans;
    std::vector<ValidationIssue> notes;  // conflicting or implausible matches
};

struct TagExtraction {
    std::set<std::string> tags;
    std::vector<HighlightSpan> spans;
};

struct CaseBuild {
    CaseRecord record;
    std::vector<ValidationIssue> issues;
};

/// Rule-based feature extraction over one case narrative. All tables come
/// from an ExtractionConfig that is compiled once and immutable afterwards,
/// so a single Extractor can be shared across threads.
class Extractor {
public:
    explicit Extractor(ExtractionConfig config);

    const ExtractionConfig& config() const noexcept { return config_; }

    StructuredExtraction extract_structured(std::string_view text) const;

    /// Keyword matching for `category` ("severity_indicators" or
    /// "case_topics"). Each feature is added once, with a span on the first
    /// keyword (in table order) that occurs. Throws UnknownCategory.
    TagExtraction extract_semantic(std::string_view text, std::string_view category) const;

    /// Whole-word, case-insensitive match over the severity phrase table.
    TagExtraction extract_severity_phrases(std::string_view text) const;

    /// Range, vocabulary and required-field checks. Never throws.
    std::vector<ValidationIssue> validate(const FeatureSet& features) const;

    /// Runs every extractor over the segment and validates the result.
    CaseBuild build(const CaseSegment& segment) const;

    /// As build(), but throws ValidationFailed when any error-level issue
    /// is present.
    CaseRecord build_case_record(const CaseSegment& segment) const;

private:
    struct CompiledRule {
        std::string id;
        std::regex regex;
    };
    struct CompiledKeyword {
        std::string id;
        KeywordPattern pattern;
    };
    using CompiledTagTable = std::map<std::string, std::vector<CompiledRule>>;
    using CompiledKeywordTable = std::map<std::string, std::vector<CompiledKeyword>>;

    static std::vector<CompiledRule> compile(const std::vector<PatternRule>& rules);
    static CompiledTagTable compile(const TagTable& table);
    static CompiledKeywordTable compile_keywords(const TagTable& table, bool whole_word);

    TagExtraction match_keywords(std::string_view text, const CompiledKeywordTable& table,
                                 std::string_view feature_prefix) const;

    ExtractionConfig config_;

    std::vector<CompiledRule> perpetrator_age_;
    std::vector<CompiledRule> victim_count_;
    std::vector<CompiledRule> victim_ages_;
    std::vector<CompiledRule> evidence_images_;
    std::vector<CompiledRule> evidence_videos_;
    std::vector<CompiledRule> evidence_messages_;
    std::vector<CompiledRule> evidence_storage_;
    std::vector<CompiledRule> charges_;
    std::vector<CompiledRule> jail_info_;
    std::vector<CompiledRule> rso_;

    CompiledTagTable platforms_;
    CompiledTagTable prosecution_;
    CompiledTagTable investigation_;
    CompiledTagTable agencies_;
    CompiledTagTable victim_gender_;

    std::map<std::string, CompiledKeywordTable> semantic_;
    CompiledKeywordTable severity_phrases_;
};

}  // namespace casework
