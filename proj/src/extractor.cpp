#include "casework/extractor.hpp"

#include "casework/errors.hpp"
#include "casework/text_util.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

namespace casework {

namespace {

constexpr int kMaxAge = 120;
constexpr std::int64_t kMaxVictimCount = 1'000'000;
constexpr std::int64_t kMaxEvidenceCount = 1'000'000'000'000;

struct RegexHit {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t rule_order = 0;
    std::string rule_id;
    std::vector<std::string> groups;  // groups[0] is the whole match
};

std::optional<std::int64_t> parse_count(std::string digits) {
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    if (digits.empty() || digits.size() > 15) return std::nullopt;
    if (!std::all_of(digits.begin(), digits.end(), is_ascii_digit)) return std::nullopt;
    return std::stoll(digits);
}

HighlightSpan span_of(const RegexHit& hit, std::string feature_path) {
    return HighlightSpan{"", std::move(feature_path), hit.start, hit.end, hit.groups[0], hit.rule_id};
}

ValidationIssue warning(std::string field, std::string message) {
    return ValidationIssue{IssueSeverity::warning, std::move(field), std::move(message)};
}

ValidationIssue error(std::string field, std::string message) {
    return ValidationIssue{IssueSeverity::error, std::move(field), std::move(message)};
}

void check_vocab(const std::set<std::string>& values, const std::set<std::string>& vocabulary,
                 const std::string& field, std::vector<ValidationIssue>& out) {
    for (const auto& v : values) {
        if (vocabulary.count(v) == 0) out.push_back(error(field, "'" + v + "' is not in the " + field + " vocabulary"));
    }
}

}  // namespace

// ------------------------------------------------------------- compilation

std::vector<Extractor::CompiledRule> Extractor::compile(const std::vector<PatternRule>& rules) {
    std::vector<CompiledRule> out;
    out.reserve(rules.size());
    for (const auto& r : rules) {
        try {
            out.push_back(CompiledRule{
                r.id, std::regex(r.pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize)});
        } catch (const std::regex_error& e) {
            throw ConfigError("rule '" + r.id + "' has an invalid pattern: " + e.what());
        }
    }
    return out;
}

Extractor::CompiledTagTable Extractor::compile(const TagTable& table) {
    CompiledTagTable out;
    for (const auto& [value, rules] : table) out.emplace(value, compile(rules));
    return out;
}

Extractor::CompiledKeywordTable Extractor::compile_keywords(const TagTable& table, bool whole_word) {
    CompiledKeywordTable out;
    for (const auto& [feature, rules] : table) {
        auto& compiled = out[feature];
        for (const auto& r : rules) compiled.push_back(CompiledKeyword{r.id, KeywordPattern::compile(r.pattern, whole_word)});
    }
    return out;
}

Extractor::Extractor(ExtractionConfig config) : config_(std::move(config)) {
    perpetrator_age_ = compile(config_.perpetrator_age);
    victim_count_ = compile(config_.victim_count);
    victim_ages_ = compile(config_.victim_ages);
    evidence_images_ = compile(config_.evidence_images);
    evidence_videos_ = compile(config_.evidence_videos);
    evidence_messages_ = compile(config_.evidence_messages);
    evidence_storage_ = compile(config_.evidence_storage);
    charges_ = compile(config_.charges);
    jail_info_ = compile(config_.jail_info);
    rso_ = compile(config_.registered_sex_offender);

    platforms_ = compile(config_.platforms);
    prosecution_ = compile(config_.prosecution);
    investigation_ = compile(config_.investigation_type);
    agencies_ = compile(config_.agencies);
    victim_gender_ = compile(config_.victim_gender);

    for (const auto& [category, table] : config_.semantic) semantic_.emplace(category, compile_keywords(table, false));
    severity_phrases_ = compile_keywords(config_.severity_phrases, true);
}

// -------------------------------------------------------- structured pass

namespace {

template <typename Rules>
std::vector<RegexHit> all_hits(std::string_view text, const Rules& rules) {
    std::vector<RegexHit> hits;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        for (std::cregex_iterator it(text.data(), text.data() + text.size(), rules[r].regex), end; it != end; ++it) {
            const auto& m = *it;
            if (m.length(0) == 0) continue;
            RegexHit hit;
            hit.start = static_cast<std::size_t>(m.position(0));
            hit.end = hit.start + static_cast<std::size_t>(m.length(0));
            hit.rule_order = r;
            hit.rule_id = rules[r].id;
            for (std::size_t g = 0; g < m.size(); ++g) hit.groups.push_back(m[g].matched ? m.str(g) : std::string{});
            hits.push_back(std::move(hit));
        }
    }
    std::sort(hits.begin(), hits.end(), [](const RegexHit& a, const RegexHit& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.rule_order < b.rule_order;
    });
    return hits;
}

/// First in-range value in reading order; every in-range hit gets a span.
template <typename Rules>
std::optional<std::int64_t> first_count(std::string_view text, const Rules& rules, const std::string& path,
                                        std::int64_t lo, std::int64_t hi, StructuredExtraction& out,
                                        const std::vector<RegexHit>& claimed = {}) {
    std::optional<std::int64_t> first;
    bool conflict = false;
    for (const auto& hit : all_hits(text, rules)) {
        // a hit that lies inside text already attributed elsewhere is not ours
        const bool taken = std::any_of(claimed.begin(), claimed.end(), [&](const RegexHit& c) {
            return hit.start >= c.start && hit.end <= c.end;
        });
        if (taken) continue;
        const auto value = hit.groups.size() > 1 ? parse_count(hit.groups[1]) : std::nullopt;
        if (!value || *value < lo || *value > hi) {
            out.notes.push_back(warning(path, "ignored implausible value in '" + hit.groups[0] + "'"));
            continue;
        }
        out.spans.push_back(span_of(hit, path));
        if (!first) {
            first = value;
        } else if (*first != *value) {
            conflict = true;
        }
    }
    if (conflict) out.notes.push_back(warning(path, "conflicting values; first match kept"));
    return first;
}

template <typename Table>
std::set<std::string> match_tags(std::string_view text, const Table& table, const std::string& prefix,
                                 std::vector<HighlightSpan>& spans) {
    std::set<std::string> tags;
    for (const auto& [value, rules] : table) {
        const auto hits = all_hits(text, rules);
        if (hits.empty()) continue;
        tags.insert(value);
        for (const auto& hit : hits) spans.push_back(span_of(hit, prefix + "." + value));
    }
    return tags;
}

}  // namespace

StructuredExtraction Extractor::extract_structured(std::string_view text) const {
    StructuredExtraction out;
    FeatureSet& f = out.features;

    // Victim ages first: "a 13-year-old girl" must not become the perpetrator's age.
    const auto victim_hits = all_hits(text, victim_ages_);
    for (const auto& hit : victim_hits) {
        const auto value = hit.groups.size() > 1 ? parse_count(hit.groups[1]) : std::nullopt;
        if (!value || *value > kMaxAge) continue;
        f.victim_ages.insert(static_cast<int>(*value));
        out.spans.push_back(span_of(hit, "victim_ages"));
    }
    if (auto age = first_count(text, perpetrator_age_, "perpetrator_age", 0, kMaxAge, out, victim_hits)) {
        f.perpetrator_age = static_cast<int>(*age);
    }
    if (auto count = first_count(text, victim_count_, "victim_count", 0, kMaxVictimCount, out)) {
        f.victim_count = static_cast<int>(*count);
    }
    f.evidence_images = first_count(text, evidence_images_, "evidence_images", 0, kMaxEvidenceCount, out);
    f.evidence_videos = first_count(text, evidence_videos_, "evidence_videos", 0, kMaxEvidenceCount, out);
    f.evidence_messages = first_count(text, evidence_messages_, "evidence_messages", 0, kMaxEvidenceCount, out);

    bool storage_conflict = false;
    for (const auto& hit : all_hits(text, evidence_storage_)) {
        if (hit.groups.size() < 3) continue;
        const double magnitude = std::strtod(hit.groups[1].c_str(), nullptr);
        const auto unit = parse_storage_unit(hit.groups[2]);
        if (!unit || !(magnitude > 0.0)) continue;
        out.spans.push_back(span_of(hit, "evidence_storage"));
        const StorageVolume volume{magnitude, *unit};
        if (!f.evidence_storage) {
            f.evidence_storage = volume;
        } else if (!(*f.evidence_storage == volume)) {
            storage_conflict = true;
        }
    }
    if (storage_conflict) out.notes.push_back(warning("evidence_storage", "conflicting values; first match kept"));

    for (const auto& hit : all_hits(text, charges_)) {
        if (hit.groups.size() < 2) continue;
        const std::string charge(trim(hit.groups[1]));
        if (charge.empty()) continue;
        if (std::find(f.charges.begin(), f.charges.end(), charge) == f.charges.end()) f.charges.push_back(charge);
        out.spans.push_back(span_of(hit, "charges"));
    }
    for (const auto& hit : all_hits(text, jail_info_)) {
        const std::string info(trim(hit.groups.size() > 1 ? hit.groups[1] : hit.groups[0]));
        if (info.empty()) continue;
        if (!f.jail_info) f.jail_info = info;
        out.spans.push_back(span_of(hit, "jail_info"));
    }

    for (const auto& hit : all_hits(text, rso_)) {
        f.registered_sex_offender = true;
        out.spans.push_back(span_of(hit, "registered_sex_offender"));
    }

    f.platforms = match_tags(text, platforms_, "platforms", out.spans);
    f.prosecution = match_tags(text, prosecution_, "prosecution", out.spans);
    f.investigation_type = match_tags(text, investigation_, "investigation_type", out.spans);
    f.agencies = match_tags(text, agencies_, "agencies", out.spans);
    const auto genders = match_tags(text, victim_gender_, "victim_gender", out.spans);
    if (genders.size() == 1) {
        f.victim_gender = *genders.begin();
    } else if (genders.size() > 1) {
        f.victim_gender = "mixed";
    }
    return out;
}

// ---------------------------------------------------------- keyword passes

TagExtraction Extractor::match_keywords(std::string_view text, const CompiledKeywordTable& table,
                                        std::string_view feature_prefix) const {
    TagExtraction out;
    const std::string lowered = to_lower_ascii(text);
    for (const auto& [feature, keywords] : table) {
        for (const auto& kw : keywords) {
            const auto hit = kw.pattern.find(lowered);
            if (!hit) continue;
            out.tags.insert(feature);
            out.spans.push_back(HighlightSpan{"", std::string(feature_prefix) + "." + feature, hit->start, hit->end,
                                              std::string(text.substr(hit->start, hit->end - hit->start)), kw.id});
            break;
        }
    }
    return out;
}

TagExtraction Extractor::extract_semantic(std::string_view text, std::string_view category) const {
    const auto it = semantic_.find(std::string(category));
    if (it == semantic_.end()) throw UnknownCategory("no keyword table for category '" + std::string(category) + "'");
    return match_keywords(text, it->second, category);
}

TagExtraction Extractor::extract_severity_phrases(std::string_view text) const {
    return match_keywords(text, severity_phrases_, "severity_phrases");
}

// -------------------------------------------------------------- validation

std::vector<ValidationIssue> Extractor::validate(const FeatureSet& f) const {
    std::vector<ValidationIssue> out;
    auto age_ok = [](int a) { return a >= 0 && a <= kMaxAge; };

    if (f.perpetrator_age && !age_ok(*f.perpetrator_age)) {
        out.push_back(error("perpetrator_age", "age " + std::to_string(*f.perpetrator_age) + " out of range [0, 120]"));
    }
    for (const int a : f.victim_ages) {
        if (!age_ok(a)) out.push_back(error("victim_ages", "age " + std::to_string(a) + " out of range [0, 120]"));
    }
    if (f.victim_count && *f.victim_count < 0) out.push_back(error("victim_count", "count must be >= 0"));
    if (f.evidence_images && *f.evidence_images < 0) out.push_back(error("evidence_images", "count must be >= 0"));
    if (f.evidence_videos && *f.evidence_videos < 0) out.push_back(error("evidence_videos", "count must be >= 0"));
    if (f.evidence_messages && *f.evidence_messages < 0) out.push_back(error("evidence_messages", "count must be >= 0"));
    if (f.evidence_storage && !(f.evidence_storage->magnitude > 0.0)) {
        out.push_back(error("evidence_storage", "storage magnitude must be > 0"));
    }
    if (f.relationship_to_victim.empty()) {
        out.push_back(error("relationship_to_victim", "relationship must default to 'stranger', found empty"));
    }
    if (f.victim_gender && *f.victim_gender != "female" && *f.victim_gender != "male" && *f.victim_gender != "mixed") {
        out.push_back(error("victim_gender", "'" + *f.victim_gender + "' is not a known gender value"));
    }
    if (f.victim_count && !f.victim_ages.empty() && static_cast<std::size_t>(*f.victim_count) < f.victim_ages.size()) {
        out.push_back(warning("victim_count", "fewer victims than distinct victim ages"));
    }

    check_vocab(f.platforms, vocab::platforms(), "platforms", out);
    check_vocab(f.investigation_type, vocab::investigation_types(), "investigation_type", out);
    check_vocab(f.prosecution, vocab::prosecution(), "prosecution", out);
    check_vocab(f.severity_indicators, vocab::severity_indicators(), "severity_indicators", out);
    check_vocab(f.case_topics, vocab::case_topics(), "case_topics", out);
    check_vocab(f.severity_phrases, vocab::severity_phrases(), "severity_phrases", out);
    std::set<std::string> agency_names;
    for (const auto& [name, rules] : config_.agencies) agency_names.insert(name);
    check_vocab(f.agencies, agency_names, "agencies", out);
    return out;
}

// ------------------------------------------------------------ case record

CaseBuild Extractor::build(const CaseSegment& segment) const {
    CaseBuild result;
    CaseRecord& r = result.record;
    r.case_id = segment.case_id;
    r.source_org = segment.source_org;
    r.year = std::stoi(segment.year);
    r.month = segment.month;
    r.raw_text = segment.text;
    r.created_at = utc_timestamp_now();

    auto structured = extract_structured(segment.text);
    r.features = std::move(structured.features);
    r.spans = std::move(structured.spans);
    result.issues = std::move(structured.notes);

    auto append = [&r](TagExtraction&& t, std::set<std::string>& target) {
        target = std::move(t.tags);
        r.spans.insert(r.spans.end(), std::make_move_iterator(t.spans.begin()), std::make_move_iterator(t.spans.end()));
    };
    if (semantic_.count("severity_indicators")) {
        append(extract_semantic(segment.text, "severity_indicators"), r.features.severity_indicators);
    }
    if (semantic_.count("case_topics")) append(extract_semantic(segment.text, "case_topics"), r.features.case_topics);
    append(extract_severity_phrases(segment.text), r.features.severity_phrases);

    r.features.relationship_to_victim = std::string(kDefaultRelationship);
    if (r.features.case_topics.count(config_.relationship_topic)) {
        const std::string path = "case_topics." + config_.relationship_topic;
        const auto it = std::find_if(r.spans.begin(), r.spans.end(),
                                     [&](const HighlightSpan& s) { return s.feature_path == path; });
        if (it != r.spans.end()) {
            HighlightSpan rel = *it;
            rel.feature_path = "relationship_to_victim";
            r.features.relationship_to_victim = to_lower_ascii(rel.matched_text);
            r.spans.push_back(std::move(rel));
        }
    }

    for (auto& s : r.spans) s.case_id = r.case_id;
    std::stable_sort(r.spans.begin(), r.spans.end(), [](const HighlightSpan& a, const HighlightSpan& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return a.feature_path < b.feature_path;
    });

    if (r.raw_text.empty()) result.issues.push_back(error("raw_text", "case text is empty"));
    if (segment.year != segment.batch_year) {
        result.issues.push_back(warning("year", "marker year " + segment.year + " differs from batch year " +
                                                    segment.batch_year + " used in the case id"));
    }
    auto validation = validate(r.features);
    result.issues.insert(result.issues.end(), validation.begin(), validation.end());
    return result;
}

CaseRecord Extractor::build_case_record(const CaseSegment& segment) const {
    auto built = build(segment);
    if (has_errors(built.issues)) {
        std::string message = "case " + segment.case_id + " failed validation:";
        for (const auto& issue : built.issues) {
            if (issue.severity == IssueSeverity::error) message += " [" + issue.field + ": " + issue.message + "]";
        }
        throw ValidationFailed(message);
    }
    return std::move(built.record);
}

}  // namespace casework
