#include "casework/insights.hpp"

#include "casework/errors.hpp"
#include "casework/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace casework {

double percent_of(std::size_t count, std::size_t total) {
    if (total == 0) return 0.0;
    return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(total)) / 10.0;
}

const std::vector<std::string>& case_type_topics() {
    static const std::vector<std::string> topics{"production", "hands_on", "possession", "online_digital"};
    return topics;
}

namespace {

std::vector<TagCount> to_sorted(const std::map<std::string, std::size_t>& counts, std::size_t total) {
    std::vector<TagCount> out;
    out.reserve(counts.size());
    for (const auto& [tag, n] : counts) out.push_back(TagCount{tag, n, percent_of(n, total)});
    std::stable_sort(out.begin(), out.end(), [](const TagCount& a, const TagCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.tag < b.tag;
    });
    return out;
}

std::vector<PairCount> to_sorted(const std::map<std::pair<std::string, std::string>, std::size_t>& counts) {
    std::vector<PairCount> out;
    for (const auto& [key, n] : counts) out.push_back(PairCount{key.first, key.second, n});
    std::stable_sort(out.begin(), out.end(), [](const PairCount& a, const PairCount& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    return out;
}

template <typename Container>
void tally(const Container& tags, std::map<std::string, std::size_t>& counts) {
    for (const auto& t : tags) ++counts[t];
}

}  // namespace

std::vector<KeywordCount> extract_keywords(const std::vector<std::string>& texts, std::size_t top_k,
                                           const InsightConfig& config) {
    if (top_k == 0) throw std::invalid_argument("top_k must be at least 1");
    std::unordered_map<std::string, std::size_t> freq;
    std::string token;
    const auto flush = [&] {
        if (token.size() >= config.keyword_min_length && !config.stopwords.count(token)) ++freq[token];
        token.clear();
    };
    for (const auto& text : texts) {
        for (const char c : text) {
            if (is_ascii_alpha(c)) {
                token.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
            } else {
                flush();
            }
        }
        flush();
    }
    std::vector<KeywordCount> out;
    out.reserve(freq.size());
    for (auto& [t, n] : freq) out.push_back(KeywordCount{t, n});
    std::sort(out.begin(), out.end(), [](const KeywordCount& a, const KeywordCount& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.token < b.token;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

InsightReport compute_insights(const std::vector<CaseRecord>& records, const std::vector<SubGroup>& groups,
                               const InsightConfig& config) {
    InsightReport report;
    const std::size_t n = records.size();
    report.total_cases = n;

    std::map<std::string, std::size_t> platforms, severity, topics, agencies, years;
    std::map<int, std::map<std::string, std::size_t>> trends;
    std::map<int, std::size_t> per_year;
    std::map<std::pair<std::string, std::string>, std::size_t> co_topics, plat_sev;

    for (const auto& r : records) {
        const auto& f = r.features;
        tally(f.platforms, platforms);
        tally(f.severity_indicators, severity);
        tally(f.case_topics, topics);
        tally(f.agencies, agencies);
        ++years[std::to_string(r.year)];
        ++per_year[r.year];
        tally(f.platforms, trends[r.year]);

        for (auto a = f.case_topics.begin(); a != f.case_topics.end(); ++a) {
            for (auto b = std::next(a); b != f.case_topics.end(); ++b) ++co_topics[{*a, *b}];
        }
        for (const auto& p : f.platforms) {
            for (const auto& s : f.severity_indicators) ++plat_sev[{p, s}];
        }

        if (f.registered_sex_offender) ++report.patterns.rso_count;
        if (f.case_topics.count("stranger")) ++report.patterns.stranger_count;
        if (f.case_topics.count("family")) ++report.patterns.family_count;
    }

    report.platform_stats = to_sorted(platforms, n);
    report.severity_distribution = to_sorted(severity, n);
    report.topic_stats = to_sorted(topics, n);
    report.agency_stats = to_sorted(agencies, n);
    report.year_counts = to_sorted(years, n);
    std::sort(report.year_counts.begin(), report.year_counts.end(),
              [](const TagCount& a, const TagCount& b) { return a.tag < b.tag; });
    for (const auto& [year, counts] : trends) report.platform_trends[year] = to_sorted(counts, per_year[year]);
    report.topic_cooccurrence = to_sorted(co_topics);
    report.platform_severity = to_sorted(plat_sev);
    report.patterns.rso_percent = percent_of(report.patterns.rso_count, n);

    std::size_t best = 0;
    for (const auto& topic : case_type_topics()) {
        const auto it = topics.find(topic);
        if (it != topics.end() && it->second > best) {
            best = it->second;
            report.patterns.dominant_case_type = topic;
        }
    }

    if (n > 0) {
        std::vector<std::string> texts;
        texts.reserve(n);
        std::map<std::string, const CaseRecord*> by_id;
        for (const auto& r : records) {
            texts.push_back(r.raw_text);
            by_id[r.case_id] = &r;
        }
        report.keywords_global = extract_keywords(texts, std::max<std::size_t>(1, config.top_k_global), config);

        for (const auto& g : groups) {
            std::vector<std::string> group_texts;
            for (const auto& id : g.member_case_ids) {
                const auto it = by_id.find(id);
                if (it != by_id.end()) group_texts.push_back(it->second->raw_text);
            }
            report.keywords_per_group[g.group_id] =
                extract_keywords(group_texts, std::max<std::size_t>(1, config.top_k_group), config);
        }
    }
    return report;
}

std::string_view to_string(TagCategory category) {
    switch (category) {
        case TagCategory::case_topics: return "case_topics";
        case TagCategory::severity_indicators: return "severity_indicators";
        case TagCategory::platforms: return "platforms";
        case TagCategory::investigation_types: return "investigation_types";
        case TagCategory::relationships: return "relationships";
        case TagCategory::rso: return "rso";
    }
    return "unknown";
}

std::optional<TagCategory> parse_tag_category(std::string_view text) {
    for (const auto c : {TagCategory::case_topics, TagCategory::severity_indicators, TagCategory::platforms,
                         TagCategory::investigation_types, TagCategory::relationships, TagCategory::rso}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

std::map<TagCategory, std::set<std::string>> tag_vocabulary(const ExtractionConfig& config) {
    std::map<TagCategory, std::set<std::string>> v;
    v[TagCategory::case_topics] = vocab::case_topics();
    v[TagCategory::severity_indicators] = vocab::severity_indicators();
    v[TagCategory::platforms] = vocab::platforms();
    v[TagCategory::investigation_types] = vocab::investigation_types();
    auto& rel = v[TagCategory::relationships];
    rel.insert(std::string(kDefaultRelationship));
    const auto topics = config.semantic.find("case_topics");
    if (topics != config.semantic.end()) {
        const auto family = topics->second.find(config.relationship_topic);
        if (family != topics->second.end()) {
            for (const auto& rule : family->second) {
                const bool literal = rule.pattern.find_first_of("[]\\") == std::string::npos;
                if (literal) rel.insert(to_lower_ascii(rule.pattern));
            }
        }
    }
    v[TagCategory::rso] = {"false", "true"};
    return v;
}

bool has_tag(const CaseRecord& record, const TagRef& tag) {
    const auto& f = record.features;
    switch (tag.category) {
        case TagCategory::case_topics: return f.case_topics.count(tag.tag) > 0;
        case TagCategory::severity_indicators: return f.severity_indicators.count(tag.tag) > 0;
        case TagCategory::platforms: return f.platforms.count(tag.tag) > 0;
        case TagCategory::investigation_types: return f.investigation_type.count(tag.tag) > 0;
        case TagCategory::relationships: return f.relationship_to_victim == tag.tag;
        case TagCategory::rso: return (f.registered_sex_offender ? "true" : "false") == tag.tag;
    }
    return false;
}

namespace {

bool is_default_tag(const TagRef& tag) {
    return (tag.category == TagCategory::relationships && tag.tag == kDefaultRelationship) ||
           (tag.category == TagCategory::rso && tag.tag == "false");
}

std::string span_path(const TagRef& tag) {
    switch (tag.category) {
        case TagCategory::case_topics: return "case_topics." + tag.tag;
        case TagCategory::severity_indicators: return "severity_indicators." + tag.tag;
        case TagCategory::platforms: return "platforms." + tag.tag;
        case TagCategory::investigation_types: return "investigation_type." + tag.tag;
        case TagCategory::relationships: return "relationship_to_victim";
        case TagCategory::rso: return "registered_sex_offender";
    }
    return {};
}

}  // namespace

std::vector<FilterMatch> filter_by_tags(const std::vector<CaseRecord>& records, const TagQuery& query,
                                        const std::map<TagCategory, std::set<std::string>>& vocabulary) {
    if (query.selected_tags.empty()) throw InvalidQuery("tag query selects no tags");
    for (const auto& t : query.selected_tags) {
        const auto it = vocabulary.find(t.category);
        if (it == vocabulary.end() || !it->second.count(t.tag)) {
            throw UnknownTag("unknown tag '" + t.tag + "' in category " + std::string(to_string(t.category)));
        }
    }

    std::vector<FilterMatch> out;
    for (const auto& record : records) {
        const bool all = std::all_of(query.selected_tags.begin(), query.selected_tags.end(),
                                     [&](const TagRef& t) { return has_tag(record, t); });
        if (!all) continue;
        FilterMatch m;
        m.record = &record;
        for (const auto& t : query.selected_tags) {
            if (is_default_tag(t)) {
                m.default_justified.push_back(t);
                continue;
            }
            const std::string path = span_path(t);
            for (const auto& s : record.spans) {
                if (s.feature_path == path) m.spans.push_back(s);
            }
        }
        std::sort(m.spans.begin(), m.spans.end(), [](const HighlightSpan& a, const HighlightSpan& b) {
            if (a.start != b.start) return a.start < b.start;
            return a.feature_path < b.feature_path;
        });
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace casework
