#include "casework/config.hpp"
#include "casework/errors.hpp"
#include "casework/insights.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace casework;
namespace ct = casework::testing;

namespace {

std::vector<CaseRecord> random_records(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::vector<CaseRecord> out;
    for (int i = 0; i < n; ++i) out.push_back(ct::random_record(rng, i));
    return out;
}

std::map<std::string, std::size_t> as_map(const std::vector<TagCount>& v) {
    std::map<std::string, std::size_t> m;
    for (const auto& t : v) m[t.tag] = t.count;
    return m;
}

void expect_sorted_by_count(const std::vector<TagCount>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        EXPECT_TRUE(v[i - 1].count > v[i].count || (v[i - 1].count == v[i].count && v[i - 1].tag < v[i].tag));
    }
}

const std::map<TagCategory, std::set<std::string>>& vocabulary() {
    static const auto v = tag_vocabulary(default_config().extraction);
    return v;
}

std::string span_path(const TagRef& t) {
    switch (t.category) {
        case TagCategory::case_topics: return "case_topics." + t.tag;
        case TagCategory::severity_indicators: return "severity_indicators." + t.tag;
        case TagCategory::platforms: return "platforms." + t.tag;
        case TagCategory::investigation_types: return "investigation_type." + t.tag;
        case TagCategory::relationships: return "relationship_to_victim";
        case TagCategory::rso: return "registered_sex_offender";
    }
    return "";
}

TagQuery query(std::initializer_list<TagRef> tags) { return TagQuery{std::set<TagRef>(tags)}; }

std::set<std::string> matched_ids(const std::vector<FilterMatch>& matches) {
    std::set<std::string> ids;
    for (const auto& m : matches) ids.insert(m.record->case_id);
    return ids;
}

}  // namespace

TEST(PercentOf, RoundsToOneDecimal) {
    EXPECT_DOUBLE_EQ(percent_of(1, 3), 33.3);
    EXPECT_DOUBLE_EQ(percent_of(2, 3), 66.7);
    EXPECT_DOUBLE_EQ(percent_of(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(percent_of(5, 5), 100.0);
}

TEST(ComputeInsights, CountsMatchBruteForce) {
    const auto records = random_records(12, 150);
    const auto report = compute_insights(records, {}, default_config().insights);
    EXPECT_EQ(report.total_cases, records.size());
    EXPECT_EQ(as_map(report.platform_stats), ct::oracle_tag_counts(records, &FeatureSet::platforms));
    EXPECT_EQ(as_map(report.severity_distribution), ct::oracle_tag_counts(records, &FeatureSet::severity_indicators));
    EXPECT_EQ(as_map(report.topic_stats), ct::oracle_tag_counts(records, &FeatureSet::case_topics));
    EXPECT_EQ(as_map(report.agency_stats), ct::oracle_tag_counts(records, &FeatureSet::agencies));
    for (const auto* v : {&report.platform_stats, &report.severity_distribution, &report.topic_stats}) {
        expect_sorted_by_count(*v);
        for (const auto& t : *v) EXPECT_DOUBLE_EQ(t.percent, percent_of(t.count, records.size()));
    }

    std::size_t year_total = 0;
    for (const auto& y : report.year_counts) year_total += y.count;
    EXPECT_EQ(year_total, records.size());
    EXPECT_TRUE(std::is_sorted(report.year_counts.begin(), report.year_counts.end(),
                               [](const auto& a, const auto& b) { return a.tag < b.tag; }));

    std::size_t rso = 0;
    for (const auto& r : records) rso += r.features.registered_sex_offender;
    EXPECT_EQ(report.patterns.rso_count, rso);
    EXPECT_DOUBLE_EQ(report.patterns.rso_percent, percent_of(rso, records.size()));
}

TEST(ComputeInsights, PlatformTrendsPerYear) {
    const auto records = random_records(13, 120);
    const auto report = compute_insights(records, {});
    for (const auto& [year, counts] : report.platform_trends) {
        std::vector<CaseRecord> of_year;
        for (const auto& r : records) {
            if (r.year == year) of_year.push_back(r);
        }
        EXPECT_EQ(as_map(counts), ct::oracle_tag_counts(of_year, &FeatureSet::platforms)) << year;
        for (const auto& t : counts) EXPECT_DOUBLE_EQ(t.percent, percent_of(t.count, of_year.size()));
    }
}

TEST(ComputeInsights, CooccurrenceCountsPairsOnce) {
    const auto records = random_records(14, 100);
    const auto report = compute_insights(records, {});
    for (const auto& p : report.topic_cooccurrence) {
        EXPECT_LT(p.first, p.second);
        std::size_t n = 0;
        for (const auto& r : records) n += r.features.case_topics.count(p.first) && r.features.case_topics.count(p.second);
        EXPECT_EQ(p.count, n);
    }
    for (const auto& p : report.platform_severity) {
        std::size_t n = 0;
        for (const auto& r : records) {
            n += r.features.platforms.count(p.first) && r.features.severity_indicators.count(p.second);
        }
        EXPECT_EQ(p.count, n);
    }
}

TEST(ComputeInsights, DominantCaseType) {
    std::vector<CaseRecord> records(3);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].case_id = "c" + std::to_string(i);
    records[0].features.case_topics = {"possession"};
    records[1].features.case_topics = {"possession", "production"};
    records[2].features.case_topics = {"international"};
    EXPECT_EQ(compute_insights(records, {}).patterns.dominant_case_type, "possession");
    EXPECT_FALSE(compute_insights({}, {}).patterns.dominant_case_type.has_value());
}

TEST(ComputeInsights, EmptyCorpus) {
    const auto report = compute_insights({}, {});
    EXPECT_EQ(report.total_cases, 0u);
    EXPECT_TRUE(report.platform_stats.empty());
    EXPECT_TRUE(report.keywords_global.empty());
}

TEST(ComputeInsights, KeywordsPerGroup) {
    std::vector<CaseRecord> records(3);
    records[0] = {"a", "X", 2012, "May", "suspect suspect detective", {}, {}, ""};
    records[1] = {"b", "X", 2012, "May", "suspect warrant", {}, {}, ""};
    records[2] = {"c", "X", 2012, "May", "warrant warrant", {}, {}, ""};
    SubGroup g;
    g.group_id = "G1";
    g.member_case_ids = {"a", "b"};
    const auto report = compute_insights(records, {g});
    const auto& kw = report.keywords_per_group.at("G1");
    ASSERT_FALSE(kw.empty());
    EXPECT_EQ(kw[0], (KeywordCount{"suspect", 3}));
    EXPECT_EQ(report.keywords_global[0], (KeywordCount{"suspect", 3}));
    EXPECT_EQ(report.keywords_global[1], (KeywordCount{"warrant", 3}));
}

TEST(ExtractKeywords, MatchesTokenOracle) {
    std::mt19937_64 rng(15);
    const auto cfg = default_config().insights;
    std::vector<std::string> texts;
    for (int d = 0; d < 50; ++d) texts.push_back(ct::make_document(rng, 4, 2013).text);
    const auto counts = ct::oracle_token_counts(texts, cfg.keyword_min_length, cfg.stopwords);

    std::vector<KeywordCount> expected;
    for (const auto& [t, n] : counts) expected.push_back({t, n});
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
        return a.frequency != b.frequency ? a.frequency > b.frequency : a.token < b.token;
    });
    expected.resize(std::min<std::size_t>(expected.size(), 25));
    EXPECT_EQ(extract_keywords(texts, 25, cfg), expected);
}

TEST(ExtractKeywords, RulesAndErrors) {
    InsightConfig cfg;
    cfg.stopwords = {"with"};
    const auto kw = extract_keywords({"Chat, chat; CHAT with the cat. Agents-agents 2012abcd"}, 10, cfg);
    EXPECT_EQ(kw, (std::vector<KeywordCount>{{"chat", 3}, {"agents", 2}, {"abcd", 1}}));
    EXPECT_THROW(extract_keywords({"text"}, 0, cfg), std::invalid_argument);
    EXPECT_TRUE(extract_keywords({}, 5, cfg).empty());
}

TEST(TagVocabulary, Categories) {
    const auto& v = vocabulary();
    EXPECT_EQ(v.size(), 6u);
    EXPECT_EQ(v.at(TagCategory::relationships),
              (std::set<std::string>{"father", "family member", "mother", "stranger", "uncle"}));
    EXPECT_EQ(v.at(TagCategory::rso), (std::set<std::string>{"false", "true"}));
    EXPECT_EQ(v.at(TagCategory::platforms), vocab::platforms());
    EXPECT_EQ(parse_tag_category("investigation_types"), TagCategory::investigation_types);
    EXPECT_FALSE(parse_tag_category("bogus").has_value());
}

TEST(FilterByTags, IntersectionSemantics) {
    const auto records = random_records(16, 200);
    std::mt19937_64 rng(17);
    const auto& v = vocabulary();
    std::vector<TagRef> all_tags;
    for (const auto& [cat, tags] : v) {
        for (const auto& t : tags) all_tags.push_back({cat, t});
    }
    std::uniform_int_distribution<std::size_t> pick(0, all_tags.size() - 1);
    std::uniform_int_distribution<int> size(1, 3);
    for (int q = 0; q < 100; ++q) {
        TagQuery tq;
        const int k = size(rng);
        for (int i = 0; i < k; ++i) tq.selected_tags.insert(all_tags[pick(rng)]);

        std::set<std::string> expected;
        for (const auto& r : records) {
            bool all = true;
            for (const auto& t : tq.selected_tags) all = all && has_tag(r, t);
            if (all) expected.insert(r.case_id);
        }
        const auto matches = filter_by_tags(records, tq, v);
        EXPECT_EQ(matched_ids(matches), expected);

        // Each selected tag is justified by a span or is a default.
        for (const auto& m : matches) {
            for (const auto& t : tq.selected_tags) {
                const bool is_default = std::find(m.default_justified.begin(), m.default_justified.end(), t) !=
                                        m.default_justified.end();
                bool spanned = false;
                for (const auto& s : m.spans) {
                    EXPECT_EQ(m.record->raw_text.substr(s.start, s.end - s.start), s.matched_text);
                    spanned = spanned || s.feature_path == span_path(t);
                }
                EXPECT_TRUE(is_default || spanned) << to_string(t.category) << ":" << t.tag;
            }
        }
    }
}

TEST(FilterByTags, AddingTagNeverGrowsResult) {
    const auto records = random_records(18, 200);
    const auto one = matched_ids(filter_by_tags(records, query({{TagCategory::case_topics, "possession"}}), vocabulary()));
    const auto two = matched_ids(filter_by_tags(
        records, query({{TagCategory::case_topics, "possession"}, {TagCategory::platforms, "chat"}}), vocabulary()));
    EXPECT_TRUE(std::includes(one.begin(), one.end(), two.begin(), two.end()));
    EXPECT_LE(two.size(), one.size());
}

TEST(FilterByTags, HasTagExamples) {
    CaseRecord r;
    r.features.platforms = {"discord"};
    r.features.relationship_to_victim = "uncle";
    EXPECT_TRUE(has_tag(r, {TagCategory::platforms, "discord"}));
    EXPECT_FALSE(has_tag(r, {TagCategory::platforms, "chat"}));
    EXPECT_TRUE(has_tag(r, {TagCategory::relationships, "uncle"}));
    EXPECT_FALSE(has_tag(r, {TagCategory::relationships, "stranger"}));
    EXPECT_TRUE(has_tag(r, {TagCategory::rso, "false"}));
    EXPECT_FALSE(has_tag(r, {TagCategory::rso, "true"}));
}

TEST(FilterByTags, DefaultsAreMarked) {
    CaseRecord r;
    r.case_id = "d";
    r.raw_text = "nothing";
    const auto matches = filter_by_tags({r}, query({{TagCategory::relationships, "stranger"}, {TagCategory::rso, "false"}}),
                                        vocabulary());
    ASSERT_EQ(matches.size(), 1u);
    EXPECT_EQ(matches[0].default_justified.size(), 2u);
    EXPECT_TRUE(matches[0].spans.empty());
}

TEST(FilterByTags, Errors) {
    const auto records = random_records(19, 5);
    EXPECT_THROW(filter_by_tags(records, TagQuery{}, vocabulary()), InvalidQuery);
    EXPECT_THROW(filter_by_tags(records, query({{TagCategory::platforms, "myspace"}}), vocabulary()), UnknownTag);
}
