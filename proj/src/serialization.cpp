#include "casework/serialization.hpp"

#include "casework/errors.hpp"

namespace casework {

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
void read_opt(const Json& j, const char* key, std::optional<T>& out) {
    const auto& v = j.at(key);
    if (v.is_null()) {
        out.reset();
    } else {
        out = v.get<T>();
    }
}

}  // namespace

void to_json(Json& j, const StorageVolume& v) {
    j = Json{{"magnitude", v.magnitude}, {"unit", std::string(to_string(v.unit))}};
}

void from_json(const Json& j, StorageVolume& v) {
    v.magnitude = j.at("magnitude").get<double>();
    const auto unit = parse_storage_unit(j.at("unit").get<std::string>());
    if (!unit) throw std::invalid_argument("unknown storage unit");
    v.unit = *unit;
}

void to_json(Json& j, const FeatureSet& f) {
    j = Json::object();
    j["perpetrator_age"] = opt(f.perpetrator_age);
    j["registered_sex_offender"] = f.registered_sex_offender;
    j["relationship_to_victim"] = f.relationship_to_victim;
    j["victim_count"] = opt(f.victim_count);
    j["victim_ages"] = f.victim_ages;
    j["victim_gender"] = opt(f.victim_gender);
    j["platforms"] = f.platforms;
    j["investigation_type"] = f.investigation_type;
    j["agencies"] = f.agencies;
    j["prosecution"] = f.prosecution;
    j["charges"] = f.charges;
    j["jail_info"] = opt(f.jail_info);
    j["evidence_images"] = opt(f.evidence_images);
    j["evidence_videos"] = opt(f.evidence_videos);
    j["evidence_storage"] = f.evidence_storage ? Json(*f.evidence_storage) : Json(nullptr);
    j["evidence_messages"] = opt(f.evidence_messages);
    j["severity_indicators"] = f.severity_indicators;
    j["case_topics"] = f.case_topics;
    j["severity_phrases"] = f.severity_phrases;
}

void from_json(const Json& j, FeatureSet& f) {
    read_opt(j, "perpetrator_age", f.perpetrator_age);
    f.registered_sex_offender = j.at("registered_sex_offender").get<bool>();
    f.relationship_to_victim = j.at("relationship_to_victim").get<std::string>();
    read_opt(j, "victim_count", f.victim_count);
    f.victim_ages = j.at("victim_ages").get<std::set<int>>();
    read_opt(j, "victim_gender", f.victim_gender);
    f.platforms = j.at("platforms").get<std::set<std::string>>();
    f.investigation_type = j.at("investigation_type").get<std::set<std::string>>();
    f.agencies = j.at("agencies").get<std::set<std::string>>();
    f.prosecution = j.at("prosecution").get<std::set<std::string>>();
    f.charges = j.at("charges").get<std::vector<std::string>>();
    read_opt(j, "jail_info", f.jail_info);
    read_opt(j, "evidence_images", f.evidence_images);
    read_opt(j, "evidence_videos", f.evidence_videos);
    read_opt(j, "evidence_storage", f.evidence_storage);
    read_opt(j, "evidence_messages", f.evidence_messages);
    f.severity_indicators = j.at("severity_indicators").get<std::set<std::string>>();
    f.case_topics = j.at("case_topics").get<std::set<std::string>>();
    f.severity_phrases = j.at("severity_phrases").get<std::set<std::string>>();
}

void to_json(Json& j, const HighlightSpan& s) {
    j = Json{{"case_id", s.case_id},   {"feature_path", s.feature_path}, {"start", s.start},
             {"end", s.end},           {"matched_text", s.matched_text}, {"rule_id", s.rule_id}};
}

void from_json(const Json& j, HighlightSpan& s) {
    s.case_id = j.at("case_id").get<std::string>();
    s.feature_path = j.at("feature_path").get<std::string>();
    s.start = j.at("start").get<std::size_t>();
    s.end = j.at("end").get<std::size_t>();
    s.matched_text = j.at("matched_text").get<std::string>();
    s.rule_id = j.at("rule_id").get<std::string>();
}

void to_json(Json& j, const CaseRecord& r) {
    j = Json{{"case_id", r.case_id},       {"source_org", r.source_org}, {"year", r.year},
             {"month", r.month},           {"raw_text", r.raw_text},     {"features", r.features},
             {"spans", r.spans},           {"created_at", r.created_at}};
}

void from_json(const Json& j, CaseRecord& r) {
    r.case_id = j.at("case_id").get<std::string>();
    r.source_org = j.at("source_org").get<std::string>();
    r.year = j.at("year").get<int>();
    r.month = j.at("month").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.features = j.at("features").get<FeatureSet>();
    r.spans = j.at("spans").get<std::vector<HighlightSpan>>();
    r.created_at = j.at("created_at").get<std::string>();
}

void to_json(Json& j, const ValidationIssue& issue) {
    j = Json{{"severity", std::string(to_string(issue.severity))}, {"field", issue.field}, {"message", issue.message}};
}

void to_json(Json& j, const SimilarityWeights& w) {
    j = Json::object();
    for (const auto d : kDimensions) j[std::string(to_string(d))] = w[d];
}

void to_json(Json& j, const SubGroup& g) {
    j = Json{{"group_id", g.group_id},
             {"cluster_name", g.cluster_name},
             {"member_case_ids", g.member_case_ids},
             {"size", g.member_case_ids.size()},
             {"mean_pairwise_similarity", g.mean_pairwise_similarity},
             {"shared_characteristics", g.shared_characteristics},
             {"description", g.description}};
}

void to_json(Json& j, const ClusterSummary& c) {
    j = Json{{"name", c.name},
             {"count", c.count()},
             {"coverage_percent", c.coverage_percent},
             {"avg_similarity", c.avg_similarity ? Json(*c.avg_similarity) : Json(nullptr)},
             {"member_case_ids", c.member_case_ids},
             {"groups", c.groups},
             {"ungrouped", c.ungrouped}};
}

void to_json(Json& j, const ClusterReport& r) {
    j = Json{{"total_cases", r.total_cases},
             {"threshold", r.threshold},
             {"weights", r.weights},
             {"clusters", r.clusters},
             {"elapsed_ms", r.elapsed_ms}};
}

void to_json(Json& j, const TriageWeights& w) {
    j = Json::object();
    for (const auto f : kTriageFactors) j[std::string(to_string(f))] = w[f];
}

void to_json(Json& j, const FactorScores& s) {
    j = Json::object();
    for (const auto f : kTriageFactors) j[std::string(to_string(f))] = s[f];
}

void to_json(Json& j, const PriorityResult& r) {
    Json explanation = Json::array();
    for (const auto& e : r.explanation) {
        explanation.push_back(Json{{"factor", std::string(to_string(e.factor))},
                                   {"weight", e.weight},
                                   {"value", e.value},
                                   {"contribution", e.weight * e.value},
                                   {"evidence", e.evidence}});
    }
    j = Json{{"case_id", r.case_id},
             {"rank", r.rank},
             {"raw_score", r.raw_score},
             {"normalized_score", r.normalized_score},
             {"band", std::string(to_string(r.band))},
             {"factor_scores", r.factor_scores},
             {"explanation", std::move(explanation)}};
}

void to_json(Json& j, const TriageSummary& s) {
    j = Json{{"count", s.count},   {"min", s.min},       {"max", s.max}, {"mean", s.mean},
             {"stddev", s.stddev}, {"bands", Json{{"High", s.high}, {"Medium", s.medium}, {"Low", s.low}}}};
}

void to_json(Json& j, const TagCount& t) { j = Json{{"tag", t.tag}, {"count", t.count}, {"percent", t.percent}}; }

void to_json(Json& j, const PairCount& p) {
    j = Json{{"first", p.first}, {"second", p.second}, {"count", p.count}};
}

void to_json(Json& j, const KeywordCount& k) { j = Json{{"token", k.token}, {"frequency", k.frequency}}; }

void to_json(Json& j, const PatternSummary& p) {
    j = Json{{"rso_count", p.rso_count},
             {"rso_percent", p.rso_percent},
             {"stranger_count", p.stranger_count},
             {"family_count", p.family_count},
             {"dominant_case_type", opt(p.dominant_case_type)}};
}

void to_json(Json& j, const InsightReport& r) {
    Json trends = Json::object();
    for (const auto& [year, counts] : r.platform_trends) trends[std::to_string(year)] = counts;
    j = Json{{"total_cases", r.total_cases},
             {"platform_stats", r.platform_stats},
             {"severity_distribution", r.severity_distribution},
             {"topic_stats", r.topic_stats},
             {"agency_stats", r.agency_stats},
             {"year_counts", r.year_counts},
             {"platform_trends", std::move(trends)},
             {"topic_cooccurrence", r.topic_cooccurrence},
             {"platform_severity", r.platform_severity},
             {"patterns", r.patterns},
             {"keywords_global", r.keywords_global},
             {"keywords_per_group", r.keywords_per_group}};
}

void to_json(Json& j, const TagRef& t) {
    j = Json{{"category", std::string(to_string(t.category))}, {"tag", t.tag}};
}

std::string serialize_features(const FeatureSet& features) { return Json(features).dump(); }

FeatureSet parse_features(std::string_view text) { return Json::parse(text).get<FeatureSet>(); }

std::string serialize_spans(const std::vector<HighlightSpan>& spans) { return Json(spans).dump(); }

std::vector<HighlightSpan> parse_spans(std::string_view text) {
    return Json::parse(text).get<std::vector<HighlightSpan>>();
}

Json case_summary_json(const CaseRecord& r) {
    const auto& f = r.features;
    return Json{{"case_id", r.case_id},
                {"source_org", r.source_org},
                {"year", r.year},
                {"month", r.month},
                {"perpetrator_age", opt(f.perpetrator_age)},
                {"victim_count", opt(f.victim_count)},
                {"registered_sex_offender", f.registered_sex_offender},
                {"relationship_to_victim", f.relationship_to_victim},
                {"platforms", f.platforms},
                {"investigation_type", f.investigation_type},
                {"agencies", f.agencies},
                {"prosecution", f.prosecution},
                {"severity_indicators", f.severity_indicators},
                {"case_topics", f.case_topics}};
}

TagQuery parse_tag_query(const Json& body) {
    if (!body.is_object() || !body.contains("tags") || !body.at("tags").is_array()) {
        throw InvalidQuery("body must be an object with a 'tags' array");
    }
    TagQuery q;
    for (const auto& item : body.at("tags")) {
        if (!item.is_object() || !item.contains("category") || !item.contains("tag") ||
            !item.at("category").is_string() || !item.at("tag").is_string()) {
            throw InvalidQuery("each tag must be {\"category\": string, \"tag\": string}");
        }
        const auto name = item.at("category").get<std::string>();
        const auto category = parse_tag_category(name);
        if (!category) throw UnknownTag("unknown tag category '" + name + "'");
        q.selected_tags.insert(TagRef{*category, item.at("tag").get<std::string>()});
    }
    if (q.selected_tags.empty()) throw InvalidQuery("tag query selects no tags");
    return q;
}

Json filter_match_json(const FilterMatch& m) {
    Json defaults = Json::array();
    for (const auto& t : m.default_justified) {
        Json d = t;
        d["justification"] = "default, no span";
        defaults.push_back(std::move(d));
    }
    Json out = case_summary_json(*m.record);
    out["spans"] = m.spans;
    out["default_justified"] = std::move(defaults);
    return out;
}

}  // namespace casework
