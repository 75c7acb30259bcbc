#include "casework/config.hpp"

#include "casework/errors.hpp"
#include "casework/text_util.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace casework {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config " + where + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(where, "missing key '" + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        fail(where, e.what());
    }
}

double non_negative(const json& j, const std::string& where) {
    const auto v = get_as<double>(j, where);
    if (!(v >= 0.0)) fail(where, "must be >= 0");
    return v;
}

class RuleIds {
public:
    void add(const std::string& id, const std::string& where) {
        if (id.empty()) fail(where, "empty rule id");
        if (!seen_.insert(id).second) fail(where, "duplicate rule id '" + id + "'");
    }

private:
    std::set<std::string> seen_;
};

std::vector<PatternRule> rules_of(const json& j, const std::string& where, RuleIds& ids) {
    if (!j.is_array()) fail(where, "expected a list of {id, pattern}");
    std::vector<PatternRule> out;
    for (const auto& item : j) {
        PatternRule r{get_as<std::string>(require(item, "id", where), where),
                      get_as<std::string>(require(item, "pattern", where), where)};
        if (r.pattern.empty()) fail(where, "empty pattern for rule '" + r.id + "'");
        try {
            std::regex(r.pattern, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            fail(where, "rule '" + r.id + "' has an invalid pattern: " + e.what());
        }
        ids.add(r.id, where);
        out.push_back(std::move(r));
    }
    return out;
}

TagTable tag_table_of(const json& j, const std::string& where, const std::set<std::string>* vocabulary,
                      RuleIds& ids) {
    if (!j.is_object()) fail(where, "expected an object of value -> rules");
    TagTable out;
    for (const auto& [value, rules] : j.items()) {
        if (vocabulary && !vocabulary->count(value)) fail(where, "'" + value + "' is not in the vocabulary");
        out[value] = rules_of(rules, where + "." + value, ids);
    }
    return out;
}

/// Keyword tables accept bare strings (ids are derived) or {id, pattern}.
TagTable keyword_table_of(const json& j, const std::string& category, const std::string& where,
                          const std::set<std::string>& vocabulary, RuleIds& ids) {
    if (!j.is_object()) fail(where, "expected an object of feature -> keywords");
    TagTable out;
    for (const auto& [feature, keywords] : j.items()) {
        const std::string here = where + "." + feature;
        if (!vocabulary.count(feature)) fail(where, "'" + feature + "' is not in the vocabulary");
        if (!keywords.is_array()) fail(here, "expected a list of keywords");
        auto& rules = out[feature];
        for (const auto& k : keywords) {
            PatternRule r;
            if (k.is_string()) {
                r.pattern = k.get<std::string>();
                r.id = keyword_rule_id(category, feature, r.pattern);
            } else {
                r.id = get_as<std::string>(require(k, "id", here), here);
                r.pattern = get_as<std::string>(require(k, "pattern", here), here);
            }
            if (r.pattern.empty()) fail(here, "empty keyword");
            ids.add(r.id, here);
            rules.push_back(std::move(r));
        }
    }
    return out;
}

ExtractionConfig extraction_of(const json& j) {
    const std::string w = "extraction";
    RuleIds ids;
    ExtractionConfig e;
    const auto list = [&](const char* key) { return rules_of(require(j, key, w), w + "." + key, ids); };
    e.perpetrator_age = list("perpetrator_age");
    e.victim_count = list("victim_count");
    e.victim_ages = list("victim_ages");
    e.evidence_images = list("evidence_images");
    e.evidence_videos = list("evidence_videos");
    e.evidence_messages = list("evidence_messages");
    e.evidence_storage = list("evidence_storage");
    e.charges = list("charges");
    e.jail_info = list("jail_info");
    e.registered_sex_offender = list("registered_sex_offender");

    static const std::set<std::string> genders{"female", "male"};
    e.platforms = tag_table_of(require(j, "platforms", w), w + ".platforms", &vocab::platforms(), ids);
    e.prosecution = tag_table_of(require(j, "prosecution", w), w + ".prosecution", &vocab::prosecution(), ids);
    e.investigation_type = tag_table_of(require(j, "investigation_type", w), w + ".investigation_type",
                                        &vocab::investigation_types(), ids);
    e.agencies = tag_table_of(require(j, "agencies", w), w + ".agencies", nullptr, ids);
    e.victim_gender = tag_table_of(require(j, "victim_gender", w), w + ".victim_gender", &genders, ids);

    const auto& semantic = require(j, "semantic", w);
    if (!semantic.is_object()) fail(w + ".semantic", "expected an object");
    for (const auto& [category, table] : semantic.items()) {
        const std::set<std::string>* vocabulary = nullptr;
        if (category == "severity_indicators") vocabulary = &vocab::severity_indicators();
        if (category == "case_topics") vocabulary = &vocab::case_topics();
        if (!vocabulary) fail(w + ".semantic", "unknown category '" + category + "'");
        e.semantic[category] = keyword_table_of(table, category, w + ".semantic." + category, *vocabulary, ids);
    }
    if (j.contains("relationship_topic")) {
        e.relationship_topic = get_as<std::string>(j.at("relationship_topic"), w + ".relationship_topic");
    }
    if (!vocab::case_topics().count(e.relationship_topic)) {
        fail(w + ".relationship_topic", "'" + e.relationship_topic + "' is not a case topic");
    }
    e.severity_phrases = keyword_table_of(require(j, "severity_phrases", w), "severity_phrases",
                                          w + ".severity_phrases", vocab::severity_phrases(), ids);
    return e;
}

std::set<std::string> string_set(const json& j, const std::string& where) {
    return get_as<std::set<std::string>>(j, where);
}

ClusterConfig clustering_of(const json& j) {
    const std::string w = "clustering";
    ClusterConfig c;
    const auto& wj = require(j, "weights", w);
    c.weights.platforms = non_negative(require(wj, "platforms", w), w + ".weights.platforms");
    c.weights.demographics = non_negative(require(wj, "demographics", w), w + ".weights.demographics");
    c.weights.topics = non_negative(require(wj, "topics", w), w + ".weights.topics");
    c.weights.investigation = non_negative(require(wj, "investigation", w), w + ".weights.investigation");
    c.weights.severity = non_negative(require(wj, "severity", w), w + ".weights.severity");
    c.weights.relationship = non_negative(require(wj, "relationship", w), w + ".weights.relationship");
    c.threshold = get_as<double>(require(j, "threshold", w), w + ".threshold");
    if (!(c.threshold > 0.0 && c.threshold <= c.weights.sum())) {
        fail(w + ".threshold", "must lie in (0, sum of weights]");
    }
    c.severe_markers = string_set(require(j, "severe_markers", w), w + ".severe_markers");
    for (const auto& m : c.severe_markers) {
        if (!vocab::severity_indicators().count(m)) fail(w + ".severe_markers", "'" + m + "' is not a severity indicator");
    }
    return c;
}

std::map<std::string, double> score_table(const json& j, const std::string& where,
                                          const std::set<std::string>& vocabulary) {
    if (!j.is_object()) fail(where, "expected an object");
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.items()) {
        if (!vocabulary.count(k)) fail(where, "'" + k + "' is not in the vocabulary");
        const double s = get_as<double>(v, where + "." + k);
        if (!(s >= 0.0 && s <= 1.0)) fail(where + "." + k, "score must lie in [0, 1]");
        out[k] = s;
    }
    return out;
}

TriageConfig triage_of(const json& j) {
    const std::string w = "triage";
    TriageConfig t;
    const auto& wj = require(j, "weights", w);
    const auto weight = [&](const char* key) { return non_negative(require(wj, key, w), w + ".weights." + key); };
    t.weights.severity_indicators = weight("severity_indicators");
    t.weights.victim_count = weight("victim_count");
    t.weights.case_type = weight("case_type");
    t.weights.severity_phrases = weight("severity_phrases");
    t.weights.evidence_volume = weight("evidence_volume");
    t.weights.registered_offender = weight("registered_offender");
    t.severity_scores = score_table(require(j, "severity_scores", w), w + ".severity_scores", vocab::severity_indicators());
    t.case_type_scores = score_table(require(j, "case_type_scores", w), w + ".case_type_scores", vocab::case_topics());
    t.victim_count_cap = get_as<int>(require(j, "victim_count_cap", w), w + ".victim_count_cap");
    if (t.victim_count_cap < 1) fail(w + ".victim_count_cap", "must be >= 1");
    t.severity_phrase_count = get_as<double>(require(j, "severity_phrase_count", w), w + ".severity_phrase_count");
    if (!(t.severity_phrase_count > 0)) fail(w + ".severity_phrase_count", "must be > 0");

    const auto& ev = require(j, "evidence", w);
    t.large_image_count = get_as<std::int64_t>(require(ev, "large_image_count", w), w + ".evidence.large_image_count");
    t.large_storage_units.clear();
    for (const auto& u : string_set(require(ev, "large_storage_units", w), w + ".evidence.large_storage_units")) {
        const auto unit = parse_storage_unit(u);
        if (!unit) fail(w + ".evidence.large_storage_units", "unknown unit '" + u + "'");
        t.large_storage_units.insert(*unit);
    }
    t.large_evidence_score = get_as<double>(require(ev, "large_score", w), w + ".evidence.large_score");
    t.any_evidence_score = get_as<double>(require(ev, "any_score", w), w + ".evidence.any_score");

    const auto& bands = require(j, "bands", w);
    t.high_band = get_as<double>(require(bands, "high", w), w + ".bands.high");
    t.medium_band = get_as<double>(require(bands, "medium", w), w + ".bands.medium");
    if (!(5.0 <= t.medium_band && t.medium_band <= t.high_band && t.high_band <= 10.0)) {
        fail(w + ".bands", "expected 5 <= medium <= high <= 10");
    }
    return t;
}

InsightConfig insights_of(const json& j) {
    const std::string w = "insights";
    InsightConfig c;
    c.keyword_min_length = get_as<std::size_t>(require(j, "keyword_min_length", w), w + ".keyword_min_length");
    c.top_k_global = get_as<std::size_t>(require(j, "top_k_global", w), w + ".top_k_global");
    c.top_k_group = get_as<std::size_t>(require(j, "top_k_group", w), w + ".top_k_group");
    if (c.top_k_global == 0) fail(w, "top_k_global must be >= 1");
    if (c.top_k_group == 0) fail(w, "top_k_group must be >= 1");
    c.stopwords = string_set(require(j, "stopwords", w), w + ".stopwords");
    return c;
}

Config from_json(const json& j) {
    Config c;
    c.version = get_as<int>(require(j, "version", "root"), "version");
    if (c.version != kConfigVersion) {
        fail("version", "unsupported version " + std::to_string(c.version));
    }
    const auto& orgs = require(j, "org_patterns", "root");
    if (!orgs.is_array() || orgs.empty()) fail("org_patterns", "expected a non-empty list");
    for (const auto& o : orgs) {
        OrgPattern p{get_as<std::string>(require(o, "pattern", "org_patterns"), "org_patterns"),
                     get_as<std::string>(require(o, "name", "org_patterns"), "org_patterns")};
        if (p.pattern.empty() || p.name.empty()) fail("org_patterns", "pattern and name must be non-empty");
        c.org_patterns.push_back(std::move(p));
    }
    c.extraction = extraction_of(require(j, "extraction", "root"));
    c.clustering = clustering_of(require(j, "clustering", "root"));
    c.triage = triage_of(require(j, "triage", "root"));
    c.insights = insights_of(require(j, "insights", "root"));
    return c;
}

json parse_json(std::string_view text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

}  // namespace

std::string keyword_rule_id(std::string_view category, std::string_view feature, std::string_view keyword) {
    std::string slug;
    bool pending_sep = false;
    for (const char c : keyword) {
        const char lc = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        if (is_ascii_alpha(lc) || is_ascii_digit(lc)) {
            if (pending_sep && !slug.empty()) slug.push_back('_');
            pending_sep = false;
            slug.push_back(lc);
        } else {
            pending_sep = true;
        }
    }
    if (slug.empty()) slug = "keyword";
    std::string id;
    id.append(category).append(".").append(feature).append(".").append(slug);
    return id;
}

Config parse_config(std::string_view json_text) { return from_json(parse_json(json_text, "config")); }

Config default_config() {
    static const Config cached = parse_config(default_config_json());
    return cached;
}

Config load_config(const std::optional<std::filesystem::path>& path) {
    std::optional<std::filesystem::path> chosen = path;
    if (!chosen) {
        if (const char* env = std::getenv(kConfigEnvVar); env && *env) chosen = std::filesystem::path(env);
    }
    if (!chosen) return default_config();

    std::ifstream in(*chosen, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + chosen->string());
    std::ostringstream buf;
    buf << in.rdbuf();

    json merged = parse_json(default_config_json(), "built-in config");
    merged.merge_patch(parse_json(buf.str(), chosen->string()));
    return from_json(merged);
}

}  // namespace casework
