#pragma once

#include "casework/case_record.hpp"
#include "casework/cluster.hpp"
#include "casework/insights.hpp"
#include "casework/triage.hpp"

#include <string>
#include <string_view>

#include <json.hpp>

namespace casework {

using Json = nlohmann::json;

// nlohmann ADL hooks. Sets are written as sorted arrays and optionals as
// null, so equal values always produce identical bytes.
void to_json(Json& j, const StorageVolume& v);
void from_json(const Json& j, StorageVolume& v);
void to_json(Json& j, const FeatureSet& f);
void from_json(const Json& j, FeatureSet& f);
void to_json(Json& j, const HighlightSpan& s);
void from_json(const Json& j, HighlightSpan& s);
void to_json(Json& j, const CaseRecord& r);
void from_json(const Json& j, CaseRecord& r);
void to_json(Json& j, const ValidationIssue& issue);

void to_json(Json& j, const SimilarityWeights& w);
void to_json(Json& j, const SubGroup& g);
void to_json(Json& j, const ClusterSummary& c);
void to_json(Json& j, const ClusterReport& r);

void to_json(Json& j, const TriageWeights& w);
void to_json(Json& j, const FactorScores& s);
void to_json(Json& j, const PriorityResult& r);
void to_json(Json& j, const TriageSummary& s);

void to_json(Json& j, const TagCount& t);
void to_json(Json& j, const PairCount& p);
void to_json(Json& j, const KeywordCount& k);
void to_json(Json& j, const PatternSummary& p);
void to_json(Json& j, const InsightReport& r);
void to_json(Json& j, const TagRef& t);

/// Canonical compact text of a FeatureSet, as stored in the database.
std::string serialize_features(const FeatureSet& features);
/// Inverse of serialize_features. Throws Json exceptions on malformed input.
FeatureSet parse_features(std::string_view text);

std::string serialize_spans(const std::vector<HighlightSpan>& spans);
std::vector<HighlightSpan> parse_spans(std::string_view text);

/// Case list entry: identity plus headline features, without raw text.
Json case_summary_json(const CaseRecord& record);

/// {"tags": [{"category": ..., "tag": ...}, ...]}. Throws InvalidQuery on a
/// malformed body and UnknownTag on an unknown category.
TagQuery parse_tag_query(const Json& body);

Json filter_match_json(const FilterMatch& match);

}  // namespace casework
