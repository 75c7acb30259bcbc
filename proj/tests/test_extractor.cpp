#include "casework/batcher.hpp"
#include "casework/config.hpp"
#include "casework/errors.hpp"
#include "casework/extractor.hpp"

#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace casework;

namespace {

const Extractor& extractor() {
    static const Extractor e(default_config().extraction);
    return e;
}

CaseSegment segment_of(const std::string& text, const std::string& id = "T_2012_march_001") {
    CaseSegment s;
    s.case_id = id;
    s.text = text;
    s.month = "March";
    s.year = "2012";
    s.batch_year = "2012";
    s.source_org = "AZICAC";
    return s;
}

// Whether the feature addressed by a span path is populated.
bool path_populated(const FeatureSet& f, const std::string& path) {
    const auto dot = path.find('.');
    const std::string head = path.substr(0, dot);
    const std::string tail = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (head == "perpetrator_age") return f.perpetrator_age.has_value();
    if (head == "victim_count") return f.victim_count.has_value();
    if (head == "victim_ages") return !f.victim_ages.empty();
    if (head == "victim_gender") return f.victim_gender.has_value();
    if (head == "evidence_images") return f.evidence_images.has_value();
    if (head == "evidence_videos") return f.evidence_videos.has_value();
    if (head == "evidence_messages") return f.evidence_messages.has_value();
    if (head == "evidence_storage") return f.evidence_storage.has_value();
    if (head == "charges") return !f.charges.empty();
    if (head == "jail_info") return f.jail_info.has_value();
    if (head == "registered_sex_offender") return f.registered_sex_offender;
    if (head == "relationship_to_victim") return f.relationship_to_victim != kDefaultRelationship;
    if (head == "platforms") return f.platforms.count(tail) > 0;
    if (head == "prosecution") return f.prosecution.count(tail) > 0;
    if (head == "investigation_type") return f.investigation_type.count(tail) > 0;
    if (head == "agencies") return f.agencies.count(tail) > 0;
    if (head == "severity_indicators") return f.severity_indicators.count(tail) > 0;
    if (head == "case_topics") return f.case_topics.count(tail) > 0;
    if (head == "severity_phrases") return f.severity_phrases.count(tail) > 0;
    return false;
}

void expect_spans_valid(const CaseRecord& r) {
    for (const auto& s : r.spans) {
        ASSERT_LE(s.start, s.end) << s.feature_path;
        ASSERT_LE(s.end, r.raw_text.size()) << s.feature_path;
        EXPECT_EQ(r.raw_text.substr(s.start, s.end - s.start), s.matched_text) << s.feature_path;
        EXPECT_EQ(s.case_id, r.case_id);
        EXPECT_FALSE(s.rule_id.empty());
        EXPECT_TRUE(path_populated(r.features, s.feature_path)) << s.feature_path;
    }
}

bool has_span(const CaseRecord& r, const std::string& path) {
    for (const auto& s : r.spans) {
        if (s.feature_path == path) return true;
    }
    return false;
}

// Every populated feature must be justified by at least one span.
void expect_recall(const CaseRecord& r) {
    const auto& f = r.features;
    const auto need = [&](bool populated, const std::string& path) {
        if (populated) EXPECT_TRUE(has_span(r, path)) << r.case_id << " lacks span for " << path;
    };
    need(f.perpetrator_age.has_value(), "perpetrator_age");
    need(f.victim_count.has_value(), "victim_count");
    need(!f.victim_ages.empty(), "victim_ages");
    need(f.evidence_images.has_value(), "evidence_images");
    need(f.evidence_videos.has_value(), "evidence_videos");
    need(f.evidence_messages.has_value(), "evidence_messages");
    need(f.evidence_storage.has_value(), "evidence_storage");
    need(!f.charges.empty(), "charges");
    need(f.jail_info.has_value(), "jail_info");
    need(f.registered_sex_offender, "registered_sex_offender");
    need(f.relationship_to_victim != kDefaultRelationship, "relationship_to_victim");
    for (const auto& t : f.platforms) need(true, "platforms." + t);
    for (const auto& t : f.investigation_type) need(true, "investigation_type." + t);
    for (const auto& t : f.agencies) need(true, "agencies." + t);
    for (const auto& t : f.severity_indicators) need(true, "severity_indicators." + t);
    for (const auto& t : f.case_topics) need(true, "case_topics." + t);
    for (const auto& t : f.severity_phrases) need(true, "severity_phrases." + t);
}

}  // namespace

TEST(ExtractStructured, TableExamples) {
    const auto out = extractor().extract_structured(
        "A 34-year-old man was arrested after 2,500 images and 40 videos were found on 1.5 TB of drives. "
        "He had contacted a 13-year-old girl on Facebook and Snapchat during an undercover operation.");
    const auto& f = out.features;
    EXPECT_EQ(f.perpetrator_age, 34);
    EXPECT_EQ(f.evidence_images, 2500);
    EXPECT_EQ(f.evidence_videos, 40);
    ASSERT_TRUE(f.evidence_storage.has_value());
    EXPECT_DOUBLE_EQ(f.evidence_storage->magnitude, 1.5);
    EXPECT_EQ(f.evidence_storage->unit, StorageUnit::TB);
    EXPECT_EQ(f.victim_ages, (std::set<int>{13}));
    EXPECT_EQ(f.victim_gender, "female");
    EXPECT_EQ(f.platforms, (std::set<std::string>{"facebook", "snapchat"}));
    EXPECT_EQ(f.investigation_type, (std::set<std::string>{"undercover"}));
    EXPECT_EQ(f.prosecution, (std::set<std::string>{"arrested"}));
    EXPECT_TRUE(out.notes.empty());
}

TEST(ExtractStructured, VictimAgeNotTakenAsPerpetratorAge) {
    const auto out = extractor().extract_structured("A 13-year-old girl was contacted by a 45-year-old man.");
    EXPECT_EQ(out.features.perpetrator_age, 45);
    EXPECT_EQ(out.features.victim_ages, (std::set<int>{13}));
}

TEST(ExtractStructured, RsoChargesJail) {
    const auto out = extractor().extract_structured(
        "The man, a registered sex offender, was charged with luring a minor. He was booked into Maricopa County Jail.");
    const auto& f = out.features;
    EXPECT_TRUE(f.registered_sex_offender);
    EXPECT_EQ(f.charges, (std::vector<std::string>{"luring a minor"}));
    EXPECT_EQ(f.jail_info, "booked into Maricopa County Jail");
    EXPECT_EQ(f.prosecution, (std::set<std::string>{"booked", "charged"}));
}

TEST(ExtractStructured, NothingInPlainProse) {
    const auto out = extractor().extract_structured("The report was reviewed by the assigned detective.");
    EXPECT_EQ(out.features, FeatureSet{});
    EXPECT_TRUE(out.spans.empty());
}

TEST(ExtractStructured, SpansPointAtMatches) {
    const std::string text = "Police found 120 images.";
    const auto out = extractor().extract_structured(text);
    ASSERT_EQ(out.spans.size(), 1u);
    const auto& s = out.spans[0];
    EXPECT_EQ(s.feature_path, "evidence_images");
    EXPECT_EQ(s.rule_id, "evidence_images.count");
    EXPECT_EQ(text.substr(s.start, s.end - s.start), s.matched_text);
    EXPECT_EQ(s.matched_text, "120 images");
}

TEST(ExtractSemantic, AgeKeywordBoundaries) {
    EXPECT_TRUE(extractor().extract_semantic("The child was 7 years old.", "severity_indicators").tags.count("under_10"));
    EXPECT_FALSE(extractor().extract_semantic("The child was 4 years old.", "severity_indicators").tags.count("under_10"));
    EXPECT_FALSE(
        extractor().extract_semantic("The child was 10 years old.", "severity_indicators").tags.count("under_10"));
    EXPECT_FALSE(
        extractor().extract_semantic("The child was 17 years old.", "severity_indicators").tags.count("under_10"));
}

TEST(ExtractSemantic, CaseInsensitiveAndOneSpanPerFeature) {
    const auto out = extractor().extract_semantic("An INFANT and a baby were rescued.", "severity_indicators");
    EXPECT_EQ(out.tags, (std::set<std::string>{"infant"}));
    ASSERT_EQ(out.spans.size(), 1u);
    EXPECT_EQ(out.spans[0].feature_path, "severity_indicators.infant");
    EXPECT_EQ(out.spans[0].matched_text, "INFANT");
}

TEST(ExtractSemantic, Topics) {
    const auto out =
        extractor().extract_semantic("He possessed files and shared them with an overseas contact.", "case_topics");
    EXPECT_EQ(out.tags, (std::set<std::string>{"international", "possession"}));
}

TEST(ExtractSemantic, UnknownCategory) {
    EXPECT_THROW(extractor().extract_semantic("text", "platforms"), UnknownCategory);
}

TEST(ExtractSeverityPhrases, WholeWords) {
    const auto out = extractor().extract_severity_phrases("He was dangerous and out of control; he told them.");
    EXPECT_EQ(out.tags, (std::set<std::string>{"dangerous", "out_of_control", "told"}));
    EXPECT_TRUE(extractor().extract_severity_phrases("The restated plan continued.").tags.empty());
}

TEST(Validate, RangeAndVocabulary) {
    FeatureSet ok;
    EXPECT_FALSE(has_errors(extractor().validate(ok)));

    FeatureSet bad_age;
    bad_age.perpetrator_age = 130;
    EXPECT_TRUE(has_errors(extractor().validate(bad_age)));

    FeatureSet neg;
    neg.evidence_images = -1;
    EXPECT_TRUE(has_errors(extractor().validate(neg)));

    FeatureSet vocab_bad;
    vocab_bad.platforms.insert("myspace");
    EXPECT_TRUE(has_errors(extractor().validate(vocab_bad)));

    FeatureSet rel_empty;
    rel_empty.relationship_to_victim.clear();
    EXPECT_TRUE(has_errors(extractor().validate(rel_empty)));

    FeatureSet count_warn;
    count_warn.victim_count = 1;
    count_warn.victim_ages = {5, 9};
    const auto issues = extractor().validate(count_warn);
    EXPECT_FALSE(has_errors(issues));
    EXPECT_FALSE(issues.empty());
}

TEST(Build, DefaultsAndRelationship) {
    const auto plain = extractor().build(segment_of("In March 2012 detectives opened a case."));
    EXPECT_EQ(plain.record.features.relationship_to_victim, "stranger");
    EXPECT_EQ(plain.record.year, 2012);
    EXPECT_EQ(plain.record.month, "March");
    EXPECT_FALSE(plain.record.created_at.empty());
    EXPECT_TRUE(plain.record.spans.empty());

    const auto kin = extractor().build(segment_of("In March 2012 the suspect was the victim's uncle."));
    EXPECT_EQ(kin.record.features.relationship_to_victim, "uncle");
    EXPECT_TRUE(kin.record.features.case_topics.count("family"));
    expect_spans_valid(kin.record);
    EXPECT_TRUE(has_span(kin.record, "relationship_to_victim"));
}

TEST(Build, YearMismatchIsWarning) {
    auto seg = segment_of("In December 2011 a case.");
    seg.year = "2011";
    const auto built = extractor().build(seg);
    EXPECT_EQ(built.record.year, 2011);
    EXPECT_FALSE(has_errors(built.issues));
    EXPECT_FALSE(built.issues.empty());
}

TEST(Build, ThrowingVariantOnEmptyText) {
    EXPECT_THROW(extractor().build_case_record(segment_of("")), ValidationFailed);
}

TEST(Snippets, EachYieldsExactlyItsEffects) {
    std::mt19937_64 rng(11);
    for (const auto& snip : casework::testing::snippets()) {
        for (int rep = 0; rep < 5; ++rep) {
            FeatureSet expected;
            const std::string text = "In March 2012 detectives opened a case. " + snip.plant(rng, expected);
            const auto built = extractor().build(segment_of(text));
            EXPECT_EQ(built.record.features, expected) << snip.name << ": " << text;
            EXPECT_FALSE(has_errors(built.issues)) << snip.name;
        }
    }
}

TEST(Snippets, FillersTriggerNothing) {
    for (const auto& s : casework::testing::filler_sentences()) {
        const auto built = extractor().build(segment_of(s));
        EXPECT_EQ(built.record.features, FeatureSet{}) << s;
        EXPECT_TRUE(built.record.spans.empty()) << s;
    }
}

TEST(Provenance, GeneratedCorpusExactFeaturesAndValidSpans) {
    std::mt19937_64 rng(2024);
    std::size_t cases = 0;
    for (int d = 0; d < 30; ++d) {
        const auto doc = casework::testing::make_document(rng, 8, 2012 + d % 3);
        const auto segs = batch_cases(doc.text, doc.org, std::to_string(doc.year));
        ASSERT_EQ(segs.size(), doc.cases.size());
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto built = extractor().build(segs[i]);
            EXPECT_EQ(built.record.features, doc.cases[i].expected) << segs[i].text;
            EXPECT_FALSE(has_errors(built.issues));
            expect_spans_valid(built.record);
            expect_recall(built.record);
            ++cases;
        }
    }
    EXPECT_EQ(cases, 240u);
}

TEST(Extractor, ConcurrentUseIsDeterministic) {
    std::mt19937_64 rng(5);
    const auto doc = casework::testing::make_document(rng, 20, 2013);
    const auto segs = batch_cases(doc.text, doc.org, "2013");
    std::vector<FeatureSet> serial;
    for (const auto& s : segs) serial.push_back(extractor().build(s).record.features);

    std::vector<FeatureSet> parallel(segs.size());
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (std::size_t i = t; i < segs.size(); i += 4) parallel[i] = extractor().build(segs[i]).record.features;
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(parallel, serial);
}
