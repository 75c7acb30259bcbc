#include "casework/batcher.hpp"

#include "casework/errors.hpp"
#include "casework/text_util.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <stdexcept>

namespace casework {

namespace {

const std::vector<std::regex>& compiled_patterns() {
    static const std::vector<std::regex> compiled = [] {
        std::vector<std::regex> out;
        for (const auto& p : temporal_patterns()) out.emplace_back(p, std::regex::optimize);
        return out;
    }();
    return compiled;
}

void check_batch_args(std::string_view org_name, std::string_view year) {
    if (org_name.empty()) throw std::invalid_argument("organization name must not be empty");
    if (year.size() != 4 || !std::all_of(year.begin(), year.end(), is_ascii_digit)) {
        throw std::invalid_argument("batch year must be four digits, got '" + std::string(year) + "'");
    }
}

std::string make_case_id(std::string_view org, std::string_view year, std::string_view month, int seq) {
    char seq_buf[16];
    std::snprintf(seq_buf, sizeof seq_buf, "%03d", seq);
    std::string id;
    id.append(org).append("_").append(year).append("_").append(to_lower_ascii(month)).append("_");
    id += seq_buf;
    return id;
}

}  // namespace

const std::vector<std::string>& temporal_patterns() {
    static const std::vector<std::string> patterns = {
        R"(In\s+([A-Z][a-z]+)\s+of\s+(\d{4}))",
        R"(In\s+([A-Z][a-z]+)\s+(\d{4}))",
        R"(([A-Z][a-z]+)\s+(\d{4}),)",
    };
    return patterns;
}

std::vector<TemporalMarker> find_markers(std::string_view text) {
    std::vector<TemporalMarker> candidates;
    const auto& patterns = compiled_patterns();
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        for (std::cregex_iterator it(text.data(), text.data() + text.size(), patterns[p]), end;
             it != end; ++it) {
            const auto& m = *it;
            const std::string month = m.str(1);
            if (!month_ordinal(month)) continue;
            candidates.push_back(TemporalMarker{static_cast<std::size_t>(m.position(0)), month, m.str(2),
                                                m.str(0), static_cast<int>(p)});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const TemporalMarker& a, const TemporalMarker& b) {
        if (a.start_offset != b.start_offset) return a.start_offset < b.start_offset;
        return a.pattern_index < b.pattern_index;
    });

    std::vector<TemporalMarker> markers;
    std::size_t covered_until = 0;
    for (auto& c : candidates) {
        if (!markers.empty() && c.start_offset < covered_until) continue;
        covered_until = c.start_offset + c.matched_text.size();
        markers.push_back(std::move(c));
    }
    return markers;
}

std::vector<CaseSegment> batch_cases(std::string_view text, std::string_view org_name, std::string_view year) {
    check_batch_args(org_name, year);
    const auto markers = find_markers(text);
    if (markers.empty()) throw NoMarkersFound("document has no temporal case markers");

    std::vector<CaseSegment> segments;
    segments.reserve(markers.size());
    for (std::size_t i = 0; i < markers.size(); ++i) {
        const auto& marker = markers[i];
        const std::size_t start = marker.start_offset;
        const std::size_t end = i + 1 < markers.size() ? markers[i + 1].start_offset : text.size();
        const int seq = static_cast<int>(i) + 1;

        CaseSegment seg;
        seg.case_id = make_case_id(org_name, year, marker.month, seq);
        seg.text = std::string(trim(text.substr(start, end - start)));
        seg.month = marker.month;
        seg.year = marker.year;
        seg.batch_year = std::string(year);
        seg.source_org = std::string(org_name);
        seg.sequence_number = seq;
        seg.start_offset = start;
        seg.end_offset = end;
        segments.push_back(std::move(seg));
    }
    return segments;
}

CaseSegment whole_document_segment(std::string_view text, std::string_view org_name, std::string_view year) {
    check_batch_args(org_name, year);
    CaseSegment seg;
    seg.month = "Unknown";
    seg.case_id = make_case_id(org_name, year, seg.month, 1);
    seg.text = std::string(trim(text));
    seg.year = std::string(year);
    seg.batch_year = std::string(year);
    seg.source_org = std::string(org_name);
    seg.sequence_number = 1;
    seg.start_offset = 0;
    seg.end_offset = text.size();
    return seg;
}

}  // namespace casework
