#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace casework {

/// A "Month Year" phrase that opens a case narrative.
struct TemporalMarker {
    std::size_t start_offset = 0;
    std::string month;  // capitalized English month name
    std::string year;   // four digits
    std::string matched_text;
    int pattern_index = 0;  // which temporal pattern fired (0-based)

    bool operator==(const TemporalMarker&) const = default;
};

struct CaseSegment {
    std::string case_id;
    std::string text;  // stripped
    std::string month;
    std::string year;        // the marker's own year
    std::string batch_year;  // the year passed to batch_cases, used in case_id
    std::string source_org;
    int sequence_number = 1;
    // Unstripped extent of the segment inside the batched text.
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;

    bool operator==(const CaseSegment&) const = default;
};

/// The three temporal patterns, in priority order:
/// "In <Month> of <Year>", "In <Month> <Year>", "<Month> <Year>,".
const std::vector<std::string>& temporal_patterns();

/// All temporal markers in `text`, ascending by offset. Tokens that are not
/// English month names are rejected. When matches start at the same offset
/// the earliest-listed pattern wins, and a match that starts inside an
/// already accepted marker is dropped ("In March 2012," yields one marker).
std::vector<TemporalMarker> find_markers(std::string_view text);

/// Splits `text` at every marker. Segment i spans [marker_i, marker_{i+1});
/// text before the first marker is not part of any segment.
/// Throws NoMarkersFound, or std::invalid_argument on an empty org or a
/// year that is not four digits.
std::vector<CaseSegment> batch_cases(std::string_view text, std::string_view org_name,
                                     std::string_view year);

/// The whole document as one case, for sources without temporal markers.
/// The month is recorded as "Unknown".
CaseSegment whole_document_segment(std::string_view text, std::string_view org_name,
                                   std::string_view year);

}  // namespace casework
