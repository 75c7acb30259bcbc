#include "casework/ingest.hpp"

#include "casework/errors.hpp"
#include "casework/pdf_text.hpp"
#include "casework/text_util.hpp"

#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

namespace casework {

namespace fs = std::filesystem;

namespace {

std::string read_file_bytes(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw FileNotFound("no such file: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool is_page_number_line(std::string_view line) {
    static const std::regex pattern(
        R"(^(?:page\s+)?\d{1,4}(?:\s+of\s+\d{1,4})?$)", std::regex::icase | std::regex::optimize);
    const auto trimmed = trim(line);
    if (trimmed.empty() || trimmed.size() > 24) return false;
    return std::regex_match(trimmed.begin(), trimmed.end(), pattern);
}

}  // namespace

SourceFormat format_for_path(const fs::path& path) {
    return to_lower_ascii(path.extension().string()) == ".pdf" ? SourceFormat::pdf
                                                               : SourceFormat::plain_text;
}

std::string extract_text(const fs::path& source_path, SourceFormat format) {
    const std::string bytes = read_file_bytes(source_path);
    std::string text;
    if (format == SourceFormat::plain_text) {
        text = sanitize_utf8(bytes);
    } else {
        const auto pages = pdf::extract_page_texts(bytes);
        for (std::size_t i = 0; i < pages.size(); ++i) {
            if (i > 0) text += '\n';
            text += pages[i];
        }
        text = sanitize_utf8(text);
    }
    if (trim(text).empty()) throw EmptyDocument("no extractable text in " + source_path.string());
    return text;
}

std::string clean_text(std::string_view raw) {
    // Pass 1: drop page-number lines; collapse blank runs inside each kept line.
    std::string lines;
    lines.reserve(raw.size());
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        if (last) nl = raw.size();
        std::string_view line = raw.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!is_page_number_line(line)) {
            std::string collapsed;
            collapsed.reserve(line.size());
            bool in_blank = false;
            for (const char c : line) {
                if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                    if (!in_blank) collapsed += ' ';
                    in_blank = true;
                } else {
                    collapsed += c;
                    in_blank = false;
                }
            }
            while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
            lines += collapsed;
            if (!last) lines += '\n';
        }
        if (last) break;
        pos = nl + 1;
    }

    // Pass 2: at most two consecutive newlines.
    std::string out;
    out.reserve(lines.size());
    int newline_run = 0;
    for (const char c : lines) {
        if (c == '\n') {
            if (++newline_run > 2) continue;
        } else {
            newline_run = 0;
        }
        out += c;
    }
    return out;
}

std::string detect_source_org(std::string_view filename, const std::vector<OrgPattern>& known_orgs) {
    const std::string lowered = to_lower_ascii(filename);
    for (const auto& org : known_orgs) {
        if (org.pattern.empty()) continue;
        if (lowered.find(to_lower_ascii(org.pattern)) != std::string::npos) return org.name;
    }
    return std::string(kUnknownOrg);
}

std::optional<int> infer_report_year(std::string_view filename) {
    std::size_t i = 0;
    while (i < filename.size()) {
        if (!is_ascii_digit(filename[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < filename.size() && is_ascii_digit(filename[j])) ++j;
        if (j - i == 4) {
            const int year = std::stoi(std::string(filename.substr(i, 4)));
            if (year >= 1990 && year <= 2100) return year;
        }
        i = j;
    }
    return std::nullopt;
}

namespace {

class FileIngestor final : public Ingestor {
public:
    FileIngestor(SourceFormat format, std::vector<OrgPattern> orgs)
        : format_(format), orgs_(std::move(orgs)) {}

    RawDocument ingest(const fs::path& source) const override {
        RawDocument doc;
        doc.source_path = source.string();
        const std::string filename = source.filename().string();
        doc.source_org = detect_source_org(filename, orgs_);
        doc.report_year = infer_report_year(filename);
        doc.cleaned_text = clean_text(extract_text(source, format_));
        doc.char_count = doc.cleaned_text.size();
        doc.ingested_at = utc_timestamp_now();
        return doc;
    }

private:
    SourceFormat format_;
    std::vector<OrgPattern> orgs_;
};

}  // namespace

std::unique_ptr<Ingestor> make_ingestor(SourceFormat format, std::vector<OrgPattern> known_orgs) {
    return std::make_unique<FileIngestor>(format, std::move(known_orgs));
}

}  // namespace casework
