#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace casework::pdf {

/// Text layer of each page of an in-memory PDF, in page order.
///
/// Supports classic cross-reference layouts with uncompressed or
/// FlateDecode content streams and simple (single-byte) font encodings; text
/// showing operators are read in content order, with a newline emitted for
/// each line move. Throws UnreadablePdf for encrypted files, malformed files
/// and files whose pages carry no text.
std::vector<std::string> extract_page_texts(std::string_view pdf_bytes);

}  // namespace casework::pdf
