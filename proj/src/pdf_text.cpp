#include "casework/pdf_text.hpp"

#include "casework/errors.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace casework::pdf {

namespace {

// ---------------------------------------------------------------- objects

struct Object;
using Array = std::vector<Object>;
using Dict = std::map<std::string, Object>;

struct Ref {
    int num = 0;
    int gen = 0;
};

struct Object {
    enum class Kind { null, boolean, number, string, name, keyword, array, dict, ref };

    Kind kind = Kind::null;
    bool boolean = false;
    double number = 0.0;
    std::string text;  // string bytes, name (without '/'), or keyword
    std::shared_ptr<Array> array;
    std::shared_ptr<Dict> dict;
    Ref ref;

    bool is(Kind k) const { return kind == k; }
    bool is_keyword(std::string_view kw) const { return kind == Kind::keyword && text == kw; }
    bool is_int() const { return kind == Kind::number && number == std::floor(number); }

    const Object* get(const std::string& key) const {
        if (kind != Kind::dict) return nullptr;
        const auto it = dict->find(key);
        return it == dict->end() ? nullptr : &it->second;
    }
};

Object make_keyword(std::string kw) {
    Object o;
    o.kind = Object::Kind::keyword;
    o.text = std::move(kw);
    return o;
}

// ------------------------------------------------------------------ lexer

bool is_whitespace(char c) {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

bool is_delimiter(char c) {
    switch (c) {
        case '(': case ')': case '<': case '>': case '[': case ']':
        case '{': case '}': case '/': case '%':
            return true;
        default:
            return false;
    }
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

class Lexer {
public:
    explicit Lexer(std::string_view data, std::size_t pos = 0) : data_(data), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t pos) { pos_ = pos; }
    bool at_end() {
        skip_space();
        return pos_ >= data_.size();
    }

    /// Next token as an Object. Structural tokens ("<<", ">>", "[", "]")
    /// come back as keywords. nullopt at end of input.
    std::optional<Object> next() {
        skip_space();
        if (pos_ >= data_.size()) return std::nullopt;
        const char c = data_[pos_];

        if (c == '(') return read_literal_string();
        if (c == '<') {
            if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
                pos_ += 2;
                return make_keyword("<<");
            }
            return read_hex_string();
        }
        if (c == '>') {
            pos_ += (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') ? 2 : 1;
            return make_keyword(">>");
        }
        if (c == '[' || c == ']' || c == '{' || c == '}') {
            ++pos_;
            return make_keyword(std::string(1, c));
        }
        if (c == '/') return read_name();
        if (c == ')') {
            ++pos_;
            return make_keyword(")");
        }

        const std::size_t start = pos_;
        while (pos_ < data_.size() && !is_whitespace(data_[pos_]) && !is_delimiter(data_[pos_])) ++pos_;
        const std::string_view word = data_.substr(start, pos_ - start);
        Object o;
        if (looks_numeric(word)) {
            o.kind = Object::Kind::number;
            o.number = std::strtod(std::string(word).c_str(), nullptr);
        } else if (word == "true" || word == "false") {
            o.kind = Object::Kind::boolean;
            o.boolean = word == "true";
        } else if (word == "null") {
            o.kind = Object::Kind::null;
        } else {
            o = make_keyword(std::string(word));
        }
        return o;
    }

    /// Skips an inline image body after its `ID` operator.
    void skip_inline_image() {
        const auto end = data_.find("EI", pos_);
        pos_ = end == std::string_view::npos ? data_.size() : end + 2;
    }

private:
    static bool looks_numeric(std::string_view w) {
        if (w.empty()) return false;
        bool digit = false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const char c = w[i];
            if (c >= '0' && c <= '9') {
                digit = true;
            } else if ((c == '-' || c == '+') && i == 0) {
            } else if (c != '.') {
                return false;
            }
        }
        return digit;
    }

    void skip_space() {
        while (pos_ < data_.size()) {
            const char c = data_[pos_];
            if (is_whitespace(c)) {
                ++pos_;
            } else if (c == '%') {
                while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    Object read_name() {
        ++pos_;  // '/'
        std::string name;
        while (pos_ < data_.size() && !is_whitespace(data_[pos_]) && !is_delimiter(data_[pos_])) {
            const char c = data_[pos_];
            if (c == '#' && pos_ + 2 < data_.size() && hex_value(data_[pos_ + 1]) >= 0 &&
                hex_value(data_[pos_ + 2]) >= 0) {
                name += static_cast<char>(hex_value(data_[pos_ + 1]) * 16 + hex_value(data_[pos_ + 2]));
                pos_ += 3;
            } else {
                name += c;
                ++pos_;
            }
        }
        Object o;
        o.kind = Object::Kind::name;
        o.text = std::move(name);
        return o;
    }

    Object read_literal_string() {
        ++pos_;  // '('
        std::string out;
        int depth = 1;
        while (pos_ < data_.size()) {
            const char c = data_[pos_++];
            if (c == '\\') {
                if (pos_ >= data_.size()) break;
                const char e = data_[pos_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 'r': out += '\r'; break;
                    case 't': out += '\t'; break;
                    case 'b': out += '\b'; break;
                    case 'f': out += '\f'; break;
                    case '\r':
                        if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
                        break;
                    case '\n': break;
                    default:
                        if (e >= '0' && e <= '7') {
                            int value = e - '0';
                            for (int k = 0; k < 2 && pos_ < data_.size() && data_[pos_] >= '0' &&
                                            data_[pos_] <= '7';
                                 ++k) {
                                value = value * 8 + (data_[pos_++] - '0');
                            }
                            out += static_cast<char>(value & 0xFF);
                        } else {
                            out += e;
                        }
                }
            } else if (c == '(') {
                ++depth;
                out += c;
            } else if (c == ')') {
                if (--depth == 0) break;
                out += c;
            } else {
                out += c;
            }
        }
        Object o;
        o.kind = Object::Kind::string;
        o.text = std::move(out);
        return o;
    }

    Object read_hex_string() {
        ++pos_;  // '<'
        std::string out;
        int high = -1;
        while (pos_ < data_.size() && data_[pos_] != '>') {
            const int v = hex_value(data_[pos_++]);
            if (v < 0) continue;
            if (high < 0) {
                high = v;
            } else {
                out += static_cast<char>(high * 16 + v);
                high = -1;
            }
        }
        if (high >= 0) out += static_cast<char>(high * 16);
        if (pos_ < data_.size()) ++pos_;  // '>'
        Object o;
        o.kind = Object::Kind::string;
        o.text = std::move(out);
        return o;
    }

    std::string_view data_;
    std::size_t pos_;
};

// ----------------------------------------------------------------- parser

Object parse_object(Lexer& lex, int depth = 0);

Object parse_after_token(Lexer& lex, Object tok, int depth) {
    if (depth > 64) throw UnreadablePdf("PDF object nesting too deep");
    if (tok.is_keyword("<<")) {
        Object d;
        d.kind = Object::Kind::dict;
        d.dict = std::make_shared<Dict>();
        while (true) {
            auto key = lex.next();
            if (!key || key->is_keyword(">>")) break;
            if (!key->is(Object::Kind::name)) continue;
            auto value_tok = lex.next();
            if (!value_tok) break;
            if (value_tok->is_keyword(">>")) break;
            (*d.dict)[key->text] = parse_after_token(lex, std::move(*value_tok), depth + 1);
        }
        return d;
    }
    if (tok.is_keyword("[")) {
        Object a;
        a.kind = Object::Kind::array;
        a.array = std::make_shared<Array>();
        while (true) {
            auto item = lex.next();
            if (!item || item->is_keyword("]")) break;
            a.array->push_back(parse_after_token(lex, std::move(*item), depth + 1));
        }
        return a;
    }
    if (tok.is_int() && tok.number >= 0) {
        const auto save = lex.pos();
        auto gen = lex.next();
        if (gen && gen->is_int()) {
            auto r = lex.next();
            if (r && r->is_keyword("R")) {
                Object o;
                o.kind = Object::Kind::ref;
                o.ref = Ref{static_cast<int>(tok.number), static_cast<int>(gen->number)};
                return o;
            }
        }
        lex.seek(save);
    }
    return tok;
}

Object parse_object(Lexer& lex, int depth) {
    auto tok = lex.next();
    if (!tok) return {};
    return parse_after_token(lex, std::move(*tok), depth);
}

// ---------------------------------------------------------------- filters

std::optional<std::string> inflate(std::string_view input) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) return std::nullopt;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
    zs.avail_in = static_cast<uInt>(input.size());
    std::string out;
    char buf[16384];
    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = ::inflate(&zs, Z_NO_FLUSH);
        out.append(buf, sizeof buf - zs.avail_out);
    } while (rc == Z_OK && (zs.avail_in > 0 || zs.avail_out == 0));
    inflateEnd(&zs);
    if (rc != Z_STREAM_END && out.empty()) return std::nullopt;
    return out;
}

std::string ascii_hex_decode(std::string_view input) {
    std::string out;
    int high = -1;
    for (const char c : input) {
        if (c == '>') break;
        const int v = hex_value(c);
        if (v < 0) continue;
        if (high < 0) {
            high = v;
        } else {
            out += static_cast<char>(high * 16 + v);
            high = -1;
        }
    }
    if (high >= 0) out += static_cast<char>(high * 16);
    return out;
}

// --------------------------------------------------------------- document

struct StoredObject {
    Object value;
    std::optional<std::string> stream;  // raw (still encoded) stream bytes
};

class Document {
public:
    explicit Document(std::string_view bytes) : bytes_(bytes) {
        if (bytes.substr(0, std::min<std::size_t>(bytes.size(), 1024)).find("%PDF-") ==
            std::string_view::npos) {
            throw UnreadablePdf("not a PDF file (missing %PDF- header)");
        }
        scan_objects();
        expand_object_streams();
        for (const auto& t : trailers_) {
            if (t.get("Encrypt")) throw UnreadablePdf("PDF is encrypted");
        }
    }

    const Object& resolve(const Object& o, int depth = 0) const {
        static const Object null_object;
        if (!o.is(Object::Kind::ref)) return o;
        if (depth > 32) return null_object;
        const auto it = objects_.find(o.ref.num);
        if (it == objects_.end()) return null_object;
        return resolve(it->second.value, depth + 1);
    }

    const Object* resolved_get(const Object& dict, const std::string& key) const {
        const Object* v = resolve(dict).get(key);
        return v ? &resolve(*v) : nullptr;
    }

    std::optional<std::string> stream_data(const Object& o) const {
        if (!o.is(Object::Kind::ref)) return std::nullopt;
        const auto it = objects_.find(o.ref.num);
        if (it == objects_.end() || !it->second.stream) return std::nullopt;
        return decode(it->second.value, *it->second.stream);
    }

    /// Page dictionaries in document order, each paired with its effective
    /// /Resources (inherited through the page tree).
    std::vector<std::pair<Object, Object>> pages() const {
        std::vector<std::pair<Object, Object>> out;
        const Object* root = nullptr;
        for (auto it = trailers_.rbegin(); it != trailers_.rend() && !root; ++it) {
            root = it->get("Root");
        }
        if (root) {
            const Object* page_tree = resolved_get(*root, "Pages");
            std::set<int> visited;
            if (page_tree) walk_pages(*page_tree, Object{}, out, visited, 0);
        }
        if (out.empty()) {
            for (const auto& [num, stored] : objects_) {
                const Object* type = stored.value.get("Type");
                if (type && type->is(Object::Kind::name) && type->text == "Page") {
                    const Object* res = resolved_get(stored.value, "Resources");
                    out.emplace_back(stored.value, res ? *res : Object{});
                }
            }
        }
        return out;
    }

private:
    void walk_pages(const Object& node_in, const Object& inherited, std::vector<std::pair<Object, Object>>& out,
                    std::set<int>& visited, int depth) const {
        if (depth > 64) return;
        const Object& node = resolve(node_in);
        if (!node.is(Object::Kind::dict)) return;
        Object resources = inherited;
        if (const Object* r = resolved_get(node, "Resources")) resources = *r;
        const Object* type = node.get("Type");
        const Object* kids = resolved_get(node, "Kids");
        const bool is_page_node = (type && type->text == "Page") || !kids;
        if (is_page_node) {
            out.emplace_back(node, resources);
            return;
        }
        if (!kids->is(Object::Kind::array)) return;
        for (const auto& kid : *kids->array) {
            if (kid.is(Object::Kind::ref)) {
                if (!visited.insert(kid.ref.num).second) continue;
            }
            walk_pages(kid, resources, out, visited, depth + 1);
        }
    }

    std::optional<std::string> decode(const Object& dict, const std::string& raw) const {
        const Object* filter = resolved_get(dict, "Filter");
        std::vector<std::string> filters;
        if (filter && filter->is(Object::Kind::name)) {
            filters.push_back(filter->text);
        } else if (filter && filter->is(Object::Kind::array)) {
            for (const auto& f : *filter->array) filters.push_back(resolve(f).text);
        }
        std::string data = raw;
        for (const auto& f : filters) {
            if (f == "FlateDecode" || f == "Fl") {
                auto inflated = inflate(data);
                if (!inflated) return std::nullopt;
                data = std::move(*inflated);
            } else if (f == "ASCIIHexDecode" || f == "AHx") {
                data = ascii_hex_decode(data);
            } else {
                return std::nullopt;
            }
        }
        return data;
    }

    std::string read_stream_body(Lexer& lex, const Object& dict) {
        std::size_t start = lex.pos();
        if (start < bytes_.size() && bytes_[start] == '\r') ++start;
        if (start < bytes_.size() && bytes_[start] == '\n') ++start;

        const Object* length = dict.get("Length");
        if (length && length->is_int()) {
            const auto len = static_cast<std::size_t>(length->number);
            if (start + len <= bytes_.size()) {
                Lexer probe(bytes_, start + len);
                auto tok = probe.next();
                if (tok && tok->is_keyword("endstream")) {
                    lex.seek(probe.pos());
                    return std::string(bytes_.substr(start, len));
                }
            }
        }
        const auto end = bytes_.find("endstream", start);
        if (end == std::string_view::npos) {
            lex.seek(bytes_.size());
            return std::string(bytes_.substr(start));
        }
        std::size_t stop = end;
        if (stop > start && bytes_[stop - 1] == '\n') --stop;
        if (stop > start && bytes_[stop - 1] == '\r') --stop;
        lex.seek(end + 9);
        return std::string(bytes_.substr(start, stop - start));
    }

    void scan_objects() {
        Lexer lex(bytes_);
        while (!lex.at_end()) {
            const auto before = lex.pos();
            auto tok = lex.next();
            if (!tok) break;
            if (tok->is_int()) {
                const auto save = lex.pos();
                auto gen = lex.next();
                auto kw = lex.next();
                if (gen && gen->is_int() && kw && kw->is_keyword("obj")) {
                    StoredObject stored;
                    stored.value = parse_object(lex);
                    const auto after_value = lex.pos();
                    auto follow = lex.next();
                    if (follow && follow->is_keyword("stream")) {
                        stored.stream = read_stream_body(lex, stored.value);
                    } else {
                        lex.seek(after_value);
                    }
                    const Object* type = stored.value.get("Type");
                    if (type && type->is(Object::Kind::name) && type->text == "XRef") {
                        trailers_.push_back(stored.value);
                    }
                    objects_[static_cast<int>(tok->number)] = std::move(stored);
                    continue;
                }
                lex.seek(save);
            } else if (tok->is_keyword("trailer")) {
                Object t = parse_object(lex);
                if (t.is(Object::Kind::dict)) trailers_.push_back(std::move(t));
            }
            if (lex.pos() == before) lex.seek(before + 1);
        }
    }

    void expand_object_streams() {
        std::vector<std::pair<int, Object>> found;
        for (const auto& [num, stored] : objects_) {
            const Object* type = stored.value.get("Type");
            if (!type || type->text != "ObjStm" || !stored.stream) continue;
            const auto data = decode(stored.value, *stored.stream);
            const Object* n = stored.value.get("N");
            const Object* first = stored.value.get("First");
            if (!data || !n || !first || !n->is_int() || !first->is_int()) continue;
            Lexer header(*data);
            std::vector<std::pair<int, std::size_t>> entries;
            for (int i = 0; i < static_cast<int>(n->number); ++i) {
                auto obj_num = header.next();
                auto offset = header.next();
                if (!obj_num || !offset || !obj_num->is_int() || !offset->is_int()) break;
                entries.emplace_back(static_cast<int>(obj_num->number),
                                     static_cast<std::size_t>(first->number + offset->number));
            }
            for (const auto& [obj_num, offset] : entries) {
                if (offset >= data->size()) continue;
                Lexer body(*data, offset);
                found.emplace_back(obj_num, parse_object(body));
            }
        }
        for (auto& [num, value] : found) {
            if (objects_.count(num) == 0) objects_[num] = StoredObject{std::move(value), std::nullopt};
        }
    }

    std::string_view bytes_;
    std::map<int, StoredObject> objects_;
    std::vector<Object> trailers_;
};

// ------------------------------------------------------------------ fonts

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string utf16be_to_utf8(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
        std::uint32_t unit = (static_cast<unsigned char>(s[i]) << 8) | static_cast<unsigned char>(s[i + 1]);
        if (unit >= 0xD800 && unit <= 0xDBFF && i + 3 < s.size()) {
            const std::uint32_t low =
                (static_cast<unsigned char>(s[i + 2]) << 8) | static_cast<unsigned char>(s[i + 3]);
            unit = 0x10000 + ((unit - 0xD800) << 10) + (low - 0xDC00);
            i += 2;
        }
        append_utf8(out, unit);
    }
    return out;
}

std::uint32_t winansi_codepoint(unsigned char c) {
    static const std::map<unsigned char, std::uint32_t> specials = {
        {0x80, 0x20AC}, {0x85, 0x2026}, {0x91, 0x2018}, {0x92, 0x2019}, {0x93, 0x201C},
        {0x94, 0x201D}, {0x95, 0x2022}, {0x96, 0x2013}, {0x97, 0x2014}, {0x99, 0x2122}};
    const auto it = specials.find(c);
    return it != specials.end() ? it->second : c;
}

std::uint32_t code_of(std::string_view bytes) {
    std::uint32_t v = 0;
    for (const char c : bytes) v = (v << 8) | static_cast<unsigned char>(c);
    return v;
}

struct FontDecoder {
    int code_bytes = 1;
    std::map<std::uint32_t, std::string> to_unicode;
    std::map<std::uint32_t, double> widths;  // glyph space, 1/1000 em
    double default_width = 500.0;

    double width(std::uint32_t code) const {
        const auto it = widths.find(code);
        return it != widths.end() ? it->second : default_width;
    }

    std::string decode_code(std::uint32_t code) const {
        const auto it = to_unicode.find(code);
        if (it != to_unicode.end()) return it->second;
        std::string out;
        if (code_bytes == 1) append_utf8(out, winansi_codepoint(static_cast<unsigned char>(code)));
        return out;
    }
};

void parse_to_unicode(std::string_view cmap, FontDecoder& font) {
    Lexer lex(cmap);
    std::vector<Object> operands;
    while (auto tok = lex.next()) {
        if (tok->is_keyword("begincodespacerange")) {
            auto lo = lex.next();
            if (lo && lo->is(Object::Kind::string) && !lo->text.empty()) {
                font.code_bytes = static_cast<int>(lo->text.size());
            }
        } else if (tok->is_keyword("beginbfchar")) {
            while (true) {
                auto src = lex.next();
                if (!src || src->is_keyword("endbfchar")) break;
                auto dst = lex.next();
                if (!dst) break;
                if (src->is(Object::Kind::string) && dst->is(Object::Kind::string)) {
                    font.to_unicode[code_of(src->text)] = utf16be_to_utf8(dst->text);
                }
            }
        } else if (tok->is_keyword("beginbfrange")) {
            while (true) {
                auto lo = lex.next();
                if (!lo || lo->is_keyword("endbfrange")) break;
                auto hi = lex.next();
                if (!hi) break;
                Object dst = parse_object(lex);
                if (!lo->is(Object::Kind::string) || !hi->is(Object::Kind::string)) continue;
                const auto first = code_of(lo->text);
                const auto last = code_of(hi->text);
                if (last < first || last - first > 0xFFFF) continue;
                if (dst.is(Object::Kind::string) && !dst.text.empty()) {
                    std::string base = dst.text;
                    for (std::uint32_t code = first; code <= last; ++code) {
                        font.to_unicode[code] = utf16be_to_utf8(base);
                        // increment the last UTF-16 unit
                        auto& tail = base.back();
                        tail = static_cast<char>(static_cast<unsigned char>(tail) + 1);
                    }
                } else if (dst.is(Object::Kind::array)) {
                    std::uint32_t code = first;
                    for (const auto& d : *dst.array) {
                        if (code > last) break;
                        if (d.is(Object::Kind::string)) font.to_unicode[code] = utf16be_to_utf8(d.text);
                        ++code;
                    }
                }
            }
        }
    }
}

FontDecoder load_font(const Document& doc, const Object& font_ref) {
    FontDecoder font;
    const Object& f = doc.resolve(font_ref);
    if (!f.is(Object::Kind::dict)) return font;

    const Object* subtype = f.get("Subtype");
    const bool composite = subtype && subtype->text == "Type0";
    if (composite) {
        font.code_bytes = 2;
        font.default_width = 1000.0;
        const Object* descendants = doc.resolved_get(f, "DescendantFonts");
        if (descendants && descendants->is(Object::Kind::array) && !descendants->array->empty()) {
            const Object& cid = doc.resolve(descendants->array->front());
            if (const Object* dw = doc.resolved_get(cid, "DW"); dw && dw->is(Object::Kind::number)) {
                font.default_width = dw->number;
            }
            const Object* w = doc.resolved_get(cid, "W");
            if (w && w->is(Object::Kind::array)) {
                const auto& arr = *w->array;
                for (std::size_t i = 0; i + 1 < arr.size();) {
                    const Object& a = doc.resolve(arr[i]);
                    const Object& b = doc.resolve(arr[i + 1]);
                    if (!a.is(Object::Kind::number)) break;
                    if (b.is(Object::Kind::array)) {
                        auto code = static_cast<std::uint32_t>(a.number);
                        for (const auto& wv : *b.array) font.widths[code++] = doc.resolve(wv).number;
                        i += 2;
                    } else if (i + 2 < arr.size()) {
                        const auto lo = static_cast<std::uint32_t>(a.number);
                        const auto hi = static_cast<std::uint32_t>(b.number);
                        const double width = doc.resolve(arr[i + 2]).number;
                        for (auto code = lo; code <= hi && code - lo < 0xFFFF; ++code) font.widths[code] = width;
                        i += 3;
                    } else {
                        break;
                    }
                }
            }
        }
    } else {
        const Object* first = doc.resolved_get(f, "FirstChar");
        const Object* widths = doc.resolved_get(f, "Widths");
        if (first && widths && widths->is(Object::Kind::array)) {
            auto code = static_cast<std::uint32_t>(first->number);
            for (const auto& wv : *widths->array) font.widths[code++] = doc.resolve(wv).number;
        }
    }
    if (const Object* tu = f.get("ToUnicode")) {
        if (auto cmap = doc.stream_data(*tu)) parse_to_unicode(*cmap, font);
    }
    return font;
}

// --------------------------------------------------------- content stream

struct Matrix {
    double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
};

class TextCollector {
public:
    explicit TextCollector(const std::map<std::string, FontDecoder>& fonts) : fonts_(fonts) {}

    void run(std::string_view content) {
        Lexer lex(content);
        std::vector<Object> operands;
        while (auto tok = lex.next()) {
            if (tok->is_keyword("[") || tok->is_keyword("<<") || !tok->is(Object::Kind::keyword)) {
                operands.push_back(parse_after_token(lex, std::move(*tok), 0));
                continue;
            }
            apply(tok->text, operands);
            if (tok->text == "ID") lex.skip_inline_image();
            operands.clear();
        }
    }

    std::string take() { return std::move(out_); }

private:
    static double num(const std::vector<Object>& ops, std::size_t i) {
        return i < ops.size() && ops[i].is(Object::Kind::number) ? ops[i].number : 0.0;
    }

    void move_line(double tx, double ty) {
        line_.e += tx * line_.a + ty * line_.c;
        line_.f += tx * line_.b + ty * line_.d;
        text_ = line_;
    }

    void apply(const std::string& op, const std::vector<Object>& ops) {
        if (op == "BT") {
            line_ = text_ = Matrix{};
        } else if (op == "Tf") {
            if (!ops.empty() && ops[0].is(Object::Kind::name)) {
                const auto it = fonts_.find(ops[0].text);
                font_ = it != fonts_.end() ? &it->second : nullptr;
            }
            font_size_ = num(ops, 1);
        } else if (op == "TL") {
            leading_ = num(ops, 0);
        } else if (op == "Tc") {
            char_spacing_ = num(ops, 0);
        } else if (op == "Tw") {
            word_spacing_ = num(ops, 0);
        } else if (op == "Td") {
            move_line(num(ops, 0), num(ops, 1));
        } else if (op == "TD") {
            leading_ = -num(ops, 1);
            move_line(num(ops, 0), num(ops, 1));
        } else if (op == "Tm") {
            line_ = Matrix{num(ops, 0), num(ops, 1), num(ops, 2), num(ops, 3), num(ops, 4), num(ops, 5)};
            text_ = line_;
        } else if (op == "T*") {
            move_line(0, -leading_);
        } else if (op == "Tj") {
            if (!ops.empty()) show(ops[0].text);
        } else if (op == "'") {
            move_line(0, -leading_);
            if (!ops.empty()) show(ops[0].text);
        } else if (op == "\"") {
            word_spacing_ = num(ops, 0);
            char_spacing_ = num(ops, 1);
            move_line(0, -leading_);
            if (ops.size() > 2) show(ops[2].text);
        } else if (op == "TJ") {
            if (ops.empty() || !ops[0].is(Object::Kind::array)) return;
            for (const auto& item : *ops[0].array) {
                if (item.is(Object::Kind::string)) {
                    show(item.text);
                } else if (item.is(Object::Kind::number)) {
                    const double shift = -item.number / 1000.0 * font_size_;
                    text_.e += shift * text_.a;
                    text_.f += shift * text_.b;
                }
            }
        }
    }

    double user_font_size() const {
        const double scale = std::max(std::abs(text_.d), std::abs(text_.a));
        return std::max(font_size_ * (scale > 0 ? scale : 1.0), 1.0);
    }

    void show(const std::string& bytes) {
        if (bytes.empty()) return;
        const double size = user_font_size();
        const double x = text_.e;
        const double y = text_.f;
        if (have_position_) {
            if (std::abs(y - last_y_) > size * 0.5) {
                if (!out_.empty() && out_.back() != '\n') out_ += '\n';
            } else if (x - last_end_x_ > size * 0.15 && !out_.empty() && out_.back() != ' ' &&
                       out_.back() != '\n') {
                out_ += ' ';
            }
        }

        const int width = font_ && font_->code_bytes == 2 ? 2 : 1;
        for (std::size_t i = 0; i + width <= bytes.size(); i += width) {
            const auto code = code_of(std::string_view(bytes).substr(i, width));
            if (font_) {
                out_ += font_->decode_code(code);
            } else {
                append_utf8(out_, winansi_codepoint(static_cast<unsigned char>(code)));
            }
            const double glyph = font_ ? font_->width(code) : 500.0;
            double advance = glyph / 1000.0 * font_size_ + char_spacing_;
            if (width == 1 && code == 32) advance += word_spacing_;
            text_.e += advance * text_.a;
            text_.f += advance * text_.b;
        }
        last_end_x_ = text_.e;
        last_y_ = y;
        have_position_ = true;
    }

    const std::map<std::string, FontDecoder>& fonts_;
    const FontDecoder* font_ = nullptr;
    Matrix line_;
    Matrix text_;
    double font_size_ = 12.0;
    double leading_ = 0.0;
    double char_spacing_ = 0.0;
    double word_spacing_ = 0.0;
    bool have_position_ = false;
    double last_end_x_ = 0.0;
    double last_y_ = 0.0;
    std::string out_;
};

std::string page_content(const Document& doc, const Object& page) {
    const Object* contents = page.get("Contents");
    if (!contents) return {};
    std::string out;
    const Object& resolved = doc.resolve(*contents);
    if (resolved.is(Object::Kind::array)) {
        for (const auto& part : *resolved.array) {
            if (auto data = doc.stream_data(part)) {
                out += *data;
                out += '\n';
            }
        }
    } else if (auto data = doc.stream_data(*contents)) {
        out = std::move(*data);
    }
    return out;
}

}  // namespace

std::vector<std::string> extract_page_texts(std::string_view pdf_bytes) {
    const Document doc(pdf_bytes);
    const auto pages = doc.pages();
    if (pages.empty()) throw UnreadablePdf("PDF has no pages");

    std::vector<std::string> texts;
    bool any_text = false;
    for (const auto& [page, resources] : pages) {
        std::map<std::string, FontDecoder> fonts;
        if (const Object* font_dict = doc.resolved_get(resources, "Font");
            font_dict && font_dict->is(Object::Kind::dict)) {
            for (const auto& [name, ref] : *font_dict->dict) fonts.emplace(name, load_font(doc, ref));
        }
        TextCollector collector(fonts);
        collector.run(page_content(doc, page));
        std::string text = collector.take();
        if (text.find_first_not_of(" \n") != std::string::npos) any_text = true;
        texts.push_back(std::move(text));
    }
    if (!any_text) throw UnreadablePdf("PDF has no text layer (image-only documents need OCR)");
    return texts;
}

}  // namespace casework::pdf
