#include "casework/api.hpp"

#include "casework/errors.hpp"
#include "casework/store.hpp"

#include <charconv>

#include <httplib.h>

namespace casework {

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
    return ApiResponse{status, Json{{"code", code}, {"message", message}}};
}

ApiSnapshot::ApiSnapshot(std::vector<CaseRecord> records, Config config)
    : records_(std::move(records)), config_(std::move(config)) {
    for (std::size_t i = 0; i < records_.size(); ++i) index_.emplace(records_[i].case_id, i);
    analysis_ = analyze(records_, config_);
    vocabulary_ = tag_vocabulary(config_.extraction);
}

const CaseRecord* ApiSnapshot::find(std::string_view case_id) const {
    const auto it = index_.find(case_id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

namespace {

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) return std::nullopt;
    return v;
}

std::optional<std::string> param(const std::multimap<std::string, std::string>& q, const char* key) {
    const auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const std::size_t j = path.find('/', i);
        const std::size_t end = j == std::string_view::npos ? path.size() : j;
        if (end > i) parts.push_back(path.substr(i, end - i));
        i = end;
    }
    return parts;
}

}  // namespace

ApiResponse ApiSnapshot::list_cases(const std::multimap<std::string, std::string>& query) const {
    std::optional<int> from, to;
    if (auto v = param(query, "year_from")) {
        from = parse_int(*v);
        if (!from) return error_response(400, "invalid_parameter", "year_from must be an integer");
    }
    if (auto v = param(query, "year_to")) {
        to = parse_int(*v);
        if (!to) return error_response(400, "invalid_parameter", "year_to must be an integer");
    }
    const auto org = param(query, "org");
    Json cases = Json::array();
    for (const auto& r : records_) {
        if (org && r.source_org != *org) continue;
        if (from && r.year < *from) continue;
        if (to && r.year > *to) continue;
        cases.push_back(case_summary_json(r));
    }
    const auto n = cases.size();
    return ApiResponse{200, Json{{"total", n}, {"cases", std::move(cases)}}};
}

ApiResponse ApiSnapshot::filter(std::string_view body) const {
    Json parsed;
    try {
        parsed = Json::parse(body);
    } catch (const Json::parse_error&) {
        return error_response(400, "invalid_json", "request body is not valid JSON");
    }
    try {
        const auto query = parse_tag_query(parsed);
        const auto matches = filter_by_tags(records_, query, vocabulary_);
        Json out = Json::array();
        for (const auto& m : matches) out.push_back(filter_match_json(m));
        Json tags = Json::array();
        for (const auto& t : query.selected_tags) tags.push_back(t);
        return ApiResponse{200, Json{{"count", matches.size()}, {"tags", std::move(tags)}, {"cases", std::move(out)}}};
    } catch (const Error& e) {
        return error_response(400, e.kind(), e.what());
    }
}

ApiResponse ApiSnapshot::handle(std::string_view method, std::string_view path,
                                const std::multimap<std::string, std::string>& query, std::string_view body) const {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api") return error_response(404, "not_found", "no such endpoint");
    const auto resource = parts[1];
    const bool get = method == "GET";

    if (resource == "filter" && parts.size() == 2) {
        if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
        return filter(body);
    }
    if (!get) {
        return error_response(405, "method_not_allowed", "the API is read-only");
    }

    if (resource == "health" && parts.size() == 2) {
        return ApiResponse{200, Json{{"status", "ok"},
                                     {"version", kApiVersion},
                                     {"schema_version", kSchemaVersion},
                                     {"case_count", records_.size()}}};
    }
    if (resource == "cases") {
        if (parts.size() == 2) return list_cases(query);
        if (parts.size() == 3) {
            const auto* r = find(parts[2]);
            if (!r) return error_response(404, "case_not_found", "unknown case id '" + std::string(parts[2]) + "'");
            return ApiResponse{200, Json(*r)};
        }
    }
    if (resource == "clusters") {
        if (parts.size() == 2) return ApiResponse{200, Json(analysis_.clusters)};
        if (parts.size() == 4 && parts[3] == "groups") {
            const auto* c = analysis_.clusters.find(parts[2]);
            if (!c) return error_response(404, "cluster_not_found", "unknown cluster '" + std::string(parts[2]) + "'");
            return ApiResponse{200, Json{{"cluster", c->name},
                                         {"threshold", analysis_.clusters.threshold},
                                         {"groups", c->groups},
                                         {"ungrouped", c->ungrouped}}};
        }
    }
    if (resource == "triage" && parts.size() == 2) {
        return ApiResponse{200, Json{{"summary", analysis_.triage_summary},
                                     {"weights", config_.triage.weights},
                                     {"results", analysis_.triage}}};
    }
    if (resource == "insights" && parts.size() == 2) return ApiResponse{200, Json(analysis_.insights)};
    if (resource == "tags" && parts.size() == 2) {
        Json out = Json::object();
        for (const auto& [category, tags] : vocabulary_) out[std::string(to_string(category))] = tags;
        return ApiResponse{200, std::move(out)};
    }
    return error_response(404, "not_found", "no such endpoint");
}

BindAddress parse_bind_address(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw std::invalid_argument("bind address must be host:port");
    }
    const auto port = parse_int(text.substr(colon + 1));
    if (!port || *port < 1 || *port > 65535) throw std::invalid_argument("port must be in [1, 65535]");
    return BindAddress{std::string(text.substr(0, colon)), *port};
}

struct ApiServer::Impl {
    std::shared_ptr<const ApiSnapshot> snapshot;
    httplib::Server server;
};

ApiServer::ApiServer(std::shared_ptr<const ApiSnapshot> snapshot, std::optional<std::filesystem::path> static_assets_dir)
    : impl_(std::make_unique<Impl>()) {
    impl_->snapshot = std::move(snapshot);
    auto& srv = impl_->server;

    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});

    const auto route = [snap = impl_->snapshot](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
        const auto out = snap->handle(req.method, req.path, query, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json; charset=utf-8");
    };
    srv.Get(R"(/api(/.*)?)", route);
    srv.Post(R"(/api(/.*)?)", route);
    srv.Put(R"(/api(/.*)?)", route);
    srv.Delete(R"(/api(/.*)?)", route);
    srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    if (static_assets_dir) srv.set_mount_point("/", static_assets_dir->string());
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

bool serve(const ApiConfig& api_config, const Config& config) {
    const auto address = parse_bind_address(api_config.bind_address);
    std::vector<CaseRecord> records;
    {
        const auto store = Store::open_read_only(api_config.db_path);
        records = store.query_cases();
    }
    auto snapshot = std::make_shared<const ApiSnapshot>(std::move(records), config);
    ApiServer server(std::move(snapshot), api_config.static_assets_dir);
    if (server.bind(address.host, address.port) < 0) return false;
    return server.listen();
}

}  // namespace casework
