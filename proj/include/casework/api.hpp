#pragma once

#include "casework/config.hpp"
#include "casework/insights.hpp"
#include "casework/pipeline.hpp"
#include "casework/serialization.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

inline constexpr std::string_view kApiVersion = "1.0.0";

struct ApiResponse {
    int status = 200;
    Json body;
};

/// Everything the service returns, computed once from a fixed set of records.
class ApiSnapshot {
public:
    ApiSnapshot(std::vector<CaseRecord> records, Config config);

    const std::vector<CaseRecord>& records() const noexcept { return records_; }
    const Analysis& analysis() const noexcept { return analysis_; }
    const CaseRecord* find(std::string_view case_id) const;

    /// Routes one request. `query` holds decoded query parameters.
    ApiResponse handle(std::string_view method, std::string_view path,
                       const std::multimap<std::string, std::string>& query, std::string_view body) const;

private:
    ApiResponse list_cases(const std::multimap<std::string, std::string>& query) const;
    ApiResponse filter(std::string_view body) const;

    std::vector<CaseRecord> records_;
    std::map<std::string, std::size_t, std::less<>> index_;
    Config config_;
    Analysis analysis_;
    std::map<TagCategory, std::set<std::string>> vocabulary_;
};

ApiResponse error_response(int status, std::string_view code, std::string_view message);

struct ApiConfig {
    std::string bind_address = "127.0.0.1:8080";
    std::filesystem::path db_path;
    std::optional<std::filesystem::path> static_assets_dir;
};

struct BindAddress {
    std::string host;
    int port = 0;
};

/// "host:port" with port in [1, 65535]. Throws std::invalid_argument.
BindAddress parse_bind_address(std::string_view text);

/// HTTP front end over a snapshot. CORS is open to any origin.
class ApiServer {
public:
    explicit ApiServer(std::shared_ptr<const ApiSnapshot> snapshot,
                       std::optional<std::filesystem::path> static_assets_dir = std::nullopt);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds to `port` (0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Loads the store read-only, builds the snapshot and serves until stopped.
/// Returns false when the address cannot be bound.
bool serve(const ApiConfig& api_config, const Config& config);

}  // namespace casework
