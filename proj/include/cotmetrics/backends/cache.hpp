#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cotmetrics/backends/digest.hpp"
#include "cotmetrics/error.hpp"

namespace cotmetrics::backends {

/// Content address of one backend call: which backend, which payload.
struct CacheKey {
    std::string backend_digest;
    std::string payload_digest;

    static CacheKey make(std::string_view backend_identity, std::string_view payload) {
        return {sha256_hex(backend_identity), sha256_hex(payload)};
    }

    std::string str() const { return backend_digest + ":" + payload_digest; }
};

/// Content-addressed response store, persisted as an append-only JSONL record
/// file. Later records for the same key win on load, so appends never need
/// coordination beyond the in-process mutex.
class ResponseCache {
public:
    ResponseCache() = default; // in-memory only

    explicit ResponseCache(const std::filesystem::path& directory) {
        std::filesystem::create_directories(directory);
        path_ = directory / "responses.jsonl";
        load();
    }

    std::optional<std::string> get(const CacheKey& key) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key.str());
        if (it == entries_.end()) return std::nullopt;
        ++hits_;
        return it->second;
    }

    void put(const CacheKey& key, const std::string& value) {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = entries_.emplace(key.str(), value);
        if (!inserted) return;
        if (!path_.empty()) {
            nlohmann::json record{{"key", key.str()}, {"value", value}};
            std::ofstream out(path_, std::ios::app | std::ios::binary);
            out << record.dump() << "\n";
        }
    }

    size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

    size_t hits() const { return hits_.load(); }

private:
    void load() {
        std::ifstream in(path_, std::ios::binary);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto record = nlohmann::json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.contains("key") || !record.contains("value"))
                continue; // a torn trailing write is not fatal
            entries_[record["key"].get<std::string>()] = record["value"].get<std::string>();
        }
    }

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    mutable std::atomic<size_t> hits_{0};
    std::unordered_map<std::string, std::string> entries_;
};

} // namespace cotmetrics::backends
