#pragma once

// Flat-directory session store. Each session is one canonical recording CSV
// named <sha256>.csv; index.json lists ids with label, creation time and
// duration. All mutations go through one mutex; readers share a lock on the
// in-memory index. Files are written to a temp name and renamed into place.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "movi/error.hpp"
#include "movi/hash.hpp"
#include "movi/pipeline.hpp"
#include "movi/recording.hpp"

namespace movi {

struct SessionInfo {
  std::string session_id;
  std::string label;
  std::string created_at;
  double duration = 0.0;
};

struct UploadResult {
  std::string session_id;
  bool created = false;
};

namespace detail {

/// UTC, millisecond precision, e.g. 2026-10-15T09:40:00.123Z.
inline std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t secs = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot rename into " + path.string() + ": " + ec.message());
}

}  // namespace detail

class SessionStore {
 public:
  /// Opens (creating if needed) the store directory. Throws IoError when the
  /// directory cannot be created or written.
  explicit SessionStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create store " + root_.string() + ": " + ec.message());
    const auto probe = root_ / ".write-probe";
    {
      std::ofstream out(probe);
      if (!out || !(out << "ok")) throw Error(ErrorCode::io_error, "store " + root_.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
    load_index();
  }

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Parses, validates and stores a recording under the hash of its canonical
  /// bytes. Uploading the same content again returns the existing id.
  UploadResult upload(std::string_view csv, std::string label = {}) {
    const MotionRecording rec = require_valid(parse_recording(csv));
    const std::string canonical = serialize_recording(rec);
    const std::string id = sha256_hex(canonical);
    const auto [lo, hi] = time_extent(rec);

    std::lock_guard writer(write_mutex_);
    {
      std::shared_lock read(index_mutex_);
      if (index_.contains(id)) return {id, false};
    }
    detail::write_file_atomic(path_for(id), canonical);
    {
      std::unique_lock lock(index_mutex_);
      index_[id] = SessionInfo{id, std::move(label), detail::utc_timestamp(), hi - lo};
    }
    persist_index();
    return {id, true};
  }

  std::optional<MotionRecording> get(const std::string& id) const {
    {
      std::shared_lock read(index_mutex_);
      if (!index_.contains(id)) return std::nullopt;
    }
    std::string bytes;
    try {
      bytes = detail::read_file(path_for(id));
    } catch (const Error&) {
      return std::nullopt;  // deleted between lookup and read
    }
    return parse_recording(bytes);
  }

  /// Sorted by created_at, then id.
  std::vector<SessionInfo> list() const {
    std::vector<SessionInfo> out;
    {
      std::shared_lock read(index_mutex_);
      for (const auto& [id, info] : index_) out.push_back(info);
    }
    std::sort(out.begin(), out.end(), [](const SessionInfo& a, const SessionInfo& b) {
      return std::tie(a.created_at, a.session_id) < std::tie(b.created_at, b.session_id);
    });
    return out;
  }

  /// False when the id is unknown.
  bool remove(const std::string& id) {
    std::lock_guard writer(write_mutex_);
    {
      std::unique_lock lock(index_mutex_);
      if (index_.erase(id) == 0) return false;
    }
    persist_index();
    std::error_code ec;
    std::filesystem::remove(path_for(id), ec);
    return true;
  }

  std::size_t size() const {
    std::shared_lock read(index_mutex_);
    return index_.size();
  }

 private:
  std::filesystem::path path_for(const std::string& id) const { return root_ / (id + ".csv"); }
  std::filesystem::path index_path() const { return root_ / "index.json"; }

  void load_index() {
    if (!std::filesystem::exists(index_path())) return;
    try {
      const auto j = nlohmann::json::parse(detail::read_file(index_path()));
      for (const auto& s : j.at("sessions")) {
        SessionInfo info{s.at("session_id").get<std::string>(), s.at("label").get<std::string>(),
                         s.at("created_at").get<std::string>(), s.at("duration").get<double>()};
        if (is_session_id(info.session_id) && std::filesystem::exists(path_for(info.session_id)))
          index_[info.session_id] = std::move(info);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::io_error, "corrupt index " + index_path().string() + ": " + e.what());
    }
  }

  // Caller holds write_mutex_.
  void persist_index() {
    nlohmann::json sessions = nlohmann::json::array();
    for (const auto& info : list()) {
      sessions.push_back({{"session_id", info.session_id},
                          {"label", info.label},
                          {"created_at", info.created_at},
                          {"duration", info.duration}});
    }
    detail::write_file_atomic(index_path(), nlohmann::json{{"sessions", sessions}}.dump(2) + "\n");
  }

  std::filesystem::path root_;
  std::mutex write_mutex_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, SessionInfo> index_;
};

}  // namespace movi
