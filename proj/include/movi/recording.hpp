#pragma once

// Motion recordings: the in-memory model plus the canonical CSV codec.
//
// Canonical CSV layout:
//
//   # source=<label>
//   # rate_hz=<nominal sample rate, 0 if unknown>
//   # convention=rh-yup-m-xyzw
//   # marker.<name>=<seconds>          (zero or more, sorted by name)
//   t,entity,kind,px,py,pz,qx,qy,qz,qw
//   <one row per entity per timestamp, sorted by (t, entity)>
//
// The comment block is optional on input; files that start directly at the
// header parse with default meta.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "movi/detail/text.hpp"
#include "movi/error.hpp"
#include "movi/geometry.hpp"

namespace movi {

/// Right-handed, y-up, meters, quaternions stored (x, y, z, w).
inline constexpr std::string_view kConvention = "rh-yup-m-xyzw";
inline constexpr std::string_view kCsvHeader = "t,entity,kind,px,py,pz,qx,qy,qz,qw";

/// Quaternions further than this from unit norm are rejected outright.
inline constexpr double kQuatRejectTolerance = 1e-3;
/// Quaternions within this of unit norm are accepted untouched.
inline constexpr double kQuatUnitTolerance = 1e-6;

struct Pose {
  double t = 0.0;
  Vec3 position;
  Quat orientation;

  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class EntityKind { hand, object, unknown };

constexpr std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::hand: return "hand";
    case EntityKind::object: return "object";
    case EntityKind::unknown: break;
  }
  return "unknown";
}

inline std::optional<EntityKind> parse_entity_kind(std::string_view s) {
  if (s == "hand") return EntityKind::hand;
  if (s == "object") return EntityKind::object;
  return std::nullopt;
}

/// Kind implied by an entity id: left_hand / right_hand are hands,
/// object:<name> is an object, anything else is not a legal id.
inline std::optional<EntityKind> kind_for_entity_id(std::string_view id) {
  if (id == "left_hand" || id == "right_hand") return EntityKind::hand;
  if (id.starts_with("object:") && id.size() > 7 &&
      id.find_first_of(",\r\n\"") == std::string_view::npos)
    return EntityKind::object;
  return std::nullopt;
}

struct EntityTrack {
  std::string entity_id;
  EntityKind kind = EntityKind::unknown;
  std::vector<Pose> samples;

  friend bool operator==(const EntityTrack&, const EntityTrack&) = default;
};

struct RecordingMeta {
  std::string source;
  double rate_hz = 0.0;
  std::string convention{kConvention};
  /// Named event times (e.g. phase boundaries of generated scenarios).
  std::map<std::string, double> markers;

  friend bool operator==(const RecordingMeta&, const RecordingMeta&) = default;
};

struct MotionRecording {
  std::vector<EntityTrack> tracks;
  RecordingMeta meta;

  const EntityTrack* find(std::string_view entity_id) const {
    auto it = std::find_if(tracks.begin(), tracks.end(),
                           [&](const EntityTrack& t) { return t.entity_id == entity_id; });
    return it == tracks.end() ? nullptr : &*it;
  }

  friend bool operator==(const MotionRecording&, const MotionRecording&) = default;
};

/// Puts tracks in canonical (entity id) order.
inline void sort_tracks(MotionRecording& rec) {
  std::sort(rec.tracks.begin(), rec.tracks.end(),
            [](const EntityTrack& a, const EntityTrack& b) { return a.entity_id < b.entity_id; });
}

/// Earliest and latest timestamp across every track.
inline std::pair<double, double> time_extent(const MotionRecording& rec) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& track : rec.tracks) {
    if (track.samples.empty()) continue;
    lo = std::min(lo, track.samples.front().t);
    hi = std::max(hi, track.samples.back().t);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

namespace detail {

/// Checks a raw quaternion against the tolerance bands; renormalizes inside
/// the warning band, throws BadQuaternion outside it.
inline Quat admit_quaternion(const Quat& q, std::size_t line) {
  const double n = norm(q);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kQuatRejectTolerance) {
    throw Error(ErrorCode::bad_quaternion,
                "line " + std::to_string(line) + ": quaternion norm " + format_double(n));
  }
  if (std::abs(n - 1.0) > kQuatUnitTolerance) return normalized(q);
  return q;
}

struct RawRow {
  std::string entity_id;
  EntityKind kind;
  Pose pose;
  std::size_t line;
};

/// Groups rows per entity (in row order), enforces strictly increasing time
/// within each entity and returns tracks sorted by id.
inline std::vector<EntityTrack> group_rows(std::vector<RawRow>& rows) {
  std::map<std::string, EntityTrack> by_id;
  for (auto& row : rows) {
    auto [it, inserted] = by_id.try_emplace(row.entity_id);
    auto& track = it->second;
    if (inserted) {
      track.entity_id = row.entity_id;
      track.kind = row.kind;
    } else if (track.kind != row.kind) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(row.line) +
                                                ": kind changes for entity " + row.entity_id);
    }
    if (!track.samples.empty() && !(row.pose.t > track.samples.back().t)) {
      throw Error(ErrorCode::non_monotonic_time,
                  "line " + std::to_string(row.line) + ": entity " + row.entity_id + " t=" +
                      format_double(row.pose.t) + " after t=" +
                      format_double(track.samples.back().t));
    }
    track.samples.push_back(row.pose);
  }
  std::vector<EntityTrack> tracks;
  tracks.reserve(by_id.size());
  for (auto& [id, track] : by_id) tracks.push_back(std::move(track));
  return tracks;
}

inline void apply_meta_line(RecordingMeta& meta, std::string_view body, std::size_t line) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) return;
  const auto key = trim(body.substr(0, eq));
  const auto value = body.substr(eq + 1);
  auto number = [&] {
    auto v = parse_double(trim(value));
    if (!v || !std::isfinite(*v))
      throw Error(ErrorCode::malformed_row,
                  "line " + std::to_string(line) + ": bad numeric meta " + std::string(key));
    return *v;
  };
  if (key == "source") {
    meta.source = std::string(value);
  } else if (key == "rate_hz") {
    meta.rate_hz = number();
  } else if (key == "convention") {
    meta.convention = std::string(trim(value));
  } else if (key.starts_with("marker.") && key.size() > 7) {
    meta.markers[std::string(key.substr(7))] = number();
  }
}

}  // namespace detail

/// Parses canonical recording CSV. Rows may come in any order across entities
/// but must be strictly increasing in time within an entity.
inline MotionRecording parse_recording(std::string_view bytes) {
  MotionRecording rec;
  const auto all = detail::lines(bytes);

  std::size_t i = 0;
  for (; i < all.size(); ++i) {
    const auto line = all[i];
    if (detail::trim(line).empty()) continue;
    if (!line.starts_with('#')) break;
    auto body = line.substr(1);
    if (body.starts_with(' ')) body.remove_prefix(1);
    detail::apply_meta_line(rec.meta, body, i + 1);
  }
  if (i == all.size()) throw Error(ErrorCode::empty_input, "no header row");
  if (detail::trim(all[i]) != kCsvHeader) {
    throw Error(ErrorCode::malformed_row, "line " + std::to_string(i + 1) +
                                              ": expected header '" + std::string(kCsvHeader) +
                                              "'");
  }

  std::vector<detail::RawRow> rows;
  for (++i; i < all.size(); ++i) {
    const auto line = all[i];
    const std::size_t lineno = i + 1;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 10) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": expected 10 fields, got " +
                                                std::to_string(fields.size()));
    }
    double num[8];
    constexpr std::size_t numeric_cols[8] = {0, 3, 4, 5, 6, 7, 8, 9};
    for (std::size_t k = 0; k < 8; ++k) {
      auto v = detail::parse_double(fields[numeric_cols[k]]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": bad number '" +
                                                  std::string(fields[numeric_cols[k]]) + "'");
      }
      num[k] = *v;
    }
    if (num[0] < 0.0) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": negative time");
    }
    const std::string entity(fields[1]);
    const auto implied = kind_for_entity_id(entity);
    const auto kind = parse_entity_kind(fields[2]);
    if (!implied) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": bad entity id '" + entity + "'");
    }
    if (!kind || *kind != *implied) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": kind '" +
                                                std::string(fields[2]) + "' does not match entity " + entity);
    }
    Pose pose{num[0], {num[1], num[2], num[3]}, {num[4], num[5], num[6], num[7]}};
    pose.orientation = detail::admit_quaternion(pose.orientation, lineno);
    rows.push_back({entity, *kind, pose, lineno});
  }
  if (rows.empty()) throw Error(ErrorCode::empty_input, "header present but no data rows");

  rec.tracks = detail::group_rows(rows);
  return rec;
}

/// Canonical CSV bytes. Refuses recordings with no samples at all.
inline std::string serialize_recording(const MotionRecording& rec) {
  struct Row {
    double t;
    const std::string* entity;
    EntityKind kind;
    const Pose* pose;
  };
  std::vector<Row> rows;
  for (const auto& track : rec.tracks)
    for (const auto& pose : track.samples) rows.push_back({pose.t, &track.entity_id, track.kind, &pose});
  if (rows.empty()) throw Error(ErrorCode::empty_input, "recording has no samples");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.t, *a.entity) < std::tie(b.t, *b.entity);
  });

  std::string out;
  out.reserve(64 * rows.size() + 128);
  out += "# source=" + rec.meta.source + "\n";
  out += "# rate_hz=" + detail::format_double(rec.meta.rate_hz) + "\n";
  out += "# convention=" + rec.meta.convention + "\n";
  for (const auto& [name, value] : rec.meta.markers)
    out += "# marker." + name + "=" + detail::format_double(value) + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    const Pose& p = *row.pose;
    detail::append_double(out, p.t);
    out += ',';
    out += *row.entity;
    out += ',';
    out += to_string(row.kind);
    for (double v : {p.position.x, p.position.y, p.position.z, p.orientation.x, p.orientation.y,
                     p.orientation.z, p.orientation.w}) {
      out += ',';
      detail::append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

enum class Severity { violation, warning };

struct Issue {
  Severity severity = Severity::violation;
  std::string code;
  std::string entity_id;
  std::optional<std::size_t> sample;
  std::string message;
};

/// Outcome of validate(): the (possibly renormalized) recording plus every
/// issue found. `issues` is empty iff the input satisfied every invariant.
struct ValidationResult {
  MotionRecording recording;
  std::vector<Issue> issues;

  bool ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const Issue& i) { return i.severity == Severity::violation; });
  }
};

inline ValidationResult validate(MotionRecording rec) {
  ValidationResult result;
  auto& issues = result.issues;
  auto violation = [&](std::string code, const std::string& entity, std::optional<std::size_t> idx,
                       std::string msg) {
    issues.push_back({Severity::violation, std::move(code), entity, idx, std::move(msg)});
  };

  if (rec.tracks.empty()) violation("empty recording", "", std::nullopt, "recording has no tracks");
  if (rec.meta.convention != kConvention)
    violation("unsupported convention", "", std::nullopt, "convention '" + rec.meta.convention + "'");
  if (rec.meta.source.find_first_of("\r\n") != std::string::npos)
    violation("bad meta", "", std::nullopt, "source label contains a line break");
  if (!std::isfinite(rec.meta.rate_hz) || rec.meta.rate_hz < 0.0)
    violation("bad meta", "", std::nullopt, "rate_hz must be finite and non-negative");

  std::map<std::string, int> seen;
  for (auto& track : rec.tracks) {
    const auto& id = track.entity_id;
    if (++seen[id] == 2) violation("duplicate entity", id, std::nullopt, "entity id appears more than once");

    const auto implied = kind_for_entity_id(id);
    if (!implied) {
      violation("bad entity id", id, std::nullopt, "expected left_hand, right_hand or object:<name>");
    } else if (track.kind == EntityKind::unknown) {
      violation("unknown entity kind", id, std::nullopt, "kind is neither hand nor object");
    } else if (track.kind != *implied) {
      violation("kind mismatch", id, std::nullopt, "kind does not match entity id");
    }
    if (track.samples.empty()) violation("empty track", id, std::nullopt, "track has no samples");

    for (std::size_t k = 0; k < track.samples.size(); ++k) {
      auto& pose = track.samples[k];
      if (!std::isfinite(pose.t) || pose.t < 0.0)
        violation("bad time", id, k, "t must be finite and non-negative");
      if (k > 0 && !(pose.t > track.samples[k - 1].t))
        violation("non-monotonic time", id, k, "timestamps must strictly increase");
      if (!std::isfinite(pose.position.x) || !std::isfinite(pose.position.y) ||
          !std::isfinite(pose.position.z))
        violation("non-finite position", id, k, "position has a non-finite component");

      const double n = norm(pose.orientation);
      if (!std::isfinite(n) || std::abs(n - 1.0) > kQuatRejectTolerance) {
        violation("bad quaternion", id, k, "norm " + detail::format_double(n));
      } else if (std::abs(n - 1.0) > kQuatUnitTolerance) {
        pose.orientation = normalized(pose.orientation);
        issues.push_back({Severity::warning, "renormalized", id, k,
                          "quaternion norm " + detail::format_double(n) + " corrected to 1"});
      }
    }
  }
  result.recording = std::move(rec);
  return result;
}

}  // namespace movi
