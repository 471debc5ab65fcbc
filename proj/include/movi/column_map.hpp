#pragma once

// Adapter for foreign "wide" motion CSVs (one row per timestamp, one column
// group per tracked entity), such as exports of VR activity datasets.
//
// Config is a key=value file; '#' starts a comment line:
//
//   delimiter=,
//   time=Timestamp
//   time_scale=0.001            # multiply raw time by this to get seconds
//   time_origin=first           # "zero" (default) keeps raw times
//   position_scale=0.01         # multiply raw positions to get meters
//   handedness=left             # left-handed y-up source (e.g. Unity)
//   source=clip-17
//   rate_hz=90
//   entity.right_hand.px=RightHandPosX
//   entity.right_hand.py=...    (px py pz qx qy qz qw all required)
//   entity.object:ball.kind=object   (optional, inferred from the id)
//
// Cells for one entity that are all blank mean "not tracked in this frame"
// and the sample is skipped.

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "movi/detail/text.hpp"
#include "movi/error.hpp"
#include "movi/recording.hpp"

namespace movi {

struct EntityColumns {
  EntityKind kind = EntityKind::unknown;
  // px, py, pz, qx, qy, qz, qw
  std::array<std::string, 7> columns;
};

struct ColumnMap {
  char delimiter = ',';
  std::string time_column;
  double time_scale = 1.0;
  bool rebase_time = false;
  double position_scale = 1.0;
  bool left_handed = false;
  std::string source;
  double rate_hz = 0.0;
  std::map<std::string, EntityColumns> entities;
};

inline constexpr std::array<std::string_view, 7> kPoseFields = {"px", "py", "pz", "qx",
                                                                "qy", "qz", "qw"};

inline ColumnMap parse_column_map(std::string_view text) {
  ColumnMap map;
  const auto all = detail::lines(text);
  auto fail = [](std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::bad_config, "line " + std::to_string(line) + ": " + msg);
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto line = detail::trim(all[i]);
    if (line.empty() || line.starts_with('#')) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(i + 1, "expected key=value");
    const std::string key(detail::trim(line.substr(0, eq)));
    auto value = detail::trim(line.substr(eq + 1));
    auto number = [&] {
      auto v = detail::parse_double(value);
      if (!v || !std::isfinite(*v) || *v == 0.0) fail(i + 1, "bad number for " + key);
      return *v;
    };

    if (key == "delimiter") {
      if (value == "\\t" || value == "tab") map.delimiter = '\t';
      else if (value.size() == 1) map.delimiter = value[0];
      else fail(i + 1, "delimiter must be one character");
    } else if (key == "time") {
      map.time_column = value;
    } else if (key == "time_scale") {
      map.time_scale = number();
    } else if (key == "time_origin") {
      if (value == "first") map.rebase_time = true;
      else if (value == "zero") map.rebase_time = false;
      else fail(i + 1, "time_origin must be first or zero");
    } else if (key == "position_scale") {
      map.position_scale = number();
    } else if (key == "handedness") {
      if (value == "left") map.left_handed = true;
      else if (value == "right") map.left_handed = false;
      else fail(i + 1, "handedness must be left or right");
    } else if (key == "source") {
      map.source = value;
    } else if (key == "rate_hz") {
      map.rate_hz = number();
    } else if (key.starts_with("entity.")) {
      const auto dot = key.rfind('.');
      if (dot <= 7) fail(i + 1, "expected entity.<id>.<field>");
      const std::string id = key.substr(7, dot - 7);
      const std::string field = key.substr(dot + 1);
      const auto implied = kind_for_entity_id(id);
      if (!implied) fail(i + 1, "bad entity id '" + id + "'");
      auto& cols = map.entities[id];
      cols.kind = *implied;
      if (field == "kind") {
        const auto kind = parse_entity_kind(value);
        if (!kind || *kind != *implied) fail(i + 1, "kind does not match entity " + id);
        continue;
      }
      const auto it = std::find(kPoseFields.begin(), kPoseFields.end(), field);
      if (it == kPoseFields.end()) fail(i + 1, "unknown entity field '" + field + "'");
      cols.columns[static_cast<std::size_t>(it - kPoseFields.begin())] = value;
    } else {
      fail(i + 1, "unknown key '" + key + "'");
    }
  }
  if (map.time_column.empty()) throw Error(ErrorCode::bad_config, "missing 'time' column");
  if (map.entities.empty()) throw Error(ErrorCode::bad_config, "no entities mapped");
  for (const auto& [id, cols] : map.entities)
    for (std::size_t k = 0; k < cols.columns.size(); ++k)
      if (cols.columns[k].empty())
        throw Error(ErrorCode::bad_config,
                    "entity " + id + " is missing column for " + std::string(kPoseFields[k]));
  return map;
}

/// Parses a foreign wide CSV through `map` into a canonical recording.
inline MotionRecording parse_recording(std::string_view bytes, const ColumnMap& map) {
  const auto all = detail::lines(bytes);
  std::size_t i = 0;
  while (i < all.size() && detail::trim(all[i]).empty()) ++i;
  if (i == all.size()) throw Error(ErrorCode::empty_input, "no header row");

  auto unquote = [](std::string_view s) {
    s = detail::trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  };

  std::map<std::string, std::size_t, std::less<>> index;
  const auto header = detail::split(all[i], map.delimiter);
  for (std::size_t c = 0; c < header.size(); ++c) index.emplace(std::string(unquote(header[c])), c);
  auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw Error(ErrorCode::bad_config, "column '" + name + "' not in header");
    return it->second;
  };

  const std::size_t time_col = column(map.time_column);
  struct Resolved {
    std::string id;
    EntityKind kind;
    std::array<std::size_t, 7> cols;
  };
  std::vector<Resolved> entities;
  for (const auto& [id, ec] : map.entities) {
    Resolved r{id, ec.kind, {}};
    for (std::size_t k = 0; k < 7; ++k) r.cols[k] = column(ec.columns[k]);
    entities.push_back(std::move(r));
  }

  std::vector<detail::RawRow> rows;
  std::optional<double> origin;
  for (++i; i < all.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (detail::trim(all[i]).empty()) continue;
    const auto fields = detail::split(all[i], map.delimiter);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": expected " +
                                                std::to_string(header.size()) + " fields");
    }
    auto number = [&](std::size_t col) {
      auto v = detail::parse_double(unquote(fields[col]));
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": bad number '" +
                                                  std::string(fields[col]) + "'");
      return *v;
    };
    double t = number(time_col) * map.time_scale;
    if (map.rebase_time) {
      if (!origin) origin = t;
      t -= *origin;
    }
    if (t < 0.0) throw Error(ErrorCode::malformed_row, "line " + std::to_string(lineno) + ": negative time");

    for (const auto& e : entities) {
      const bool blank = std::all_of(e.cols.begin(), e.cols.end(),
                                     [&](std::size_t c) { return unquote(fields[c]).empty(); });
      if (blank) continue;
      double v[7];
      for (std::size_t k = 0; k < 7; ++k) v[k] = number(e.cols[k]);
      Vec3 p{v[0] * map.position_scale, v[1] * map.position_scale, v[2] * map.position_scale};
      Quat q{v[3], v[4], v[5], v[6]};
      if (map.left_handed) {
        // Mirror through the xy-plane: z flips, rotation axes in x and y flip.
        p.z = -p.z;
        q.x = -q.x;
        q.y = -q.y;
      }
      rows.push_back({e.id, e.kind, Pose{t, p, detail::admit_quaternion(q, lineno)}, lineno});
    }
  }
  if (rows.empty()) throw Error(ErrorCode::empty_input, "no data rows");

  MotionRecording rec;
  rec.meta.source = map.source;
  rec.meta.rate_hz = map.rate_hz;
  rec.tracks = detail::group_rows(rows);
  return rec;
}

}  // namespace movi
