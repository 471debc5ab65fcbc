#pragma once

// recording -> scene compilation shared by the CLI `scene` command and the
// HTTP scene endpoint, so both produce byte-identical documents.

#include <string>
#include <string_view>
#include <vector>

#include "movi/detail/text.hpp"
#include "movi/error.hpp"
#include "movi/kinematics.hpp"
#include "movi/layers.hpp"
#include "movi/recording.hpp"
#include "movi/scene_codec.hpp"

namespace movi {

inline constexpr std::string_view kVersion = "0.1.0";

/// Thrown when a recording fails validation; carries the full report.
class InvalidRecording : public Error {
 public:
  explicit InvalidRecording(std::vector<Issue> issues)
      : Error(ErrorCode::invalid_recording, summarize(issues)), issues_(std::move(issues)) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    for (const auto& i : issues)
      if (i.severity == Severity::violation)
        return i.code + (i.entity_id.empty() ? "" : " in " + i.entity_id) + ": " + i.message;
    return "recording failed validation";
  }

  std::vector<Issue> issues_;
};

/// Validates and returns the corrected recording, or throws InvalidRecording.
inline MotionRecording require_valid(MotionRecording rec) {
  auto result = validate(std::move(rec));
  if (!result.ok()) throw InvalidRecording(std::move(result.issues));
  return std::move(result.recording);
}

inline const LayerSet kAllLayers{LayerName::gm, LayerName::avatar, LayerName::fine};

struct SceneParams {
  DensityFactor density{1.0};
  int smooth = 1;
  LayerSet layers = kAllLayers;
  bool fine_objects = false;
};

inline DensityFactor parse_density(std::string_view s) {
  const auto v = detail::parse_double(detail::trim(s));
  if (!v) throw Error(ErrorCode::bad_density, "density '" + std::string(s) + "' is not a number");
  return DensityFactor(*v);
}

inline int parse_smooth(std::string_view s) {
  s = detail::trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::bad_window, "smooth '" + std::string(s) + "' is not an integer");
  if (v < 1 || v % 2 == 0) throw Error(ErrorCode::bad_window, "smooth must be odd and >= 1");
  return v;
}

/// Comma-separated subset of gm, avatar, fine.
inline LayerSet parse_layers(std::string_view s) {
  LayerSet out;
  for (auto part : detail::split(s, ',')) {
    const auto l = parse_layer_name(detail::trim(part));
    if (!l) throw Error(ErrorCode::bad_staging, "unknown layer '" + std::string(part) + "'");
    out.insert(*l);
  }
  return out;
}

inline bool parse_flag(std::string_view s) {
  s = detail::trim(s);
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no" || s.empty()) return false;
  throw Error(ErrorCode::bad_style, "expected a boolean, got '" + std::string(s) + "'");
}

/// validate -> smooth_positions -> build selected layers (fine layer
/// downsampled by density) -> compose with default staging.
inline SceneDocument compile_scene(const MotionRecording& input, const SceneParams& params = {}) {
  if (params.layers.empty()) throw Error(ErrorCode::bad_staging, "at least one layer is required");
  if (params.smooth < 1 || params.smooth % 2 == 0)
    throw Error(ErrorCode::bad_window, "smooth must be odd and >= 1");
  const MotionRecording rec = require_valid(input);

  std::vector<EntityTrack> tracks;
  tracks.reserve(rec.tracks.size());
  for (const auto& t : rec.tracks) tracks.push_back(smooth_positions(t, params.smooth));

  SceneLayers layers;
  if (params.layers.contains(LayerName::gm)) layers.gm = build_gm_layer(tracks);
  if (params.layers.contains(LayerName::avatar)) layers.avatar = build_avatar_layer(tracks);
  if (params.layers.contains(LayerName::fine))
    layers.fine = build_fine_layers(tracks, params.density, kDefaultArrowLength, params.fine_objects);

  return compose_scene(rec.meta.source, declare_entities(tracks), std::move(layers));
}

inline std::string compile_scene_bytes(const MotionRecording& rec, const SceneParams& params = {}) {
  return encode_scene(compile_scene(rec, params));
}

}  // namespace movi
