#pragma once

// The three visualization layers and the scene document that bundles them:
//   gm     - translucent trajectory polylines, one per entity
//   avatar - keyframed rigid-body tracks driving hand/object models
//   fine   - per-sample dot + orientation arrow glyphs (hands by default)

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "movi/error.hpp"
#include "movi/geometry.hpp"
#include "movi/kinematics.hpp"
#include "movi/recording.hpp"

namespace movi {

inline constexpr int kSceneVersion = 1;
inline constexpr std::string_view kForwardAxis = "+z";
inline constexpr double kDefaultOpacity = 0.5;
inline constexpr double kMaxOpacity = 0.99;
inline constexpr double kDefaultArrowLength = 0.05;

struct Rgba {
  double r = 0.0, g = 0.0, b = 0.0, a = 1.0;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

inline constexpr Rgba kHandBlue{0.0, 0.0, 1.0, 1.0};
inline constexpr Rgba kObjectRed{1.0, 0.0, 0.0, 1.0};

struct GmVertex {
  Vec3 position;
  double t = 0.0;
  friend bool operator==(const GmVertex&, const GmVertex&) = default;
};

struct GmPolyline {
  std::string entity_id;
  std::vector<GmVertex> vertices;
  Rgba color;
  double opacity = kDefaultOpacity;
  friend bool operator==(const GmPolyline&, const GmPolyline&) = default;
};

enum class ModelId { hand_left, hand_right, object_sphere, object_pen };

constexpr std::string_view to_string(ModelId m) {
  switch (m) {
    case ModelId::hand_left: return "hand_left";
    case ModelId::hand_right: return "hand_right";
    case ModelId::object_sphere: return "object_sphere";
    case ModelId::object_pen: return "object_pen";
  }
  return "object_sphere";
}

inline std::optional<ModelId> parse_model_id(std::string_view s) {
  for (auto m : {ModelId::hand_left, ModelId::hand_right, ModelId::object_sphere, ModelId::object_pen})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct AvatarTrack {
  std::string entity_id;
  ModelId model_id = ModelId::object_sphere;
  std::vector<Pose> keyframes;
  friend bool operator==(const AvatarTrack&, const AvatarTrack&) = default;
};

struct FineGlyph {
  double t = 0.0;
  Vec3 dot;
  Vec3 arrow;
  double arrow_len = kDefaultArrowLength;
  friend bool operator==(const FineGlyph&, const FineGlyph&) = default;
};

/// Glyph lists keyed by entity id.
using FineLayer = std::map<std::string, std::vector<FineGlyph>>;

enum class LayerName { gm, avatar, fine };

constexpr std::string_view to_string(LayerName l) {
  switch (l) {
    case LayerName::gm: return "gm";
    case LayerName::avatar: return "avatar";
    case LayerName::fine: return "fine";
  }
  return "gm";
}

inline std::optional<LayerName> parse_layer_name(std::string_view s) {
  if (s == "gm") return LayerName::gm;
  if (s == "avatar") return LayerName::avatar;
  if (s == "fine") return LayerName::fine;
  return std::nullopt;
}

using LayerSet = std::set<LayerName>;
/// Ordered presentation stages; each stage shows its layers together.
using Staging = std::vector<LayerSet>;

struct SceneEntity {
  std::string id;
  EntityKind kind = EntityKind::unknown;
  Rgba color;
  friend bool operator==(const SceneEntity&, const SceneEntity&) = default;
};

struct SceneMeta {
  std::string source;
  double duration = 0.0;
  std::string convention{kConvention};
  std::string forward_axis{kForwardAxis};
  friend bool operator==(const SceneMeta&, const SceneMeta&) = default;
};

struct SceneLayers {
  std::optional<std::vector<GmPolyline>> gm;
  std::optional<std::vector<AvatarTrack>> avatar;
  std::optional<FineLayer> fine;

  LayerSet present() const {
    LayerSet s;
    if (gm) s.insert(LayerName::gm);
    if (avatar) s.insert(LayerName::avatar);
    if (fine) s.insert(LayerName::fine);
    return s;
  }

  friend bool operator==(const SceneLayers&, const SceneLayers&) = default;
};

struct SceneDocument {
  int version = kSceneVersion;
  SceneMeta meta;
  std::vector<SceneEntity> entities;
  SceneLayers layers;
  Staging staging;
  friend bool operator==(const SceneDocument&, const SceneDocument&) = default;
};

struct GmStyle {
  std::optional<Rgba> hand_color;
  std::optional<Rgba> object_color;
  std::optional<double> opacity;
};

inline Rgba entity_color(EntityKind kind, const GmStyle& style = {}) {
  Rgba c = kind == EntityKind::hand ? style.hand_color.value_or(kHandBlue)
                                    : style.object_color.value_or(kObjectRed);
  c.a = 1.0;
  return c;
}

inline void require_layer_samples(const EntityTrack& track) {
  if (track.samples.size() < 2)
    throw Error(ErrorCode::too_few_samples,
                "layer building needs at least 2 samples in " + track.entity_id);
}

/// One translucent polyline per track. Opacity overrides >= 1 are clamped to
/// 0.99 and reported through `warnings` when given.
inline std::vector<GmPolyline> build_gm_layer(std::span<const EntityTrack> tracks,
                                              const GmStyle& style = {},
                                              std::vector<std::string>* warnings = nullptr) {
  double opacity = style.opacity.value_or(kDefaultOpacity);
  if (!(opacity > 0.0) || std::isnan(opacity))
    throw Error(ErrorCode::bad_style, "opacity must be positive");
  if (opacity > kMaxOpacity) {
    if (warnings)
      warnings->push_back("opacity " + detail::format_double(opacity) +
                          " clamped to 0.99 to keep trajectories translucent");
    opacity = kMaxOpacity;
  }

  std::vector<GmPolyline> out;
  out.reserve(tracks.size());
  for (const auto& track : tracks) {
    require_layer_samples(track);
    GmPolyline line{track.entity_id, {}, entity_color(track.kind, style), opacity};
    line.color.a = opacity;
    line.vertices.reserve(track.samples.size());
    for (const auto& s : track.samples) line.vertices.push_back({s.position, s.t});
    out.push_back(std::move(line));
  }
  return out;
}

/// Pens, pencils, markers and brushes get the pen model; every other object
/// is drawn as a sphere.
inline ModelId model_for(const EntityTrack& track) {
  const auto implied = kind_for_entity_id(track.entity_id);
  if (track.kind == EntityKind::hand && implied == EntityKind::hand)
    return track.entity_id == "left_hand" ? ModelId::hand_left : ModelId::hand_right;
  if (track.kind == EntityKind::object && implied == EntityKind::object) {
    const std::string_view name = std::string_view(track.entity_id).substr(7);
    for (std::string_view tool : {"pen", "pencil", "marker", "brush", "stylus"})
      if (name == tool) return ModelId::object_pen;
    return ModelId::object_sphere;
  }
  throw Error(ErrorCode::unknown_entity_kind,
              "entity " + track.entity_id + " has kind " + std::string(to_string(track.kind)));
}

inline std::vector<AvatarTrack> build_avatar_layer(std::span<const EntityTrack> tracks) {
  std::vector<AvatarTrack> out;
  out.reserve(tracks.size());
  for (const auto& track : tracks) {
    const ModelId model = model_for(track);
    require_layer_samples(track);
    out.push_back({track.entity_id, model, track.samples});
  }
  return out;
}

/// Dot + forward arrow for each sample retained by downsample(track, d).
inline std::vector<FineGlyph> build_fine_layer(const EntityTrack& track, DensityFactor d,
                                               double arrow_len = kDefaultArrowLength) {
  require_layer_samples(track);
  if (!(arrow_len > 0.0) || !std::isfinite(arrow_len))
    throw Error(ErrorCode::bad_style, "arrow_len must be positive");
  const EntityTrack kept = downsample(track, d);
  std::vector<FineGlyph> out;
  out.reserve(kept.samples.size());
  for (const auto& s : kept.samples)
    out.push_back({s.t, s.position, rotate_forward(s.orientation), arrow_len});
  return out;
}

/// Fine layer over many tracks; objects are skipped unless include_objects.
inline FineLayer build_fine_layers(std::span<const EntityTrack> tracks, DensityFactor d,
                                   double arrow_len = kDefaultArrowLength,
                                   bool include_objects = false) {
  FineLayer out;
  for (const auto& track : tracks) {
    if (track.kind != EntityKind::hand && !include_objects) continue;
    out[track.entity_id] = build_fine_layer(track, d, arrow_len);
  }
  return out;
}

inline std::vector<SceneEntity> declare_entities(std::span<const EntityTrack> tracks,
                                                 const GmStyle& style = {}) {
  std::vector<SceneEntity> out;
  for (const auto& t : tracks) out.push_back({t.entity_id, t.kind, entity_color(t.kind, style)});
  return out;
}

/// gm and avatar together first, fine afterwards; absent layers drop out.
inline Staging default_staging(const LayerSet& present) {
  Staging staging;
  LayerSet first;
  for (auto l : {LayerName::gm, LayerName::avatar})
    if (present.contains(l)) first.insert(l);
  if (!first.empty()) staging.push_back(first);
  if (present.contains(LayerName::fine)) staging.push_back({LayerName::fine});
  return staging;
}

/// Stages must be non-empty, pairwise disjoint, and cover exactly `present`.
inline void check_staging(const Staging& staging, const LayerSet& present) {
  LayerSet covered;
  for (const auto& stage : staging) {
    if (stage.empty()) throw Error(ErrorCode::bad_staging, "empty stage");
    for (auto l : stage) {
      if (!covered.insert(l).second)
        throw Error(ErrorCode::bad_staging, "layer " + std::string(to_string(l)) + " staged twice");
    }
  }
  if (covered != present) throw Error(ErrorCode::bad_staging, "staging does not cover exactly the present layers");
  if (present.size() == 3) {
    auto stage_of = [&](LayerName l) {
      return std::find_if(staging.begin(), staging.end(), [&](const LayerSet& s) { return s.contains(l); }) -
             staging.begin();
    };
    const auto fine = stage_of(LayerName::fine);
    if (fine <= stage_of(LayerName::gm) || fine <= stage_of(LayerName::avatar))
      throw Error(ErrorCode::bad_staging, "fine layer must be staged after gm and avatar");
  }
}

namespace detail {

inline void widen(double& lo, double& hi, double t) {
  lo = std::min(lo, t);
  hi = std::max(hi, t);
}

}  // namespace detail

/// Checks entity consistency across layers, computes duration from the
/// layer contents and settles the staging order.
inline SceneDocument compose_scene(std::string source, std::vector<SceneEntity> entities,
                                   SceneLayers layers, std::optional<Staging> staging = std::nullopt) {
  std::set<std::string> declared;
  for (const auto& e : entities) {
    if (!declared.insert(e.id).second)
      throw Error(ErrorCode::inconsistent_entities, "entity " + e.id + " declared twice");
  }
  auto require = [&](const std::string& id, std::string_view layer) {
    if (!declared.contains(id))
      throw Error(ErrorCode::inconsistent_entities,
                  std::string(layer) + " layer references undeclared entity " + id);
  };

  double lo = INFINITY, hi = -INFINITY;
  if (layers.gm)
    for (const auto& line : *layers.gm) {
      require(line.entity_id, "gm");
      for (const auto& v : line.vertices) detail::widen(lo, hi, v.t);
    }
  if (layers.avatar)
    for (const auto& track : *layers.avatar) {
      require(track.entity_id, "avatar");
      for (const auto& k : track.keyframes) detail::widen(lo, hi, k.t);
    }
  if (layers.fine)
    for (const auto& [id, glyphs] : *layers.fine) {
      require(id, "fine");
      for (const auto& g : glyphs) detail::widen(lo, hi, g.t);
    }

  const LayerSet present = layers.present();
  Staging stages = staging ? *staging : default_staging(present);
  check_staging(stages, present);

  SceneDocument doc;
  doc.meta.source = std::move(source);
  doc.meta.duration = lo <= hi ? hi - lo : 0.0;
  doc.entities = std::move(entities);
  doc.layers = std::move(layers);
  doc.staging = std::move(stages);
  return doc;
}

}  // namespace movi
