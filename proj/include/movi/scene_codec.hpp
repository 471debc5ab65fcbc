#pragma once

// Canonical text encoding of SceneDocument: JSON with lexicographically
// sorted keys, shortest round-trip decimals and no insignificant whitespace.
// Two equal documents always encode to the same bytes.

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "movi/detail/text.hpp"
#include "movi/error.hpp"
#include "movi/layers.hpp"

namespace movi {

namespace detail {

using json = nlohmann::json;

inline void write_canonical_string(std::string& out, std::string_view s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

/// nlohmann objects are std::map-backed, so iteration is already in sorted
/// key order; only the number and string formatting need pinning down.
inline void write_canonical(std::string& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        write_canonical_string(out, key);
        out += ':';
        write_canonical(out, value);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        write_canonical(out, v);
      }
      out += ']';
      break;
    }
    case json::value_t::string: write_canonical_string(out, j.get_ref<const std::string&>()); break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw Error(ErrorCode::decode_error, "non-finite number in scene");
      append_double(out, v);
      break;
    }
    default: out += "null"; break;
  }
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline json to_json(const Quat& q) { return json::array({q.x, q.y, q.z, q.w}); }
inline json to_json(const Rgba& c) { return json::array({c.r, c.g, c.b, c.a}); }
inline json to_json(const Pose& p) {
  return {{"t", p.t}, {"position", to_json(p.position)}, {"orientation", to_json(p.orientation)}};
}

[[noreturn]] inline void decode_fail(const std::string& what) {
  throw Error(ErrorCode::decode_error, what);
}

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) decode_fail(std::string("expected object around '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) decode_fail(std::string("missing field '") + key + "'");
  return *it;
}

inline double as_number(const json& j, const char* what) {
  if (!j.is_number()) decode_fail(std::string("expected number for '") + what + "'");
  return j.get<double>();
}

inline std::string as_string(const json& j, const char* what) {
  if (!j.is_string()) decode_fail(std::string("expected string for '") + what + "'");
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const char* what, std::size_t size = 0) {
  if (!j.is_array() || (size != 0 && j.size() != size))
    decode_fail(std::string("expected array for '") + what + "'");
  return j;
}

inline Vec3 vec3_from(const json& j, const char* what) {
  as_array(j, what, 3);
  return {as_number(j[0], what), as_number(j[1], what), as_number(j[2], what)};
}

inline Quat quat_from(const json& j, const char* what) {
  as_array(j, what, 4);
  return {as_number(j[0], what), as_number(j[1], what), as_number(j[2], what), as_number(j[3], what)};
}

inline Rgba rgba_from(const json& j, const char* what) {
  as_array(j, what, 4);
  return {as_number(j[0], what), as_number(j[1], what), as_number(j[2], what), as_number(j[3], what)};
}

inline Pose pose_from(const json& j) {
  return {as_number(field(j, "t"), "t"), vec3_from(field(j, "position"), "position"),
          quat_from(field(j, "orientation"), "orientation")};
}

}  // namespace detail

inline nlohmann::json scene_to_json(const SceneDocument& scene) {
  using detail::json;
  using detail::to_json;

  json entities = json::array();
  for (const auto& e : scene.entities)
    entities.push_back({{"id", e.id}, {"kind", to_string(e.kind)}, {"color", to_json(e.color)}});

  json layers = json::object();
  if (scene.layers.gm) {
    json gm = json::array();
    for (const auto& line : *scene.layers.gm) {
      json vertices = json::array();
      for (const auto& v : line.vertices) vertices.push_back({{"position", to_json(v.position)}, {"t", v.t}});
      gm.push_back({{"entity_id", line.entity_id},
                    {"vertices", std::move(vertices)},
                    {"color", to_json(line.color)},
                    {"opacity", line.opacity}});
    }
    layers["gm"] = std::move(gm);
  }
  if (scene.layers.avatar) {
    json avatar = json::array();
    for (const auto& track : *scene.layers.avatar) {
      json keyframes = json::array();
      for (const auto& k : track.keyframes) keyframes.push_back(to_json(k));
      avatar.push_back({{"entity_id", track.entity_id},
                        {"model_id", to_string(track.model_id)},
                        {"keyframes", std::move(keyframes)}});
    }
    layers["avatar"] = std::move(avatar);
  }
  if (scene.layers.fine) {
    json fine = json::object();
    for (const auto& [id, glyphs] : *scene.layers.fine) {
      json list = json::array();
      for (const auto& g : glyphs)
        list.push_back({{"t", g.t}, {"dot", to_json(g.dot)}, {"arrow", to_json(g.arrow)}, {"arrow_len", g.arrow_len}});
      fine[id] = std::move(list);
    }
    layers["fine"] = std::move(fine);
  }

  json staging = json::array();
  for (const auto& stage : scene.staging) {
    std::vector<std::string> names;
    for (auto l : stage) names.emplace_back(to_string(l));
    std::sort(names.begin(), names.end());
    staging.push_back(names);
  }

  return {{"version", scene.version},
          {"meta",
           {{"source", scene.meta.source},
            {"duration", scene.meta.duration},
            {"convention", scene.meta.convention},
            {"forward_axis", scene.meta.forward_axis}}},
          {"entities", std::move(entities)},
          {"layers", std::move(layers)},
          {"staging", std::move(staging)}};
}

inline std::string encode_scene(const SceneDocument& scene) {
  std::string out;
  detail::write_canonical(out, scene_to_json(scene));
  return out;
}

/// Inverse of encode_scene; also re-checks entity references and staging.
inline SceneDocument decode_scene(std::string_view bytes) {
  using namespace detail;
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::exception& e) {
    decode_fail(e.what());
  }

  SceneDocument doc;
  const json& version = field(root, "version");
  if (!version.is_number_integer()) decode_fail("version must be an integer");
  doc.version = version.get<int>();
  if (doc.version != kSceneVersion) decode_fail("unsupported scene version " + std::to_string(doc.version));

  const json& meta_json = field(root, "meta");
  doc.meta.source = as_string(field(meta_json, "source"), "source");
  doc.meta.duration = as_number(field(meta_json, "duration"), "duration");
  doc.meta.convention = as_string(field(meta_json, "convention"), "convention");
  doc.meta.forward_axis = as_string(field(meta_json, "forward_axis"), "forward_axis");

  std::vector<SceneEntity> entities;
  for (const auto& e : as_array(field(root, "entities"), "entities")) {
    const auto kind = parse_entity_kind(as_string(field(e, "kind"), "kind"));
    if (!kind) decode_fail("bad entity kind");
    entities.push_back({as_string(field(e, "id"), "id"), *kind, rgba_from(field(e, "color"), "color")});
  }

  const json& layers = field(root, "layers");
  if (!layers.is_object()) decode_fail("layers must be an object");
  SceneLayers parsed;
  if (layers.contains("gm")) {
    std::vector<GmPolyline> gm;
    for (const auto& line : as_array(layers["gm"], "gm")) {
      GmPolyline p;
      p.entity_id = as_string(field(line, "entity_id"), "entity_id");
      p.color = rgba_from(field(line, "color"), "color");
      p.opacity = as_number(field(line, "opacity"), "opacity");
      for (const auto& v : as_array(field(line, "vertices"), "vertices"))
        p.vertices.push_back({vec3_from(field(v, "position"), "position"), as_number(field(v, "t"), "t")});
      gm.push_back(std::move(p));
    }
    parsed.gm = std::move(gm);
  }
  if (layers.contains("avatar")) {
    std::vector<AvatarTrack> avatar;
    for (const auto& track : as_array(layers["avatar"], "avatar")) {
      AvatarTrack a;
      a.entity_id = as_string(field(track, "entity_id"), "entity_id");
      const auto model = parse_model_id(as_string(field(track, "model_id"), "model_id"));
      if (!model) decode_fail("bad model_id");
      a.model_id = *model;
      for (const auto& k : as_array(field(track, "keyframes"), "keyframes")) a.keyframes.push_back(pose_from(k));
      avatar.push_back(std::move(a));
    }
    parsed.avatar = std::move(avatar);
  }
  if (layers.contains("fine")) {
    const json& fine = layers["fine"];
    if (!fine.is_object()) decode_fail("fine layer must be an object");
    FineLayer out;
    for (const auto& [id, glyphs] : fine.items()) {
      auto& list = out[id];
      for (const auto& g : as_array(glyphs, "fine")) {
        list.push_back({as_number(field(g, "t"), "t"), vec3_from(field(g, "dot"), "dot"),
                        vec3_from(field(g, "arrow"), "arrow"), as_number(field(g, "arrow_len"), "arrow_len")});
      }
    }
    parsed.fine = std::move(out);
  }
  for (const auto& [key, value] : layers.items())
    if (!parse_layer_name(key)) decode_fail("unknown layer '" + key + "'");

  Staging staging;
  for (const auto& stage : as_array(field(root, "staging"), "staging")) {
    LayerSet set;
    for (const auto& name : as_array(stage, "staging")) {
      const auto l = parse_layer_name(as_string(name, "staging"));
      if (!l || !set.insert(*l).second) decode_fail("bad staging entry");
    }
    staging.push_back(std::move(set));
  }

  const SceneMeta meta = doc.meta;
  try {
    doc = compose_scene(meta.source, std::move(entities), std::move(parsed), std::move(staging));
  } catch (const Error& e) {
    decode_fail(e.what());
  }
  doc.meta = meta;
  return doc;
}

}  // namespace movi
