// movi: ingest recordings, generate scenarios, compile scenes, serve sessions.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "movi/column_map.hpp"
#include "movi/http_service.hpp"
#include "movi/pipeline.hpp"
#include "movi/recording.hpp"
#include "movi/scenario.hpp"
#include "movi/session_store.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw DataError("cannot write '" + path + "'");
}

void report_warnings(const std::vector<movi::Issue>& issues) {
  for (const auto& i : issues)
    if (i.severity == movi::Severity::warning)
      std::cerr << "warning: " << i.code << " " << i.entity_id
                << (i.sample ? " sample " + std::to_string(*i.sample) : "") << ": " << i.message << "\n";
}

movi::SessionService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"movi: hand/object motion recordings to layered 3D scenes"};
  app.require_subcommand(1, 1);

  struct {
    std::string in, map, out;
  } ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a recording (canonical or mapped foreign CSV) to canonical CSV");
  ingest_cmd->add_option("in", ingest.in, "Input CSV")->required();
  ingest_cmd->add_option("--map", ingest.map, "Column-map config for foreign CSVs");
  ingest_cmd->add_option("--out", ingest.out, "Output path (stdout when omitted)");

  struct {
    std::string kind, out;
    double rate = 90.0;
    std::optional<double> duration;
    std::uint64_t seed = 0;
    double noise = 0.0;
  } gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic scenario recording");
  gen_cmd->add_option("kind", gen.kind, "pickup | toss | draw")
      ->required()
      ->check(CLI::IsMember({"pickup", "toss", "draw"}));
  gen_cmd->add_option("--rate", gen.rate, "Sample rate in Hz")->capture_default_str();
  gen_cmd->add_option("--duration", gen.duration, "Clip length in seconds (per-kind default)");
  gen_cmd->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Position noise sigma in meters")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output path (stdout when omitted)");

  struct {
    std::string in, out, density = "1.0", smooth = "1", layers = "gm,avatar,fine";
    bool fine_objects = false;
  } scene;
  auto* scene_cmd = app.add_subcommand("scene", "Compile a recording into a scene document");
  scene_cmd->add_option("in", scene.in, "Canonical recording CSV")->required();
  scene_cmd->add_option("--density", scene.density, "Fraction of samples kept for the fine layer, (0, 1]")
      ->capture_default_str();
  scene_cmd->add_option("--smooth", scene.smooth, "Odd moving-average window")->capture_default_str();
  scene_cmd->add_option("--layers", scene.layers, "Comma list of gm, avatar, fine")->capture_default_str();
  scene_cmd->add_flag("--fine-objects", scene.fine_objects, "Also draw fine glyphs for objects");
  scene_cmd->add_option("--out", scene.out, "Output path (stdout when omitted)");

  struct {
    int port = 8080;
    std::string store = "./movi-store", host = "0.0.0.0", viewer = "./viewer/dist";
  } serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session HTTP service");
  serve_cmd->add_option("--port", serve.port, "Listen port")->capture_default_str();
  serve_cmd->add_option("--store", serve.store, "Session store directory")->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--viewer", serve.viewer, "Viewer bundle served at / when present")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return kUsageError;
  }

  try {
    if (*ingest_cmd) {
      const std::string bytes = read_input(ingest.in);
      movi::MotionRecording rec;
      try {
        if (ingest.map.empty()) {
          rec = movi::parse_recording(bytes);
        } else {
          rec = movi::parse_recording(bytes, movi::parse_column_map(read_input(ingest.map)));
        }
      } catch (const movi::Error& e) {
        throw DataError("'" + ingest.in + "': " + e.what());
      }
      auto result = movi::validate(std::move(rec));
      report_warnings(result.issues);
      if (!result.ok()) throw movi::InvalidRecording(result.issues);
      write_output(ingest.out, movi::serialize_recording(result.recording));
    } else if (*gen_cmd) {
      auto spec = movi::ScenarioSpec::with_defaults(*movi::parse_scenario_kind(gen.kind));
      spec.rate = gen.rate;
      if (gen.duration) spec.duration = *gen.duration;
      spec.seed = gen.seed;
      spec.noise_sigma = gen.noise;
      movi::MotionRecording rec;
      try {
        rec = movi::generate(spec);
      } catch (const movi::Error& e) {
        throw UsageError(e.what());
      }
      write_output(gen.out, movi::serialize_recording(rec));
    } else if (*scene_cmd) {
      movi::SceneParams params;
      try {
        params.density = movi::parse_density(scene.density);
        params.smooth = movi::parse_smooth(scene.smooth);
        params.layers = movi::parse_layers(scene.layers);
        params.fine_objects = scene.fine_objects;
      } catch (const movi::Error& e) {
        throw UsageError(e.what());
      }
      const std::string bytes = read_input(scene.in);
      movi::MotionRecording rec;
      try {
        rec = movi::parse_recording(bytes);
      } catch (const movi::Error& e) {
        throw DataError("'" + scene.in + "': " + e.what());
      }
      write_output(scene.out, movi::compile_scene_bytes(rec, params));
    } else if (*serve_cmd) {
      std::unique_ptr<movi::SessionStore> store;
      try {
        store = std::make_unique<movi::SessionStore>(serve.store);
      } catch (const movi::Error& e) {
        throw DataError(e.what());
      }
      movi::SessionService service(*store, serve.viewer);
      const int port = service.bind(serve.host, serve.port);
      if (port < 0) throw DataError("cannot bind " + serve.host + ":" + std::to_string(serve.port));
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "movi " << movi::kVersion << " serving " << store->root().string() << " on http://"
                << serve.host << ":" << port << "\n";
      service.listen();
      g_service = nullptr;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const movi::InvalidRecording& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& i : e.issues())
      std::cerr << "  " << (i.severity == movi::Severity::violation ? "violation" : "warning") << ": " << i.code
                << " " << i.entity_id << ": " << i.message << "\n";
    return kDataError;
  } catch (const movi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
