#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "sfcd/config.hpp"
#include "sfcd/diff_image.hpp"
#include "sfcd/errors.hpp"
#include "sfcd/format.hpp"
#include "sfcd/image_io.hpp"
#include "sfcd/sfcm.hpp"
#include "sfcd/synth.hpp"

#ifndef SFCD_VERSION
#define SFCD_VERSION "unknown"
#endif

namespace sfcd::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Records one invocation; the file is written exactly once by finish().
class RunManifest {
 public:
  explicit RunManifest(std::string command)
      : start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "sfcd";
    doc_["version"] = SFCD_VERSION;
    doc_["command"] = std::move(command);
    doc_["inputs"] = json::object();
    doc_["config"] = nullptr;
    doc_["outputs"] = json::array();
  }

  void set_path(fs::path path) { path_ = std::move(path); }
  void input(const std::string& role, const fs::path& path) { doc_["inputs"][role] = path.string(); }
  void parameter(const std::string& key, json value) { doc_["parameters"][key] = std::move(value); }
  void output(const fs::path& path) {
    outputs_.push_back(path);
    doc_["outputs"].push_back(path.string());
  }
  const std::vector<fs::path>& outputs() const { return outputs_; }

  void config(const SfcmConfig& cfg) {
    json resolved = json::object();
    const std::string text = serialize_config(cfg);
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto eol = text.find('\n', pos);
      const std::string line = text.substr(pos, eol - pos);
      const auto eq = line.find(" = ");
      resolved[line.substr(0, eq)] = line.substr(eq + 3);
      pos = eol + 1;
    }
    doc_["config"] = std::move(resolved);
  }

  void finish(int exit_code, const std::string& message, std::ostream& err) {
    if (written_ || path_.empty()) return;
    written_ = true;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    doc_["output_directory"] = path_.parent_path().string();
    doc_["status"] = exit_code == kOk ? "ok" : "error";
    doc_["exit_code"] = exit_code;
    doc_["message"] = message;
    doc_["duration_seconds"] = elapsed.count();
    std::error_code ec;
    if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path(), ec);
    std::ofstream file(path_);
    if (file) file << doc_.dump(2) << '\n';
    if (!file) err << "warning: could not write manifest " << path_ << '\n';
  }

 private:
  json doc_;
  fs::path path_;
  std::vector<fs::path> outputs_;
  std::chrono::steady_clock::time_point start_;
  bool written_ = false;
};

fs::path sidecar_manifest(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    std::string token = text.substr(pos, comma - pos);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    if (!token.empty()) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw InputError("invalid sweep value '" + token + "'");
      }
      values.push_back(v);
    }
    pos = comma + 1;
  }
  if (values.empty()) throw InputError("empty sweep");
  return values;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError(path.string() + ": cannot open file for writing");
  body(file);
  if (!file) throw InputError(path.string() + ": write failed");
}

// Exit status 0 is only reported when every declared output reads back.
void verify_outputs(const std::vector<fs::path>& outputs) {
  for (const auto& path : outputs) {
    const auto ext = path.extension().string();
    if (ext == ".png" || ext == ".pgm") {
      load_image(path);
    } else {
      std::ifstream in(path);
      std::string header;
      if (!in || !std::getline(in, header) || header.empty()) {
        throw InputError(path.string() + ": output missing or empty");
      }
    }
  }
}

int guarded(RunManifest& manifest, std::ostream& err, const std::function<int()>& body) {
  int code = kOk;
  std::string message;
  try {
    code = body();
    if (code == kOk) verify_outputs(manifest.outputs());
  } catch (const NumericalError& e) {
    code = kNumericalError;
    message = e.what();
  } catch (const InputError& e) {
    code = kInputError;
    message = e.what();
  } catch (const std::exception& e) {
    code = kInputError;
    message = e.what();
  }
  if (!message.empty()) err << "error: " << message << '\n';
  manifest.finish(code, message, err);
  return code;
}

// ------------------------------------------------------------ commands

struct DiffArgs {
  std::string before, after, out;
};

int cmd_diff(const DiffArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest("diff");
  manifest.set_path(sidecar_manifest(a.out));
  manifest.input("before", a.before);
  manifest.input("after", a.after);
  return guarded(manifest, err, [&] {
    const Image diff = difference_image(load_image(a.before), load_image(a.after));
    save_image(quantize(diff, 256), a.out, 8);
    manifest.output(a.out);
    const ImageStats s = image_stats(diff);
    out << "min=" << format_number(s.min) << " mean=" << format_number(s.mean)
        << " max=" << format_number(s.max) << '\n';
    return kOk;
  });
}

struct ClusterArgs {
  std::string diff, before, after, config, out;
  std::optional<int> quantize;
  std::optional<std::uint64_t> seed;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest("cluster");
  const fs::path dir = a.out;
  manifest.set_path(dir / "manifest.json");
  if (!a.diff.empty()) manifest.input("diff", a.diff);
  if (!a.before.empty()) manifest.input("before", a.before);
  if (!a.after.empty()) manifest.input("after", a.after);
  manifest.input("config", a.config);
  if (a.quantize) manifest.parameter("quantize", *a.quantize);

  return guarded(manifest, err, [&]() -> int {
    const bool pair = !a.before.empty() || !a.after.empty();
    if (pair == !a.diff.empty()) throw InputError("give either --diff or both --before and --after");
    if (pair && (a.before.empty() || a.after.empty())) {
      throw InputError("--before and --after must be given together");
    }
    if (a.quantize && !pair) throw InputError("--quantize applies only to --before/--after input");

    SfcmConfig cfg = load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    manifest.config(cfg);

    Image image = pair ? difference_image(load_image(a.before), load_image(a.after)) : load_image(a.diff);
    if (a.quantize) image = quantize(image, *a.quantize);

    const ChangeResult result = run_sfcm(image, cfg);

    fs::create_directories(dir);
    std::vector<double> change(result.change_map.size());
    std::transform(result.change_map.data().begin(), result.change_map.data().end(), change.begin(),
                   [](double v) { return v * 255.0; });
    save_image(Image(image.width(), image.height(), std::move(change)), dir / "change_map.png", 8);
    manifest.output(dir / "change_map.png");

    std::vector<double> labels(result.labels.labels().begin(), result.labels.labels().end());
    save_image(Image(image.width(), image.height(), std::move(labels)), dir / "labels.pgm",
               cfg.clusters <= 256 ? 8 : 16);
    manifest.output(dir / "labels.pgm");

    write_text(dir / "trace.csv", [&](std::ostream& s) { write_trace_csv(s, result.trace); });
    manifest.output(dir / "trace.csv");

    out << "iterations: " << result.iterations << '\n' << "centers:";
    for (double v : result.centers.values()) out << ' ' << format_number(v);
    out << '\n' << "changed_pixels: " << result.changed_count() << '\n';
    return kOk;
  });
}

struct SweepArgs {
  std::string diff, config, axis, values, out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest("sweep");
  manifest.set_path(sidecar_manifest(a.out));
  manifest.input("diff", a.diff);
  manifest.input("config", a.config);
  manifest.parameter("axis", a.axis);
  manifest.parameter("values", a.values);
  return guarded(manifest, err, [&] {
    if (a.axis != "pq" && a.axis != "m") throw InputError("--axis must be pq or m");
    const auto values = parse_values(a.values);
    const SfcmConfig cfg = load_config(a.config);
    manifest.config(cfg);
    const Image image = load_image(a.diff);
    const auto points = a.axis == "pq" ? sweep_pq(image, cfg, values) : sweep_m(image, cfg, values);
    write_text(a.out, [&](std::ostream& s) { write_sweep_csv(s, points); });
    manifest.output(a.out);
    write_sweep_csv(out, points);
    return kOk;
  });
}

struct BenchArgs {
  std::string config, out;
  std::size_t seeds = 1;
  std::optional<std::uint64_t> seed;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest("bench");
  manifest.set_path(sidecar_manifest(a.out));
  manifest.input("config", a.config);
  manifest.parameter("seeds", a.seeds);
  return guarded(manifest, err, [&]() -> int {
    if (a.seeds < 1) throw InputError("--seeds must be >= 1");
    SfcmConfig cfg = load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    manifest.config(cfg);

    const auto rows = run_bench(cfg, a.seeds, cfg.seed, {1, 4, 16});
    write_text(a.out, [&](std::ostream& s) { write_bench_csv(s, rows); });
    manifest.output(a.out);

    // Mean OA per (looks, variant), in first-seen order.
    std::vector<std::pair<std::string, std::pair<double, int>>> summary;
    std::size_t failures = 0;
    for (const auto& r : rows) {
      if (r.failure) {
        ++failures;
        err << "seed " << r.seed << " looks " << r.looks << ' ' << to_string(r.variant)
            << ": " << *r.failure << '\n';
        continue;
      }
      const std::string key = "looks=" + std::to_string(r.looks) + " " + std::string(to_string(r.variant));
      auto it = std::find_if(summary.begin(), summary.end(), [&](const auto& e) { return e.first == key; });
      if (it == summary.end()) it = summary.insert(summary.end(), {key, {0.0, 0}});
      it->second.first += r.metrics.overall_accuracy;
      it->second.second += 1;
    }
    for (const auto& [key, acc] : summary) {
      out << key << " mean_oa=" << format_number(acc.first / acc.second) << '\n';
    }
    if (failures > 0) {
      throw NumericalError(std::to_string(failures) + " benchmark run(s) failed; rows marked nan");
    }
    return kOk;
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial fuzzy c-means change detection"};
  app.name("sfcd");
  app.require_subcommand(1);
  app.set_version_flag("--version", SFCD_VERSION);

  DiffArgs diff;
  auto* diff_cmd = app.add_subcommand("diff", "Normalized difference image of two acquisitions");
  diff_cmd->add_option("--before", diff.before, "Earlier acquisition (PGM/PNG)")->required();
  diff_cmd->add_option("--after", diff.after, "Later acquisition (PGM/PNG)")->required();
  diff_cmd->add_option("--out", diff.out, "Output 8-bit difference image (.png/.pgm)")->required();

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster a difference image into a change map");
  cluster_cmd->add_option("--diff", cluster.diff, "Difference image to cluster");
  cluster_cmd->add_option("--before", cluster.before, "Earlier acquisition (diffed internally)");
  cluster_cmd->add_option("--after", cluster.after, "Later acquisition (diffed internally)");
  cluster_cmd->add_option("--config", cluster.config, "key=value config file")->required();
  cluster_cmd->add_option("--out", cluster.out, "Output directory")->required();
  cluster_cmd->add_option("--quantize", cluster.quantize, "Quantize the pair's difference to N levels")
      ->check(CLI::Range(2, 65536));
  cluster_cmd->add_option("--seed", cluster.seed, "Override the config seed");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Changed-pixel count over a parameter sweep");
  sweep_cmd->add_option("--diff", sweep.diff, "Difference image")->required();
  sweep_cmd->add_option("--config", sweep.config, "key=value config file")->required();
  sweep_cmd->add_option("--axis", sweep.axis, "pq (p/q ratio, q fixed) or m")->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated sweep values")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output CSV")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Score FCM variants on the synthetic speckle phantom");
  bench_cmd->add_option("--config", bench.config, "key=value config file")->required();
  bench_cmd->add_option("--out", bench.out, "Output CSV")->required();
  bench_cmd->add_option("--seeds", bench.seeds, "Number of speckle seeds")->required();
  bench_cmd->add_option("--seed", bench.seed, "First seed (defaults to the config seed)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << SFCD_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  if (diff_cmd->parsed()) return cmd_diff(diff, out, err);
  if (cluster_cmd->parsed()) return cmd_cluster(cluster, out, err);
  if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
  return cmd_bench(bench, out, err);
}

}  // namespace sfcd::cli
