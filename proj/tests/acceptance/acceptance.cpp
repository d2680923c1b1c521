// Acceptance suite. Prints one PASS/FAIL line per criterion; exits non-zero
// if any gating criterion fails. `--criterion N` runs a single one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "helpers.hpp"
#include "naive_sfcm.hpp"
#include "sfcd/diff_image.hpp"
#include "sfcd/errors.hpp"
#include "sfcd/image_io.hpp"
#include "sfcd/sfcm.hpp"
#include "sfcd/synth.hpp"

using namespace sfcd;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime limit
  bool gating;            // tracked criteria report but never fail the run
  std::function<Verdict()> check;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

Image phantom_difference(int looks, std::uint64_t seed) {
  const auto ph = speckle_phantom(standard_phantom(), looks, seed);
  return difference_image(ph.before, ph.after);
}

// ------------------------------------------------------------------ 1

Verdict normalization() {
  std::mt19937_64 rng(2024);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double worst = 0.0;
  int checked = 0, collapsed = 0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t w = 4 + rng() % 29;
    const std::size_t h = 4 + rng() % 29;
    const Image img = testing::random_image(w, h, rng(), 0.0, uni(0.5, 1000.0));
    SfcmConfig cfg;
    cfg.clusters = 2 + static_cast<int>(rng() % 3);
    cfg.m = uni(1.1, 4.0);
    cfg.p = uni(0.0, 3.0);
    cfg.q = uni(0.0, 3.0);
    cfg.window_radius = 1 + static_cast<int>(rng() % 3);
    cfg.spatial_variant = rng() % 2 ? SpatialVariant::neighbor : SpatialVariant::intensity;
    cfg.intensity_levels = 2 + static_cast<int>(rng() % 255);

    try {
    ClusterCenters v = init_centers(img, cfg);
    for (int t = 0; t < 20; ++t) {
      auto u = fcm_membership(img, v, cfg.m);
      worst = std::max(worst, max_row_sum_error(u));
      const auto hf = cfg.spatial_variant == SpatialVariant::neighbor
                          ? spatial_neighbor(u, cfg.window_radius)
                          : spatial_intensity(u, img, cfg.intensity_levels);
      u = apply_spatial(u, hf, cfg.p, cfg.q);
      worst = std::max(worst, max_row_sum_error(u));
      checked += 2;
      const auto up = update_centers(img, u, cfg.m);
      if (up.centers.has_duplicates()) break;
      v = up.centers;
    }
    worst = std::max(worst, max_row_sum_error(run_sfcm(img, cfg).membership));
    } catch (const NumericalError&) {
      ++collapsed;  // a collapsed cluster ends the case; fields checked so far still count
    }
  }
  return {worst <= 1e-9, std::to_string(checked) + " fields, worst row-sum error " + fmt(worst * 1e15, 2) +
                             "e-15, " + std::to_string(collapsed) + " cases ended by collapse"};
}

// ------------------------------------------------------------------ 2, 3

struct OracleCase {
  Image img;
  int c;
  SpatialVariant variant;
};

std::vector<OracleCase> oracle_cases(const std::vector<SpatialVariant>& variants) {
  std::vector<OracleCase> cases;
  for (std::uint64_t n = 0; n < 50; ++n) {
    const Image img = testing::random_image(8, 8, 1000 + n);
    for (int c : {2, 3}) {
      for (auto v : variants) cases.push_back({img, c, v});
    }
  }
  return cases;
}

naive::Variant to_naive(SpatialVariant v) {
  switch (v) {
    case SpatialVariant::none: return naive::Variant::none;
    case SpatialVariant::neighbor: return naive::Variant::neighbor;
    case SpatialVariant::intensity: return naive::Variant::intensity;
  }
  return naive::Variant::none;
}

Verdict oracle_equivalence() {
  double worst_u = 0.0, worst_v = 0.0;
  int iteration_mismatch = 0;
  const auto cases =
      oracle_cases({SpatialVariant::none, SpatialVariant::neighbor, SpatialVariant::intensity});
  for (const auto& k : cases) {
    SfcmConfig cfg;
    cfg.clusters = k.c;
    cfg.spatial_variant = k.variant;
    const auto got = run_sfcm(k.img, cfg);

    naive::Params prm;
    prm.c = k.c;
    prm.variant = to_naive(k.variant);
    const auto grid = testing::to_grid(k.img);
    const auto want = naive::run(grid, prm, naive::kmeans_init(naive::flatten(grid), k.c));

    if (got.iterations != want.iterations) ++iteration_mismatch;
    for (std::size_t j = 0; j < got.membership.pixels(); ++j) {
      for (int i = 0; i < k.c; ++i) worst_u = std::max(worst_u, std::abs(got.membership(j, i) - want.u[i][j]));
    }
    for (int i = 0; i < k.c; ++i) worst_v = std::max(worst_v, std::abs(got.centers[i] - want.v[i]));
  }
  const bool ok = worst_u <= 1e-10 && worst_v <= 1e-10 && iteration_mismatch == 0;
  return {ok, std::to_string(cases.size()) + " runs, max |du| " + fmt(worst_u * 1e15, 2) + "e-15, max |dv| " +
                  fmt(worst_v * 1e15, 2) + "e-15, iteration mismatches " + std::to_string(iteration_mismatch)};
}

Verdict plain_descent() {
  int violations = 0;
  std::size_t steps = 0;
  double worst = 0.0;
  for (const auto& k : oracle_cases({SpatialVariant::none})) {
    SfcmConfig cfg;
    cfg.clusters = k.c;
    cfg.spatial_variant = SpatialVariant::none;
    const auto r = run_sfcm(k.img, cfg);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      const double prev = r.trace[t - 1].objective;
      const double rise = (r.trace[t].objective - prev) / prev;
      worst = std::max(worst, rise);
      if (rise > 1e-9) ++violations;
      ++steps;
    }
  }
  return {violations == 0, std::to_string(steps) + " steps, largest relative rise " + fmt(worst * 1e12, 3) +
                               "e-12, violations " + std::to_string(violations)};
}

// ------------------------------------------------------------------ 4, 5

std::string counts_text(const std::vector<SweepPoint>& pts) {
  std::string s;
  for (const auto& p : pts) s += (s.empty() ? "" : ", ") + fmt(p.value, 1) + "->" + std::to_string(p.changed_count);
  return s;
}

Verdict pq_trend() {
  SfcmConfig cfg;
  cfg.q = 1.0;
  const auto pts = sweep_pq(phantom_difference(4, 0), cfg, {1.0, 2.0, 3.0, 4.0});
  bool ok = true;
  for (std::size_t k = 1; k < pts.size(); ++k) ok = ok && pts[k].changed_count <= pts[k - 1].changed_count;
  return {ok, "p/q counts " + counts_text(pts) + " (need non-increasing)"};
}

Verdict m_insensitivity() {
  const auto pts = sweep_m(phantom_difference(4, 0), SfcmConfig{}, {1.5, 2.0, 2.5, 3.0, 4.0});
  std::vector<double> c;
  for (const auto& p : pts) c.push_back(static_cast<double>(p.changed_count));
  std::vector<double> sorted = c;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  double worst = 0.0;
  for (double v : c) worst = std::max(worst, std::abs(v - median) / median);
  return {worst <= 0.10, "m counts " + counts_text(pts) + ", median " + fmt(median, 0) + ", worst deviation " +
                             fmt(100.0 * worst, 1) + "% (limit 10%)"};
}

// ------------------------------------------------------------------ 6, 8

std::vector<BenchRow> looks4_bench() {
  static const std::vector<BenchRow> rows = run_bench(SfcmConfig{}, 10, 0, {4});
  return rows;
}

const BenchRow& row_of(const std::vector<BenchRow>& rows, std::uint64_t seed, SpatialVariant v) {
  for (const auto& r : rows) {
    if (r.seed == seed && r.variant == v) return r;
  }
  throw std::runtime_error("missing bench row");
}

// Neighbor-variant mean OA recorded on the first benchmark run (libstdc++
// gamma sampler); later runs must reproduce it. The slack covers other
// standard libraries, whose gamma draws differ.
constexpr double kFrozenNeighborMeanOa = 0.95824;
constexpr double kFrozenTolerance = 5e-4;

Verdict speckle_robustness() {
  const auto& rows = looks4_bench();
  int wins = 0;
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto& plain = row_of(rows, s, SpatialVariant::none);
    const auto& nb = row_of(rows, s, SpatialVariant::neighbor);
    if (plain.failure || nb.failure) return {false, "seed " + std::to_string(s) + " failed to converge"};
    wins += nb.metrics.overall_accuracy >= plain.metrics.overall_accuracy;
    mean += nb.metrics.overall_accuracy / 10.0;
  }
  const bool ok = wins >= 9 && mean >= 0.95 && std::abs(mean - kFrozenNeighborMeanOa) <= kFrozenTolerance;
  return {ok, "neighbor >= plain on " + std::to_string(wins) + "/10 seeds, neighbor mean OA " + fmt(mean) +
                  " (floor 0.95, frozen " + fmt(kFrozenNeighborMeanOa) + " +/- " + fmt(kFrozenTolerance) + ")"};
}

Verdict small_region() {
  const auto& rows = looks4_bench();
  double nb = 0.0, in = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    nb += row_of(rows, s, SpatialVariant::neighbor).small_region_recall / 10.0;
    in += row_of(rows, s, SpatialVariant::intensity).small_region_recall / 10.0;
  }
  return {nb >= in, "3x3 block mean recall neighbor " + fmt(nb) + " vs intensity " + fmt(in)};
}

// ------------------------------------------------------------------ 7

Verdict difference_properties() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> val(0.0, 1e4);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  double worst_sym = 0.0, worst_scale = 0.0;
  bool in_range = true, zero_ok = true;
  for (int n = 0; n < 200; ++n) {
    const std::size_t w = 1 + rng() % 24, h = 1 + rng() % 24;
    std::vector<double> a(w * h), b(w * h);
    for (std::size_t j = 0; j < a.size(); ++j) {
      // Sprinkle exact zeros, including 0/0 pixels.
      a[j] = rng() % 7 == 0 ? 0.0 : val(rng);
      b[j] = rng() % 7 == 0 ? 0.0 : val(rng);
      if (rng() % 11 == 0) a[j] = b[j] = 0.0;
    }
    const Image A(w, h, a), B(w, h, b);
    const double k = scale(rng);
    std::vector<double> ka(a), kb(b);
    for (auto& v : ka) v *= k;
    for (auto& v : kb) v *= k;
    const Image d = difference_image(A, B);
    const Image ds = difference_image(B, A);
    const Image dk = difference_image(Image(w, h, ka), Image(w, h, kb));
    for (std::size_t j = 0; j < a.size(); ++j) {
      worst_sym = std::max(worst_sym, std::abs(d[j] - ds[j]));
      worst_scale = std::max(worst_scale, std::abs(d[j] - dk[j]));
      in_range = in_range && d[j] >= 0.0 && d[j] <= 1.0;
      if (a[j] == 0.0 && b[j] == 0.0) zero_ok = zero_ok && d[j] == 0.0;
    }
  }
  const bool ok = worst_sym == 0.0 && worst_scale <= 1e-12 && in_range && zero_ok;
  return {ok, "symmetry error " + fmt(worst_sym, 1) + ", scale error " + fmt(worst_scale * 1e16, 2) +
                  "e-16, codomain " + (in_range ? "ok" : "violated") + ", 0/0 " + (zero_ok ? "-> 0" : "wrong")};
}

// ------------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Manifest with its wall-clock field removed.
std::string manifest_without_clock(const fs::path& p) {
  auto doc = nlohmann::json::parse(slurp(p));
  doc.erase("duration_seconds");
  return doc.dump();
}

Verdict determinism() {
  const fs::path dir = testing::temp_dir("acceptance_determinism");
  const auto ph = speckle_phantom(standard_phantom(), 4, 0);
  save_image(ph.before, dir / "before.pgm", 16);
  save_image(ph.after, dir / "after.pgm", 16);
  std::ofstream(dir / "run.cfg") << "seed = 5\n";

  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const std::vector<std::string> cluster{"cluster", "--before", (dir / "before.pgm").string(), "--after",
                                         (dir / "after.pgm").string(), "--config", (dir / "run.cfg").string(),
                                         "--out", (dir / "cluster").string()};
  const std::vector<std::string> bench{"bench", "--config", (dir / "run.cfg").string(), "--seeds", "2",
                                       "--out", (dir / "bench.csv").string()};

  const std::vector<fs::path> artifacts{dir / "cluster" / "change_map.png", dir / "cluster" / "labels.pgm",
                                        dir / "cluster" / "trace.csv", dir / "bench.csv"};
  const std::vector<fs::path> manifests{dir / "cluster" / "manifest.json", dir / "bench.csv.manifest.json"};

  std::vector<std::string> first;
  int differing = 0, runs_failed = 0;
  for (int pass = 0; pass < 2; ++pass) {
    runs_failed += cli(cluster) != 0;
    runs_failed += cli(bench) != 0;
    std::vector<std::string> now;
    for (const auto& p : artifacts) now.push_back(slurp(p));
    for (const auto& p : manifests) now.push_back(manifest_without_clock(p));
    if (pass == 0) first = now;
    else
      for (std::size_t k = 0; k < now.size(); ++k) differing += now[k] != first[k] || now[k].empty();
  }
  return {differing == 0 && runs_failed == 0,
          std::to_string(artifacts.size() + manifests.size()) + " artifacts compared across 2 runs, " +
              std::to_string(differing) + " differ, " + std::to_string(runs_failed) + " failed invocations"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "membership rows normalized", 10, true, normalization},
      {2, "matches the naive reference", 30, true, oracle_equivalence},
      {3, "plain FCM objective descent", 0, true, plain_descent},
      {4, "changed count non-increasing in p/q", 20, true, pq_trend},
      {5, "changed count insensitive to m", 0, true, m_insensitivity},
      {6, "spatial term beats plain FCM under speckle", 60, true, speckle_robustness},
      {7, "difference image properties", 0, true, difference_properties},
      {8, "small-region recall, neighbor vs intensity (tracked)", 0, false, small_region},
      {9, "CLI artifacts are deterministic", 0, true, determinism},
  };

  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
  else if (argc != 1) {
    std::cerr << "usage: " << argv[0] << " [--criterion N]\n";
    return 2;
  }

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      v.pass = false;
      v.detail += "; over the " + fmt(c.budget_seconds, 0) + " s budget";
    }
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : c.gating ? "FAIL" : "DIVERGES") << "  "
              << c.name << "  [" << v.detail << "] (" << fmt(secs, 2) << " s)" << std::endl;
    if (!v.pass && c.gating) ++failed;
  }
  if (ran == 0) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
