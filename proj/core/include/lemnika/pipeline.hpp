#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lemnika/homlift.hpp"

namespace lemnika {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitAdmissibility = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitSandwich = 4;
inline constexpr int kExitMA = 5;
inline constexpr int kExitUsage = 64;

struct RunConfig {
  std::string model = "builtin:ball";
  std::string measure;  ///< empty: the model's Riesz measure
  double eps = 0.25;
  int k_start = 8;
  int k_max = 256;
  std::vector<int> n_list{6, 12};
  bool atomize = true;
  bool sandwich = true;
  bool ma = true;
  int sandwich_alpha = 25;
  int sandwich_phase = 10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_dir = "lemnika-run";
};

/// Parses a config with exactly the RunConfig keys (all optional). Unknown
/// keys and wrong types throw InvalidArgument.
RunConfig config_from_json(const std::string& text);
std::string to_json(const RunConfig& c);

struct StageResult {
  std::string name;
  bool ok = false;
  int exit_code = kExitOk;
  std::string message;
};

struct ManifestEntry {
  std::string path;  ///< relative to the run directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct PipelineResult {
  int exit_code = kExitOk;
  std::vector<StageResult> stages;
  std::vector<ManifestEntry> artifacts;
};

/// atomize -> lift -> sandwich -> ma -> reports, one directory per run,
/// manifest.json last. The first failing stage sets the exit code; later
/// stages that depend on it are skipped. For the bidisk the exact pair
/// (z^n, w^n) at the largest n replaces the atomized one.
PipelineResult run_pipeline(const RunConfig& config);

/// Writes `content` under dir/name and records it.
ManifestEntry write_artifact(const std::string& dir, const std::string& name,
                             const std::string& content);
std::string manifest_json(const std::vector<ManifestEntry>& entries, const RunConfig& config);
/// Entries of dir/manifest.json whose file is missing or hashes differently.
std::vector<std::string> stale_artifacts(const std::string& dir);

struct RenderConfig {
  enum class Field { VK, Rho, Utilde, Un, Mask };
  enum class Section { FixW, FixZ, Real };
  Field field = Field::VK;
  Section section = Section::FixW;
  cplx fixed = 1.0;  ///< the fixed coordinate for FixW / FixZ
  double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
  int nx = 101, ny = 101;
};

RenderConfig::Field parse_field(const std::string& s);
RenderConfig::Section parse_section(const std::string& s);

/// CSV with columns x,y,re_z,im_z,re_w,im_w,value. FixW varies z = x + iy,
/// FixZ varies w = x + iy, Real puts z = x, w = y. Pair-based fields need
/// `pq`. Mask is 1 where |P| <= 1 and |Q| <= 1. Throws WindowEmpty.
std::string render_grid(const CircledSetModel& m, const HomogeneousPair* pq, const RenderConfig& rc);

}  // namespace lemnika
