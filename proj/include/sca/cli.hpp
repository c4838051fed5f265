#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sca/curvature.hpp"
#include "sca/eval.hpp"

namespace sca {

/// Exit codes shared by every verb.
enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitInput = 2 };

struct RunConfig {
  DetectorParams sca = DetectorParams::sca();
  DetectorParams cpda = DetectorParams::cpda();
  std::vector<std::string> detectors{"sca", "cpda"};
  double matching_radius = 3.0;
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};
  unsigned threads = 0;
  /// Families used by transform and by in-memory evaluation.
  std::vector<Family> families = all_families();

  /// Throws ParameterError on an invalid detector or value.
  void validate() const;
  std::vector<NamedDetector> named_detectors() const;
};

/// Overlays a JSON document on `cfg`. Unknown keys are rejected so typos do
/// not pass silently. Throws ParameterError.
void apply_config_json(RunConfig& cfg, const std::string& json_text);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// "a:b:step" (inclusive) or "a,b,c". Throws ParameterError on an empty or
/// malformed range.
std::vector<double> parse_range(const std::string& text);

/// Synthetic corpus as base images; `smoke` keeps one polygon, one star and
/// one blob.
std::vector<BaseImage> synth_bases(std::uint64_t seed, bool smoke = false);
/// One spec per family (the middle of each grid) for every base.
std::vector<WorkItem> smoke_items(const std::vector<BaseImage>& bases, std::uint64_t seed);

/// Writes the report files selected by `formats` into `dir`:
/// items.csv, aggregates.csv and plot_<family>.csv for csv; summary.json for
/// json; diagnostics.csv whenever an item failed.
void write_report(const EvalReport& report, const std::filesystem::path& dir, const std::vector<std::string>& formats);

/// Entry point behind the `sca` executable; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sca
