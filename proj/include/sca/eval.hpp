#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sca/detector.hpp"
#include "sca/transforms.hpp"

namespace sca {

struct CornerMatch {
  Point2 original;  // ground-truth mapped into the test frame
  Point2 test;
  double distance = 0.0;
  std::size_t original_index = 0;
  std::size_t test_index = 0;
};

/// Greedy one-to-one matching: pairs within `radius` are taken in ascending
/// (distance, original index, test index) order.
std::vector<CornerMatch> match_points(const std::vector<Point2>& mapped_original, const std::vector<Point2>& test,
                                      double radius = 3.0);

/// Maps the originals of a w x h source through `spec`, then match_points.
std::vector<CornerMatch> match_corners(const CornerSet& original, const CornerSet& test, const TransformSpec& spec,
                                       int source_width, int source_height, double radius = 3.0);

/// 100 * (a/b + a/c) / 2; nullopt when b or c is 0.
std::optional<double> average_repeatability(std::size_t a_p, std::size_t b_q, std::size_t c_r);

/// Root-mean-square match distance; nullopt for no matches.
std::optional<double> localization_error(const std::vector<CornerMatch>& matches);

struct NamedDetector {
  std::string name;
  DetectorParams params;
};

struct BaseImage {
  std::string id;
  GrayImage image;
};

/// One (image, spec) pair. With an empty `path` the test image is produced
/// in memory from the base; otherwise it is read from disk.
struct WorkItem {
  std::string image_id;
  TransformSpec spec;
  std::filesystem::path path;
};

struct ItemResult {
  std::string image_id;
  TransformSpec spec;
  std::string detector;
  std::size_t repeated = 0;         // A_p
  std::size_t original_count = 0;   // B_q
  std::size_t test_count = 0;       // C_r
  std::optional<double> repeatability;
  std::optional<double> loc_error;
  OpCounters counters;              // test-image detection
  std::string error;                // non-empty when the item failed
};

struct Aggregate {
  std::string detector;
  std::string family;  // "all" for the overall row
  std::size_t items = 0;
  std::size_t failed = 0;
  std::size_t undefined_repeatability = 0;
  std::size_t undefined_loc_error = 0;
  std::optional<double> mean_repeatability;
  std::optional<double> mean_loc_error;
  std::size_t test_corner_sum = 0;
};

struct DetectorTotals {
  std::string detector;
  std::size_t original_corner_sum = 0;  // over base images
  std::size_t test_corner_sum = 0;      // over transformed images
  OpCounters counters;                  // base plus transformed detections
};

struct EvalReport {
  std::vector<ItemResult> items;      // image-major, then spec, then detector
  std::vector<Aggregate> families;    // detector-major, family order of all_families()
  std::vector<Aggregate> overall;     // one per detector
  std::vector<DetectorTotals> totals;
  std::vector<std::string> diagnostics;

  bool all_succeeded() const { return diagnostics.empty(); }
  /// SCA over CPDA sqrt count when both named detectors ran.
  std::optional<double> sqrt_ratio(const std::string& numerator = "sca",
                                   const std::string& denominator = "cpda") const;
};

struct ExperimentOptions {
  double radius = 3.0;
  unsigned threads = 0;  // 0 = hardware concurrency
  /// Progress callback (done, total); calls are serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Detects on every base and test image, matches, scores and aggregates.
/// Output is independent of thread count and scheduling.
EvalReport run_experiment(const std::vector<BaseImage>& bases, const std::vector<NamedDetector>& detectors,
                          const std::vector<WorkItem>& items, const ExperimentOptions& options = {});

/// Items for every enumerated spec of `families` over every base, with noise
/// seeds derived from `seed`.
std::vector<WorkItem> generate_items(const std::vector<BaseImage>& bases, const std::vector<Family>& families,
                                     std::uint64_t seed);

void write_item_csv(std::ostream& os, const EvalReport& report);
void write_aggregate_csv(std::ostream& os, const EvalReport& report);
/// Per (detector, spec) means over images for one family, keyed by plot_x.
void write_plot_table(std::ostream& os, const EvalReport& report, Family family);
void write_summary_json(std::ostream& os, const EvalReport& report);

}  // namespace sca
