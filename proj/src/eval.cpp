#include "sca/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "sca/errors.hpp"
#include "sca/image_io.hpp"

namespace sca {

std::vector<CornerMatch> match_points(const std::vector<Point2>& mapped_original, const std::vector<Point2>& test,
                                      double radius) {
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < mapped_original.size(); ++i)
    for (std::size_t j = 0; j < test.size(); ++j) {
      const double d = distance(mapped_original[i], test[j]);
      if (d <= radius) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
    if (l.d != r.d) return l.d < r.d;
    if (l.i != r.i) return l.i < r.i;
    return l.j < r.j;
  });
  std::vector<char> used_o(mapped_original.size(), 0), used_t(test.size(), 0);
  std::vector<CornerMatch> out;
  for (const Pair& p : pairs) {
    if (used_o[p.i] || used_t[p.j]) continue;
    used_o[p.i] = used_t[p.j] = 1;
    out.push_back({mapped_original[p.i], test[p.j], p.d, p.i, p.j});
  }
  return out;
}

std::vector<CornerMatch> match_corners(const CornerSet& original, const CornerSet& test, const TransformSpec& spec,
                                       int source_width, int source_height, double radius) {
  std::vector<Point2> mapped, pts;
  mapped.reserve(original.size());
  pts.reserve(test.size());
  if (spec.geometric()) {
    const Affine fwd = warp_geometry(spec, source_width, source_height).forward;
    for (const Corner& c : original.corners) mapped.push_back(fwd.apply(c.position));
  } else {
    for (const Corner& c : original.corners) mapped.push_back(c.position);
  }
  for (const Corner& c : test.corners) pts.push_back(c.position);
  return match_points(mapped, pts, radius);
}

std::optional<double> average_repeatability(std::size_t a_p, std::size_t b_q, std::size_t c_r) {
  if (b_q == 0 || c_r == 0) return std::nullopt;
  return 100.0 * (double(a_p) / double(b_q) + double(a_p) / double(c_r)) / 2.0;
}

std::optional<double> localization_error(const std::vector<CornerMatch>& matches) {
  if (matches.empty()) return std::nullopt;
  double s = 0;
  for (const CornerMatch& m : matches) {
    const double dx = m.original.x - m.test.x, dy = m.original.y - m.test.y;
    s += dx * dx + dy * dy;
  }
  return std::sqrt(s / double(matches.size()));
}

std::optional<double> EvalReport::sqrt_ratio(const std::string& numerator, const std::string& denominator) const {
  const DetectorTotals* n = nullptr;
  const DetectorTotals* d = nullptr;
  for (const DetectorTotals& t : totals) {
    if (t.detector == numerator) n = &t;
    if (t.detector == denominator) d = &t;
  }
  if (!n || !d || d->counters.sqrt_evals == 0) return std::nullopt;
  return double(n->counters.sqrt_evals) / double(d->counters.sqrt_evals);
}

namespace {

// Runs task(i) for i in [0, n) on a fixed worker pool; exceptions stay inside tasks.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  if (t <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

Aggregate aggregate(const std::string& detector, const std::string& family,
                    const std::vector<const ItemResult*>& rows) {
  Aggregate a;
  a.detector = detector;
  a.family = family;
  double rep_sum = 0, le_sum = 0;
  std::size_t rep_n = 0, le_n = 0;
  for (const ItemResult* r : rows) {
    ++a.items;
    if (!r->error.empty()) {
      ++a.failed;
      continue;
    }
    a.test_corner_sum += r->test_count;
    if (r->repeatability) {
      rep_sum += *r->repeatability;
      ++rep_n;
    } else {
      ++a.undefined_repeatability;
    }
    if (r->loc_error) {
      le_sum += *r->loc_error;
      ++le_n;
    } else {
      ++a.undefined_loc_error;
    }
  }
  if (rep_n) a.mean_repeatability = rep_sum / double(rep_n);
  if (le_n) a.mean_loc_error = le_sum / double(le_n);
  return a;
}

std::string fmt6(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::vector<WorkItem> generate_items(const std::vector<BaseImage>& bases, const std::vector<Family>& families,
                                     std::uint64_t seed) {
  std::vector<WorkItem> items;
  for (const BaseImage& b : bases)
    for (Family f : families)
      for (TransformSpec s : enumerate_specs(f)) {
        if (f == Family::GaussianNoise) s.seed = derive_seed(seed, b.id, s);
        items.push_back({b.id, s, {}});
      }
  return items;
}

EvalReport run_experiment(const std::vector<BaseImage>& bases, const std::vector<NamedDetector>& detectors,
                          const std::vector<WorkItem>& items, const ExperimentOptions& options) {
  if (detectors.empty()) throw ParameterError("run_experiment needs at least one detector");
  for (const NamedDetector& d : detectors) d.params.validate();
  const std::size_t nd = detectors.size();

  std::map<std::string, std::size_t> base_index;
  for (std::size_t i = 0; i < bases.size(); ++i) base_index.emplace(bases[i].id, i);

  std::vector<DetectionResult> base_det(bases.size() * nd);
  std::vector<std::string> base_err(bases.size() * nd);
  std::vector<ItemResult> results(items.size() * nd);

  const std::size_t total = base_det.size() + items.size();
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto tick = [&] {
    const std::size_t k = ++done;
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress(k, total);
    }
  };

  parallel_for(base_det.size(), options.threads, [&](std::size_t t) {
    const std::size_t b = t / nd, d = t % nd;
    try {
      base_det[t] = detect(bases[b].image, detectors[d].params, bases[b].id);
    } catch (const std::exception& e) {
      base_err[t] = e.what();
    }
    tick();
  });

  parallel_for(items.size(), options.threads, [&](std::size_t i) {
    const WorkItem& item = items[i];
    for (std::size_t d = 0; d < nd; ++d) {
      ItemResult& r = results[i * nd + d];
      r.image_id = item.image_id;
      r.spec = item.spec;
      r.detector = detectors[d].name;
    }
    auto fail = [&](const std::string& msg) {
      for (std::size_t d = 0; d < nd; ++d) results[i * nd + d].error = msg;
    };
    auto it = base_index.find(item.image_id);
    if (it == base_index.end()) {
      fail("unknown base image " + item.image_id);
      tick();
      return;
    }
    const BaseImage& base = bases[it->second];
    GrayImage test;
    try {
      test = item.path.empty() ? apply_transform(base.image, item.spec) : read_image(item.path);
    } catch (const std::exception& e) {
      fail(e.what());
      tick();
      return;
    }
    for (std::size_t d = 0; d < nd; ++d) {
      ItemResult& r = results[i * nd + d];
      const std::size_t bi = it->second * nd + d;
      if (!base_err[bi].empty()) {
        r.error = "base detection failed: " + base_err[bi];
        continue;
      }
      try {
        const DetectionResult det = detect(test, detectors[d].params, item.image_id);
        const CornerSet& orig = base_det[bi].corners;
        const auto matches =
            match_corners(orig, det.corners, item.spec, base.image.width(), base.image.height(), options.radius);
        r.repeated = matches.size();
        r.original_count = orig.size();
        r.test_count = det.corners.size();
        r.repeatability = average_repeatability(r.repeated, r.original_count, r.test_count);
        r.loc_error = localization_error(matches);
        r.counters = det.counters;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
    tick();
  });

  EvalReport report;
  report.items = std::move(results);
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (std::size_t d = 0; d < nd; ++d)
      if (!base_err[b * nd + d].empty())
        report.diagnostics.push_back(bases[b].id + "," + detectors[d].name + ",base," + base_err[b * nd + d]);
  for (const ItemResult& r : report.items)
    if (!r.error.empty())
      report.diagnostics.push_back(r.image_id + "," + r.detector + "," + to_string(r.spec.family) + ":" +
                                   r.spec.label() + "," + r.error);

  for (std::size_t d = 0; d < nd; ++d) {
    const std::string& name = detectors[d].name;
    DetectorTotals tot;
    tot.detector = name;
    for (std::size_t b = 0; b < bases.size(); ++b) {
      tot.original_corner_sum += base_det[b * nd + d].corners.size();
      tot.counters += base_det[b * nd + d].counters;
    }
    std::vector<const ItemResult*> all;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const ItemResult& r = report.items[i * nd + d];
      all.push_back(&r);
      tot.test_corner_sum += r.test_count;
      tot.counters += r.counters;
    }
    for (Family f : all_families()) {
      std::vector<const ItemResult*> rows;
      for (const ItemResult* r : all)
        if (r->spec.family == f) rows.push_back(r);
      if (!rows.empty()) report.families.push_back(aggregate(name, to_string(f), rows));
    }
    report.overall.push_back(aggregate(name, "all", all));
    report.totals.push_back(tot);
  }
  return report;
}

void write_item_csv(std::ostream& os, const EvalReport& report) {
  os << "image_id,family,spec,detector,repeated,original_corners,test_corners,avg_repeatability,"
        "localization_error,sqrt_evals,distance_evals,error\n";
  for (const ItemResult& r : report.items) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.image_id << ',' << to_string(r.spec.family) << ',' << r.spec.label() << ',' << r.detector << ','
       << r.repeated << ',' << r.original_count << ',' << r.test_count << ',' << fmt6(r.repeatability) << ','
       << fmt6(r.loc_error) << ',' << r.counters.sqrt_evals << ',' << r.counters.distance_evals << ',' << err
       << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const EvalReport& report) {
  os << "detector,family,items,failed,undefined_repeatability,undefined_localization_error,avg_repeatability,"
        "localization_error,test_corner_sum\n";
  auto row = [&os](const Aggregate& a) {
    os << a.detector << ',' << a.family << ',' << a.items << ',' << a.failed << ',' << a.undefined_repeatability
       << ',' << a.undefined_loc_error << ',' << fmt6(a.mean_repeatability) << ',' << fmt6(a.mean_loc_error) << ','
       << a.test_corner_sum << '\n';
  };
  for (const Aggregate& a : report.families) row(a);
  for (const Aggregate& a : report.overall) row(a);
}

void write_plot_table(std::ostream& os, const EvalReport& report, Family family) {
  os << "detector,x,spec,sx,sy,shx,shy,theta_deg,quality,variance,images,avg_repeatability,localization_error\n";
  struct Acc {
    TransformSpec spec;
    std::size_t images = 0, rep_n = 0, le_n = 0;
    double rep = 0, le = 0;
  };
  // detector name -> spec label -> accumulator, both in first-seen order
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, Acc>>>> table;
  for (const ItemResult& r : report.items) {
    if (r.spec.family != family || !r.error.empty()) continue;
    auto dit = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == r.detector; });
    if (dit == table.end()) dit = table.insert(table.end(), {r.detector, {}});
    const std::string label = r.spec.label();
    auto sit = std::find_if(dit->second.begin(), dit->second.end(), [&](const auto& e) { return e.first == label; });
    if (sit == dit->second.end()) sit = dit->second.insert(dit->second.end(), {label, Acc{r.spec}});
    Acc& a = sit->second;
    ++a.images;
    if (r.repeatability) a.rep += *r.repeatability, ++a.rep_n;
    if (r.loc_error) a.le += *r.loc_error, ++a.le_n;
  }
  for (const auto& [det, specs] : table)
    for (const auto& [label, a] : specs) {
      const TransformSpec& s = a.spec;
      char buf[256];
      std::snprintf(buf, sizeof buf, "%g,%s,%g,%g,%g,%g,%g,%d,%g,%zu,", s.plot_x(), label.c_str(), s.sx, s.sy, s.shx,
                    s.shy, s.theta_deg, s.quality, s.variance, a.images);
      os << det << ',' << buf
         << fmt6(a.rep_n ? std::optional<double>(a.rep / double(a.rep_n)) : std::nullopt) << ','
         << fmt6(a.le_n ? std::optional<double>(a.le / double(a.le_n)) : std::nullopt) << '\n';
    }
}

void write_summary_json(std::ostream& os, const EvalReport& report) {
  using json = nlohmann::ordered_json;
  json methods = json::array();
  for (std::size_t d = 0; d < report.overall.size(); ++d) {
    const Aggregate& a = report.overall[d];
    const DetectorTotals& t = report.totals[d];
    methods.push_back({{"method", a.detector},
                       {"average_repeatability", opt_json(a.mean_repeatability)},
                       {"localization_error", opt_json(a.mean_loc_error)},
                       {"corner_count", t.original_corner_sum},
                       {"corner_count_transformed", t.test_corner_sum},
                       {"items", a.items},
                       {"failed", a.failed},
                       {"undefined_repeatability", a.undefined_repeatability},
                       {"undefined_localization_error", a.undefined_loc_error}});
  }
  json families = json::array();
  for (const Aggregate& a : report.families)
    families.push_back({{"method", a.detector},
                        {"family", a.family},
                        {"average_repeatability", opt_json(a.mean_repeatability)},
                        {"localization_error", opt_json(a.mean_loc_error)},
                        {"items", a.items},
                        {"failed", a.failed}});
  json counters = json::object();
  for (const DetectorTotals& t : report.totals)
    counters[t.detector] = {{"sqrt_evals", t.counters.sqrt_evals}, {"distance_evals", t.counters.distance_evals}};
  counters["sqrt_ratio_sca_over_cpda"] = opt_json(report.sqrt_ratio());
  json doc = {{"methods", methods},
              {"families", families},
              {"counters", counters},
              {"diagnostics", report.diagnostics.size()}};
  os << doc.dump(2) << '\n';
}

}  // namespace sca
