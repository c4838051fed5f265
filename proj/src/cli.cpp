#include "sca/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sca/errors.hpp"
#include "sca/image_io.hpp"
#include "sca/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace sca {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParameterError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParameterError("not a number: '" + s + "'");
  return v;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ParameterError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ParameterError("unknown config key '" + key + "' in " + where);
}

void apply_canny(CannyParams& c, const json& j) {
  check_keys(j, {"sigma", "low", "high"}, "canny");
  if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
  if (j.contains("low")) c.low = j["low"].get<double>();
  if (j.contains("high")) c.high = j["high"].get<double>();
}

void apply_detector(DetectorParams& p, const json& j, const std::string& where) {
  check_keys(j,
             {"chord_lengths", "curvature_threshold", "angle_threshold_deg", "curve_sigma", "resample_step",
              "min_curve_length", "angle_mode", "angle_refinement", "junction_merge_radius", "canny"},
             where);
  if (j.contains("chord_lengths")) p.chord_lengths = j["chord_lengths"].get<std::vector<int>>();
  if (j.contains("curvature_threshold")) p.curvature_threshold = j["curvature_threshold"].get<double>();
  if (j.contains("angle_threshold_deg")) p.angle_threshold_deg = j["angle_threshold_deg"].get<double>();
  if (j.contains("curve_sigma")) p.curve_sigma = j["curve_sigma"].get<double>();
  if (j.contains("resample_step")) p.resample_step = j["resample_step"].get<double>();
  if (j.contains("min_curve_length")) p.min_curve_length = j["min_curve_length"].get<std::size_t>();
  if (j.contains("junction_merge_radius")) p.junction_merge_radius = j["junction_merge_radius"].get<double>();
  if (j.contains("angle_mode")) {
    const auto m = j["angle_mode"].get<std::string>();
    if (m == "tangent") p.angle_mode = AngleMode::Tangent;
    else if (m == "chord") p.angle_mode = AngleMode::Chord;
    else throw ParameterError("angle_mode must be 'tangent' or 'chord'");
  }
  if (j.contains("angle_refinement")) {
    const auto m = j["angle_refinement"].get<std::string>();
    if (m == "iterative") p.angle_refinement = AngleRefinement::Iterative;
    else if (m == "single_pass") p.angle_refinement = AngleRefinement::SinglePass;
    else throw ParameterError("angle_refinement must be 'iterative' or 'single_pass'");
  }
  if (j.contains("canny")) apply_canny(p.canny, j["canny"]);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

std::string corners_json(const CornerSet& set, const std::string& detector, const OpCounters& counters) {
  json rows = json::array();
  for (const Corner& c : set.corners)
    rows.push_back({{"x", c.position.x},
                    {"y", c.position.y},
                    {"curvature", c.curvature},
                    {"is_t_junction", c.is_t_junction}});
  json doc = {{"image_id", set.image_id},
              {"detector", detector},
              {"corners", rows},
              {"counters", {{"sqrt_evals", counters.sqrt_evals}, {"distance_evals", counters.distance_evals}}}};
  return doc.dump(2) + "\n";
}

// Command-line values that override the loaded configuration.
struct Overrides {
  std::string config;
  std::string detector;
  std::string chord;
  std::optional<double> curvature_threshold;
  std::optional<double> angle_threshold;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> formats;
  std::optional<unsigned> threads;
  std::string families;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_detector = true) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  if (with_detector) {
    cmd->add_option("--detector", o.detector, "sca, cpda or both");
    cmd->add_option("--chord", o.chord, "chord length(s), comma separated");
    cmd->add_option("--curvature-threshold", o.curvature_threshold, "normalized curvature threshold");
    cmd->add_option("--angle-threshold", o.angle_threshold, "angle threshold in degrees");
    cmd->add_option("--format", o.formats, "output format: csv and/or json");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  }
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--out", o.out, "output path");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.detector.empty()) {
    if (o.detector == "both") cfg.detectors = {"sca", "cpda"};
    else cfg.detectors = {o.detector};
  }
  for (const std::string& name : cfg.detectors) {
    if (name != "sca" && name != "cpda") throw ParameterError("unknown detector '" + name + "'");
    DetectorParams& p = name == "cpda" ? cfg.cpda : cfg.sca;
    if (!o.chord.empty()) {
      p.chord_lengths.clear();
      for (const std::string& s : split(o.chord, ',')) {
        const double v = to_number(s);
        if (v != std::floor(v)) throw ParameterError("chord length must be an integer: " + s);
        p.chord_lengths.push_back(static_cast<int>(v));
      }
    }
    if (o.curvature_threshold) p.curvature_threshold = *o.curvature_threshold;
    if (o.angle_threshold) p.angle_threshold_deg = *o.angle_threshold;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.formats.empty()) cfg.formats = o.formats;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.families.empty()) {
    cfg.families.clear();
    for (const std::string& f : split(o.families, ',')) cfg.families.push_back(family_from_string(f));
  }
  cfg.validate();
  return cfg;
}

// Bases and items from a manifest; unreadable bases become diagnostics.
struct ManifestInput {
  std::vector<BaseImage> bases;
  std::vector<WorkItem> items;
  std::vector<std::string> diagnostics;
};

ManifestInput load_manifest_input(const fs::path& manifest) {
  std::ifstream is(manifest);
  if (!is) throw IoError("cannot read manifest " + manifest.string());
  const auto rows = read_manifest(is, manifest.parent_path());
  ManifestInput in;
  std::set<std::string> seen;
  for (const ManifestRow& r : rows) {
    if (seen.insert(r.image_id).second) {
      try {
        in.bases.push_back({r.image_id, read_image(r.base_path)});
      } catch (const std::exception& e) {
        in.diagnostics.push_back(r.image_id + ",all,base," + e.what());
      }
    }
    in.items.push_back({r.image_id, r.spec, r.output_path});
  }
  return in;
}

int finish(const EvalReport& report, const RunConfig& cfg, std::ostream& out) {
  write_report(report, cfg.output_dir, cfg.formats);
  for (std::size_t d = 0; d < report.overall.size(); ++d) {
    const Aggregate& a = report.overall[d];
    out << a.detector << ": avg_repeatability="
        << (a.mean_repeatability ? std::to_string(*a.mean_repeatability) : "NA")
        << " localization_error=" << (a.mean_loc_error ? std::to_string(*a.mean_loc_error) : "NA")
        << " corners=" << report.totals[d].original_corner_sum << " (transformed "
        << report.totals[d].test_corner_sum << ")\n";
  }
  if (auto r = report.sqrt_ratio()) out << "sqrt ratio sca/cpda: " << *r << '\n';
  if (!report.all_succeeded()) {
    out << report.diagnostics.size() << " item(s) failed; see " << (cfg.output_dir / "diagnostics.csv").string()
        << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  if (detectors.empty()) throw ParameterError("no detector selected");
  for (const std::string& d : detectors)
    if (d != "sca" && d != "cpda") throw ParameterError("unknown detector '" + d + "'");
  sca.validate();
  cpda.validate();
  if (sca.mode != DetectorMode::Sca || cpda.mode != DetectorMode::Cpda)
    throw ParameterError("detector mode does not match its config section");
  if (!(matching_radius > 0)) throw ParameterError("matching_radius must be positive");
  for (const std::string& f : formats)
    if (f != "csv" && f != "json") throw ParameterError("unknown format '" + f + "'");
  if (families.empty()) throw ParameterError("no transform family selected");
}

std::vector<NamedDetector> RunConfig::named_detectors() const {
  std::vector<NamedDetector> out;
  for (const std::string& d : detectors) out.push_back({d, d == "cpda" ? cpda : sca});
  return out;
}

void apply_config_json(RunConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j,
               {"detectors", "sca", "cpda", "canny", "matching_radius", "seed", "output_dir", "formats", "threads",
                "families"},
               "config");
    if (j.contains("canny")) {
      apply_canny(cfg.sca.canny, j["canny"]);
      apply_canny(cfg.cpda.canny, j["canny"]);
    }
    if (j.contains("sca")) apply_detector(cfg.sca, j["sca"], "sca");
    if (j.contains("cpda")) apply_detector(cfg.cpda, j["cpda"], "cpda");
    if (j.contains("detectors")) cfg.detectors = j["detectors"].get<std::vector<std::string>>();
    if (j.contains("matching_radius")) cfg.matching_radius = j["matching_radius"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("formats")) cfg.formats = j["formats"].get<std::vector<std::string>>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("families")) {
      cfg.families.clear();
      for (const auto& f : j["families"].get<std::vector<std::string>>()) cfg.families.push_back(family_from_string(f));
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config value has the wrong type: ") + e.what());
  }
  cfg.validate();
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  RunConfig cfg;
  apply_config_json(cfg, ss.str());
  return cfg;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ParameterError("range must be start:stop:step, got '" + text + "'");
    const double a = to_number(parts[0]), b = to_number(parts[1]), step = to_number(parts[2]);
    if (!(step > 0)) throw ParameterError("range step must be positive");
    const double span = (b - a) / step + 1e-9;
    if (span < 0) throw ParameterError("empty range '" + text + "'");
    const auto n = static_cast<long>(std::floor(span));
    for (long i = 0; i <= n; ++i) out.push_back(a + double(i) * step);
  } else {
    for (const std::string& s : split(text, ',')) out.push_back(to_number(s));
  }
  if (out.empty()) throw ParameterError("empty range '" + text + "'");
  return out;
}

std::vector<BaseImage> synth_bases(std::uint64_t seed, bool smoke) {
  std::vector<BaseImage> out;
  std::set<ShapeKind> kinds;
  for (SynthFixture& f : make_corpus(seed)) {
    if (smoke) {
      if (f.kind == ShapeKind::RoundedRect || !kinds.insert(f.kind).second) continue;
    }
    out.push_back({f.id, std::move(f.image)});
  }
  return out;
}

std::vector<WorkItem> smoke_items(const std::vector<BaseImage>& bases, std::uint64_t seed) {
  std::vector<WorkItem> items;
  for (const BaseImage& b : bases)
    for (Family f : all_families()) {
      const auto specs = enumerate_specs(f);
      TransformSpec s = specs[specs.size() / 2];
      if (f == Family::GaussianNoise) s.seed = derive_seed(seed, b.id, s);
      items.push_back({b.id, s, {}});
    }
  return items;
}

void write_report(const EvalReport& report, const fs::path& dir, const std::vector<std::string>& formats) {
  ensure_dir(dir);
  const bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  const bool js = std::find(formats.begin(), formats.end(), "json") != formats.end();
  if (csv) {
    auto items = open_out(dir / "items.csv");
    write_item_csv(items, report);
    auto agg = open_out(dir / "aggregates.csv");
    write_aggregate_csv(agg, report);
    for (const Aggregate& a : report.families) {
      if (a.detector != report.families.front().detector) break;
      auto plot = open_out(dir / ("plot_" + a.family + ".csv"));
      write_plot_table(plot, report, family_from_string(a.family));
    }
  }
  if (js) {
    auto summary = open_out(dir / "summary.json");
    write_summary_json(summary, report);
  }
  if (!report.diagnostics.empty()) {
    auto diag = open_out(dir / "diagnostics.csv");
    diag << "image_id,detector,item,error\n";
    for (const std::string& d : report.diagnostics) diag << d << '\n';
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chord-based contour corner detection toolkit"};
  app.require_subcommand(1);

  Overrides o;
  std::string image, overlay, dataset, manifest, chords, thresholds, angles;
  bool use_synth = false, smoke = false;

  auto* detect_cmd = app.add_subcommand("detect", "detect corners in one image");
  detect_cmd->add_option("image", image, "PGM/PPM image")->required();
  detect_cmd->add_option("--overlay", overlay, "write a PPM with corner markers");
  add_common(detect_cmd, o);

  auto* transform_cmd = app.add_subcommand("transform", "generate the transformed dataset and its manifest");
  transform_cmd->add_option("dataset", dataset, "directory of base images")->required();
  transform_cmd->add_option("--families", o.families, "comma-separated families (default all)");
  add_common(transform_cmd, o, false);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "run detectors over a dataset and write reports");
  evaluate_cmd->add_option("manifest", manifest, "manifest.csv written by transform");
  evaluate_cmd->add_flag("--synth", use_synth, "evaluate the built-in synthetic corpus in memory");
  evaluate_cmd->add_flag("--smoke", smoke, "with --synth: 3 fixtures, 1 spec per family");
  evaluate_cmd->add_option("--families", o.families, "with --synth: comma-separated families");
  add_common(evaluate_cmd, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "grid-evaluate SCA parameters");
  sweep_cmd->add_option("manifest", manifest, "manifest.csv written by transform");
  sweep_cmd->add_flag("--synth", use_synth, "use the built-in synthetic corpus");
  sweep_cmd->add_flag("--smoke", smoke, "with --synth: 3 fixtures, 1 spec per family");
  sweep_cmd->add_option("--families", o.families, "with --synth: comma-separated families");
  sweep_cmd->add_option("--chords", chords, "chord lengths, start:stop:step or list");
  sweep_cmd->add_option("--thresholds", thresholds, "curvature thresholds, start:stop:step or list");
  sweep_cmd->add_option("--angles", angles, "angle thresholds, start:stop:step or list");
  add_common(sweep_cmd, o);

  auto* synth_cmd = app.add_subcommand("synth", "write the synthetic corpus and its ground truth");
  add_common(synth_cmd, o, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    RunConfig cfg = resolve(o);

    if (detect_cmd->parsed()) {
      if (cfg.detectors.size() != 1) {
        if (!o.detector.empty()) throw ParameterError("detect takes a single detector");
        cfg.detectors = {"sca"};
      }
      const GrayImage img = read_image(image);
      const NamedDetector det = cfg.named_detectors().front();
      const DetectionResult res = detect(img, det.params, fs::path(image).stem().string());
      const bool as_json = std::find(cfg.formats.begin(), cfg.formats.end(), "json") != cfg.formats.end() &&
                           std::find(cfg.formats.begin(), cfg.formats.end(), "csv") == cfg.formats.end();
      std::ostringstream body;
      if (as_json) {
        body << corners_json(res.corners, det.name, res.counters);
      } else {
        write_corner_csv_header(body);
        write_corner_csv_rows(body, res.corners, det.name);
      }
      if (o.out.empty()) {
        out << body.str();
      } else {
        if (fs::path(o.out).has_parent_path()) ensure_dir(fs::path(o.out).parent_path());
        open_out(o.out) << body.str();
      }
      if (!overlay.empty()) write_ppm(overlay, render_overlay(img, res.corners));
      return kExitOk;
    }

    if (!o.out.empty()) cfg.output_dir = o.out;

    if (synth_cmd->parsed()) {
      ensure_dir(cfg.output_dir);
      auto truth = open_out(cfg.output_dir / "truth.csv");
      auto angles = open_out(cfg.output_dir / "fixtures.csv");
      write_corner_csv_header(truth);
      angles << "image_id,kind,x,y,angle_deg\n";
      std::size_t n = 0;
      for (const SynthFixture& f : make_corpus(cfg.seed)) {
        write_pgm(cfg.output_dir / (f.id + ".pgm"), f.image);
        CornerSet set{f.id, {}};
        for (std::size_t i = 0; i < f.true_corners.size(); ++i) {
          set.corners.push_back({f.true_corners[i], 0.0, 0, false});
          char buf[128];
          std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", f.true_corners[i].x, f.true_corners[i].y,
                        f.corner_angles[i]);
          angles << f.id << ',' << to_string(f.kind) << ',' << buf << '\n';
        }
        write_corner_csv_rows(truth, set, "ground_truth");
        ++n;
      }
      out << "wrote " << n << " fixtures to " << cfg.output_dir.string() << '\n';
      return kExitOk;
    }

    if (transform_cmd->parsed()) {
      if (!fs::is_directory(dataset)) {
        err << "error: dataset directory not found: " << dataset << '\n';
        return kExitInput;
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dataset))
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        err << "error: no PGM/PPM images in " << dataset << '\n';
        return kExitInput;
      }
      ensure_dir(cfg.output_dir);
      std::vector<ManifestRow> rows;
      std::vector<std::string> diagnostics;
      for (const fs::path& file : files) {
        const std::string id = file.stem().string();
        GrayImage base;
        try {
          base = read_image(file);
        } catch (const std::exception& e) {
          diagnostics.push_back(id + ",all,base," + e.what());
          continue;
        }
        const fs::path rel_dir = fs::path("images") / id;
        ensure_dir(cfg.output_dir / rel_dir);
        for (Family f : cfg.families)
          for (TransformSpec s : enumerate_specs(f)) {
            if (f == Family::GaussianNoise) s.seed = derive_seed(cfg.seed, id, s);
            const fs::path rel = rel_dir / (to_string(f) + "_" + s.label() + ".pgm");
            try {
              write_pgm(cfg.output_dir / rel, apply_transform(base, s));
              rows.push_back({id, fs::absolute(file).lexically_normal(), s, rel});
            } catch (const std::exception& e) {
              diagnostics.push_back(id + ",all," + to_string(f) + ":" + s.label() + "," + e.what());
            }
          }
      }
      auto mf = open_out(cfg.output_dir / "manifest.csv");
      write_manifest(mf, rows);
      out << "wrote " << rows.size() << " transformed images and " << (cfg.output_dir / "manifest.csv").string()
          << '\n';
      if (!diagnostics.empty()) {
        auto diag = open_out(cfg.output_dir / "diagnostics.csv");
        diag << "image_id,detector,item,error\n";
        for (const std::string& d : diagnostics) diag << d << '\n';
        out << diagnostics.size() << " item(s) failed\n";
        return kExitPartial;
      }
      return kExitOk;
    }

    // evaluate and sweep share their inputs
    std::vector<BaseImage> bases;
    std::vector<WorkItem> items;
    std::vector<std::string> input_diagnostics;
    if (use_synth) {
      bases = synth_bases(cfg.seed, smoke);
      items = smoke ? smoke_items(bases, cfg.seed) : generate_items(bases, cfg.families, cfg.seed);
      if (smoke && !o.families.empty())
        std::erase_if(items, [&](const WorkItem& w) {
          return std::find(cfg.families.begin(), cfg.families.end(), w.spec.family) == cfg.families.end();
        });
    } else {
      if (manifest.empty()) throw ParameterError("give a manifest path or --synth");
      if (!fs::is_regular_file(manifest)) {
        err << "error: manifest not found: " << manifest << '\n';
        return kExitInput;
      }
      ManifestInput in = load_manifest_input(manifest);
      bases = std::move(in.bases);
      items = std::move(in.items);
      input_diagnostics = std::move(in.diagnostics);
    }
    ExperimentOptions opts;
    opts.radius = cfg.matching_radius;
    opts.threads = cfg.threads;

    if (evaluate_cmd->parsed()) {
      EvalReport report = run_experiment(bases, cfg.named_detectors(), items, opts);
      report.diagnostics.insert(report.diagnostics.begin(), input_diagnostics.begin(), input_diagnostics.end());
      return finish(report, cfg, out);
    }

    // sweep: SCA only, every grid point as its own named detector
    const DetectorParams& base_params = cfg.sca;
    std::vector<double> chord_grid =
        chords.empty() ? std::vector<double>{double(base_params.chord_lengths.front())} : parse_range(chords);
    std::vector<double> th_grid =
        thresholds.empty() ? std::vector<double>{base_params.curvature_threshold} : parse_range(thresholds);
    std::vector<double> ang_grid =
        angles.empty() ? std::vector<double>{base_params.angle_threshold_deg} : parse_range(angles);
    std::vector<NamedDetector> grid;
    for (double L : chord_grid)
      for (double t : th_grid)
        for (double a : ang_grid) {
          if (L != std::floor(L)) throw ParameterError("chord length must be an integer");
          DetectorParams p = base_params;
          p.chord_lengths = {static_cast<int>(L)};
          p.curvature_threshold = t;
          p.angle_threshold_deg = a;
          char name[96];
          std::snprintf(name, sizeof name, "sca_L%d_t%g_a%g", static_cast<int>(L), t, a);
          grid.push_back({name, p});
        }
    if (grid.empty()) throw ParameterError("empty sweep grid");
    EvalReport report = run_experiment(bases, grid, items, opts);
    report.diagnostics.insert(report.diagnostics.begin(), input_diagnostics.begin(), input_diagnostics.end());
    ensure_dir(cfg.output_dir);
    {
      auto table = open_out(cfg.output_dir / "sweep.csv");
      table << "chord,curvature_threshold,angle_threshold,avg_repeatability,localization_error,corner_count,"
               "corner_count_transformed,items,failed\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Aggregate& a = report.overall[i];
        char buf[256];
        std::snprintf(buf, sizeof buf, "%d,%g,%g,", grid[i].params.chord_lengths.front(),
                      grid[i].params.curvature_threshold, grid[i].params.angle_threshold_deg);
        auto f6 = [](const std::optional<double>& v) {
          if (!v) return std::string("NA");
          char b[64];
          std::snprintf(b, sizeof b, "%.6f", *v);
          return std::string(b);
        };
        table << buf << f6(a.mean_repeatability) << ',' << f6(a.mean_loc_error) << ','
              << report.totals[i].original_corner_sum << ',' << report.totals[i].test_corner_sum << ',' << a.items
              << ',' << a.failed << '\n';
      }
    }
    out << "wrote " << grid.size() << " sweep row(s) to " << (cfg.output_dir / "sweep.csv").string() << '\n';
    if (!report.all_succeeded()) {
      auto diag = open_out(cfg.output_dir / "diagnostics.csv");
      diag << "image_id,detector,item,error\n";
      for (const std::string& d : report.diagnostics) diag << d << '\n';
      return kExitPartial;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace sca
