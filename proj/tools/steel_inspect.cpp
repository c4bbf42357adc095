// steel-inspect: batch front-end over the inspection library.
//
// Exit codes: 0 ok, 2 empty result, 3 config, 4 I/O, 5 precondition, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "steel/config.hpp"
#include "steel/evalmetrics.hpp"
#include "steel/histogram_peaks.hpp"
#include "steel/image_io.hpp"
#include "steel/inspection_sim.hpp"
#include "steel/manifest.hpp"
#include "steel/point_cloud_io.hpp"
#include "steel/registration3d.hpp"
#include "steel/segmentation.hpp"
#include "steel/stitching.hpp"
#include "steel/survey.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { ok = 0, failure = 1, empty_result = 2, config_error = 3, io_error = 4, precondition = 5 };

// Empty-result exit carrying a message, for outcomes that are not library errors.
struct EmptyResult : steel::Error {
  using steel::Error::Error;
};

int exit_code_for(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const steel::StageError& s) {
    return s.cause() ? exit_code_for(s.cause()) : failure;
  } catch (const steel::NoStructureError&) {
    return empty_result;
  } catch (const EmptyResult&) {
    return empty_result;
  } catch (const steel::ConfigError&) {
    return config_error;
  } catch (const steel::IoError&) {
    return io_error;
  } catch (const steel::PreconditionError&) {
    return precondition;
  } catch (...) {
    return failure;
  }
}

steel::InspectConfig config_from(const std::string& path) {
  return path.empty() ? steel::default_config() : steel::load_config(path);
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void finish(steel::RunManifest& m, const fs::path& out) {
  m.finished = steel::utc_timestamp();
  steel::write_manifest(manifest_path(out), m);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw steel::IoError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw steel::IoError(path.string() + ": " + e.what());
  }
}

// ---- detect

json segmentation_report(const steel::SegmentationReport& r) {
  return {{"no_structure", r.no_structure},
          {"t", r.threshold},
          {"t_star", r.otsu_level},
          {"e_max", r.e_max},
          {"response_cutoff", r.response_cutoff},
          {"peaks", {{"initial", r.peaks.initial}, {"dominant", r.peaks.dominant}, {"observing", r.peaks.observing}}},
          {"pixels",
           {{"threshold", r.threshold_pixels},
            {"gated", r.gated_pixels},
            {"grown", r.grown_pixels},
            {"final", r.final_pixels}}},
          {"components", r.components}};
}

struct DetectJob {
  fs::path input, mask, report;
};

int run_detect(const std::vector<std::string>& inputs, const std::string& cfg_path, const std::string& out,
               const std::string& report, int jobs) {
  const steel::InspectConfig cfg = config_from(cfg_path);
  steel::RunManifest manifest;
  manifest.command = "detect";
  manifest.config_hash = cfg.hash();
  manifest.started = steel::utc_timestamp();

  std::vector<DetectJob> work;
  if (inputs.size() == 1 && !fs::is_directory(out)) {
    work.push_back({inputs[0], out, report});
  } else {
    // Several inputs: --out and --report name directories, files keyed by input stem.
    for (const std::string& in : inputs) {
      const std::string stem = fs::path(in).stem().string();
      work.push_back({in, fs::path(out) / (stem + ".pgm"),
                      report.empty() ? fs::path() : fs::path(report) / (stem + ".json")});
    }
  }

  std::vector<std::exception_ptr> errors(work.size());
  std::vector<steel::SegmentationReport> reports(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        const steel::GrayImage img = steel::load_image(work[i].input);
        const steel::SegmentationResult r = steel::segment_crack(img, cfg.segmentation);
        reports[i] = r.report;
        steel::save_mask(work[i].mask, r.mask);
        if (!work[i].report.empty()) steel::write_text(work[i].report, segmentation_report(r.report).dump(2) + "\n");
        if (r.report.no_structure) throw steel::NoStructureError();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::clamp(jobs, 1, static_cast<int>(work.size()));
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = ok;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        std::cerr << work[i].input.string() << ": " << e.what() << "\n";
      }
      code = std::max(code, exit_code_for(errors[i]));
      if (exit_code_for(errors[i]) != empty_result) continue;
    }
    manifest.add_input(work[i].input);
    manifest.add_output(work[i].mask);
    if (!work[i].report.empty()) manifest.add_output(work[i].report);
    manifest.counters["final_pixels"] += static_cast<double>(reports[i].final_pixels);
    manifest.counters["components"] += reports[i].components;
  }
  manifest.counters["inputs"] = static_cast<double>(work.size());
  finish(manifest, work.size() == 1 ? work[0].mask : fs::path(out) / "detect");
  return code;
}

// ---- stitch / survey

void load_captures(const std::string& list, const steel::InspectConfig& cfg, std::vector<steel::GrayImage>& images,
                   std::vector<steel::CapturePose>& poses, steel::RunManifest& manifest) {
  manifest.add_input(list);
  for (const steel::Capture& c : steel::load_capture_list(list, cfg.mm_per_pixel)) {
    images.push_back(steel::load_image(c.image_path));
    poses.push_back(c.pose);
    manifest.add_input(c.image_path);
  }
}

json pose_json(const steel::CapturePose& p) {
  return {{"odom_x_mm", p.odom_mm.x()}, {"odom_y_mm", p.odom_mm.y()}, {"heading_rad", p.heading_rad}};
}

json mosaic_json(const steel::Mosaic& m) {
  json placements = json::array(), poses = json::array(), scores = json::array();
  for (const auto& p : m.placements) placements.push_back({p.x(), p.y()});
  for (const auto& p : m.refined_poses) poses.push_back(pose_json(p));
  for (double s : m.scores) scores.push_back(std::isnan(s) ? json(nullptr) : json(s));
  return {{"width", m.canvas.cols()},
          {"height", m.canvas.rows()},
          {"origin_mm", {m.origin_mm.x(), m.origin_mm.y()}},
          {"placements", placements},
          {"refined_poses", poses},
          {"scores", scores},
          {"exposure_offsets", m.exposure_offsets}};
}

int run_stitch(const std::string& list, const std::string& cfg_path, const std::string& out,
               const std::string& report) {
  const steel::InspectConfig cfg = config_from(cfg_path);
  steel::RunManifest manifest;
  manifest.command = "stitch";
  manifest.config_hash = cfg.hash();
  manifest.started = steel::utc_timestamp();
  std::vector<steel::GrayImage> images;
  std::vector<steel::CapturePose> poses;
  load_captures(list, cfg, images, poses, manifest);
  const steel::Mosaic m = steel::stitch_sequence(images, poses, cfg.stitch);
  steel::save_image(out, m.canvas);
  manifest.add_output(out);
  if (!report.empty()) {
    steel::write_text(report, mosaic_json(m).dump(2) + "\n");
    manifest.add_output(report);
  }
  manifest.counters["captures"] = static_cast<double>(images.size());
  manifest.counters["prior_kept"] =
      static_cast<double>(std::count_if(m.scores.begin() + 1, m.scores.end(), [](double s) { return std::isnan(s); }));
  finish(manifest, out);
  return ok;
}

int run_survey(const std::string& list, const std::string& cfg_path, const std::string& outdir,
               const std::string& gt_path) {
  const steel::InspectConfig cfg = config_from(cfg_path);
  steel::RunManifest manifest;
  manifest.command = "survey";
  manifest.config_hash = cfg.hash();
  manifest.started = steel::utc_timestamp();
  std::vector<steel::GrayImage> images;
  std::vector<steel::CapturePose> poses;
  load_captures(list, cfg, images, poses, manifest);
  std::optional<steel::BinaryMask> gt;
  if (!gt_path.empty()) {
    gt = steel::load_mask(gt_path);
    manifest.add_input(gt_path);
  }
  const steel::SurveyResult r = steel::full_survey(images, poses, cfg, gt ? &*gt : nullptr);
  const fs::path dir(outdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw steel::IoError(dir.string() + ": " + ec.message());
  steel::save_image(dir / "mosaic.png", r.mosaic.canvas);
  steel::save_mask(dir / "mask.png", r.segmentation.mask);
  json rep = {{"mosaic", mosaic_json(r.mosaic)}, {"segmentation", segmentation_report(r.segmentation.report)}};
  if (r.crack_box) {
    rep["crack_box_mm"] = {{"min", {r.crack_box->min_mm.x(), r.crack_box->min_mm.y()}},
                           {"max", {r.crack_box->max_mm.x(), r.crack_box->max_mm.y()}}};
  }
  if (r.scores) rep["scores"] = {{"pi", r.scores->pi}, {"si", r.scores->si}, {"dsc", r.scores->dsc}};
  steel::write_text(dir / "report.json", rep.dump(2) + "\n");
  for (const char* f : {"mosaic.png", "mask.png", "report.json"}) manifest.add_output(dir / f);
  manifest.counters["captures"] = static_cast<double>(images.size());
  manifest.counters["final_pixels"] = static_cast<double>(r.segmentation.report.final_pixels);
  finish(manifest, dir / "survey");
  if (r.segmentation.report.no_structure) throw steel::NoStructureError();
  return ok;
}

// ---- register

// Frame list: one cloud path per line, optionally followed by an odometry pose
// "x y z yaw" (m, rad). Relative paths resolve against the list's directory.
std::vector<steel::PointCloud> load_frames(const fs::path& list, steel::RunManifest& manifest) {
  std::ifstream in(list);
  if (!in) throw steel::IoError(list.string() + ": cannot open frame list");
  manifest.add_input(list);
  std::vector<steel::PointCloud> clouds;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string path;
    if (!(ls >> path)) continue;
    fs::path p(path);
    if (p.is_relative()) p = list.parent_path() / p;
    steel::PointCloud c = steel::load_point_cloud(p);
    manifest.add_input(p);
    double x, y, z, yaw;
    if (ls >> x) {
      if (!(ls >> y >> z >> yaw)) {
        throw steel::IoError(list.string() + ":" + std::to_string(lineno) + ": odometry needs x y z yaw");
      }
      c.odometry = steel::Rigid3d::yaw(yaw, {x, y, z});
    }
    clouds.push_back(std::move(c));
  }
  if (clouds.empty()) throw steel::IoError(list.string() + ": no frames listed");
  return clouds;
}

json rigid_json(const steel::Rigid3d& t) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) r.push_back({t.rotation(i, 0), t.rotation(i, 1), t.rotation(i, 2)});
  return {{"rotation", r}, {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

int run_register(const std::string& frames, const std::string& cfg_path, const std::string& out,
                 const std::string& poses_out) {
  const steel::InspectConfig cfg = config_from(cfg_path);
  steel::RunManifest manifest;
  manifest.command = "register";
  manifest.config_hash = cfg.hash();
  manifest.started = steel::utc_timestamp();
  const std::vector<steel::PointCloud> clouds = load_frames(frames, manifest);
  const steel::SequenceRegistration s = steel::register_sequence(clouds, cfg.icp);
  steel::save_point_cloud(out, s.merged);
  manifest.add_output(out);
  if (!poses_out.empty()) {
    json frames_json = json::array();
    for (std::size_t i = 0; i < s.transforms.size(); ++i) {
      json f = {{"frame", i}, {"to_frame0", rigid_json(s.transforms[i])}};
      if (i > 0) {
        const steel::IcpResult& r = s.pairwise[i];
        f["icp"] = {{"rmse", r.rmse},
                    {"iterations", r.iterations},
                    {"stop", steel::to_string(r.reason)},
                    {"rule", std::string(1, steel::stop_rule(r.reason))},
                    {"prior_from_odometry", r.prior_from_odometry}};
      }
      frames_json.push_back(f);
    }
    steel::write_text(poses_out, frames_json.dump(2) + "\n");
    manifest.add_output(poses_out);
  }
  manifest.counters["frames"] = static_cast<double>(clouds.size());
  manifest.counters["points"] = static_cast<double>(s.merged.size());
  finish(manifest, out);
  return ok;
}

// ---- simulate

template <typename T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

steel::SimWorld parse_world(const json& j, steel::Pose2& start, bool& has_start) {
  steel::SimWorld w;
  try {
    for (const json& p : j.at("plates")) {
      steel::Plate plate;
      plate.x_min = p.at("x_min").get<double>();
      plate.y_min = p.at("y_min").get<double>();
      plate.x_max = p.at("x_max").get<double>();
      plate.y_max = p.at("y_max").get<double>();
      plate.alpha = p.value("alpha", 0.0);
      w.plates.push_back(plate);
    }
    has_start = j.contains("start");
    if (has_start) {
      start.x = j["start"].at("x").get<double>();
      start.y = j["start"].at("y").get<double>();
      start.heading = j["start"].value("heading", 0.0);
    }
  } catch (const json::exception& e) {
    throw steel::ConfigError("world", e.what());
  }
  w.validate();
  return w;
}

steel::RobotSpec parse_spec(const json& j, steel::RobotSpec spec) {
  try {
    maybe(j, "weight", spec.weight);
    maybe(j, "magnetic_force", spec.magnetic_force);
    maybe(j, "friction", spec.friction);
    maybe(j, "com_height", spec.com_height);
    maybe(j, "wheelbase", spec.wheelbase);
    maybe(j, "track", spec.track);
    if (j.contains("chassis")) spec.chassis = {j["chassis"].at(0).get<double>(), j["chassis"].at(1).get<double>()};
  } catch (const json::exception& e) {
    throw steel::ConfigError("spec", e.what());
  }
  spec.validate();
  return spec;
}

int run_simulate(const std::string& world_path, const std::string& spec_path, const std::string& cfg_path, int steps,
                 const std::string& out) {
  const steel::InspectConfig cfg = config_from(cfg_path);
  steel::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_hash = cfg.hash();
  manifest.started = steel::utc_timestamp();
  steel::Pose2 start;
  bool has_start = false;
  const steel::SimWorld world = parse_world(read_json(world_path), start, has_start);
  manifest.add_input(world_path);
  steel::RobotSpec spec = cfg.robot;
  if (!spec_path.empty()) {
    spec = parse_spec(read_json(spec_path), spec);
    manifest.add_input(spec_path);
  }
  if (!has_start) {
    const steel::Plate& p = world.plates.front();
    start = {(p.x_min + p.x_max) / 2, (p.y_min + p.y_max) / 2, 0.0};
  }
  const steel::SimResult r = steel::run_sim(world, spec, start, steps, cfg.sim);

  json traj = json::array();
  for (const steel::StepRecord& s : r.trajectory) {
    traj.push_back({{"step", s.step},
                    {"x", s.pose.x},
                    {"y", s.pose.y},
                    {"heading", s.pose.heading},
                    {"mode", steel::to_string(s.mode)},
                    {"motion", steel::to_string(s.motion)},
                    {"ir", s.readings},
                    {"safe", s.support_on_surface}});
  }
  json captures = json::array();
  for (const steel::CaptureRecord& c : r.captures) {
    captures.push_back({{"step", c.step}, {"x", c.pose.x}, {"y", c.pose.y}, {"heading", c.pose.heading}});
  }
  const json doc = {{"steps", traj},
                    {"captures", captures},
                    {"unsafe_steps", r.unsafe_steps},
                    {"maneuvers", r.maneuvers},
                    {"stopped", r.stopped}};
  steel::write_text(out, doc.dump(1) + "\n");
  manifest.add_output(out);
  manifest.counters["steps"] = static_cast<double>(r.trajectory.size());
  manifest.counters["captures"] = static_cast<double>(r.captures.size());
  manifest.counters["unsafe_steps"] = r.unsafe_steps;
  manifest.counters["maneuvers"] = r.maneuvers;
  finish(manifest, out);
  return ok;
}

// ---- eval

bool is_image(const fs::path& p) {
  const std::string e = p.extension().string();
  return e == ".png" || e == ".pgm" || e == ".PNG" || e == ".PGM";
}

std::map<std::string, fs::path> by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw steel::IoError(dir.string() + ": not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image(e.path())) out[e.path().stem().string()] = e.path();
  }
  return out;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& out, const std::string& method,
             const std::string& lighting) {
  steel::RunManifest manifest;
  manifest.command = "eval";
  manifest.started = steel::utc_timestamp();
  const steel::Lighting light = steel::parse_lighting(lighting);
  const auto preds = by_stem(pred_dir);
  const auto gts = by_stem(gt_dir);
  std::vector<steel::ComparisonRow> rows;
  json files = json::array();
  steel::ConfusionCounts total;
  for (const auto& [stem, pp] : preds) {
    const auto it = gts.find(stem);
    if (it == gts.end()) continue;
    steel::ComparisonRow row{method, light, steel::load_mask(pp), steel::load_mask(it->second)};
    const steel::ConfusionCounts c = steel::confusion(row.pred, row.gt);
    const steel::Scores s = steel::scores(c);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
    total.tn += c.tn;
    files.push_back({{"stem", stem}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn},
                     {"pi", s.pi}, {"si", s.si}, {"dsc", s.dsc}});
    manifest.add_input(pp);
    manifest.add_input(it->second);
  }
  if (files.empty()) throw EmptyResult("no prediction/ground-truth pairs share a file stem");
  const steel::Scores s = steel::scores(total);
  const json doc = {{"method", method},
                    {"lighting", steel::to_string(light)},
                    {"pairs", files.size()},
                    {"pooled", {{"tp", total.tp}, {"fp", total.fp}, {"fn", total.fn}, {"tn", total.tn},
                                {"pi", s.pi}, {"si", s.si}, {"dsc", s.dsc}}},
                    {"files", files}};
  steel::write_text(out, doc.dump(2) + "\n");
  manifest.add_output(out);
  manifest.counters["pairs"] = static_cast<double>(files.size());
  finish(manifest, out);
  std::cout << std::fixed;
  std::cout.precision(4);
  std::cout << method << " (" << steel::to_string(light) << "): PI " << s.pi << "  SI " << s.si << "  DSC " << s.dsc
            << "  over " << files.size() << " pairs\n";
  return ok;
}

// ---- peaks

steel::Histogram read_counts(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw steel::IoError(path.string() + ": cannot open");
  std::vector<double> counts;
  double v;
  while (in >> v) counts.push_back(v);
  if (!in.eof()) throw steel::IoError(path.string() + ": non-numeric count");
  if (counts.size() != static_cast<std::size_t>(steel::kGrayLevels)) {
    throw steel::IoError(path.string() + ": expected " + std::to_string(steel::kGrayLevels) + " counts, got " +
                         std::to_string(counts.size()));
  }
  return steel::Histogram::from_counts(counts);
}

int run_peaks(const std::string& input, const std::string& out, bool raw) {
  steel::RunManifest manifest;
  manifest.command = "peaks";
  manifest.started = steel::utc_timestamp();
  const fs::path in(input);
  steel::Histogram h = is_image(in) ? steel::compute_histogram(steel::load_image(in)) : read_counts(in);
  manifest.add_input(in);
  if (!raw) h = steel::smooth(h);
  const steel::PeakSet p = steel::detect_dominant_peaks(h);
  json doc = {{"initial", p.initial}, {"dominant", p.dominant}, {"observing", p.observing}};
  int code = ok;
  try {
    doc["threshold"] = steel::peaks_to_global_threshold(h, p);
  } catch (const steel::NoStructureError& e) {
    doc["threshold"] = nullptr;
    std::cerr << e.what() << "\n";
    code = empty_result;
  }
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    steel::write_text(out, doc.dump(2) + "\n");
    manifest.add_output(out);
    manifest.counters["dominant"] = static_cast<double>(p.dominant.size());
    finish(manifest, out);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steel surface inspection toolkit"};
  app.set_version_flag("--version", steel::tool_version());
  app.require_subcommand(1);

  std::string cfg, out, report, list, gt, frames, poses, world, spec, pred, method = "proposed", lighting = "normal";
  std::vector<std::string> inputs;
  std::string input;
  int jobs = 1, steps = 6000;
  bool raw = false;

  auto* detect = app.add_subcommand("detect", "Segment cracks in one or more images");
  detect->add_option("-i,--input", inputs, "Input image(s)")->required();
  detect->add_option("-c,--config", cfg, "Config file");
  detect->add_option("-o,--out", out, "Mask path, or a directory for several inputs")->required();
  detect->add_option("-r,--report", report, "Report JSON path (directory for several inputs)");
  detect->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* stitch = app.add_subcommand("stitch", "Build a mosaic from a capture list");
  stitch->add_option("-l,--list", list, "captures.json")->required();
  stitch->add_option("-c,--config", cfg, "Config file");
  stitch->add_option("-o,--out", out, "Mosaic image path")->required();
  stitch->add_option("-r,--report", report, "Placement report JSON");

  auto* survey = app.add_subcommand("survey", "Stitch, then detect on the mosaic");
  survey->add_option("-l,--list", list, "captures.json")->required();
  survey->add_option("-c,--config", cfg, "Config file");
  survey->add_option("-o,--out", out, "Output directory")->required();
  survey->add_option("-g,--gt", gt, "Ground-truth mask in mosaic coordinates");

  auto* reg = app.add_subcommand("register", "Align and merge a sequence of point clouds");
  reg->add_option("-f,--frames", frames, "Frame list")->required();
  reg->add_option("-c,--config", cfg, "Config file");
  reg->add_option("-o,--out", out, "Merged cloud (.xyz or .ply)")->required();
  reg->add_option("-p,--poses", poses, "Per-frame transforms JSON");

  auto* sim = app.add_subcommand("simulate", "Run the edge-avoidance simulation");
  sim->add_option("-w,--world", world, "world.json")->required();
  sim->add_option("-s,--spec", spec, "robot.json");
  sim->add_option("-c,--config", cfg, "Config file");
  sim->add_option("-n,--steps", steps, "Timesteps")->check(CLI::NonNegativeNumber);
  sim->add_option("-o,--out", out, "Trajectory JSON")->required();

  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval->add_option("--pred", pred, "Prediction directory")->required();
  eval->add_option("--gt", gt, "Ground-truth directory")->required();
  eval->add_option("-o,--out", out, "Report JSON")->required();
  eval->add_option("--method", method, "Method label");
  eval->add_option("--lighting", lighting, "normal or low");

  auto* peaks = app.add_subcommand("peaks", "Dominant histogram peaks of an image or count file");
  peaks->add_option("-i,--input", input, "Image, or a file of 256 counts")->required();
  peaks->add_option("-o,--out", out, "JSON output (stdout when omitted)");
  peaks->add_flag("--raw", raw, "Skip the 3-bin histogram smoothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*detect) return run_detect(inputs, cfg, out, report, jobs);
    if (*stitch) return run_stitch(list, cfg, out, report);
    if (*survey) return run_survey(list, cfg, out, gt);
    if (*reg) return run_register(frames, cfg, out, poses);
    if (*sim) return run_simulate(world, spec, cfg, steps, out);
    if (*eval) return run_eval(pred, gt, out, method, lighting);
    if (*peaks) return run_peaks(input, out, raw);
  } catch (const std::exception& e) {
    std::cerr << "steel-inspect: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
  return failure;
}
