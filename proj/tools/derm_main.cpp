// derm: command-line front end for the dermoscopy challenge pipeline.
// Subcommands cover challenge scoring (eval-seg, eval-attr, eval-cls),
// segmentation post-processing, deterministic augmentation, color constancy
// and hierarchical fusion. Exit codes: 0 success, 1 usage, 2 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "derm/augment.hpp"
#include "derm/colorconst.hpp"
#include "derm/csv.hpp"
#include "derm/fusion.hpp"
#include "derm/metrics.hpp"
#include "derm/parallel.hpp"
#include "derm/pmap_io.hpp"
#include "derm/png_io.hpp"
#include "derm/postprocess.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Thrown for bad parameter combinations discovered after CLI11 parsing;
// maps to exit code 1 instead of 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::string timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct ReportOptions {
  std::string format = "csv";  // csv | jsonl
  std::string out_path;        // empty -> stdout
  bool banner = true;
  int jobs = 0;
};

void add_report_options(CLI::App* sub, ReportOptions& opts) {
  sub->add_option("--report", opts.format, "Report format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  sub->add_option("--out", opts.out_path, "Write the report here instead of stdout");
  sub->add_flag_callback(
      "--no-banner", [&opts] { opts.banner = false; },
      "Suppress the timestamped header line");
  sub->add_option("--jobs", opts.jobs,
                  "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
}

class ReportSink {
 public:
  explicit ReportSink(const ReportOptions& opts, const std::string& tool)
      : opts_(opts) {
    if (!opts.out_path.empty()) {
      file_.open(opts.out_path);
      if (!file_)
        throw std::runtime_error("cannot open report file: " + opts.out_path);
    }
    if (opts_.banner) {
      if (is_csv())
        stream() << "# derm " << tool << " generated " << timestamp() << "\n";
      else
        stream() << json{{"generated", timestamp()}, {"tool", tool}}.dump()
                 << "\n";
    }
  }

  bool is_csv() const { return opts_.format == "csv"; }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  void csv_line(const std::string& line) { stream() << line << "\n"; }
  void json_line(const json& j) { stream() << j.dump() << "\n"; }

 private:
  ReportOptions opts_;
  std::ofstream file_;
};

// stem -> path for all files in dir with one of the given extensions.
std::map<std::string, fs::path> list_by_stem(
    const fs::path& dir, const std::set<std::string>& extensions) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (!extensions.count(ext)) continue;
    const std::string stem = entry.path().stem().string();
    if (!out.emplace(stem, entry.path()).second)
      throw std::runtime_error("duplicate stem '" + stem +
                               "' in " + dir.string());
  }
  return out;
}

// Shared stems of two directories; mismatches are listed and fatal.
std::vector<std::string> matched_stems(
    const std::map<std::string, fs::path>& pred,
    const std::map<std::string, fs::path>& gt, const std::string& pred_name,
    const std::string& gt_name) {
  std::vector<std::string> only_pred, only_gt, shared;
  for (const auto& [stem, _] : pred)
    (gt.count(stem) ? shared : only_pred).push_back(stem);
  for (const auto& [stem, _] : gt)
    if (!pred.count(stem)) only_gt.push_back(stem);
  if (!only_pred.empty() || !only_gt.empty()) {
    std::string msg = "unmatched stems between directories:";
    for (const auto& s : only_pred) msg += "\n  only in " + pred_name + ": " + s;
    for (const auto& s : only_gt) msg += "\n  only in " + gt_name + ": " + s;
    throw std::runtime_error(msg);
  }
  if (shared.empty())
    throw std::runtime_error("no input files found in " + pred_name + " and " +
                             gt_name);
  return shared;  // already sorted (std::map order)
}

// ---------------------------------------------------------------- eval-seg

struct EvalSegConfig {
  std::string pred_dir, gt_dir;
  double threshold = derm::kJaccardThreshold;
  ReportOptions report;
};

void run_eval_seg(const EvalSegConfig& cfg) {
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0))
    throw UsageError("--threshold must be in [0,1]");
  const auto pred = list_by_stem(cfg.pred_dir, {".png"});
  const auto gt = list_by_stem(cfg.gt_dir, {".png"});
  const auto stems = matched_stems(pred, gt, cfg.pred_dir, cfg.gt_dir);

  std::vector<derm::SegScore> scores(stems.size());
  derm::parallel_for(stems.size(), cfg.report.jobs, [&](std::size_t i) {
    const derm::BinaryMask p = derm::load_mask_png(pred.at(stems[i]).string());
    const derm::BinaryMask g = derm::load_mask_png(gt.at(stems[i]).string());
    scores[i] = derm::score_pair(p, g, cfg.threshold);
  });

  std::vector<double> raws(scores.size()), thrs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    raws[i] = scores[i].raw_jaccard;
    thrs[i] = scores[i].thresholded;
  }
  const double mean_raw = derm::compensated_mean(raws);
  const double mean_thr = derm::compensated_mean(thrs);

  ReportSink sink(cfg.report, "eval-seg");
  if (sink.is_csv()) {
    sink.csv_line("image,raw_jaccard,thresholded");
    for (std::size_t i = 0; i < stems.size(); ++i)
      sink.csv_line(stems[i] + "," + format_score(scores[i].raw_jaccard) +
                    "," + format_score(scores[i].thresholded));
    sink.csv_line("mean," + format_score(mean_raw) + "," +
                  format_score(mean_thr));
  } else {
    for (std::size_t i = 0; i < stems.size(); ++i)
      sink.json_line({{"image", stems[i]},
                      {"raw_jaccard", scores[i].raw_jaccard},
                      {"thresholded", scores[i].thresholded}});
    sink.json_line({{"image", "mean"},
                    {"raw_jaccard", mean_raw},
                    {"thresholded", mean_thr}});
  }
}

// --------------------------------------------------------------- eval-attr

struct EvalAttrConfig {
  std::string pred_dir, gt_dir;
  double bin_threshold = 0.5;
  ReportOptions report;
};

void run_eval_attr(const EvalAttrConfig& cfg) {
  if (!(cfg.bin_threshold >= 0.0 && cfg.bin_threshold <= 1.0))
    throw UsageError("--bin-threshold must be in [0,1]");
  const auto pred = list_by_stem(cfg.pred_dir, {".pmap"});
  const auto gt = list_by_stem(cfg.gt_dir, {".pmap"});
  const auto stems = matched_stems(pred, gt, cfg.pred_dir, cfg.gt_dir);

  std::vector<derm::AttributeScores> scores(stems.size());
  derm::parallel_for(stems.size(), cfg.report.jobs, [&](std::size_t i) {
    const derm::ProbMap p = derm::load_probmap(pred.at(stems[i]).string());
    const derm::ProbMap g = derm::load_probmap(gt.at(stems[i]).string());
    scores[i] = derm::attribute_scores(p, g, cfg.bin_threshold);
  });

  std::array<double, derm::kNumAttributes> channel_mean{};
  std::vector<double> all_pairs;
  all_pairs.reserve(stems.size() * derm::kNumAttributes);
  for (int c = 0; c < derm::kNumAttributes; ++c) {
    std::vector<double> col(stems.size());
    for (std::size_t i = 0; i < stems.size(); ++i)
      col[i] = scores[i].per_channel[c];
    channel_mean[c] = derm::compensated_mean(col);
  }
  for (const auto& s : scores)
    all_pairs.insert(all_pairs.end(), s.per_channel.begin(),
                     s.per_channel.end());
  const double overall = derm::compensated_mean(all_pairs);

  std::string header = "image";
  for (const auto* name : derm::kAttributeNames)
    header += std::string(",") + name;
  header += ",mean";

  ReportSink sink(cfg.report, "eval-attr");
  if (sink.is_csv()) {
    sink.csv_line(header);
    for (std::size_t i = 0; i < stems.size(); ++i) {
      std::string line = stems[i];
      for (double v : scores[i].per_channel) line += "," + format_score(v);
      sink.csv_line(line + "," + format_score(scores[i].mean));
    }
    std::string line = "mean";
    for (double v : channel_mean) line += "," + format_score(v);
    sink.csv_line(line + "," + format_score(overall));
  } else {
    for (std::size_t i = 0; i < stems.size(); ++i) {
      json j{{"image", stems[i]}};
      for (int c = 0; c < derm::kNumAttributes; ++c)
        j[derm::kAttributeNames[c]] = scores[i].per_channel[c];
      j["mean"] = scores[i].mean;
      sink.json_line(j);
    }
    json j{{"image", "mean"}};
    for (int c = 0; c < derm::kNumAttributes; ++c)
      j[derm::kAttributeNames[c]] = channel_mean[c];
    j["mean"] = overall;
    sink.json_line(j);
  }
}

// ---------------------------------------------------------------- eval-cls

struct EvalClsConfig {
  std::string pred_csv, gt_csv;
  ReportOptions report;
};

void run_eval_cls(const EvalClsConfig& cfg) {
  const derm::ProbTable pred =
      derm::read_prob_table_file(cfg.pred_csv, derm::class_columns());
  const derm::ProbTable gt =
      derm::read_prob_table_file(cfg.gt_csv, derm::class_columns());
  const derm::ConfusionMatrix cm = derm::confusion_from_tables(pred, gt);
  const double acc = derm::balanced_accuracy(cm);

  ReportSink sink(cfg.report, "eval-cls");
  if (sink.is_csv()) {
    std::string header = "class";
    for (const auto* name : derm::kClassNames)
      header += std::string(",") + name;
    sink.csv_line(header + ",recall");
    for (int i = 0; i < derm::kNumClasses; ++i) {
      std::string line = derm::kClassNames[i];
      for (int j = 0; j < derm::kNumClasses; ++j)
        line += "," + std::to_string(cm.at(i, j));
      const auto row = cm.row_sum(i);
      line += ",";
      if (row > 0) line += format_score(double(cm.at(i, i)) / double(row));
      sink.csv_line(line);
    }
    sink.csv_line("balanced_accuracy," + format_score(acc));
  } else {
    for (int i = 0; i < derm::kNumClasses; ++i) {
      json j{{"class", derm::kClassNames[i]}};
      std::vector<std::uint64_t> row(derm::kNumClasses);
      for (int c = 0; c < derm::kNumClasses; ++c) row[c] = cm.at(i, c);
      j["predicted"] = row;
      const auto rs = cm.row_sum(i);
      if (rs > 0) j["recall"] = double(cm.at(i, i)) / double(rs);
      sink.json_line(j);
    }
    sink.json_line({{"balanced_accuracy", acc}});
  }
}

// -------------------------------------------------------------- postprocess

struct PostprocessConfig {
  std::string prob_path, image_path, out_path;
  std::string debug_dir;
  bool no_crf = false;
  bool no_watershed = false;
  bool exact = false;
  derm::PostprocessOptions options;
  int jobs = 0;
};

void dump_labelmap_png(const derm::LabelMap& labels, const std::string& path) {
  std::vector<std::uint8_t> gray(labels.pixel_count());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const auto l = labels.value(i);
    gray[i] = l == 0 ? 0 : (l == 1 ? 128 : 255);
  }
  derm::save_gray8_png(gray, labels.width(), labels.height(), path);
}

void postprocess_one(const PostprocessConfig& cfg, const std::string& prob,
                     const std::string& image, const std::string& out,
                     const std::string& stem) {
  const derm::ProbMap p = derm::load_probmap(prob);
  const derm::RgbImage img = derm::load_rgb_png(image);
  const derm::PostprocessTrace trace =
      derm::postprocess_chain_traced(img, p, cfg.options);
  derm::save_mask_png(trace.mask, out);
  if (!cfg.debug_dir.empty()) {
    const fs::path dir(cfg.debug_dir);
    derm::save_pmap(trace.refined, (dir / (stem + "_refined.pmap")).string());
    if (trace.markers)
      dump_labelmap_png(*trace.markers,
                        (dir / (stem + "_markers.png")).string());
    if (trace.basins)
      dump_labelmap_png(*trace.basins, (dir / (stem + "_basins.png")).string());
  }
}

void run_postprocess(PostprocessConfig cfg) {
  try {
    cfg.options.crf.validate();
    if (!(cfg.options.marker_fg_threshold > cfg.options.marker_bg_threshold))
      throw std::invalid_argument("--fg-threshold must be > --bg-threshold");
    if (cfg.options.connectivity != 4 && cfg.options.connectivity != 8)
      throw std::invalid_argument("--connectivity must be 4 or 8");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.options.use_crf = !cfg.no_crf;
  cfg.options.use_watershed = !cfg.no_watershed;
  cfg.options.exact_crf = cfg.exact;
  cfg.options.jobs = cfg.jobs;
  if (!cfg.debug_dir.empty()) fs::create_directories(cfg.debug_dir);

  if (fs::is_directory(cfg.prob_path)) {
    const auto probs = list_by_stem(cfg.prob_path, {".pmap", ".png"});
    const auto images = list_by_stem(cfg.image_path, {".png"});
    const auto stems =
        matched_stems(probs, images, cfg.prob_path, cfg.image_path);
    fs::create_directories(cfg.out_path);
    derm::parallel_for(stems.size(), cfg.jobs, [&](std::size_t i) {
      const fs::path out = fs::path(cfg.out_path) / (stems[i] + ".png");
      postprocess_one(cfg, probs.at(stems[i]).string(),
                      images.at(stems[i]).string(), out.string(), stems[i]);
    });
  } else {
    postprocess_one(cfg, cfg.prob_path, cfg.image_path, cfg.out_path,
                    fs::path(cfg.prob_path).stem().string());
  }
}

// ------------------------------------------------------------------ augment

void add_augment_spec_flags(CLI::App* sub, derm::AugmentSpec& spec) {
  sub->add_flag_callback(
      "--no-flip-horizontal", [&spec] { spec.flip_horizontal = false; },
      "Disable horizontal flips");
  sub->add_flag_callback(
      "--no-flip-vertical", [&spec] { spec.flip_vertical = false; },
      "Disable vertical flips");
  sub->add_option("--scale-low", spec.scale_low, "Scale range lower bound")
      ->capture_default_str();
  sub->add_option("--scale-high", spec.scale_high, "Scale range upper bound")
      ->capture_default_str();
  sub->add_option("--brightness-max-delta", spec.brightness_max_delta,
                  "Brightness jitter bound, [0,1] units")
      ->capture_default_str();
  sub->add_option("--contrast-max-delta", spec.contrast_max_delta,
                  "Contrast jitter bound")
      ->capture_default_str();
  sub->add_option("--saturation-max-delta", spec.saturation_max_delta,
                  "Saturation jitter bound")
      ->capture_default_str();
  sub->add_option("--hue-max-delta", spec.hue_max_delta,
                  "Hue jitter bound, fraction of a full turn")
      ->capture_default_str();
  sub->add_flag_callback(
      "--no-color-jitter", [&spec] { spec.color_jitter_enabled = false; },
      "Disable color jitter (e.g. when color constancy is applied instead)");
}

struct MakePlanConfig {
  std::string labels_csv, out_csv;
  std::size_t target = 20000;
  std::uint64_t seed = 0;
};

void run_make_plan(const MakePlanConfig& cfg) {
  std::ifstream in(cfg.labels_csv);
  if (!in) throw std::runtime_error("cannot open file: " + cfg.labels_csv);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty labels CSV: " + cfg.labels_csv);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "image,class")
    throw std::runtime_error("labels CSV must have header 'image,class', got '" +
                             line + "'");
  std::map<std::string, std::string> labels;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = derm::split_csv_line(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw std::runtime_error("bad labels row: '" + line + "'");
    if (!labels.emplace(fields[0], fields[1]).second)
      throw std::runtime_error("duplicate image id: " + fields[0]);
  }
  if (labels.empty()) throw std::runtime_error("labels CSV has no rows");

  const derm::SamplePlan plan =
      derm::balance_plan(labels, cfg.target, cfg.seed);
  std::ofstream out(cfg.out_csv);
  if (!out) throw std::runtime_error("cannot open file for writing: " + cfg.out_csv);
  out << "image,class,entry_index\n";
  for (const auto& e : plan.entries)
    out << e.image_id << ',' << e.class_label << ',' << e.entry_index << '\n';
}

struct RunAugmentConfig {
  std::string plan_csv, images_dir, out_dir;
  std::string masks_dir, mask_out_dir;
  derm::AugmentSpec spec;
  std::uint64_t seed = 0;
  int jobs = 0;
};

void run_augment(const RunAugmentConfig& cfg) {
  derm::AugmentSpec spec = cfg.spec;
  spec.seed = cfg.seed;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!cfg.masks_dir.empty() && cfg.mask_out_dir.empty())
    throw UsageError("--mask-out is required when --masks is given");

  std::ifstream in(cfg.plan_csv);
  if (!in) throw std::runtime_error("cannot open file: " + cfg.plan_csv);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty plan CSV: " + cfg.plan_csv);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "image,class,entry_index")
    throw std::runtime_error(
        "plan CSV must have header 'image,class,entry_index', got '" + line +
        "'");
  std::vector<derm::PlanEntry> entries;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = derm::split_csv_line(line);
    if (fields.size() != 3 || fields[0].empty())
      throw std::runtime_error("bad plan row: '" + line + "'");
    derm::PlanEntry e;
    e.image_id = fields[0];
    e.class_label = fields[1];
    e.entry_index = std::stoull(fields[2]);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw std::runtime_error("plan CSV has no rows");

  fs::create_directories(cfg.out_dir);
  if (!cfg.mask_out_dir.empty()) fs::create_directories(cfg.mask_out_dir);

  derm::parallel_for(entries.size(), cfg.jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    const fs::path img_path = fs::path(cfg.images_dir) / (e.image_id + ".png");
    const derm::RgbImage img = derm::load_rgb_png(img_path.string());
    std::optional<derm::BinaryMask> mask;
    if (!cfg.masks_dir.empty()) {
      const fs::path mask_path =
          fs::path(cfg.masks_dir) / (e.image_id + ".png");
      mask = derm::load_mask_png(mask_path.string());
    }
    derm::AugmentResult res = derm::apply(img, mask, spec, e.entry_index);
    const std::string name =
        e.image_id + "_" + std::to_string(e.entry_index) + ".png";
    derm::save_rgb_png(res.image, (fs::path(cfg.out_dir) / name).string());
    if (res.mask)
      derm::save_mask_png(*res.mask,
                          (fs::path(cfg.mask_out_dir) / name).string());
  });
}

// ----------------------------------------------------------- color-constancy

struct ColorConstancyConfig {
  std::string input, output;
  double p = 6.0;
  int jobs = 0;
};

void run_color_constancy(const ColorConstancyConfig& cfg) {
  if (!(cfg.p >= 1.0)) throw UsageError("--p must be >= 1");
  auto process = [&](const std::string& in, const std::string& out) {
    const derm::RgbImage img = derm::load_rgb_png(in);
    const derm::Illuminant illum = derm::estimate_illuminant(img, cfg.p);
    derm::save_rgb_png(derm::correct(img, illum), out);
  };
  if (fs::is_directory(cfg.input)) {
    const auto inputs = list_by_stem(cfg.input, {".png"});
    if (inputs.empty())
      throw std::runtime_error("no PNG files in " + cfg.input);
    fs::create_directories(cfg.output);
    std::vector<std::string> stems;
    for (const auto& [stem, _] : inputs) stems.push_back(stem);
    derm::parallel_for(stems.size(), cfg.jobs, [&](std::size_t i) {
      const fs::path out = fs::path(cfg.output) / (stems[i] + ".png");
      process(inputs.at(stems[i]).string(), out.string());
    });
  } else {
    process(cfg.input, cfg.output);
  }
}

// ------------------------------------------------------------ fuse-hierarchy

struct FuseConfig {
  std::string level1, level2, level3, out_csv;
  bool hard = false;
};

void run_fuse(const FuseConfig& cfg) {
  const auto t1 = derm::read_prob_table_file(cfg.level1, derm::level1_columns());
  const auto t2 = derm::read_prob_table_file(cfg.level2, derm::level2_columns());
  const auto t3 = derm::read_prob_table_file(cfg.level3, derm::level3_columns());
  const derm::ProbTable fused = derm::fuse_tables(t1, t2, t3, cfg.hard);
  if (cfg.out_csv.empty()) {
    derm::write_prob_table(std::cout, fused);
  } else {
    std::ofstream out(cfg.out_csv);
    if (!out)
      throw std::runtime_error("cannot open file for writing: " + cfg.out_csv);
    derm::write_prob_table(out, fused);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dermoscopy challenge pipeline toolkit"};
  app.require_subcommand(1);
  // key=value config; subcommand options live under their [section].
  app.set_config("--config", "",
                 "key=value config file; subcommand keys go under a "
                 "[subcommand] section");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::function<void()> runner;

  // eval-seg
  auto seg_cfg = std::make_shared<EvalSegConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "eval-seg", "Score predicted lesion masks against ground truth");
    sub->add_option("pred_dir", seg_cfg->pred_dir, "Predicted mask directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    sub->add_option("gt_dir", seg_cfg->gt_dir, "Ground-truth mask directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    sub->add_option("--threshold", seg_cfg->threshold,
                    "Jaccard zeroing threshold")
        ->capture_default_str();
    add_report_options(sub, seg_cfg->report);
    sub->callback([seg_cfg, &runner] {
      runner = [seg_cfg] { run_eval_seg(*seg_cfg); };
    });
  }

  // eval-attr
  auto attr_cfg = std::make_shared<EvalAttrConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "eval-attr", "Score 5-channel attribute maps against ground truth");
    sub->add_option("pred_dir", attr_cfg->pred_dir,
                    "Predicted probability-map directory (.pmap)")
        ->required()
        ->check(CLI::ExistingDirectory);
    sub->add_option("gt_dir", attr_cfg->gt_dir,
                    "Ground-truth probability-map directory (.pmap)")
        ->required()
        ->check(CLI::ExistingDirectory);
    sub->add_option("--bin-threshold", attr_cfg->bin_threshold,
                    "Prediction binarization threshold")
        ->capture_default_str();
    add_report_options(sub, attr_cfg->report);
    sub->callback([attr_cfg, &runner] {
      runner = [attr_cfg] { run_eval_attr(*attr_cfg); };
    });
  }

  // eval-cls
  auto cls_cfg = std::make_shared<EvalClsConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "eval-cls", "Balanced multi-class accuracy from classification CSVs");
    sub->add_option("pred_csv", cls_cfg->pred_csv, "Predicted probabilities")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("gt_csv", cls_cfg->gt_csv, "One-hot ground truth")
        ->required()
        ->check(CLI::ExistingFile);
    add_report_options(sub, cls_cfg->report);
    sub->callback([cls_cfg, &runner] {
      runner = [cls_cfg] { run_eval_cls(*cls_cfg); };
    });
  }

  // postprocess
  auto pp_cfg = std::make_shared<PostprocessConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "postprocess",
        "Refine lesion probability maps into masks (CRF, watershed, largest "
        "component)");
    sub->add_option("--prob", pp_cfg->prob_path,
                    "Probability map file or directory (.pmap or 16-bit PNG)")
        ->required()
        ->check(CLI::ExistingPath);
    sub->add_option("--image", pp_cfg->image_path,
                    "Matching RGB image file or directory")
        ->required()
        ->check(CLI::ExistingPath);
    sub->add_option("--out", pp_cfg->out_path, "Output mask file or directory")
        ->required();
    sub->add_flag("--no-crf", pp_cfg->no_crf, "Skip CRF refinement");
    sub->add_flag("--no-watershed", pp_cfg->no_watershed,
                  "Skip marker watershed, binarize the refined map instead");
    sub->add_flag("--exact", pp_cfg->exact,
                  "Dense O(N^2) CRF inference (small images only)");
    sub->add_option("--debug-dir", pp_cfg->debug_dir,
                    "Dump per-stage intermediates here");
    derm::CrfParams& crf = pp_cfg->options.crf;
    sub->add_option("--crf-iterations", crf.iterations, "Mean-field iterations")
        ->capture_default_str();
    sub->add_option("--w-spatial", crf.w_spatial, "Spatial kernel weight")
        ->capture_default_str();
    sub->add_option("--sigma-spatial", crf.sigma_spatial,
                    "Spatial kernel bandwidth, pixels")
        ->capture_default_str();
    sub->add_option("--w-bilateral", crf.w_bilateral, "Bilateral kernel weight")
        ->capture_default_str();
    sub->add_option("--sigma-bilateral-xy", crf.sigma_bilateral_xy,
                    "Bilateral spatial bandwidth, pixels")
        ->capture_default_str();
    sub->add_option("--sigma-bilateral-rgb", crf.sigma_bilateral_rgb,
                    "Bilateral color bandwidth, intensity units")
        ->capture_default_str();
    sub->add_option("--truncation-sigmas",
                    crf.kernel_truncation_radius_sigmas,
                    "Message window radius in multiples of sigma-spatial")
        ->capture_default_str();
    sub->add_option("--fg-threshold", pp_cfg->options.marker_fg_threshold,
                    "Lesion seed threshold")
        ->capture_default_str();
    sub->add_option("--bg-threshold", pp_cfg->options.marker_bg_threshold,
                    "Background seed threshold")
        ->capture_default_str();
    sub->add_option("--threshold", pp_cfg->options.binarize_threshold,
                    "Fallback binarization threshold")
        ->capture_default_str();
    sub->add_option("--connectivity", pp_cfg->options.connectivity,
                    "Component connectivity (4 or 8)")
        ->capture_default_str();
    sub->add_option("--jobs", pp_cfg->jobs,
                    "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    sub->callback([pp_cfg, &runner] {
      runner = [pp_cfg] { run_postprocess(*pp_cfg); };
    });
  }

  // augment
  {
    CLI::App* sub = app.add_subcommand(
        "augment", "Deterministic augmentation plans and execution");
    sub->require_subcommand(1);

    auto plan_cfg = std::make_shared<MakePlanConfig>();
    CLI::App* mk = sub->add_subcommand(
        "make-plan", "Build a class-balancing oversampling plan");
    mk->add_option("--labels", plan_cfg->labels_csv,
                   "CSV with header image,class")
        ->required()
        ->check(CLI::ExistingFile);
    mk->add_option("--target", plan_cfg->target, "Entries per class")
        ->capture_default_str();
    mk->add_option("--out", plan_cfg->out_csv, "Plan CSV to write")->required();
    mk->add_option("--seed", plan_cfg->seed, "Shuffle seed")
        ->capture_default_str();
    mk->callback([plan_cfg, &runner] {
      runner = [plan_cfg] { run_make_plan(*plan_cfg); };
    });

    auto run_cfg = std::make_shared<RunAugmentConfig>();
    CLI::App* rn = sub->add_subcommand("run", "Execute a plan over a corpus");
    rn->add_option("--plan", run_cfg->plan_csv,
                   "Plan CSV (image,class,entry_index)")
        ->required()
        ->check(CLI::ExistingFile);
    rn->add_option("--images", run_cfg->images_dir, "Input image directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    rn->add_option("--masks", run_cfg->masks_dir,
                   "Optional mask directory transformed alongside")
        ->check(CLI::ExistingDirectory);
    rn->add_option("--out", run_cfg->out_dir, "Augmented image directory")
        ->required();
    rn->add_option("--mask-out", run_cfg->mask_out_dir,
                   "Augmented mask directory");
    rn->add_option("--seed", run_cfg->seed, "Base draw seed")
        ->capture_default_str();
    rn->add_option("--jobs", run_cfg->jobs,
                   "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    add_augment_spec_flags(rn, run_cfg->spec);
    rn->callback([run_cfg, &runner] {
      runner = [run_cfg] { run_augment(*run_cfg); };
    });
  }

  // color-constancy
  auto cc_cfg = std::make_shared<ColorConstancyConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "color-constancy", "Shades-of-gray white balance normalization");
    sub->add_option("input", cc_cfg->input, "Input PNG or directory")
        ->required()
        ->check(CLI::ExistingPath);
    sub->add_option("output", cc_cfg->output, "Output PNG or directory")
        ->required();
    sub->add_option("--p", cc_cfg->p, "Minkowski norm order")
        ->capture_default_str();
    sub->add_option("--jobs", cc_cfg->jobs,
                    "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    sub->callback([cc_cfg, &runner] {
      runner = [cc_cfg] { run_color_constancy(*cc_cfg); };
    });
  }

  // fuse-hierarchy
  auto fuse_cfg = std::make_shared<FuseConfig>();
  {
    CLI::App* sub = app.add_subcommand(
        "fuse-hierarchy",
        "Combine three hierarchy-level CSVs into one 7-class CSV");
    sub->add_option("--level1", fuse_cfg->level1, "CSV image,NV,OTHER")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--level2", fuse_cfg->level2, "CSV image,MEL,BKL,OTHER")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--level3", fuse_cfg->level3,
                    "CSV image,BCC,AKIEC,DF,VASC")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", fuse_cfg->out_csv,
                    "Output CSV (stdout when omitted)");
    sub->add_flag("--hard", fuse_cfg->hard,
                  "Argmax routing instead of the soft conditional product");
    sub->callback([fuse_cfg, &runner] {
      runner = [fuse_cfg] { run_fuse(*fuse_cfg); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    runner();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
