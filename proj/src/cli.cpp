#include "uroc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>

#include "CLI11.hpp"
#include "uroc/bootstrap.hpp"
#include "uroc/dataset.hpp"
#include "uroc/error.hpp"
#include "uroc/estimators.hpp"
#include "uroc/fairness.hpp"
#include "uroc/report.hpp"
#include "uroc/score_cache.hpp"
#include "uroc/synthetic.hpp"
#include "uroc/text.hpp"

namespace uroc {

namespace {

namespace fs = std::filesystem;
using report::Json;

// Files are staged here and written only once the whole command succeeded.
class Outputs {
 public:
  void add(fs::path path, std::string contents) {
    files_.emplace_back(std::move(path), std::move(contents));
  }
  void write(std::ostream& out) const {
    for (const auto& [path, contents] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      text::write_file(path, contents);
      out << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

struct InputOptions {
  std::string input;
  std::string input_format = "auto";
  std::string scores;
  std::string attributes;
  std::string policy = "same_attribute_only";

  void add_to(CLI::App& app) {
    app.add_option("--input,-i", input, "Embedding file (CSV or binary)");
    app.add_option("--input-format", input_format,
                   "Embedding format: auto, csv or binary")
        ->check(CLI::IsMember({"auto", "csv", "binary"}));
    app.add_option("--scores", scores,
                   "Precomputed score CSV (instead of --input)");
    app.add_option("--attributes", attributes,
                   "identity,attribute CSV for --scores");
    app.add_option("--policy", policy, "Impostor pairs kept")
        ->check(CLI::IsMember({"same_attribute_only", "all_pairs"}));
  }

  Json echo() const {
    return Json{{"input", input},
                {"input_format", input_format},
                {"scores", scores},
                {"attributes", attributes},
                {"policy", policy}};
  }

  ScoreCache load() const {
    const ImpostorPolicy p = parse_impostor_policy(policy);
    if (!scores.empty() && !input.empty()) {
      throw InputError("give either --input or --scores, not both");
    }
    if (!scores.empty()) {
      std::map<std::int64_t, std::int64_t> attrs;
      if (!attributes.empty()) attrs = load_attribute_map(attributes);
      return load_scores(scores, attrs, p);
    }
    if (input.empty()) throw InputError("missing --input");
    return ScoreCache::build(load_embeddings(input, format()), p);
  }

  EmbeddingFormat format() const {
    if (input_format == "csv") return EmbeddingFormat::csv;
    if (input_format == "binary") return EmbeddingFormat::binary;
    return guess_format(input);
  }
};

struct BootstrapFlags {
  std::string grid = "default";
  std::size_t replicates = 100;
  double alpha_ci = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";

  void add_to(CLI::App& app) {
    app.add_option("--grid", grid,
                   "FAR grid: default, a list, or log:lo:hi:n / lin:lo:hi:n "
                   "segments joined with '+'");
    app.add_option("--B", replicates, "Bootstrap replicates")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
    app.add_option("--alpha-ci", alpha_ci, "Confidence level parameter")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--seed", seed, "Root seed")->envname("UROC_SEED");
    app.add_option("--threads", threads, "Worker cap")
        ->envname("UROC_THREADS")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--out,-o", out_dir, "Output directory");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  // Threads and the output directory never change results, so they stay
  // out of the echoed config.
  Json echo() const {
    return Json{{"grid", grid},
                {"B", replicates},
                {"alpha_CI", alpha_ci},
                {"seed", seed},
                {"format", format}};
  }
};

std::string group_name(const ScoreCache& cache, std::optional<int> attribute) {
  return attribute ? "attr_" + std::to_string(cache.attribute_label(*attribute))
                   : std::string("global");
}

int cmd_roc(const InputOptions& in, const BootstrapFlags& flags,
            const std::string& mode_name, bool per_attribute,
            bool skip_global, bool export_cdf, std::ostream& out,
            std::ostream& err) {
  const BandMode mode = parse_band_mode(mode_name);
  const auto alphas = parse_alpha_grid(flags.grid);
  const ScoreCache cache = in.load();

  Json config = in.echo();
  config.update(flags.echo());
  config["subcommand"] = "roc";
  config["mode"] = mode_name;
  config["per_attribute"] = per_attribute;
  config["skip_global"] = skip_global;
  config["export_cdf"] = export_cdf;

  std::vector<std::optional<int>> groups;
  if (!skip_global) groups.emplace_back();
  if (per_attribute) {
    for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
      groups.emplace_back(static_cast<int>(a));
    }
  }
  if (groups.empty()) throw InputError("no group selected");

  const BandOptions options{flags.replicates, flags.alpha_ci, flags.seed, mode,
                            flags.threads};
  const fs::path dir = flags.out_dir;
  const bool json = flags.format == "json";
  const std::string ext = json ? ".json" : ".csv";
  Outputs outputs;
  for (const auto& group : groups) {
    const std::string name = group_name(cache, group);
    Json meta_config = config;
    meta_config["group"] = name;
    const Json meta = report::metadata(meta_config);

    const CurveBand band = roc_confidence_band(cache, alphas, options, group);
    for (const auto& w : band.warnings) err << "warning: " << w << '\n';
    const RocCurve estimate{band.alphas, band.estimate};
    const auto normalized = std_curve(band, estimate);

    const fs::path stem = dir / ("roc_" + name);
    outputs.add(stem.string() + "_curve" + ext,
                json ? report::curve_json(estimate, meta)
                     : report::curve_csv(estimate, meta));
    outputs.add(stem.string() + "_band" + ext,
                json ? report::band_json(band, meta)
                     : report::band_csv(band, meta));
    outputs.add(stem.string() + "_std" + ext,
                json ? report::std_curve_json(band.alphas, normalized, meta)
                     : report::std_curve_csv(band.alphas, normalized, meta));
    if (export_cdf) {
      outputs.add(stem.string() + "_genuine_cdf.csv",
                  report::cdf_csv(genuine_cdf(cache, group), meta));
      outputs.add(stem.string() + "_impostor_cdf.csv",
                  report::cdf_csv(impostor_cdf(cache, group), meta));
    }
  }
  outputs.write(out);
  return kExitOk;
}

int cmd_fairness(const InputOptions& in, const BootstrapFlags& flags,
                 const std::vector<std::string>& metric_names,
                 const std::string& side_name, bool strict, std::ostream& out) {
  const auto alphas = parse_alpha_grid(flags.grid);
  std::vector<Metric> metrics;
  if (metric_names.empty() ||
      std::find(metric_names.begin(), metric_names.end(), "all") !=
          metric_names.end()) {
    metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
  } else {
    for (const auto& name : metric_names) metrics.push_back(parse_metric(name));
  }
  std::vector<Side> sides;
  if (side_name == "both") {
    sides.assign(std::begin(kAllSides), std::end(kAllSides));
  } else {
    sides.push_back(parse_side(side_name));
  }
  const ScoreCache cache = in.load();

  Json config = in.echo();
  config.update(flags.echo());
  config["subcommand"] = "fairness";
  config["metrics"] = metric_names.empty() ? std::vector<std::string>{"all"}
                                           : metric_names;
  config["side"] = side_name;
  config["strict"] = strict;
  const Json meta = report::metadata(config);

  FairnessOptions options;
  options.replicates = flags.replicates;
  options.alpha_ci = flags.alpha_ci;
  options.seed = flags.seed;
  options.threads = flags.threads;
  options.zeros = strict ? ZeroPolicy::strict : ZeroPolicy::floor;
  const auto reports = fairness_bands(cache, metrics, sides, alphas, options);

  std::vector<std::int64_t> labels;
  for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
    labels.push_back(cache.attribute_label(static_cast<int>(a)));
  }
  Outputs outputs;
  const fs::path dir = flags.out_dir;
  if (flags.format == "json") {
    outputs.add(dir / "fairness.json",
                report::fairness_json(reports, labels, meta));
  } else {
    outputs.add(dir / "fairness.csv",
                report::fairness_csv(reports, labels, meta));
  }
  outputs.write(out);
  return kExitOk;
}

struct SynthFlags {
  std::size_t identities = 50;
  std::size_t images = 8;
  std::size_t images_max = 0;
  std::size_t dimension = 16;
  std::size_t attributes = 1;
  std::vector<double> sigma = {1.0};
  std::uint64_t seed = 1;

  void add_to(CLI::App& app) {
    app.add_option("--K", identities, "Identities");
    app.add_option("--n", images, "Images per identity (minimum with --n-max)");
    app.add_option("--n-max", images_max, "Maximum images per identity");
    app.add_option("--d", dimension, "Embedding dimension");
    app.add_option("--A", attributes, "Attribute values");
    app.add_option("--sigma", sigma,
                   "Noise scale: one value, or one per attribute")
        ->delimiter(',');
    app.add_option("--seed", seed, "Generator seed")->envname("UROC_SEED");
  }

  SynthConfig config() const {
    SynthConfig cfg;
    cfg.identities = identities;
    cfg.images_min = images;
    cfg.images_max = images_max == 0 ? images : images_max;
    cfg.dimension = dimension;
    cfg.seed = seed;
    if (attributes == 0) throw InputError("--A must be positive");
    if (sigma.size() == 1) {
      cfg.sigma.assign(attributes, sigma.front());
    } else if (sigma.size() == attributes) {
      cfg.sigma = sigma;
    } else {
      throw InputError("--sigma needs 1 or A values");
    }
    cfg.validate();
    return cfg;
  }

  Json echo() const {
    const SynthConfig cfg = config();
    return Json{{"K", cfg.identities},
                {"n_min", cfg.images_min},
                {"n_max", cfg.images_max},
                {"d", cfg.dimension},
                {"A", cfg.attribute_count()},
                {"sigma", cfg.sigma},
                {"seed", cfg.seed}};
  }
};

int cmd_synth(const SynthFlags& flags, const std::string& output,
              const std::string& format, std::ostream& out) {
  const EmbeddingDataset ds = generate_dataset(flags.config());
  const fs::path path = output;
  const EmbeddingFormat fmt =
      format == "auto" ? guess_format(path)
                       : (format == "binary" ? EmbeddingFormat::binary
                                             : EmbeddingFormat::csv);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_embeddings(ds, path, fmt);
  out << "wrote " << path.string() << " (" << ds.size() << " images, "
      << ds.identity_count() << " identities)\n";
  return kExitOk;
}

int cmd_scores(const InputOptions& in, const std::string& output,
               const std::string& attributes_out, std::ostream& out) {
  if (!in.scores.empty()) throw InputError("scores expects --input embeddings");
  const ScoreCache cache = in.load();
  Outputs outputs;
  outputs.add(output, scores_to_csv(cache));
  if (!attributes_out.empty()) {
    outputs.add(attributes_out, attribute_map_to_csv(cache));
  }
  outputs.write(out);
  return kExitOk;
}

int cmd_coverage(const SynthFlags& synth, const BootstrapFlags& flags,
                 std::size_t reps, const std::vector<double>& alphas,
                 std::size_t mc_pairs, const std::string& policy,
                 std::ostream& out) {
  CoverageOptions options;
  options.reps = reps;
  options.replicates = flags.replicates;
  options.alpha_ci = flags.alpha_ci;
  options.alphas = alphas;
  options.mc_pairs = mc_pairs;
  options.seed = flags.seed;
  options.threads = flags.threads;
  options.policy = parse_impostor_policy(policy);
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("FAR level must lie in (0, 1)");
  }
  const SynthConfig cfg = synth.config();
  const CoverageResult result = coverage_experiment(cfg, options);

  Json config = synth.echo();
  config.update(flags.echo());
  config.erase("grid");
  config["subcommand"] = "coverage";
  config["reps"] = reps;
  config["alphas"] = alphas;
  config["mc_pairs"] = mc_pairs;
  config["policy"] = policy;
  const Json meta = report::metadata(config);

  Outputs outputs;
  const fs::path dir = flags.out_dir;
  if (flags.format == "json") {
    outputs.add(dir / "coverage.json", report::coverage_json(result, meta));
  } else {
    outputs.add(dir / "coverage.csv", report::coverage_csv(result, meta));
  }
  outputs.add(dir / "coverage_config.json", meta.dump(2) + "\n");
  outputs.write(out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"ROC curves, fairness metrics and recentered bootstrap bands "
               "for similarity scoring functions",
               "uroc"};
  app.require_subcommand(1);

  InputOptions roc_in;
  BootstrapFlags roc_flags;
  std::string mode = "recentered";
  bool per_attribute = false;
  bool skip_global = false;
  bool export_cdf = false;
  auto* roc = app.add_subcommand("roc", "ROC estimate with a bootstrap band");
  roc_in.add_to(*roc);
  roc_flags.add_to(*roc);
  roc->add_option("--mode", mode, "Band construction")
      ->check(CLI::IsMember({"recentered", "naive"}));
  roc->add_flag("--per-attribute", per_attribute,
                "Also emit one band per attribute value");
  roc->add_flag("--skip-global", skip_global, "Omit the global band");
  roc->add_flag("--export-cdf", export_cdf,
                "Also write the genuine and impostor CDFs");

  InputOptions fair_in;
  BootstrapFlags fair_flags;
  std::vector<std::string> metric_names;
  std::string side = "both";
  bool strict = false;
  auto* fairness =
      app.add_subcommand("fairness", "Fairness metrics with bootstrap bands");
  fair_in.add_to(*fairness);
  fair_flags.add_to(*fairness);
  fairness
      ->add_option("--metric", metric_names,
                   "all, max_min, max_geomean, log_geomean or gini")
      ->delimiter(',');
  fairness->add_option("--side", side, "FAR, FRR or both")
      ->check(CLI::IsMember({"FAR", "FRR", "far", "frr", "both"}));
  fairness->add_flag("--strict", strict,
                     "Fail on zero group rates instead of flooring them");

  SynthFlags synth_flags;
  std::string synth_output;
  std::string synth_format = "auto";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_flags.add_to(*synth);
  synth->add_option("--output,-o", synth_output, "Output file")->required();
  synth->add_option("--format", synth_format, "auto, csv or binary")
      ->check(CLI::IsMember({"auto", "csv", "binary"}));

  InputOptions scores_in;
  std::string scores_output;
  std::string attributes_out;
  auto* scores =
      app.add_subcommand("scores", "Write the pairwise score cache as CSV");
  scores_in.add_to(*scores);
  scores->add_option("--output,-o", scores_output, "Score CSV")->required();
  scores->add_option("--attributes-out", attributes_out,
                     "Also write the identity,attribute map");

  SynthFlags cov_synth;
  BootstrapFlags cov_flags;
  cov_flags.replicates = 200;
  std::size_t reps = 200;
  std::vector<double> cov_alphas = {0.05, 0.1, 0.2};
  std::size_t mc_pairs = 1'000'000;
  std::string cov_policy = "same_attribute_only";
  auto* coverage = app.add_subcommand(
      "coverage", "Coverage of recentered and naive bands on synthetic data");
  cov_synth.add_to(*coverage);
  coverage->remove_option(coverage->get_option("--seed"));
  cov_flags.add_to(*coverage);
  coverage->remove_option(coverage->get_option("--grid"));
  coverage->add_option("--reps", reps, "Repetitions")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  coverage->add_option("--alphas", cov_alphas, "FAR levels checked")
      ->delimiter(',');
  coverage->add_option("--mc-pairs", mc_pairs,
                       "Monte-Carlo pairs per side for the true ROC");
  coverage->add_option("--policy", cov_policy, "Impostor pairs kept")
      ->check(CLI::IsMember({"same_attribute_only", "all_pairs"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = e.get_exit_code();
    if (code == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (roc->parsed()) {
      return cmd_roc(roc_in, roc_flags, mode, per_attribute, skip_global,
                     export_cdf, out, err);
    }
    if (fairness->parsed()) {
      return cmd_fairness(fair_in, fair_flags, metric_names, side, strict, out);
    }
    if (synth->parsed()) {
      return cmd_synth(synth_flags, synth_output, synth_format, out);
    }
    if (scores->parsed()) {
      return cmd_scores(scores_in, scores_output, attributes_out, out);
    }
    cov_synth.seed = cov_flags.seed;
    return cmd_coverage(cov_synth, cov_flags, reps, cov_alphas, mc_pairs,
                        cov_policy, out);
  } catch (const UndefinedMetricError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUndefinedMetric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace uroc
