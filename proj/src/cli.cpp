#include "mkmmd/cli.hpp"

#include "mkmmd/diagnostics.hpp"
#include "mkmmd/parallel.hpp"
#include "mkmmd/pipeline.hpp"
#include "mkmmd/select.hpp"
#include "mkmmd/serialize.hpp"
#include "mkmmd/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mkmmd::cli {

namespace {

struct RunConfig {
  std::string input;
  std::string format;
  std::string synthetic;
  Index synthetic_n = 400;
  Index synthetic_dim = 5;
  double synthetic_mean = 0.5;
  double synthetic_stddev = 1.0;

  std::vector<std::string> kernel_specs;
  std::vector<double> gammas;
  std::string family = "gaussian";
  bool no_standardize = false;
  bool biased = false;

  std::vector<Index> draws{256};
  double radius = 1.0;
  double lambda = 1.0;
  int epochs = 50;
  Index batch_size = 0;
  std::string schedule = "inverse_linear";
  double step = 1.0;

  int folds = 5;
  double test_fraction = 0.25;
  int trials = 10;

  std::string model;
  std::string output;
  std::string json;
  std::string csv;
  std::string log;
  std::string concentration_csv;
  std::string preset = "two-gaussians";

  std::uint64_t seed = 0;
  int threads = 1;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write output file: " + path);
  out << content;
  if (!out) throw DataError("failed writing output file: " + path);
}

/// Writes to `path`, or to `out` when the path is empty.
void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty()) out << content;
  else write_file(path, content);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

BaseKernel parse_kernel_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("kernel spec '" + spec + "' must look like family:bandwidth");
  const KernelFamily family = parse_kernel_family(spec.substr(0, colon));
  double bandwidth = 0.0;
  try {
    std::size_t used = 0;
    bandwidth = std::stod(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("kernel spec '" + spec + "' has an invalid bandwidth");
  }
  return BaseKernel(family, bandwidth);
}

std::vector<BaseKernel> kernel_bank(const RunConfig& cfg) {
  std::vector<BaseKernel> kernels;
  for (const auto& spec : cfg.kernel_specs) kernels.push_back(parse_kernel_spec(spec));
  const KernelFamily family = parse_kernel_family(cfg.family);
  for (double g : cfg.gammas) kernels.push_back(BaseKernel::from_gamma(family, g));
  if (kernels.empty()) {
    for (double rho : {0.5, 1.0, 2.0}) kernels.emplace_back(family, rho);
  }
  return kernels;
}

LabeledDataset synthetic_dataset(const std::string& preset, const RunConfig& cfg) {
  if (cfg.synthetic_n < 2 || cfg.synthetic_dim < 1) throw ConfigError("synthetic data needs n >= 2 and dim >= 1");
  if (preset == "two-gaussians") {
    return make_two_gaussians(cfg.synthetic_n, Eigen::VectorXd::Constant(cfg.synthetic_dim, cfg.synthetic_mean),
                              cfg.synthetic_stddev, cfg.seed);
  }
  if (preset == "planted") return make_planted_feature(cfg.synthetic_n, cfg.synthetic_dim, cfg.seed);
  throw ConfigError("unknown synthetic preset '" + preset + "' (expected two-gaussians or planted)");
}

FileFormat resolve_format(const RunConfig& cfg) {
  if (cfg.format.empty()) return format_from_path(cfg.input);
  if (cfg.format == "csv") return FileFormat::csv;
  if (cfg.format == "libsvm") return FileFormat::libsvm;
  throw ConfigError("unknown format '" + cfg.format + "' (expected csv or libsvm)");
}

LabeledDataset load_input(const RunConfig& cfg, const LoadOptions& options = {}) {
  if (!cfg.synthetic.empty()) {
    if (!cfg.input.empty()) throw ConfigError("--input and --synthetic are mutually exclusive");
    return synthetic_dataset(cfg.synthetic, cfg);
  }
  if (cfg.input.empty()) throw ConfigError("an --input file or a --synthetic preset is required");
  return load_dataset(cfg.input, resolve_format(cfg), options);
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig t;
  t.radius = cfg.radius;
  t.lambda = cfg.lambda;
  t.epochs = cfg.epochs;
  t.batch_size = cfg.batch_size;
  t.schedule = parse_step_schedule(cfg.schedule);
  t.step = cfg.step;
  validate(t);
  return t;
}

MmdOptions mmd_options(const RunConfig& cfg) {
  MmdOptions o;
  o.prefer_unbiased = !cfg.biased;
  return o;
}

Index single_draws(const RunConfig& cfg) {
  if (cfg.draws.size() != 1) throw ConfigError("this command takes exactly one --draws value");
  return cfg.draws.front();
}

PipelineConfig pipeline_config(const RunConfig& cfg) {
  PipelineConfig p;
  p.kernels = kernel_bank(cfg);
  p.draws = single_draws(cfg);
  p.train = train_config(cfg);
  p.mmd = mmd_options(cfg);
  p.standardize = !cfg.no_standardize;
  p.seed = cfg.seed;
  return p;
}

void validate_common(const RunConfig& cfg) {
  if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
  for (Index d : cfg.draws)
    if (d < 1) throw ConfigError("--draws must be at least 1");
  if (cfg.draws.empty()) throw ConfigError("at least one --draws value is required");
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  LabeledDataset ds = load_input(cfg);
  validate(ds);
  if (!cfg.no_standardize) ds = standardize(ds).first;
  const auto kernels = kernel_bank(cfg);
  const auto split = split_by_label(ds);
  const WeightResult result = mixing_weights(kernels, split.positives, split.negatives, mmd_options(cfg));
  emit(out, cfg.json, dump(score_report_json(kernels, result)));
  if (!cfg.csv.empty()) {
    std::ostringstream csv;
    csv << "family,bandwidth,gamma,estimator,mmd_squared,mmd,weight\n";
    for (std::size_t l = 0; l < kernels.size(); ++l) {
      const auto& s = result.scores[l];
      csv << to_string(kernels[l].family()) << ',' << format_number(kernels[l].bandwidth()) << ','
          << format_number(kernels[l].gamma()) << ',' << to_string(s.estimator) << ',' << format_number(s.squared) << ','
          << format_number(s.value) << ',' << format_number(result.weights[static_cast<Index>(l)]) << '\n';
    }
    write_file(cfg.csv, csv.str());
  }
  return kSuccess;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) throw ConfigError("train needs --model for the output model file");
  const LabeledDataset ds = load_input(cfg);
  const PipelineResult fitted = fit_multiple_kernel_svm(ds, pipeline_config(cfg));
  save_model(cfg.model, fitted.model);
  Json log = training_log_json(fitted.model.linear);
  const Metrics m = evaluate(fitted.model, ds);
  log["train_accuracy"] = m.accuracy;
  log["train_hinge_loss"] = m.hinge_loss;
  log["weights"] = std::vector<double>(fitted.weights.weights.vector().data(),
                                       fitted.weights.weights.vector().data() + fitted.weights.weights.size());
  log["degenerate_weights"] = fitted.weights.degenerate;
  emit(out, cfg.log, dump(log));
  return kSuccess;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) throw ConfigError("predict needs --model");
  const SvmModel model = load_model(cfg.model);
  LoadOptions options;
  options.labels_required = false;
  options.dim = model.bank.input_dim();
  LabeledDataset ds;
  const bool empty_file = cfg.synthetic.empty() && !cfg.input.empty() && std::filesystem::exists(cfg.input) &&
                          std::filesystem::file_size(cfg.input) == 0;
  if (!empty_file) ds = load_input(cfg, options);
  if (ds.size() > 0 && ds.dim() != model.bank.input_dim())
    throw DataError("input has " + std::to_string(ds.dim()) + " features, model expects " +
                    std::to_string(model.bank.input_dim()));
  const Eigen::VectorXd f = ds.size() > 0 ? decision_values(model, ds.features) : Eigen::VectorXd();
  std::ostringstream csv;
  csv << "index,decision_value,soft_output,label\n";
  for (Index i = 0; i < f.size(); ++i)
    csv << i << ',' << format_number(f(i)) << ',' << format_number(logistic(f(i))) << ',' << sign_label(f(i)) << '\n';
  emit(out, cfg.output, csv.str());
  return kSuccess;
}

BandwidthGrid selection_grid(const RunConfig& cfg) {
  if (cfg.gammas.empty()) return BandwidthGrid::default_grid();
  std::vector<double> g = cfg.gammas;
  std::sort(g.begin(), g.end());
  return BandwidthGrid(std::move(g));
}

int cmd_select(const RunConfig& cfg, std::ostream& out) {
  LabeledDataset ds = load_input(cfg);
  validate(ds);
  if (!cfg.no_standardize) ds = standardize(ds).first;
  SelectionConfig s;
  s.folds = cfg.folds;
  s.draws = single_draws(cfg);
  s.train = train_config(cfg);
  s.family = parse_kernel_family(cfg.family);
  s.mmd = mmd_options(cfg);
  s.test_fraction = cfg.test_fraction;
  s.seed = cfg.seed;
  const SelectionReport report = compare_selection(ds, selection_grid(cfg), s);
  std::ostringstream csv;
  write_selection_csv(csv, report);
  emit(out, cfg.csv, csv.str());
  if (!cfg.json.empty()) write_file(cfg.json, dump(selection_json(report)));
  return kSuccess;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.trials < 1) throw ConfigError("--trials must be at least 1");
  LabeledDataset ds = load_input(cfg);
  validate(ds);
  if (!cfg.no_standardize) ds = standardize(ds).first;
  const auto kernels = kernel_bank(cfg);
  const auto split = split_by_label(ds);
  const WeightResult weights = mixing_weights(kernels, split.positives, split.negatives, mmd_options(cfg));

  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < cfg.trials; ++t) seeds.push_back(derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(t)));

  std::ostringstream table, conc;
  write_complexity_csv_header(table);
  write_concentration_csv_header(conc);
  Json rows = Json::array();
  bool ordering_ok = true;
  for (Index D : cfg.draws) {
    const FeatureBank bank = FeatureBank::generate(kernels, weights.weights, D, ds.dim(), derive_seed(cfg.seed, kBankStage));
    const ComplexityReport report = complexity_bounds(build_feature_matrix(ds.features, bank), cfg.radius);
    ordering_ok = ordering_ok && report.ordering_holds();
    write_complexity_csv_row(table, report);
    Json row = complexity_json(report);
    const ConcentrationReport fro = frobenius_concentration(ds.features, kernels, weights.weights, D, seeds);
    write_concentration_csv_rows(conc, "frobenius", fro);
    row["frobenius_concentration"] = concentration_json(fro);
    if (ds.size() <= kSpectralRowLimit) {
      const ConcentrationReport spec = spectral_concentration(ds.features, kernels, weights.weights, D, seeds);
      write_concentration_csv_rows(conc, "spectral", spec);
      row["spectral_concentration"] = concentration_json(spec);
    }
    rows.push_back(std::move(row));
  }
  const Json doc = {{"schema_version", kSchemaVersion}, {"rows", rows}, {"ordering_holds", ordering_ok}};
  emit(out, cfg.csv, table.str());
  if (!cfg.json.empty()) write_file(cfg.json, dump(doc));
  if (!cfg.concentration_csv.empty()) write_file(cfg.concentration_csv, conc.str());
  if (!ordering_ok) {
    err << "error: erfc bound exceeds the Khintchine bound\n";
    return kFailure;
  }
  return kSuccess;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset ds = load_input(cfg);
  validate(ds);
  std::ostringstream csv;
  write_csv(csv, ds);
  emit(out, cfg.output, csv.str());
  return kSuccess;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset ds = synthetic_dataset(cfg.preset, cfg);
  std::ostringstream csv;
  write_csv(csv, ds);
  emit(out, cfg.output, csv.str());
  return kSuccess;
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-i,--input", cfg.input, "Data file (.csv with a 'label' column, anything else read as LIBSVM)");
  sub->add_option("--format", cfg.format, "Force the input format: csv or libsvm");
  sub->add_option("--synthetic", cfg.synthetic, "Generate the data instead: two-gaussians or planted");
  sub->add_option("--n", cfg.synthetic_n, "Synthetic sample count");
  sub->add_option("--dim", cfg.synthetic_dim, "Synthetic dimension");
  sub->add_option("--mean", cfg.synthetic_mean, "Per-coordinate class mean offset for two-gaussians (classes at +/- mean)");
  sub->add_option("--stddev", cfg.synthetic_stddev, "Per-coordinate standard deviation for two-gaussians");
  sub->add_flag("--no-standardize", cfg.no_standardize, "Use raw features instead of z-scores");
}

void add_kernel_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-k,--kernel", cfg.kernel_specs, "Base kernel as family:bandwidth (gaussian, laplacian, anova); repeatable");
  sub->add_option("--gamma", cfg.gammas, "Base kernel by gamma = 1/(2 rho^2) in --family; repeatable");
  sub->add_option("--family", cfg.family, "Kernel family used with --gamma");
  sub->add_flag("--biased", cfg.biased, "Always use the biased MMD estimator");
}

void add_train_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-D,--draws", cfg.draws, "Random features per base kernel");
  sub->add_option("-R,--radius", cfg.radius, "Ball parameter R");
  sub->add_option("--lambda", cfg.lambda, "Regularization strength");
  sub->add_option("--epochs", cfg.epochs, "Training epochs");
  sub->add_option("--batch-size", cfg.batch_size, "Minibatch size (0 = full batch)");
  sub->add_option("--schedule", cfg.schedule, "Step schedule: constant, inverse_sqrt, inverse_linear");
  sub->add_option("--step", cfg.step, "Step-size constant");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Multiple-kernel SVM with MMD-scored kernel mixtures and random Fourier features", "mkmmd"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.add_option("--seed", cfg.seed, "Master random seed");
  app.add_option("--threads", cfg.threads, "Maximum worker threads");
  app.require_subcommand(1);
  app.fallthrough();

  auto* score = app.add_subcommand("score", "Score base kernels by MMD and print mixture weights as JSON");
  add_data_options(score, cfg);
  add_kernel_options(score, cfg);
  score->add_option("--json", cfg.json, "JSON report path (stdout if omitted)");
  score->add_option("--csv", cfg.csv, "CSV report: family,bandwidth,gamma,estimator,mmd_squared,mmd,weight");

  auto* train_cmd = app.add_subcommand("train", "Fit the multiple-kernel SVM and write the model JSON");
  add_data_options(train_cmd, cfg);
  add_kernel_options(train_cmd, cfg);
  add_train_options(train_cmd, cfg);
  train_cmd->add_option("-m,--model", cfg.model, "Output model file")->required();
  train_cmd->add_option("--log", cfg.log, "Training log JSON with per-epoch objective and accuracy (stdout if omitted)");

  auto* predict_cmd = app.add_subcommand("predict", "Apply a model; CSV columns index,decision_value,soft_output,label");
  add_data_options(predict_cmd, cfg);
  predict_cmd->add_option("-m,--model", cfg.model, "Model file")->required();
  predict_cmd->add_option("-o,--output", cfg.output, "Predictions CSV (stdout if omitted)");

  auto* select_cmd = app.add_subcommand("select", "Compare CV and MMD bandwidth selection; CSV columns gamma,cv_mean,cv_std,mmd_score");
  add_data_options(select_cmd, cfg);
  add_train_options(select_cmd, cfg);
  select_cmd->add_option("--gamma", cfg.gammas, "Grid value; repeatable (default 1e-20 .. 1e3 by decades)");
  select_cmd->add_option("--family", cfg.family, "Kernel family of the grid");
  select_cmd->add_flag("--biased", cfg.biased, "Always use the biased MMD estimator");
  select_cmd->add_option("--folds", cfg.folds, "Cross-validation folds");
  select_cmd->add_option("--test-fraction", cfg.test_fraction, "Held-out share for final test accuracies");
  select_cmd->add_option("--csv", cfg.csv, "Selection CSV (stdout if omitted)");
  select_cmd->add_option("--json", cfg.json, "Selection summary JSON");

  auto* diagnose = app.add_subcommand(
      "diagnose",
      "Complexity bounds and feature-matrix concentration. CSV columns n,D,m,R,frobenius_norm,spectral_norm,"
      "gram_trace_squared,erfc_bound,erfc_bound_display,khintchine_bound,gaussian_bound; one row per --draws value");
  add_data_options(diagnose, cfg);
  add_kernel_options(diagnose, cfg);
  diagnose->add_option("-D,--draws", cfg.draws, "Random features per base kernel; repeat for a sweep");
  diagnose->add_option("-R,--radius", cfg.radius, "Ball parameter R");
  diagnose->add_option("--trials", cfg.trials, "Seeds per concentration measurement");
  diagnose->add_option("--csv", cfg.csv, "Complexity CSV (stdout if omitted)");
  diagnose->add_option("--concentration-csv", cfg.concentration_csv, "Concentration CSV: kind,D,seed,deviation");
  diagnose->add_option("--json", cfg.json, "Full diagnostics JSON");

  auto* ingest = app.add_subcommand("ingest", "Validate a data file and rewrite it as CSV");
  add_data_options(ingest, cfg);
  ingest->add_option("-o,--output", cfg.output, "Output CSV (stdout if omitted)");

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  generate->add_option("--preset", cfg.preset, "two-gaussians or planted");
  generate->add_option("--n", cfg.synthetic_n, "Sample count");
  generate->add_option("--dim", cfg.synthetic_dim, "Dimension");
  generate->add_option("--mean", cfg.synthetic_mean, "Per-coordinate class mean offset for two-gaussians");
  generate->add_option("--stddev", cfg.synthetic_stddev, "Per-coordinate standard deviation for two-gaussians");
  generate->add_option("-o,--output", cfg.output, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    validate_common(cfg);
    thread_limit() = cfg.threads;
    if (score->parsed()) return cmd_score(cfg, out);
    if (train_cmd->parsed()) return cmd_train(cfg, out);
    if (predict_cmd->parsed()) return cmd_predict(cfg, out);
    if (select_cmd->parsed()) return cmd_select(cfg, out);
    if (diagnose->parsed()) return cmd_diagnose(cfg, out, err);
    if (ingest->parsed()) return cmd_ingest(cfg, out);
    if (generate->parsed()) return cmd_generate(cfg, out);
    return kConfigError;
  } catch (const ModelIntegrityError& e) {
    err << "model error: " << e.what() << '\n';
    return kModelIntegrityError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace mkmmd::cli
