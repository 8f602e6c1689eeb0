#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "curvednet/gradcheck_suite.hpp"
#include "curvednet/metrics.hpp"
#include "curvednet/model_io.hpp"
#include "curvednet/models.hpp"
#include "curvednet/scoring.hpp"

namespace curvednet::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::NonFiniteGradient:
      return kDivergence;
    case ErrorCode::OneClassOnly:
    case ErrorCode::EmptyScores:
      return kMetricPrecondition;
    case ErrorCode::InvariantViolation:
      return kInternal;
    default:
      return kInputError;
  }
}

namespace {

RunConfig resolve_config(const Paths& p) {
  RunConfig cfg = p.config ? load_run_config(*p.config) : RunConfig{};
  if (p.seed) cfg.seed = *p.seed;
  return cfg;
}

const std::filesystem::path& require(const std::optional<std::filesystem::path>& v,
                                     const char* flag) {
  if (!v) throw Error(ErrorCode::ConfigError, std::string("missing required flag ") + flag);
  return *v;
}

/// Writes to the file when given, otherwise to `fallback`.
template <class Fn>
void emit(const std::optional<std::filesystem::path>& path, std::ostream& fallback, Fn&& fn) {
  if (!path) {
    fn(fallback);
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path->string());
  fn(f);
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path->string());
}

std::vector<ScoreRow> load_scores_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_scores(in);
}

std::string join_doubles(std::span<const double> v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + format_double(x);
  return out;
}

}  // namespace

void write_scores(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "id,split,z,as\n";
  for (const auto& r : rows) {
    out << r.id << ',' << to_string(r.split) << ',' << format_double(r.z) << ','
        << format_double(r.as) << '\n';
  }
}

std::vector<ScoreRow> read_scores(std::istream& in) {
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t n = 0;
  const auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::ParseError, "scores line " + std::to_string(n) + ": " + what);
  };
  if (!std::getline(in, line)) {
    n = 1;
    fail("empty file, expected header id,split,z,as");
  }
  ++n;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,split,z,as") fail("expected header id,split,z,as");
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) fail("expected 4 fields, got " + std::to_string(f.size()));
    ScoreRow r;
    r.id = f[0];
    try {
      r.split = parse_split(f[1]);
    } catch (const Error&) {
      fail("unknown split '" + f[1] + "'");
    }
    if (r.split == Split::train) fail("training rows have no place in a scores file");
    const auto num = [&](const std::string& s, double& v) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail("bad number '" + s + "'");
      }
    };
    num(f[2], r.z);
    num(f[3], r.as);
    rows.push_back(std::move(r));
  }
  return rows;
}

ScoreSet to_score_set(const std::vector<ScoreRow>& rows) {
  ScoreSet s;
  for (const auto& r : rows) s.add(r.id, r.split == Split::test_ood, r.as);
  return s;
}

std::vector<DensityBin> density_report(const std::vector<ScoreRow>& rows, std::size_t bins) {
  if (rows.empty()) throw Error(ErrorCode::EmptyScores, "no scores to histogram");
  if (bins == 0) throw Error(ErrorCode::BadSpec, "bin count must be positive");
  double lo = rows.front().as;
  double hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.as);
    hi = std::max(hi, r.as);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<DensityBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (const auto& r : rows) {
    auto b = static_cast<std::size_t>((r.as - lo) / width);
    b = std::min(b, bins - 1);
    // Floating-point edges: nudge into the bin whose [lo, hi) holds the value.
    while (b > 0 && r.as < out[b].lo) --b;
    while (b + 1 < bins && r.as >= out[b + 1].lo) ++b;
    (r.split == Split::test_ood ? out[b].count_ood : out[b].count_id) += 1;
  }
  return out;
}

bool degenerate_scores(const std::vector<ScoreRow>& rows) {
  if (rows.empty()) return false;
  const auto zeros = std::count_if(rows.begin(), rows.end(), [](const ScoreRow& r) { return r.z == 0.0; });
  return static_cast<double>(zeros) > 0.99 * static_cast<double>(rows.size());
}

int cmd_gen_data(const Paths& p, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(p);
  const auto& dir = require(p.out, "--out");
  if (cfg.data_source != DataSource::synthetic) {
    throw Error(ErrorCode::ConfigError, "gen-data needs data_source = synthetic");
  }
  const HierarchicalData h = gen_hierarchical(cfg.synthetic, cfg.seed);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_embeddings(dir / "train.csv", h.splits.train);
  write_embeddings(dir / "test_id.csv", h.splits.test_id);
  write_embeddings(dir / "test_ood.csv", h.splits.test_ood);
  out << "wrote " << h.splits.train.size() << " train, " << h.splits.test_id.size() << " test_id, "
      << h.splits.test_ood.size() << " test_ood samples to " << dir.string() << '\n';
  return kOk;
}

int cmd_train(const Paths& p, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(p);
  const SplitData data = load_embeddings_dir(require(p.data, "--data"));
  const auto& model_path = require(p.model, "--model");
  if (data.train.empty()) throw Error(ErrorCode::EmptyDataset, "no training rows in " + p.data->string());

  Model model = Model::create(model_config(cfg, data.train.dim, data.train.class_count()), cfg.seed);
  model.metadata.emplace_back("architecture_name", cfg.architecture);
  std::istringstream lines(to_text(cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    model.metadata.emplace_back("config." + line.substr(0, eq), line.substr(eq + 3));
  }
  TrainReport report;
  try {
    report = train(model, data.train, train_config(cfg));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonFiniteLoss) err << "training diverged: " << e.what() << '\n';
    throw;
  }
  save_model(model_path, model);

  emit(p.out, out, [&](std::ostream& o) {
    o << "architecture = " << cfg.architecture << '\n'
      << "seed = " << report.seed << '\n'
      << "epochs = " << report.epoch_loss.size() << '\n'
      << "initial_loss = " << format_double(report.initial_loss) << '\n'
      << "initial_branch_loss = " << join_doubles(report.initial_branch_loss) << '\n'
      << "epoch_loss = " << join_doubles(report.epoch_loss) << '\n';
    for (std::size_t e = 0; e < report.epoch_branch_loss.size(); ++e) {
      o << "epoch_branch_loss." << e << " = " << join_doubles(report.epoch_branch_loss[e]) << '\n';
    }
    o << "final_loss = " << format_double(report.epoch_loss.empty() ? report.initial_loss : report.epoch_loss.back()) << '\n'
      << "train_accuracy = " << format_double(report.train_accuracy) << '\n'
      << "branch_accuracy = " << join_doubles(report.branch_accuracy) << '\n'
      << "wall_clock_seconds = " << format_double(report.wall_clock_seconds) << '\n'
      << "model = " << model_path.string() << '\n';
  });
  return kOk;
}

int cmd_score(const Paths& p, std::ostream& out, std::ostream& err) {
  const Model model = load_model(require(p.model, "--model"));
  const SplitData data = load_embeddings_dir(require(p.data, "--data"));
  std::vector<ScoreRow> rows;
  for (const Dataset* ds : {&data.test_id, &data.test_ood}) {
    if (ds->empty()) continue;
    const auto scores = score_dataset(model, *ds);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      rows.push_back({ds->ids[i], ds->split, scores[i].z, scores[i].as});
    }
  }
  if (degenerate_scores(rows)) {
    err << "warning: degenerate score regime: more than 99% of z values are exactly 0 "
           "(embeddings inside the ball leave the hyperbolic transformation as the identity, "
           "so the branch divergence vanishes)\n";
  }
  emit(p.out, out, [&](std::ostream& o) { write_scores(o, rows); });
  return kOk;
}

int cmd_eval(const Paths& p, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(p);
  const auto rows = load_scores_file(require(p.data, "--data"));
  const MetricsReport m = evaluate(to_score_set(rows), metrics_options(cfg));
  emit(p.out, out, [&](std::ostream& o) {
    o << "auroc = " << format_double(m.auroc) << '\n'
      << "fpr_at_95_tpr = " << format_double(m.fpr_at_95_tpr) << '\n'
      << "detection_error = " << format_double(m.detection_error) << '\n'
      << "aupr = " << format_double(m.aupr) << '\n'
      << "aupr_positive = " << to_string(m.positive_class) << '\n'
      << "detection_error_mode = " << to_string(m.detection_error_mode) << '\n'
      << "n_id = " << m.n_id << '\n'
      << "n_ood = " << m.n_ood << '\n';
  });
  return kOk;
}

int cmd_report(const Paths& p, std::ostream& out, std::ostream&) {
  const auto rows = load_scores_file(require(p.data, "--data"));
  const auto bins = density_report(rows);
  emit(p.out, out, [&](std::ostream& o) {
    o << "bin_lo,bin_hi,count_id,count_ood\n";
    for (const auto& b : bins) {
      o << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count_id << ',' << b.count_ood << '\n';
    }
  });
  return kOk;
}

int cmd_gradcheck(const Paths& p, std::ostream& out, std::ostream& err) {
  GradCheckSuiteOptions opts;
  opts.seed = p.seed.value_or(p.config ? load_run_config(*p.config).seed : 0);
  const auto results = run_gradcheck_suite(opts);
  bool ok = true;
  emit(p.out, out, [&](std::ostream& o) {
    o << "case,max_rel_error,points,coordinates_per_point,resampled,status\n";
    for (const auto& r : results) {
      const bool pass = r.max_rel_error <= p.tolerance;
      ok = ok && pass;
      o << r.name << ',' << format_double(r.max_rel_error) << ',' << r.points << ','
        << r.coordinates_per_point << ',' << r.resampled << ',' << (pass ? "pass" : "FAIL") << '\n';
      if (!pass) {
        err << "gradcheck " << r.name << ": worst coordinate " << r.worst_parameter << '['
            << r.worst_index << "] analytic " << format_double(r.worst_analytic) << " numeric "
            << format_double(r.worst_numeric) << '\n';
      }
    }
  });
  return ok ? kOk : kGradcheckFail;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"curved-geometry anomaly recognition"};
  app.require_subcommand(1, 1);
  Paths paths;
  std::string config, data, model, outp;
  std::uint64_t seed = 0;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (key = value)");
    sub->add_option("--data", data, "data directory, embeddings file or scores CSV");
    sub->add_option("--model", model, "model file");
    sub->add_option("--out", outp, "output path");
    sub->add_option("--seed", seed, "overrides the configured seed");
  };
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Paths&, std::ostream&, std::ostream&);
  };
  const Entry entries[] = {
      {"gen-data", "write synthetic hierarchical train/test_id/test_ood files", cmd_gen_data},
      {"train", "train a model and write it to --model", cmd_train},
      {"score", "score test_id and test_ood rows into an id,split,z,as CSV", cmd_score},
      {"eval", "compute AUROC, FPR@95TPR, detection error and AUPR", cmd_eval},
      {"report", "histogram anomaly scores per split", cmd_report},
      {"gradcheck", "compare reverse-mode gradients with finite differences", cmd_gradcheck},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    if (std::string(e.name) == "gradcheck") {
      sub->add_option("--tolerance", paths.tolerance, "maximum relative error")->capture_default_str();
    }
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  for (const auto& [sub, entry] : subs) {
    if (!sub->parsed()) continue;
    if (!config.empty()) paths.config = config;
    if (!data.empty()) paths.data = data;
    if (!model.empty()) paths.model = model;
    if (!outp.empty()) paths.out = outp;
    if (sub->count("--seed")) paths.seed = seed;
    try {
      return entry->fn(paths, out, err);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << '\n';
      return kInternal;
    }
  }
  return kInputError;
}

}  // namespace curvednet::cli
