#include "epoa/cli.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "epoa/errors.hpp"
#include "epoa/interim.hpp"
#include "epoa/parallel.hpp"
#include "epoa/synth.hpp"
#include "epoa/thresholds.hpp"

namespace epoa {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string input;
  std::string input_format;  // jsonl | csv; inferred from extension if empty
  std::string dataset_config;
  std::string config;
  std::string out_dir = ".";
  std::size_t grid_points = 0;
  double value_cap = 0.0;
  std::size_t value_points = 200;
  std::string mode = "joint";
  std::size_t mc_profiles = 200;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = default_threads();
  std::size_t bootstrap = 0;
  double level = 0.9;
  std::vector<std::string> formats{"json", "md"};
  bool no_grid_sensitivity = false;
  std::string spec;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string sanitize(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
      c = '_';
  return s;
}

// Options missing from the command line are taken from the --config JSON.
void apply_config_file(const CLI::App& cmd, RunConfig& rc) {
  rc.seed_given = cmd.count("--seed") > 0;
  if (rc.config.empty()) return;
  const json j = read_json_file(rc.config);
  auto take = [&](const char* flag, const char* key, auto& field) {
    if (cmd.get_option_no_throw(flag) == nullptr) return false;
    if (cmd.count(flag) == 0 && j.contains(key)) {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
      return true;
    }
    return false;
  };
  try {
    take("--input", "input", rc.input);
    take("--input-format", "input_format", rc.input_format);
    take("--dataset-config", "dataset_config", rc.dataset_config);
    take("--out", "out", rc.out_dir);
    take("--grid-points", "grid_points", rc.grid_points);
    take("--value-cap", "value_cap", rc.value_cap);
    take("--value-points", "value_points", rc.value_points);
    take("--mode", "mode", rc.mode);
    take("--mc-profiles", "mc_profiles", rc.mc_profiles);
    if (take("--seed", "seed", rc.seed)) rc.seed_given = true;
    take("--threads", "threads", rc.threads);
    take("--bootstrap", "bootstrap", rc.bootstrap);
    take("--level", "level", rc.level);
    take("--format", "format", rc.formats);
  } catch (const json::exception& e) {
    throw ParseError(0, rc.config + ": " + e.what());
  }
}

AuctionDataset load_input(const RunConfig& rc) {
  std::string fmt = rc.input_format;
  if (fmt.empty()) fmt = fs::path(rc.input).extension() == ".csv" ? "csv" : "jsonl";
  if (fmt != "csv" && fmt != "jsonl")
    throw ParseError(0, "unknown input format '" + fmt + "'");
  DatasetConfig cfg;
  if (!rc.dataset_config.empty())
    cfg = parse_dataset_config(read_json_file(rc.dataset_config));
  std::ifstream in(rc.input);
  if (!in) throw ParseError(0, "cannot open '" + rc.input + "'");
  return load_dataset(in, fmt == "csv" ? DataFormat::kCsv : DataFormat::kJsonl, cfg);
}

AnalysisConfig analysis_config(const RunConfig& rc, ResamplingMode mode) {
  AnalysisConfig cfg;
  cfg.grid_points = rc.grid_points;
  if (rc.value_cap > 0.0) cfg.value_cap = rc.value_cap;
  cfg.value_points = rc.value_points;
  cfg.mode = mode;
  cfg.mc_profiles = rc.mc_profiles;
  cfg.seed = rc.seed;
  cfg.threads = std::max<std::size_t>(rc.threads, 1);
  cfg.grid_sensitivity = !rc.no_grid_sensitivity;
  return cfg;
}

void add_data_options(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--input", rc.input, "auction log (JSONL or CSV)");
  cmd.add_option("--input-format", rc.input_format, "jsonl or csv");
  cmd.add_option("--dataset-config", rc.dataset_config,
                 "JSON with bid_cap, grid_points, value_cap and CSV context");
  cmd.add_option("--config", rc.config, "JSON defaults for any option");
  cmd.add_option("--out", rc.out_dir, "output directory");
  cmd.add_option("--grid-points", rc.grid_points, "positive bid grid points");
  cmd.add_option("--mode", rc.mode, "joint, independent or both");
  cmd.add_option("--mc-profiles", rc.mc_profiles, "profiles in independent mode");
  cmd.add_option("--seed", rc.seed, "master seed");
  cmd.add_option("--threads", rc.threads, "worker threads");
}

void require_seed(const RunConfig& rc, bool stochastic) {
  if (stochastic && !rc.seed_given)
    throw ValidationError("", "--seed is required for stochastic steps");
}

std::vector<ResamplingMode> modes_of(const std::string& mode) {
  if (mode == "both") return {ResamplingMode::kJoint, ResamplingMode::kIndependent};
  auto m = parse_mode(mode);
  if (!m) throw ValidationError("", "unknown mode '" + mode + "'");
  return {*m};
}

int cmd_synth(const RunConfig& rc, std::ostream& out) {
  const SynthSpec spec = parse_synth_spec(read_json_file(rc.spec));
  const SynthResult res = generate(spec);
  fs::create_directories(rc.out_dir);
  std::ostringstream data;
  write_jsonl(res.dataset, data);
  write_file(fs::path(rc.out_dir) / "dataset.jsonl", data.str());
  write_file(fs::path(rc.out_dir) / "dataset_config.json",
             dataset_config_json(res.dataset).dump(2) + "\n");
  if (res.truth)
    write_file(fs::path(rc.out_dir) / "ground_truth.json",
               ground_truth_json(*res.truth).dump(2) + "\n");
  out << "wrote " << res.dataset.size() << " auctions to " << rc.out_dir << '\n';
  return kExitOk;
}

int cmd_curves(const RunConfig& rc, std::ostream& out) {
  const std::vector<ResamplingMode> modes = modes_of(rc.mode);
  if (modes.size() != 1) throw ValidationError("", "curves takes a single mode");
  require_seed(rc, modes[0] == ResamplingMode::kIndependent);
  const AuctionDataset ds = load_input(rc);
  const std::size_t points = rc.grid_points ? rc.grid_points : ds.grid_points;
  const BidGrid grid = BidGrid::geometric(ds.bid_cap, points);
  const InterimCurves curves = estimate_curves(
      ds, grid, {modes[0], rc.mc_profiles, rc.seed, std::max<std::size_t>(rc.threads, 1)});
  const ThresholdSet thresholds = build_thresholds(ds, curves);

  const fs::path dir(rc.out_dir);
  fs::create_directories(dir / "bidders");
  std::ostringstream all, thr, markers;
  write_curves_csv(curves, all);
  write_thresholds_csv(thresholds, ds.bidder_ids, thr);
  write_slot_markers_csv(ds, thresholds, markers);
  write_file(dir / "curves.csv", all.str());
  write_file(dir / "thresholds.csv", thr.str());
  write_file(dir / "slot_markers.csv", markers.str());
  for (BidderIndex i = 0; i < ds.num_bidders(); ++i) {
    std::ostringstream one;
    one.precision(17);
    one << "bidder_id,bid,alloc,pay\n";
    for (std::size_t g = 0; g < curves.grid.size(); ++g)
      one << ds.bidder_ids[i] << ',' << curves.grid[g] << ','
          << curves.alloc[i][g] << ',' << curves.pay[i][g] << '\n';
    write_file(dir / "bidders" / (sanitize(ds.bidder_ids[i]) + ".csv"), one.str());
  }

  json diag;
  diag["mode"] = mode_name(curves.mode);
  diag["grid_size"] = curves.grid.size();
  diag["bid_cap"] = ds.bid_cap;
  diag["warnings"] = curves.warnings;
  json excluded = json::array();
  for (BidderIndex i : thresholds.excluded) excluded.push_back(ds.bidder_ids[i]);
  diag["excluded_bidders"] = excluded;
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
  out << "wrote curves for " << ds.num_bidders() << " bidders to " << rc.out_dir << '\n';
  return kExitOk;
}

void write_reports(const RunConfig& rc, const std::vector<EpoaReport>& reports,
                   const std::optional<json>& comparison) {
  const fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  for (const std::string& f : rc.formats) {
    if (f == "json") {
      if (comparison) {
        write_file(dir / "report.json", comparison->dump(2) + "\n");
      } else {
        write_file(dir / "report.json", report_to_json(reports.front()).dump(2) + "\n");
      }
    } else if (f == "md") {
      std::ostringstream s;
      write_markdown_table(reports, s);
      write_file(dir / "report.md", s.str());
    } else if (f == "csv") {
      std::ostringstream s;
      write_csv_table(reports, s);
      write_file(dir / "report.csv", s.str());
    } else {
      throw ValidationError("", "unknown report format '" + f + "'");
    }
  }
}

int cmd_epoa(const RunConfig& rc, std::ostream& out) {
  const std::vector<ResamplingMode> modes = modes_of(rc.mode);
  const bool stochastic = rc.bootstrap > 0 || modes.size() > 1 ||
                          modes[0] == ResamplingMode::kIndependent;
  require_seed(rc, stochastic);
  if (rc.bootstrap > 0 && rc.bootstrap < 10)
    throw ValidationError("", "--bootstrap needs at least 10 replicates");
  for (const std::string& f : rc.formats)
    if (f != "json" && f != "md" && f != "csv")
      throw ValidationError("", "unknown report format '" + f + "'");
  const AuctionDataset ds = load_input(rc);

  std::vector<EpoaReport> reports;
  std::optional<json> comparison;
  if (modes.size() > 1) {
    CorrelationComparison cmp;
    if (rc.bootstrap > 0) {
      cmp = compare_correlation_modes(ds, analysis_config(rc, modes[0]), rc.bootstrap,
                                      rc.level, rc.seed);
    } else {
      cmp.joint = analyze(ds, analysis_config(rc, ResamplingMode::kJoint));
      cmp.independent = analyze(ds, analysis_config(rc, ResamplingMode::kIndependent));
      cmp.ordering_holds = cmp.independent.columns.epoa1 >= cmp.joint.columns.epoa1;
    }
    comparison = comparison_to_json(cmp);
    reports = {cmp.joint, cmp.independent};
    out << "ordering_holds: " << (cmp.ordering_holds ? "true" : "false") << '\n';
  } else {
    const AnalysisConfig cfg = analysis_config(rc, modes[0]);
    EpoaReport r = analyze(ds, cfg);
    if (rc.bootstrap > 0) r.bootstrap = bootstrap_ci(ds, cfg, rc.bootstrap, rc.level, rc.seed);
    reports.push_back(std::move(r));
  }
  write_reports(rc, reports, comparison);
  for (const EpoaReport& r : reports)
    out << mode_name(r.mode) << ": 1/EPoA = " << r.columns.inv_epoa1
        << " (mu1 = " << r.columns.mu1 << ", lambda1 = " << r.columns.lambda1 << ")\n";
  return kExitOk;
}

int cmd_report(const RunConfig& rc, std::ostream& out) {
  const json j = read_json_file(rc.input);
  std::vector<EpoaReport> reports;
  if (j.contains("joint")) {
    reports.push_back(report_from_json(j.at("joint")));
    reports.push_back(report_from_json(j.at("independent")));
  } else {
    reports.push_back(report_from_json(j));
  }
  for (const std::string& f : rc.formats) {
    if (f == "md") write_markdown_table(reports, out);
    else if (f == "csv") write_csv_table(reports, out);
    else if (f == "json") out << j.dump(2) << '\n';
    else throw ValidationError("", "unknown report format '" + f + "'");
  }
  return kExitOk;
}

}  // namespace

EpoaReport report_from_json(const json& j) {
  try {
    EpoaReport r;
    auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) throw ParseError(0, "unknown mode in report");
    r.mode = *mode;
    r.auctions = j.at("auctions").get<std::size_t>();
    r.bidders = j.at("bidders").get<std::size_t>();
    r.mc_profiles = j.at("mc_profiles").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const json& c = j.at("columns");
    EpoaColumns& col = r.columns;
    col.revenue = c.at("revenue");
    col.tbar1 = c.at("tbar1");
    col.tavg = c.at("tavg");
    col.lb_t = c.at("lb_t");
    col.mu1 = c.at("mu1");
    col.mu_avg = c.at("mu_avg");
    col.mu_lb = c.at("mu_lb");
    col.rho1 = c.at("rho1");
    col.lambda1 = c.at("lambda1");
    col.lambda_lb = c.at("lambda_lb");
    col.epoa1 = c.at("epoa1");
    col.inv_epoa1 = c.at("inv_epoa1");
    col.lb_epoa = c.at("lb_epoa");
    col.inv_lb_epoa = c.at("inv_lb_epoa");
    col.fa_epoa = c.at("fa_epoa");
    col.inv_fa_epoa = c.at("inv_fa_epoa");
    for (const json& b : j.at("bootstrap")) {
      BootstrapCI ci;
      ci.statistic = b.at("statistic");
      ci.point = b.at("point");
      ci.lower = b.at("lower");
      ci.upper = b.at("upper");
      ci.std_error = b.at("std_error");
      ci.level = b.at("level");
      ci.replicates = b.at("replicates");
      ci.dropped = b.at("dropped");
      ci.seed = b.at("seed");
      r.bootstrap.push_back(ci);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Empirical price of anarchy bounds for position auctions", "epoa"};
  app.require_subcommand(1);
  RunConfig rc;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", rc.spec, "generator spec JSON")->required();
  synth->add_option("--out", rc.out_dir, "output directory");

  CLI::App* curves = app.add_subcommand("curves", "interim and threshold curves");
  add_data_options(*curves, rc);

  CLI::App* epoa_cmd = app.add_subcommand("epoa", "empirical price of anarchy report");
  add_data_options(*epoa_cmd, rc);
  epoa_cmd->add_option("--value-cap", rc.value_cap, "hard upper bound on values");
  epoa_cmd->add_option("--value-points", rc.value_points, "value grid size");
  epoa_cmd->add_option("--bootstrap", rc.bootstrap, "bootstrap replicates");
  epoa_cmd->add_option("--level", rc.level, "bootstrap interval level");
  epoa_cmd->add_option("--format", rc.formats, "json, md, csv")->delimiter(',');
  epoa_cmd->add_flag("--no-grid-sensitivity", rc.no_grid_sensitivity,
                     "skip the half-resolution rerun");

  CLI::App* report = app.add_subcommand("report", "render a JSON report as a table");
  report->add_option("--input", rc.input, "report JSON")->required();
  report->add_option("--format", rc.formats, "md, csv or json")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*synth) return cmd_synth(rc, out);
    if (*report) {
      if (report->count("--format") == 0) rc.formats = {"md"};
      return cmd_report(rc, out);
    }
    CLI::App& cmd = *curves ? *curves : *epoa_cmd;
    apply_config_file(cmd, rc);
    if (rc.input.empty()) throw ValidationError("", "--input is required");
    return *curves ? cmd_curves(rc, out) : cmd_epoa(rc, out);
  } catch (const BidCapTooLow& e) {
    err << "error: " << e.what() << " (bidder " << e.bidder() << ")\n";
    return kExitBidCap;
  } catch (const ZeroRevenue& e) {
    err << "error: " << e.what() << '\n';
    return kExitZeroRevenue;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SpecError& e) {
    err << "spec error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const MalformedContext& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace epoa
