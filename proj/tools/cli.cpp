// Copyright 2026 The copula-ttd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ttd/builtin.hpp"
#include "ttd/errors.hpp"
#include "ttd/json_io.hpp"
#include "ttd/pipeline.hpp"

namespace ttd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad flags, unreadable or unwritable files, unknown names: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::string format;  // empty: the command's default
  std::vector<SegmentId> segments;
  std::vector<std::string> families;
  std::size_t k = 3;
  std::size_t m = kDefaultModelDraws;
  std::uint64_t seed = 42;
  std::string pseudo = "empirical";
  // synth
  std::string spec = "leopoldstrasse";
  std::optional<std::size_t> n;
  double gps_artifact = 0.0;
  // fit-copula, estimate-path
  std::string marginals;
  // gof
  std::string reference;
  std::string model;
  std::string model_name = "model";
};

const std::vector<std::string> kCommands{"synth", "fit-marginals", "fit-copula",
                                         "estimate-path", "gof", "sweep"};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Config keys mirror the long flag names with '-' replaced by '_'.
void apply_config(const json& j, RunConfig& c) {
  try {
    c.command = j.value("command", c.command);
    c.input = j.value("input", c.input);
    c.out = j.value("out", c.out);
    c.format = j.value("format", c.format);
    c.segments = j.value("segments", c.segments);
    c.families = j.value("families", c.families);
    c.k = j.value("k", c.k);
    c.m = j.value("m", c.m);
    c.seed = j.value("seed", c.seed);
    c.pseudo = j.value("pseudo", c.pseudo);
    c.spec = j.value("spec", c.spec);
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    c.gps_artifact = j.value("gps_artifact", c.gps_artifact);
    c.marginals = j.value("marginals", c.marginals);
    c.reference = j.value("reference", c.reference);
    c.model = j.value("model", c.model);
    c.model_name = j.value("model_name", c.model_name);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

// Finds --config before the real parse so that command-line flags, bound to
// the same fields, override config values.
std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string resolved_format(const RunConfig& c, std::string_view fallback) {
  const std::string f = c.format.empty() ? std::string(fallback) : c.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

// Writes to --out when given, else to the caller's stream.
void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + c.out + "'");
  f << text;
  if (!f) throw UsageError("write to '" + c.out + "' failed");
}

std::vector<Family> families_of(const RunConfig& c, std::vector<Family> fallback) {
  if (c.families.empty()) return fallback;
  std::vector<Family> out;
  for (const auto& name : c.families) {
    if (name == "all") {
      out.assign(std::begin(kFittedFamilies), std::end(kFittedFamilies));
      continue;
    }
    try {
      const Family f = parse_family(name);
      if (f == Family::independence) throw InvalidArgument("independence has nothing to fit");
      out.push_back(f);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

PseudoMode pseudo_of(const RunConfig& c) {
  try {
    return parse_pseudo_mode(c.pseudo);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

struct Dataset {
  SegmentSeries series;
  std::size_t discarded = 0;
};

Dataset load_dataset(const RunConfig& c) {
  if (c.input.empty()) throw UsageError("--input is required");
  if (!fs::exists(c.input)) throw UsageError("input file '" + c.input + "' does not exist");
  const auto records = load_trips(fs::path(c.input));
  const auto ids = c.segments.empty() ? segment_ids_of(records) : c.segments;
  auto assembled = assemble_series(records, ids);
  return {std::move(assembled.series), assembled.discarded_drives};
}

// Marginals from a fit-marginals JSON file, or fitted here.
std::vector<GmmParams> marginals_for(const RunConfig& c, const SegmentSeries& series) {
  if (c.marginals.empty()) return params_of(fit_marginals(series, c.k, c.seed));
  const json j = read_json_file(c.marginals);
  std::map<SegmentId, GmmParams> by_id;
  try {
    for (const auto& entry : j.at("segments")) {
      by_id[entry.at("segment_id").get<SegmentId>()] = entry.at("gmm").get<GmmParams>();
    }
  } catch (const json::exception& e) {
    throw UsageError("'" + c.marginals + "' is not a marginals file: " + e.what());
  }
  std::vector<GmmParams> out;
  for (SegmentId id : series.segment_ids()) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw UsageError("marginals file has no entry for segment " + std::to_string(id));
    }
    out.push_back(it->second);
  }
  return out;
}

// ---- synth ----

int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto format = resolved_format(c, "json");
  SynthSpec spec;
  bool from_file = false;
  const auto names = builtin::synth_spec_names();
  if (std::find(names.begin(), names.end(), c.spec) != names.end()) {
    spec = builtin::synth_spec(c.spec, builtin::kLeopoldstrasseTrips, c.seed);
  } else if (fs::exists(c.spec)) {
    try {
      spec = read_json_file(c.spec).get<SynthSpec>();
    } catch (const json::exception& e) {
      throw UsageError("'" + c.spec + "' is not a synth spec: " + e.what());
    }
    from_file = true;
  } else {
    throw UsageError("unknown spec '" + c.spec + "' (not a built-in name or a file)");
  }
  if (c.n) spec.n_trips = *c.n;
  if (spec.n_trips < 1) throw UsageError("--n must be a positive trip count");
  if (!from_file || spec.seed == 0) spec.seed = c.seed;
  if (c.gps_artifact > 0.0) spec.gps_artifact = c.gps_artifact;

  const auto series = synthesize(spec);
  std::ostringstream csv;
  write_trips(csv, series);
  emit(c, out, csv.str());

  // The summary goes to stderr when the data itself went to stdout.
  std::ostream& summary_out = c.out.empty() ? err : out;
  const auto& ids = series.segment_ids();
  const auto taus = series.num_segments() >= 2 ? adjacent_taus(series.travel_times())
                                               : std::vector<PairTau>{};
  if (format == "json") {
    json pairs = json::array();
    for (const auto& p : taus) {
      pairs.push_back({{"pair", {ids[p.first], ids[p.second]}}, {"tau", p.tau}});
    }
    summary_out << json{{"n_trips", series.num_trips()},
                        {"segments", series.num_segments()},
                        {"segment_ids", ids},
                        {"pair_taus", pairs}}
                       .dump(2)
                << '\n';
  } else {
    summary_out << "n_trips,segments,first_segment,second_segment,tau\n";
    for (const auto& p : taus) {
      summary_out << series.num_trips() << ',' << series.num_segments() << ',' << ids[p.first]
                  << ',' << ids[p.second] << ',' << num(p.tau) << '\n';
    }
  }
  return kExitOk;
}

// ---- fit-marginals ----

int cmd_fit_marginals(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto format = resolved_format(c, "json");
  if (c.k < 1) throw UsageError("--k must be at least 1");
  const auto data = load_dataset(c);
  const auto fits = fit_marginals(data.series, c.k, c.seed);
  std::ostringstream text;
  if (format == "json") {
    json segs = json::array();
    for (const auto& f : fits) {
      segs.push_back({{"segment_id", f.segment_id},
                      {"gmm", f.fit.params},
                      {"ks", f.ks},
                      {"log_likelihood", f.fit.log_likelihood},
                      {"iterations", f.fit.iterations},
                      {"converged", f.fit.converged}});
    }
    text << json{{"k", c.k},
                 {"n_trips", data.series.num_trips()},
                 {"discarded_drives", data.discarded},
                 {"segments", segs}}
                .dump(2)
         << '\n';
  } else {
    text << "segment_id,k,ks,log_likelihood,iterations,converged\n";
    for (const auto& f : fits) {
      text << f.segment_id << ',' << c.k << ',' << num(f.ks) << ','
           << num(f.fit.log_likelihood) << ',' << f.fit.iterations << ','
           << (f.fit.converged ? "true" : "false") << '\n';
    }
  }
  emit(c, out, text.str());
  return kExitOk;
}

// ---- fit-copula / estimate-path ----

struct FittedModels {
  Dataset data;
  std::vector<GmmParams> marginals;
  PseudoMode pseudo = PseudoMode::empirical_rank;
  std::vector<FamilyFit> fits;
  std::vector<double> reference;
};

FittedModels fit_models(const RunConfig& c) {
  if (c.m < kMinModelDraws) {
    throw UsageError("--m must be at least " + std::to_string(kMinModelDraws));
  }
  const auto families =
      families_of(c, std::vector<Family>(std::begin(kFittedFamilies), std::end(kFittedFamilies)));
  FittedModels fm{load_dataset(c), {}, pseudo_of(c), {}, {}};
  if (fm.data.series.num_segments() < 2) throw UsageError("a path needs at least two segments");
  fm.marginals = marginals_for(c, fm.data.series);
  const auto pseudo = pseudo_observations(fm.data.series, fm.marginals, fm.pseudo);
  fm.fits = fit_families(pseudo.values, families);
  fm.reference = empirical_path(fm.data.series).samples;
  return fm;
}

json fit_json(const FamilyFit& f) {
  if (!f.result) return json{{"family", to_string(f.family)}, {"error", f.error}};
  return json(*f.result);
}

int cmd_fit_copula(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto format = resolved_format(c, "json");
  const auto fm = fit_models(c);
  const std::size_t dim = fm.data.series.num_segments();

  struct Row {
    json fit;
    std::optional<GofReport> gof;
    std::string parameters;
  };
  std::vector<Row> rows;
  for (const auto& f : fm.fits) {
    Row row{fit_json(f), std::nullopt, ""};
    if (f.result) {
      const auto ev = evaluate_copula(fm.marginals, f.result->model, fm.reference, c.m, c.seed);
      row.gof = ev.gof;
      row.fit["model"] = ev.model;
      row.fit["ks"] = ev.gof.ks;
      row.fit["cvm"] = ev.gof.cvm;
      row.parameters = describe(f.result->model);
    } else {
      err << "ttd: " << to_string(f.family) << " fit failed: " << f.error << '\n';
    }
    rows.push_back(std::move(row));
  }
  // Lowest CvM first; failed fits last in request order.
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (!a.gof || !b.gof) return a.gof.has_value() && !b.gof.has_value();
    return a.gof->cvm < b.gof->cvm;
  });

  std::ostringstream text;
  if (format == "json") {
    json fits = json::array();
    for (const auto& r : rows) fits.push_back(r.fit);
    text << json{{"dim", dim},
                 {"n_trips", fm.data.series.num_trips()},
                 {"segment_ids", fm.data.series.segment_ids()},
                 {"pseudo", to_string(fm.pseudo)},
                 {"m", c.m},
                 {"fits", fits}}
                .dump(2)
         << '\n';
  } else {
    text << "model,ks,cvm,log_likelihood,converged,parameters\n";
    for (const auto& r : rows) {
      if (!r.gof) continue;
      text << r.gof->model << ',' << num(r.gof->ks) << ',' << num(r.gof->cvm) << ','
           << num(r.fit.at("log_likelihood").get<double>()) << ','
           << (r.fit.at("converged").get<bool>() ? "true" : "false") << ",\"" << r.parameters
           << "\"\n";
    }
  }
  emit(c, out, text.str());
  const bool any_ok =
      std::any_of(fm.fits.begin(), fm.fits.end(), [](const FamilyFit& f) { return f.result.has_value(); });
  return any_ok ? kExitOk : kExitModelFailure;
}

void write_samples_file(const fs::path& path, std::span<const double> samples) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path.string() + "'");
  write_samples_csv(f, samples);
}

int cmd_estimate_path(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto format = resolved_format(c, "json");
  const auto fm = fit_models(c);
  const std::size_t dim = fm.data.series.num_segments();

  PathTtdEstimate empirical = empirical_path(fm.data.series);
  std::vector<Evaluation> evals;
  evals.push_back(evaluate_convolution(fm.marginals, fm.reference, c.m, c.seed));
  for (const auto& f : fm.fits) {
    if (!f.result) {
      err << "ttd: " << to_string(f.family) << " fit failed: " << f.error << '\n';
      continue;
    }
    evals.push_back(evaluate_copula(fm.marginals, f.result->model, fm.reference, c.m, c.seed));
  }

  json summaries = json::array();
  summaries.push_back(summarize(empirical));
  json gof = json::array();
  for (const auto& e : evals) {
    summaries.push_back(summarize(e.estimate));
    gof.push_back(e.gof);
  }
  json fits = json::array();
  for (const auto& f : fm.fits) fits.push_back(fit_json(f));
  const json report{{"dim", dim},
                    {"segment_ids", fm.data.series.segment_ids()},
                    {"m", c.m},
                    {"fits", fits},
                    {"summaries", summaries},
                    {"gof", gof}};

  // With --out the directory receives one sample CSV per method plus the
  // summary; the GoF table still goes to stdout.
  if (!c.out.empty()) {
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create directory '" + c.out + "': " + ec.message());
    write_samples_file(dir / "samples_empirical.csv", empirical.samples);
    for (const auto& e : evals) {
      std::string tag = e.estimate.method;
      std::replace(tag.begin(), tag.end(), ':', '_');
      write_samples_file(dir / ("samples_" + tag + ".csv"), e.estimate.samples);
    }
    std::ofstream f(dir / "summary.json");
    if (!f) throw UsageError("cannot write summary.json in '" + c.out + "'");
    f << report.dump(2) << '\n';
  }

  if (format == "json") {
    out << (c.out.empty() ? report : json{{"gof", gof}}).dump(2) << '\n';
  } else {
    out << "model,ks,cvm,n_reference,n_model\n";
    for (const auto& e : evals) {
      out << e.gof.model << ',' << num(e.gof.ks) << ',' << num(e.gof.cvm) << ','
          << e.gof.n_reference << ',' << e.gof.n_model << '\n';
    }
  }
  return evals.size() > 1 || fm.fits.empty() ? kExitOk : kExitModelFailure;
}

// ---- gof ----

// A reference file is either path samples (header travel_time_s) or a trip
// CSV, whose per-drive path sums are used.
std::vector<double> read_reference(const RunConfig& c) {
  if (!fs::exists(c.reference)) throw UsageError("reference file '" + c.reference + "' does not exist");
  std::ifstream in(c.reference, std::ios::binary);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
  if (header == kTripCsvHeader) {
    RunConfig trips = c;
    trips.input = c.reference;
    return empirical_path(load_dataset(trips).series).samples;
  }
  in.clear();
  in.seekg(0);
  return read_samples_csv(in);
}

int cmd_gof(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto format = resolved_format(c, "json");
  if (c.reference.empty() || c.model.empty()) {
    throw UsageError("gof needs --reference and --model");
  }
  const auto reference = read_reference(c);
  if (!fs::exists(c.model)) throw UsageError("model file '" + c.model + "' does not exist");
  std::ifstream in(c.model, std::ios::binary);
  const auto model = read_samples_csv(in);
  const auto report = compare(c.model_name, reference, model);
  std::ostringstream text;
  if (format == "json") {
    text << json(report).dump(2) << '\n';
  } else {
    text << "model,ks,cvm,n_reference,n_model\n"
         << report.model << ',' << num(report.ks) << ',' << num(report.cvm) << ','
         << report.n_reference << ',' << report.n_model << '\n';
  }
  emit(c, out, text.str());
  return kExitOk;
}

// ---- sweep ----

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto format = resolved_format(c, "csv");
  if (c.m < kMinModelDraws) {
    throw UsageError("--m must be at least " + std::to_string(kMinModelDraws));
  }
  const auto data = load_dataset(c);
  if (data.series.num_segments() < 2) throw UsageError("sweep needs at least two segments");
  SweepOptions options;
  options.families = families_of(c, {Family::clayton});
  options.k = c.k;
  options.m = c.m;
  options.seed = c.seed;
  options.pseudo = pseudo_of(c);
  const auto rows = sweep(data.series, options);
  std::ostringstream text;
  if (format == "csv") {
    text << "segment_count,model,ks,cvm\n";
    for (const auto& r : rows) {
      text << r.segment_count << ',' << r.model << ',' << num(r.ks) << ',' << num(r.cvm) << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"segment_count", r.segment_count}, {"model", r.model}, {"ks", r.ks},
                     {"cvm", r.cvm}});
    }
    text << arr.dump(2) << '\n';
  }
  emit(c, out, text.str());
  return kExitOk;
}

void add_common_data_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input,-i", c.input, "Trip CSV (drive_id,segment_id,travel_time_s)");
  sub->add_option("--segments", c.segments, "Segment ids in traversal order (default: all)")
      ->delimiter(',');
  sub->add_option("--k", c.k, "GMM components per segment");
}

void add_model_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--families", c.families,
                  "Copula families: gaussian, student_t, clayton, gumbel or all")
      ->delimiter(',');
  sub->add_option("--m", c.m, "Monte-Carlo draws per model path estimate");
  sub->add_option("--pseudo", c.pseudo, "Pseudo-observations: empirical or parametric");
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    if (const auto path = config_path(args)) {
      apply_config(read_json_file(*path), c);
      const bool has_command = std::any_of(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
      });
      if (!has_command && !c.command.empty()) args.insert(args.begin(), c.command);
    }
  } catch (const UsageError& e) {
    err << "ttd: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Path travel-time distributions from copula-coupled segment marginals", "ttd"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON file with default option values");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--out,-o", c.out, "Output file (estimate-path: output directory)");
  app.add_option("--format", c.format, "Output format: json or csv");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic trip dataset");
  synth->add_option("--spec", c.spec, "Built-in spec name or SynthSpec JSON file");
  synth->add_option("--n", c.n, "Number of drives");
  synth->add_option("--gps-artifact", c.gps_artifact,
                    "Fraction of drives with one proportional adjacent pair");

  auto* fit_marg = app.add_subcommand("fit-marginals", "Fit a GMM per segment");
  add_common_data_options(fit_marg, c);

  auto* fit_cop = app.add_subcommand("fit-copula", "Fit copula families and rank them by CvM");
  add_common_data_options(fit_cop, c);
  add_model_options(fit_cop, c);
  fit_cop->add_option("--marginals", c.marginals, "Marginals JSON from fit-marginals");

  auto* est = app.add_subcommand("estimate-path", "Path TTD estimates and GoF vs empirical");
  add_common_data_options(est, c);
  add_model_options(est, c);
  est->add_option("--marginals", c.marginals, "Marginals JSON from fit-marginals");

  auto* gof = app.add_subcommand("gof", "KS and CvM between a reference and model samples");
  gof->add_option("--reference", c.reference, "Reference samples CSV or trip CSV");
  gof->add_option("--model", c.model, "Model samples CSV (header travel_time_s)");
  gof->add_option("--model-name", c.model_name, "Model label in the report");
  gof->add_option("--segments", c.segments, "Segments of a trip-CSV reference")->delimiter(',');

  auto* sw = app.add_subcommand("sweep", "KS/CvM over path prefixes of length 2..S");
  add_common_data_options(sw, c);
  add_model_options(sw, c);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(c, out, err);
    if (fit_marg->parsed()) return cmd_fit_marginals(c, out, err);
    if (fit_cop->parsed()) return cmd_fit_copula(c, out, err);
    if (est->parsed()) return cmd_estimate_path(c, out, err);
    if (gof->parsed()) return cmd_gof(c, out, err);
    if (sw->parsed()) return cmd_sweep(c, out, err);
  } catch (const UsageError& e) {
    err << "ttd: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IngestError& e) {
    err << "ttd: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "ttd: " << e.what() << '\n';
    return kExitModelFailure;
  }
  return kExitUsage;
}

}  // namespace ttd::cli
