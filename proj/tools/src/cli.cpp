#include "regloc_cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "regloc/asymptotic.hpp"
#include "regloc/bounds.hpp"
#include "regloc/errors.hpp"
#include "regloc/parallel.hpp"
#include "regloc/scenario.hpp"
#include "regloc/sweep.hpp"
#include "regloc/text.hpp"

namespace regloc::cli {

namespace {

struct Options {
  std::string scenario = "reference";
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<std::string> sigmaGrid;
  std::optional<int> k;
  std::string algo = "a2a";
  std::optional<std::string> out;
  std::optional<double> relTol;
  bool strict = false;
  unsigned workers = 1;
  std::optional<std::string> plotData;
  // decide
  std::string input;
  // voronoi
  std::string sites;
  std::string boundary = "0,0 1,0 1,1 0,1";
  // oracle
  std::string mode = "arc";
};

void addRunOptions(CLI::App& cmd, Options& o) {
  cmd.add_option("--scenario", o.scenario, "Scenario file, or the built-ins `reference` / `desk`")
      ->capture_default_str();
  cmd.add_option("--seed", o.seed, "Master seed (overrides the scenario)");
  cmd.add_option("--trials", o.trials, "Trials per sigma")->check(CLI::NonNegativeNumber);
  cmd.add_option("--sigma-grid", o.sigmaGrid, "Comma separated noise levels, e.g. 0.1,0.2");
  cmd.add_option("--k", o.k, "Samples aggregated per measurement")->check(CLI::PositiveNumber);
  cmd.add_option("--rel-tol", o.relTol, "Quadrature relative tolerance")->check(CLI::PositiveNumber);
  cmd.add_flag("--strict", o.strict, "Use the tight quadrature tolerance 1e-4");
  cmd.add_option("--workers", o.workers, "Worker threads (0 = one per core)")->capture_default_str();
  cmd.add_option("--out", o.out, "Write CSV here instead of stdout");
}

Scenario prepareScenario(const Options& o) {
  Scenario sc = resolveScenario(o.scenario);
  if (o.seed) sc.seed = *o.seed;
  if (o.trials) sc.trials = *o.trials;
  if (o.sigmaGrid) sc.sigmaGrid = text::parseRealList(*o.sigmaGrid);
  if (o.k) sc.k = *o.k;
  if (o.strict && o.relTol) throw ConfigError("--strict and --rel-tol are mutually exclusive");
  if (o.strict) sc.quad.relTol = 1e-4;
  if (o.relTol) sc.quad.relTol = *o.relTol;
  sc.validate();
  return sc;
}

std::vector<Algorithm> parseAlgorithms(const std::string& list) {
  std::vector<Algorithm> out;
  for (std::string_view name : text::split(list, ',')) {
    const Algorithm a = parseAlgorithm(name);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  if (out.empty()) throw ConfigError("--algo needs at least one of a2a, limited");
  return out;
}

void emit(const Options& o, const std::string& payload, std::ostream& out) {
  if (!o.out) {
    out << payload;
    return;
  }
  std::ofstream file(*o.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + *o.out);
  file << payload;
  if (!file) throw ConfigError("failed writing " + *o.out);
}

void writeFile(const std::string& path, const std::string& payload) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path);
  file << payload;
}

void simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario sc = prepareScenario(o);
  const SweepResult result = runSweep(sc, parseAlgorithms(o.algo), o.workers);
  for (const std::string& w : result.warnings) err << "warning: " << w << "\n";
  emit(o, formatSweepCsv(result), out);
  if (o.plotData) writeFile(*o.plotData, formatPlotData(result));
}

void decide(const Options& o, std::ostream& out) {
  const Scenario sc = prepareScenario(o);
  if (sc.sigmaGrid.size() != 1) throw ConfigError("decide needs a single sigma (use --sigma-grid)");
  ChannelParams channel = sc.sensors.channel;
  channel.sigma = sc.sigmaGrid.front();
  const SensorConfig sensors{sc.sensors.positions, channel};
  const auto algos = parseAlgorithms(o.algo);
  const std::optional<RegionId> truth =
      sc.fixedSource ? std::optional<RegionId>(containingRegion(sc.environment, *sc.fixedSource)) : std::nullopt;
  std::optional<CommGraph> graph;
  if (std::find(algos.begin(), algos.end(), Algorithm::LimitedVote) != algos.end()) {
    graph.emplace(sc.buildGraph());
    graph->requireMinimumDegree(2);
  }

  std::ifstream in(o.input);
  if (!in) throw ConfigError("cannot read " + o.input);
  std::vector<MeasurementRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#' || trimmed.starts_with("trial")) continue;
    rows.push_back(parseMeasurementRow(trimmed, channel.sigma));
    if (rows.back().z.logPowers.size() != sensors.size()) {
      throw ConfigError("measurement row " + std::to_string(rows.back().trial) + " does not match the sensor count");
    }
  }

  std::vector<std::string> blocks(rows.size());
  const bool noiseless = channel.sigma == 0.0;
  parallelFor(rows.size(), o.workers, [&](std::size_t r) {
    const MeasurementRow& row = rows[r];
    std::string& block = blocks[r];
    for (Algorithm a : algos) {
      if (a == Algorithm::AllToAll) {
        const Decision d = noiseless ? decideAllToAllNoiseless(row.z, sc.environment, sensors)
                                     : decideAllToAll(row.z, sc.environment, sensors, sc.quad);
        block += formatDecisionRow(row.trial, 0, d.chosenHypothesis, truth) + "\n";
        continue;
      }
      std::vector<Decision> local;
      for (int i = 1; i <= graph->nodeCount(); ++i) {
        local.push_back(noiseless ? decideLimitedNoiseless(i, row.z, *graph, sc.environment, sensors)
                                  : decideLimited(i, row.z, *graph, sc.environment, sensors, sc.quad));
        block += formatDecisionRow(row.trial, i, local.back().chosenHypothesis, truth) + "\n";
      }
      block += formatDecisionRow(row.trial, 0, majorityVote(local).value_or(kOutsideHypothesis), truth) + "\n";
    }
  });
  std::string payload = std::string(kDecisionCsvHeader) + "\n";
  for (const std::string& b : blocks) payload += b;
  emit(o, payload, out);
}

void bounds(const Options& o, std::ostream& out) {
  const Scenario sc = prepareScenario(o);
  if (!sc.fixedSource) throw ConfigError("bounds needs a fixed source ([source] point)");
  TheoremSetup setup;
  setup.env = &sc.environment;
  setup.sensors = sc.sensors.positions;
  setup.channel = sc.sensors.channel;
  setup.source = *sc.fixedSource;
  setup.k = sc.k;
  setup.quad = sc.quad;
  const TheoremReport report =
      theoremChecks(setup, sc.sigmaGrid, static_cast<std::size_t>(sc.trials), sc.seed, o.workers);
  std::string payload = std::string(kTheoremCsvHeader) + "\n";
  for (const TheoremRow& row : report.rows) payload += formatTheoremRow(row) + "\n";
  emit(o, payload, out);
}

void voronoi(const Options& o, std::ostream& out) {
  std::vector<Point2> sites;
  PolygonRegion boundary(1, text::parsePointList(o.boundary));
  if (!o.sites.empty()) {
    sites = text::parsePointList(o.sites);
  } else {
    const Scenario sc = resolveScenario(o.scenario);
    sites = sc.sensors.positions;
    const auto b = sc.environment.bounds();
    boundary = PolygonRegion(1, {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}});
  }
  emit(o, formatEnvironment(voronoiPartition(sites, boundary)), out);
}

void oracle(const Options& o, std::ostream& out) {
  const Scenario sc = prepareScenario(o);
  const auto trials = static_cast<std::size_t>(sc.trials);
  const RandomStream master(sc.seed);
  const ChannelParams& channel = sc.sensors.channel;
  std::vector<std::string> blocks(trials);
  std::string header;
  if (o.mode == "arc") {
    header = "trial,sensor,radius,arcChoice,trueRegion,agree";
    parallelFor(trials, o.workers, [&](std::size_t t) {
      auto engine = master.derive(t).engine(0);
      const Point2 source = sampleUniform(sc.environment, engine);
      const RegionId truth = containingRegion(sc.environment, source);
      for (std::size_t i = 0; i < sc.sensors.size(); ++i) {
        const Point2 x = sc.sensors.positions[i];
        const double lp = meanLogPower(channel, x, source);
        const auto arcs = arcPosteriors(sc.environment, x, lp, channel);
        const RegionId choice = arcArgmax(arcs);
        blocks[t] += std::to_string(t) + "," + std::to_string(i + 1) + "," +
                     text::formatDouble(arcs.front().radius) + "," + std::to_string(choice) + "," +
                     std::to_string(truth) + "," + (choice == truth ? "1" : "0") + "\n";
      }
    });
  } else if (o.mode == "two-sensor") {
    if (sc.sensors.size() != 2 || sc.environment.size() != 2) {
      throw ConfigError("two-sensor oracle needs a scenario with exactly two sensors and two regions");
    }
    header = "trial,located,trueRegion,correct";
    const Point2 x1 = sc.sensors.positions[0];
    const Point2 x2 = sc.sensors.positions[1];
    parallelFor(trials, o.workers, [&](std::size_t t) {
      auto engine = master.derive(t).engine(0);
      const Point2 source = sampleUniform(sc.environment, engine);
      const RegionId truth = containingRegion(sc.environment, source);
      const double r1 = radiusFromPower(channel, meanLogPower(channel, x1, source));
      const double r2 = radiusFromPower(channel, meanLogPower(channel, x2, source));
      const RegionId located = twoSensorLocate(sc.environment, x1, x2, r1, r2);
      blocks[t] = std::to_string(t) + "," + std::to_string(located) + "," + std::to_string(truth) + "," +
                  (located == truth ? "1" : "0") + "\n";
    });
  } else {
    throw ConfigError("--mode must be arc or two-sensor");
  }
  std::string payload = header + "\n";
  for (const std::string& b : blocks) payload += b;
  emit(o, payload, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regional source localization by MAP hypothesis testing", "regloc"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep over the sigma grid; writes the rate CSV");
  addRunOptions(*sim, o);
  sim->add_option("--algo", o.algo, "a2a, limited, or both comma separated")->capture_default_str();
  sim->add_option("--plot-data", o.plotData, "Also write a gnuplot data file");

  auto* dec = app.add_subcommand("decide", "Decide each row of a measurement CSV (trial,k,lnP1,...)");
  addRunOptions(*dec, o);
  dec->add_option("--algo", o.algo, "a2a, limited, or both comma separated")->capture_default_str();
  dec->add_option("--input", o.input, "Measurement CSV")->required();

  auto* bnd = app.add_subcommand("bounds", "Analytic error bounds next to Monte Carlo frequencies");
  addRunOptions(*bnd, o);

  auto* vor = app.add_subcommand("voronoi", "Partition a convex boundary by sites and print the regions");
  vor->add_option("--sites", o.sites, "Sites `x,y x,y ...` (default: the scenario's sensors)");
  vor->add_option("--boundary", o.boundary, "Convex boundary polygon")->capture_default_str();
  vor->add_option("--scenario", o.scenario, "Scenario whose sensors are the sites")->capture_default_str();
  vor->add_option("--out", o.out, "Write here instead of stdout");

  auto* orc = app.add_subcommand("oracle", "Zero-noise geometric oracles on random sources");
  addRunOptions(*orc, o);
  orc->add_option("--mode", o.mode, "arc or two-sensor")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*sim) {
      simulate(o, out, err);
    } else if (*dec) {
      decide(o, out);
    } else if (*bnd) {
      bounds(o, out);
    } else if (*vor) {
      voronoi(o, out);
    } else {
      oracle(o, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace regloc::cli
