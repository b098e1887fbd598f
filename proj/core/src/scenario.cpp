#include "regloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "regloc/errors.hpp"
#include "regloc/text.hpp"

namespace regloc {

namespace pt = boost::property_tree;

CommGraph Scenario::buildGraph() const {
  const int n = static_cast<int>(sensors.size());
  switch (graph.kind) {
    case GraphSpec::Kind::Complete:
      return CommGraph::complete(n);
    case GraphSpec::Kind::KNearest:
      return CommGraph::kNearest(sensors.positions, graph.neighbors);
    case GraphSpec::Kind::Explicit:
      break;
  }
  return CommGraph(n, graph.edges);
}

void Scenario::validate() const {
  sensors.channel.validate();
  quad.validate();
  if (sensors.size() == 0) throw ConfigError("scenario: no sensors");
  if (k < 1) throw ConfigError("scenario: k must be >= 1");
  if (trials < 0) throw ConfigError("scenario: trials must be >= 0");
  for (double s : sigmaGrid) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("scenario: sigma grid entries must be >= 0");
  }
  if (fixedSource) containingRegion(environment, *fixedSource);
}

namespace {

void requireKnownKeys(const pt::ptree& tree, const std::string& section, const std::set<std::string>& allowed) {
  const auto child = tree.get_child_optional(section);
  if (!child) return;
  for (const auto& [key, value] : *child) {
    if (!allowed.contains(key)) throw ConfigError("scenario: unknown key [" + section + "] " + key);
  }
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& path) {
  if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '/'))) return std::string(text::trim(*v));
  return std::nullopt;
}

double getReal(const pt::ptree& tree, const std::string& path, double fallback) {
  const auto v = get(tree, path);
  return v ? text::parseDouble(*v) : fallback;
}

long long getInteger(const pt::ptree& tree, const std::string& path, long long fallback) {
  const auto v = get(tree, path);
  return v ? text::parseInteger(*v) : fallback;
}

std::vector<std::pair<int, int>> parseEdges(std::string_view list) {
  std::vector<std::pair<int, int>> out;
  std::istringstream in{std::string(list)};
  std::string token;
  while (in >> token) {
    const auto dash = token.find('-');
    if (dash == std::string::npos) throw ConfigError("scenario: edge '" + token + "' is not `a-b`");
    out.emplace_back(static_cast<int>(text::parseInteger(std::string_view(token).substr(0, dash))),
                     static_cast<int>(text::parseInteger(std::string_view(token).substr(dash + 1))));
  }
  return out;
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Scenario parseScenario(const std::string& input, const std::filesystem::path& baseDir) {
  pt::ptree tree;
  try {
    std::istringstream in(input);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    static const std::set<std::string> kSections{"environment", "regions", "sensors", "channel",
                                                 "graph",       "source",  "run"};
    if (!kSections.contains(section)) throw ConfigError("scenario: unknown section [" + section + "]");
    if (body.empty()) throw ConfigError("scenario: top-level key '" + section + "' outside a section");
  }
  requireKnownKeys(tree, "environment", {"boundary", "sites", "file"});
  requireKnownKeys(tree, "sensors", {"positions", "count", "layout_seed", "min_separation"});
  requireKnownKeys(tree, "channel", {"power", "d0", "beta", "sigma", "aggregation"});
  requireKnownKeys(tree, "graph", {"kind", "neighbors", "edges"});
  requireKnownKeys(tree, "source", {"point"});
  requireKnownKeys(tree, "run", {"k", "trials", "sigma_grid", "seed", "rel_tol", "refinement_depth", "prune"});

  ChannelParams channel;
  channel.power = getReal(tree, "channel/power", channel.power);
  channel.d0 = getReal(tree, "channel/d0", channel.d0);
  channel.beta = getReal(tree, "channel/beta", channel.beta);
  channel.sigma = getReal(tree, "channel/sigma", channel.sigma);
  channel.validate();

  Aggregation aggregation = Aggregation::LogDomain;
  if (const auto agg = get(tree, "channel/aggregation")) {
    if (*agg == "log") {
      aggregation = Aggregation::LogDomain;
    } else if (*agg == "linear") {
      aggregation = Aggregation::Linear;
    } else {
      throw ConfigError("scenario: aggregation must be `log` or `linear`");
    }
  }

  const auto boundaryText = get(tree, "environment/boundary");
  std::optional<PolygonRegion> boundary;
  if (boundaryText) boundary.emplace(1, text::parsePointList(*boundaryText));

  std::vector<Point2> positions;
  if (const auto pos = get(tree, "sensors/positions")) {
    positions = text::parsePointList(*pos);
  } else if (const auto count = get(tree, "sensors/count")) {
    if (!boundary) throw ConfigError("scenario: random sensors need [environment] boundary");
    const double sep = getReal(tree, "sensors/min_separation", 0.0);
    const auto layoutSeed = static_cast<std::uint64_t>(getInteger(tree, "sensors/layout_seed", 1));
    positions = randomSites(*boundary, static_cast<int>(text::parseInteger(*count)), sep, layoutSeed);
  } else {
    throw ConfigError("scenario: [sensors] needs `positions` or `count`");
  }
  if (positions.empty()) throw ConfigError("scenario: no sensors");

  std::optional<Environment> env;
  const auto file = get(tree, "environment/file");
  const auto regions = tree.get_child_optional("regions");
  const int sources = (file ? 1 : 0) + (regions ? 1 : 0) + (boundaryText ? 1 : 0);
  if (sources != 1) {
    throw ConfigError("scenario: give exactly one of [environment] boundary, [environment] file or [regions]");
  }
  if (file) {
    std::filesystem::path p(*file);
    if (p.is_relative()) p = baseDir / p;
    env.emplace(parseEnvironment(readFile(p)));
  } else if (regions) {
    std::vector<PolygonRegion> polys;
    for (const auto& [key, value] : *regions) {
      polys.emplace_back(static_cast<RegionId>(text::parseInteger(key)), text::parsePointList(value.data()));
    }
    env.emplace(std::move(polys));
  } else {
    std::vector<Point2> sites = positions;
    if (const auto s = get(tree, "environment/sites")) sites = text::parsePointList(*s);
    env.emplace(voronoiPartition(sites, *boundary));
  }

  Scenario sc{.environment = std::move(*env), .sensors = {std::move(positions), channel}};
  sc.aggregation = aggregation;

  if (const auto kind = get(tree, "graph/kind")) {
    if (*kind == "complete") {
      sc.graph.kind = GraphSpec::Kind::Complete;
    } else if (*kind == "knearest") {
      sc.graph.kind = GraphSpec::Kind::KNearest;
    } else if (*kind == "explicit") {
      sc.graph.kind = GraphSpec::Kind::Explicit;
    } else {
      throw ConfigError("scenario: graph kind must be complete, knearest or explicit");
    }
  }
  sc.graph.neighbors = static_cast<int>(getInteger(tree, "graph/neighbors", sc.graph.neighbors));
  if (const auto edges = get(tree, "graph/edges")) sc.graph.edges = parseEdges(*edges);
  if (sc.graph.kind == GraphSpec::Kind::Explicit && sc.graph.edges.empty()) {
    throw ConfigError("scenario: explicit graph without edges");
  }

  if (const auto point = get(tree, "source/point")) sc.fixedSource = text::parsePoint(*point);

  sc.k = static_cast<int>(getInteger(tree, "run/k", sc.k));
  sc.trials = getInteger(tree, "run/trials", sc.trials);
  sc.seed = static_cast<std::uint64_t>(getInteger(tree, "run/seed", static_cast<long long>(sc.seed)));
  if (const auto grid = get(tree, "run/sigma_grid")) {
    sc.sigmaGrid = text::parseRealList(*grid);
  } else {
    sc.sigmaGrid = {channel.sigma};
  }
  sc.quad.relTol = getReal(tree, "run/rel_tol", sc.quad.relTol);
  sc.quad.refinementDepth = static_cast<int>(getInteger(tree, "run/refinement_depth", sc.quad.refinementDepth));
  sc.quad.pruneLogUnits = getReal(tree, "run/prune", sc.quad.pruneLogUnits);
  sc.validate();
  return sc;
}

Scenario loadScenario(const std::filesystem::path& path) {
  return parseScenario(readFile(path), path.parent_path());
}

Scenario referenceScenario() {
  const PolygonRegion square(1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const std::vector<Point2> sites{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  Scenario sc{.environment = voronoiPartition(sites, square),
              .sensors = {{{0.2, 0.2}, {0.8, 0.3}, {0.4, 0.8}}, ChannelParams{1.0, 1.0, 3.0, 0.3}}};
  sc.fixedSource = Point2{0.3, 0.35};
  sc.sigmaGrid = {0.1, 0.3, 0.5};
  sc.trials = 500;
  sc.seed = 11;
  return sc;
}

Scenario deskScenario() {
  const PolygonRegion square(1, {{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  std::vector<Point2> sensors = randomSites(square, 20, 1.2, 7);
  Environment env = voronoiPartition(sensors, square);
  Scenario sc{.environment = std::move(env), .sensors = {std::move(sensors), ChannelParams{1.0, 1.0, 3.0, 0.5}}};
  sc.graph.kind = GraphSpec::Kind::KNearest;
  sc.graph.neighbors = 4;
  sc.sigmaGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  sc.trials = 500;
  sc.seed = 2024;
  return sc;
}

Scenario resolveScenario(const std::string& nameOrPath) {
  if (nameOrPath == "reference") return referenceScenario();
  if (nameOrPath == "desk") return deskScenario();
  return loadScenario(nameOrPath);
}

Point2 sampleUniform(const Environment& env, std::mt19937_64& engine) {
  const auto tris = env.triangulation();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double pick = unit(engine) * env.totalArea();
  const Triangle* chosen = &tris.back().triangle;
  for (const auto& tagged : tris) {
    pick -= tagged.triangle.area();
    if (pick < 0.0) {
      chosen = &tagged.triangle;
      break;
    }
  }
  double u = unit(engine);
  double v = unit(engine);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return chosen->a + u * (chosen->b - chosen->a) + v * (chosen->c - chosen->a);
}

std::vector<Point2> randomSites(const PolygonRegion& boundary, int count, double minSeparation,
                                std::uint64_t seed) {
  if (count < 1) throw ConfigError("random sites: count must be >= 1");
  std::mt19937_64 engine = RandomStream(seed).engine(0);
  const BoundingBox& box = boundary.bounds();
  std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
  std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);
  std::vector<Point2> out;
  constexpr int kAttempts = 100000;
  for (int attempt = 0; attempt < kAttempts && static_cast<int>(out.size()) < count; ++attempt) {
    const Point2 p{ux(engine), uy(engine)};
    if (boundary.locate(p) != Location::Inside) continue;
    const bool clear = std::all_of(out.begin(), out.end(),
                                   [&](const Point2& q) { return distance(p, q) >= minSeparation; });
    if (clear) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < count) {
    throw ConfigError("random sites: could not place " + std::to_string(count) + " sites " +
                      text::formatDouble(minSeparation) + " apart");
  }
  return out;
}

}  // namespace regloc
