#include "regloc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "regloc/errors.hpp"
#include "regloc/parallel.hpp"
#include "regloc/posterior.hpp"
#include "regloc/text.hpp"

namespace regloc {

double qFunction(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// ln(d0 + d^beta), the only distance-dependent piece of a_i.
double logPathTerm(const ChannelParams& p, double dist) {
  return std::log(p.d0) + std::log1p(std::pow(dist, p.beta) / p.d0);
}

double sumOfSquares(std::span<const Point2> sensors, std::span<const double> sourceTerms, Point2 y,
                    const ChannelParams& params) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const double a = logPathTerm(params, distance(y, sensors[i])) - sourceTerms[i];
    acc += a * a;
  }
  return acc;
}

Point2 closestOnSegment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  return a + std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) * ab;
}

}  // namespace

std::vector<double> logRatios(std::span<const Point2> sensors, Point2 source, Point2 y,
                              const ChannelParams& params) {
  std::vector<double> out;
  out.reserve(sensors.size());
  for (const Point2& x : sensors) {
    out.push_back(logPathTerm(params, distance(y, x)) - logPathTerm(params, distance(source, x)));
  }
  return out;
}

std::vector<Point2> regionGrid(const PolygonRegion& region, int resolution) {
  if (resolution < 2) throw ConfigError("regionGrid: resolution must be >= 2");
  const BoundingBox& box = region.bounds();
  std::vector<Point2> out;
  const double last = resolution - 1;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const Point2 p{box.lo.x + box.width() * i / last, box.lo.y + box.height() * j / last};
      if (region.locate(p, 0.0) != Location::Outside) out.push_back(p);
    }
  }
  const auto v = region.vertices();
  for (std::size_t e = 0; e < v.size(); ++e) {
    const Point2 a = v[e];
    const Point2 b = v[(e + 1) % v.size()];
    for (int t = 0; t < resolution; ++t) out.push_back(a + (t / static_cast<double>(resolution)) * (b - a));
  }
  return out;
}

double etaFromBounds(double U, double L, double alpha, std::size_t sensorCount) {
  if (!(L > 0.0)) return 0.0;
  const double c = L / (alpha * static_cast<double>(sensorCount));
  // sqrt(U^2 + c) - U without cancellation.
  return c / (std::sqrt(U * U + c) + U);
}

RegionBounds computeRegionBounds(const PolygonRegion& region, std::span<const Point2> sensors,
                                 Point2 source, const ChannelParams& params, double alpha) {
  params.validate();
  if (!(alpha > 1.0)) throw ConfigError("bounds: alpha must be > 1");
  if (sensors.empty()) throw ConfigError("bounds: no sensors");

  RegionBounds out;
  out.regionId = region.id();
  out.alpha = alpha;
  out.sensorCount = sensors.size();

  std::vector<double> sourceTerms;
  for (const Point2& x : sensors) sourceTerms.push_back(logPathTerm(params, distance(source, x)));

  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const double near = regionDistance(region, sensors[i]);
    double far = 0.0;
    for (const Point2& v : region.vertices()) far = std::max(far, distance(v, sensors[i]));
    out.U = std::max({out.U, std::abs(logPathTerm(params, near) - sourceTerms[i]),
                      std::abs(logPathTerm(params, far) - sourceTerms[i])});
  }

  if (region.locate(source, region.tolerance()) != Location::Outside) {
    out.sourceInside = true;
    out.minimizer = source;
    return out;
  }

  constexpr int kResolution = 200;
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& p : regionGrid(region, kResolution)) {
    const double v = sumOfSquares(sensors, sourceTerms, p, params);
    if (v < best) {
      best = v;
      out.minimizer = p;
    }
  }

  const auto verts = region.vertices();
  double step = region.bounds().scale() / (kResolution - 1);
  for (int round = 0; round < 3; ++round) {
    step /= 10.0;
    const Point2 center = out.minimizer;
    auto consider = [&](Point2 p) {
      const double v = sumOfSquares(sensors, sourceTerms, p, params);
      if (v < best) {
        best = v;
        out.minimizer = p;
      }
    };
    for (int a = -10; a <= 10; ++a) {
      for (int b = -10; b <= 10; ++b) {
        const Point2 p{center.x + a * step, center.y + b * step};
        if (region.locate(p, 0.0) != Location::Outside) consider(p);
      }
    }
    // The minimum usually sits on the side facing the source.
    for (std::size_t e = 0; e < verts.size(); ++e) {
      const Point2 a = verts[e];
      const Point2 b = verts[(e + 1) % verts.size()];
      const Point2 foot = closestOnSegment(center, a, b);
      if (distance(foot, center) > 100.0 * step) continue;  // edge far from the incumbent
      const double len = distance(a, b);
      const Point2 dir = (1.0 / len) * (b - a);
      const double t0 = dot(foot - a, dir);
      for (int t = -10; t <= 10; ++t) {
        consider(a + std::clamp(t0 + t * step, 0.0, len) * dir);
      }
    }
  }
  out.L = best;
  out.eta = etaFromBounds(out.U, out.L, alpha, sensors.size());
  return out;
}

double logEpsilon(double regionArea, double totalArea, double L, double sigma, std::size_t sensorCount) {
  const double n = static_cast<double>(sensorCount);
  return std::log(regionArea) - L / (4.0 * sigma * sigma) - std::log(totalArea) -
         0.5 * n * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

MuValue muBound(double eta, double sigma, std::size_t sensorCount) {
  double base = 0.0;
  if (sigma > 0.0) {
    base = 1.0 - 2.0 * qFunction(eta / sigma);
  } else {
    base = eta > 0.0 ? 1.0 : 0.0;
  }
  if (!(base > 0.0)) return {0.0, true};
  return {std::pow(base, static_cast<double>(sensorCount)), false};
}

namespace {

struct TrialOutcome {
  std::vector<double> regionLogs;  // index j - 1
  double evidenceLog = kNegInf;
};

double binomialStderr(std::size_t hits, std::size_t trials) {
  if (trials == 0) return 0.0;
  const double f = static_cast<double>(hits) / static_cast<double>(trials);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

}  // namespace

TheoremReport theoremChecks(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                            std::size_t trials, std::uint64_t seed, unsigned workers) {
  if (!setup.env) throw ConfigError("bound check: no environment");
  const Environment& env = *setup.env;
  if (setup.k < 1) throw ConfigError("bound check: k must be >= 1");
  const RegionId home = containingRegion(env, setup.source);
  const std::size_t n = setup.sensors.size();

  TheoremReport report;
  for (const auto& region : env.regions()) {
    report.bounds.push_back(computeRegionBounds(region, setup.sensors, setup.source, setup.channel, setup.alpha));
  }

  QuadratureSpec quad = setup.quad;
  quad.pruneLogUnits = std::numeric_limits<double>::infinity();
  const RandomStream master(seed);

  for (std::size_t si = 0; si < sigmaGrid.size(); ++si) {
    const double sigma = sigmaGrid[si];
    if (!(sigma > 0.0)) throw ConfigError("bound check: sigma must be > 0");
    ChannelParams channel = setup.channel;
    channel.sigma = sigma;
    const double sigmaEff = sigma / std::sqrt(static_cast<double>(setup.k));
    SensorConfig sensors{setup.sensors, channel};

    std::vector<TrialOutcome> outcomes(trials);
    const RandomStream sigmaStream = master.derive(si);
    parallelFor(trials, workers, [&](std::size_t t) {
      const MeasurementVector z =
          sampleMeasurement(channel, setup.sensors, setup.source, setup.k, sigmaStream.derive(t));
      const PosteriorEvaluator eval(z, allSensors(n), env, sensors, quad);
      TrialOutcome& out = outcomes[t];
      for (const auto& region : env.regions()) out.regionLogs.push_back(eval.regionLog(region.id()));
      out.evidenceLog = eval.evidenceLog();
    });

    std::vector<double> wrongLogEps;
    double omega = 1.0;
    bool anyVacuous = false;
    for (const RegionBounds& b : report.bounds) {
      if (b.regionId == home) continue;
      const double le = logEpsilon(env.region(b.regionId).area(), env.totalArea(), b.L, sigmaEff, n);
      const MuValue mu = muBound(b.eta, sigmaEff, n);
      wrongLogEps.push_back(le);
      omega *= mu.value;
      anyVacuous = anyVacuous || mu.vacuous;

      TheoremRow row;
      row.sigma = sigma;
      row.region = b.regionId;
      row.role = TheoremRow::Role::Wrong;
      row.logEpsilon = le;
      row.mu = mu.value;
      row.vacuous = mu.vacuous;
      row.trials = trials;
      for (const TrialOutcome& o : outcomes) {
        if (o.regionLogs[static_cast<std::size_t>(b.regionId - 1)] <= le) ++row.hits;
      }
      row.frequency = trials ? static_cast<double>(row.hits) / static_cast<double>(trials) : 0.0;
      row.stderr_ = binomialStderr(row.hits, trials);
      report.rows.push_back(row);
    }

    const double logSumEps = logSumExp(wrongLogEps);
    TheoremRow row;
    row.sigma = sigma;
    row.region = home;
    row.role = TheoremRow::Role::Correct;
    row.omega = omega;
    row.vacuous = anyVacuous;
    row.trials = trials;
    double psiSum = 0.0;
    for (const TrialOutcome& o : outcomes) {
      // Compare p(z|H_i)P(H_i) / p(z) against Psi / p(z) to stay in range.
      const double share = std::exp(o.regionLogs[static_cast<std::size_t>(home - 1)] - o.evidenceLog);
      const double psiShare = 1.0 - std::exp(logSumEps - o.evidenceLog);
      if (share >= psiShare) ++row.hits;
      psiSum += std::exp(o.evidenceLog) - std::exp(logSumEps);
      const double total = logSumExp(o.regionLogs);
      report.maxIdentityError = std::max(report.maxIdentityError, std::abs(std::expm1(total - o.evidenceLog)));
    }
    row.psi = trials ? psiSum / static_cast<double>(trials) : 0.0;
    row.frequency = trials ? static_cast<double>(row.hits) / static_cast<double>(trials) : 0.0;
    row.stderr_ = binomialStderr(row.hits, trials);
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::vector<TheoremRow> rowsWithRole(TheoremReport report, TheoremRow::Role role) {
  std::vector<TheoremRow> out;
  for (const TheoremRow& r : report.rows) {
    if (r.role == role) out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<TheoremRow> theoremOneCheck(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                                        std::size_t trials, std::uint64_t seed, unsigned workers) {
  return rowsWithRole(theoremChecks(setup, sigmaGrid, trials, seed, workers), TheoremRow::Role::Wrong);
}

std::vector<TheoremRow> theoremTwoCheck(const TheoremSetup& setup, std::span<const double> sigmaGrid,
                                        std::size_t trials, std::uint64_t seed, unsigned workers) {
  return rowsWithRole(theoremChecks(setup, sigmaGrid, trials, seed, workers), TheoremRow::Role::Correct);
}

std::string formatTheoremRow(const TheoremRow& row) {
  using text::formatDouble;
  std::string out = formatDouble(row.sigma) + "," + std::to_string(row.region) + ",";
  if (row.role == TheoremRow::Role::Wrong) {
    out += "wrong," + formatDouble(std::exp(row.logEpsilon)) + "," + formatDouble(row.logEpsilon) + "," +
           formatDouble(row.mu) + "," + (row.vacuous ? "1" : "0") + ",,,";
  } else {
    out += "correct,,,," + std::string(row.vacuous ? "1" : "0") + "," + formatDouble(row.psi) + "," +
           formatDouble(row.omega) + ",";
  }
  out += std::to_string(row.trials) + "," + std::to_string(row.hits) + "," + formatDouble(row.frequency) + "," +
         formatDouble(row.stderr_);
  return out;
}

}  // namespace regloc
