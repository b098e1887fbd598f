#include "regloc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "regloc/errors.hpp"

namespace regloc {

namespace {

// Degree-5 symmetric rule in barycentric form, weights summing to 1.
struct RulePoint {
  double l1, l2, l3, w;
};

const std::array<RulePoint, 7>& degreeFiveRule() {
  static const std::array<RulePoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    return std::array<RulePoint, 7>{{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
        {a1, a1, 1.0 - 2.0 * a1, w1},
        {a1, 1.0 - 2.0 * a1, a1, w1},
        {1.0 - 2.0 * a1, a1, a1, w1},
        {a2, a2, 1.0 - 2.0 * a2, w2},
        {a2, 1.0 - 2.0 * a2, a2, w2},
        {1.0 - 2.0 * a2, a2, a2, w2},
    }};
  }();
  return rule;
}

struct Sampled {
  double logIntegral;
  double maxLogValue;
  double minLogValue;
};

Sampled sampleTriangle(const LogIntegrand& f, const Triangle& t) {
  const auto& rule = degreeFiveRule();
  std::array<double, 7> terms{};
  double peak = kNegInf;
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const RulePoint& q = rule[k];
    const Point2 y{q.l1 * t.a.x + q.l2 * t.b.x + q.l3 * t.c.x, q.l1 * t.a.y + q.l2 * t.b.y + q.l3 * t.c.y};
    const double v = f.logValue(y);
    peak = std::max(peak, v);
    low = std::min(low, v);
    terms[k] = std::log(q.w) + v;
  }
  return {std::log(t.area()) + logSumExp(terms), peak, low};
}

std::array<Triangle, 4> subdivide(const Triangle& t) {
  const Point2 ab = midpoint(t.a, t.b);
  const Point2 bc = midpoint(t.b, t.c);
  const Point2 ca = midpoint(t.c, t.a);
  return {{{t.a, ab, ca}, {ab, t.b, bc}, {ca, bc, t.c}, {bc, ca, ab}}};
}

// ln|e^a - e^b|
double logAbsDiff(double a, double b) {
  if (a == b) return kNegInf;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (lo == kNegInf) return hi;
  return hi + std::log(-std::expm1(lo - hi));
}

// A leaf is unresolved when its bound exceeds every sample by more than
// kResolvedSpread, or when its samples span more than kSampleSpread: the
// coarse and refined rules can then agree by accident.
constexpr double kResolvedSpread = 4.0;
constexpr double kSampleSpread = 5.0;
constexpr std::size_t kMaxLeaves = 4'000'000;

struct Leaf {
  Triangle tri;
  int depth = 0;
  double logQ = kNegInf;
  double logRefined = kNegInf;
  double logErr = kNegInf;
  std::array<Sampled, 4> children{};
};

class Refiner {
 public:
  Refiner(const LogIntegrand& f, double floor) : f_(f), floor_(floor) {}

  // Returns false when the leaf is pruned.
  bool build(Leaf& leaf, const Sampled* own) const {
    const double bound = f_.logUpperBound(leaf.tri);
    if (bound < floor_ || bound == kNegInf) return false;
    const Sampled self = own ? *own : sampleTriangle(f_, leaf.tri);
    const auto kids = subdivide(leaf.tri);
    std::array<double, 4> logs{};
    double peak = self.maxLogValue;
    double low = self.minLogValue;
    for (std::size_t k = 0; k < 4; ++k) {
      leaf.children[k] = sampleTriangle(f_, kids[k]);
      logs[k] = leaf.children[k].logIntegral;
      peak = std::max(peak, leaf.children[k].maxLogValue);
      low = std::min(low, leaf.children[k].minLogValue);
    }
    leaf.logQ = self.logIntegral;
    leaf.logRefined = logSumExp(logs);
    const double diff = logAbsDiff(leaf.logRefined, leaf.logQ);
    const bool resolved = bound - peak <= kResolvedSpread && peak - low <= kSampleSpread;
    leaf.logErr = resolved ? diff : std::max(diff, std::log(leaf.tri.area()) + bound);
    return true;
  }

 private:
  const LogIntegrand& f_;
  double floor_;
};

}  // namespace

void QuadratureSpec::validate() const {
  if (refinementDepth < 0) throw ConfigError("quadrature: refinementDepth must be >= 0");
  if (!(relTol > 0.0)) throw ConfigError("quadrature: relTol must be > 0");
  if (std::isnan(pruneLogUnits) || pruneLogUnits <= 0.0) {
    throw ConfigError("quadrature: pruneLogUnits must be > 0");
  }
}

double logAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double logSumExp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  if (hi == std::numeric_limits<double>::infinity()) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double triangleLogQuadrature(const LogIntegrand& f, const Triangle& t) {
  return sampleTriangle(f, t).logIntegral;
}

LogIntegral integrateLog(const LogIntegrand& f, std::span<const Triangle> triangles,
                         const QuadratureSpec& spec, double logFloor) {
  spec.validate();
  const Refiner refiner(f, logFloor);
  std::vector<Leaf> leaves;
  leaves.reserve(triangles.size() * 4);
  for (const Triangle& t : triangles) {
    Leaf leaf;
    leaf.tri = t;
    if (refiner.build(leaf, nullptr)) leaves.push_back(leaf);
  }

  const double logRelTol = std::log(spec.relTol);
  std::vector<double> scratch;
  std::vector<std::size_t> order;
  while (true) {
    LogIntegral result;
    result.leaves = leaves.size();
    scratch.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) scratch[i] = leaves[i].logRefined;
    result.logValue = logSumExp(scratch);
    for (std::size_t i = 0; i < leaves.size(); ++i) scratch[i] = leaves[i].logErr;
    result.logError = logSumExp(scratch);
    if (result.logValue == kNegInf || result.logError <= logRelTol + result.logValue) return result;

    order.resize(leaves.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return leaves[a].logErr > leaves[b].logErr; });

    double cappedErr = kNegInf;
    double markedErr = kNegInf;
    const double target = result.logError + std::log(0.5);
    std::vector<std::size_t> marked;
    for (std::size_t idx : order) {
      if (leaves[idx].depth >= spec.refinementDepth) {
        cappedErr = logAddExp(cappedErr, leaves[idx].logErr);
        continue;
      }
      if (markedErr >= target) break;
      marked.push_back(idx);
      markedErr = logAddExp(markedErr, leaves[idx].logErr);
    }
    if (cappedErr > logRelTol + result.logValue || marked.empty()) {
      throw NumericError("quadrature did not converge at maximum refinement depth");
    }
    if (leaves.size() + 3 * marked.size() > kMaxLeaves) {
      throw NumericError("quadrature exceeded the leaf budget");
    }

    std::sort(marked.begin(), marked.end());
    std::vector<Leaf> next;
    next.reserve(leaves.size() + 3 * marked.size());
    std::size_t m = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (m < marked.size() && marked[m] == i) {
        ++m;
        const Leaf& parent = leaves[i];
        const auto kids = subdivide(parent.tri);
        for (std::size_t k = 0; k < 4; ++k) {
          Leaf child;
          child.tri = kids[k];
          child.depth = parent.depth + 1;
          if (refiner.build(child, &parent.children[k])) next.push_back(child);
        }
      } else {
        next.push_back(leaves[i]);
      }
    }
    leaves = std::move(next);
  }
}

double peakLogValue(const LogIntegrand& f, std::span<const Triangle> triangles, double tolerance) {
  struct Node {
    double bound;
    Triangle tri;
    int depth;
    bool operator<(const Node& o) const { return bound < o.bound; }
  };
  constexpr int kMaxDepth = 48;
  constexpr std::size_t kMaxSteps = 200'000;

  double best = kNegInf;
  std::priority_queue<Node> heap;
  for (const Triangle& t : triangles) {
    best = std::max(best, f.logValue(t.centroid()));
    heap.push({f.logUpperBound(t), t, 0});
  }
  std::size_t steps = 0;
  while (!heap.empty() && steps++ < kMaxSteps) {
    const Node top = heap.top();
    heap.pop();
    if (top.bound <= best + tolerance) break;
    if (top.depth >= kMaxDepth) continue;
    for (const Triangle& child : subdivide(top.tri)) {
      const double bound = f.logUpperBound(child);
      if (bound <= best + tolerance) continue;
      best = std::max(best, f.logValue(child.centroid()));
      heap.push({bound, child, top.depth + 1});
    }
  }
  return best;
}

}  // namespace regloc
