#include "steel/evalmetrics.hpp"

#include <json.hpp>

#include <iomanip>
#include <map>
#include <sstream>

namespace steel {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
    throw PreconditionError("confusion: mask sizes differ (" + std::to_string(pred.cols()) + "x" +
                            std::to_string(pred.rows()) + " vs " + std::to_string(gt.cols()) + "x" +
                            std::to_string(gt.rows()) + ")");
  }
  ConfusionCounts c;
  c.tp = (pred && gt).count();
  c.fp = (pred && !gt).count();
  c.fn = (!pred && gt).count();
  c.tn = pred.size() - c.tp - c.fp - c.fn;
  return c;
}

Scores scores(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0) throw PreconditionError("scores: negative count");
  const auto tp = static_cast<double>(c.tp);
  Scores s;
  s.pi = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : (c.fn == 0 ? 1.0 : 0.0);
  s.si = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : (c.fp == 0 ? 1.0 : 0.0);
  const std::int64_t d = 2 * c.tp + c.fp + c.fn;
  s.dsc = d > 0 ? 2.0 * tp / static_cast<double>(d) : 1.0;
  return s;
}

const char* to_string(Lighting l) { return l == Lighting::low ? "low" : "normal"; }

Lighting parse_lighting(const std::string& s) {
  if (s == "normal") return Lighting::normal;
  if (s == "low") return Lighting::low;
  throw ConfigError("lighting", "expected 'normal' or 'low', got '" + s + "'");
}

Comparison compare(const std::vector<ComparisonRow>& rows) {
  Comparison out;
  for (const ComparisonRow& r : rows) {
    MethodReport m;
    m.method = r.method;
    m.lighting = r.lighting;
    m.counts = confusion(r.pred, r.gt);
    m.scores = scores(m.counts);
    out.reports.push_back(std::move(m));
  }

  // Text layout: one line per method, normal then low lighting.
  std::vector<std::string> methods;
  std::map<std::pair<std::string, Lighting>, const MethodReport*> cell;
  std::size_t width = 6;
  for (const MethodReport& m : out.reports) {
    if (std::find(methods.begin(), methods.end(), m.method) == methods.end()) methods.push_back(m.method);
    cell[{m.method, m.lighting}] = &m;
    width = std::max(width, m.method.size());
  }
  std::ostringstream t;
  t << std::left << std::setw(static_cast<int>(width)) << "method" << " | normal: PI     SI     DSC    | low: PI     SI     DSC\n";
  t << std::string(width, '-') << "-+-----------------------------+------------------------\n";
  t << std::fixed << std::setprecision(4);
  for (const std::string& name : methods) {
    t << std::left << std::setw(static_cast<int>(width)) << name << " |";
    for (Lighting l : {Lighting::normal, Lighting::low}) {
      t << (l == Lighting::normal ? "        " : "     ");
      const auto it = cell.find({name, l});
      if (it == cell.end()) {
        t << "  -      -      -    ";
      } else {
        const Scores& s = it->second->scores;
        t << s.pi << ' ' << ' ' << s.si << ' ' << ' ' << s.dsc;
      }
      if (l == Lighting::normal) t << " |";
    }
    t << '\n';
  }
  out.table = t.str();

  nlohmann::json j = nlohmann::json::array();
  for (const MethodReport& m : out.reports) {
    j.push_back({{"method", m.method},
                 {"lighting", to_string(m.lighting)},
                 {"tp", m.counts.tp},
                 {"fp", m.counts.fp},
                 {"fn", m.counts.fn},
                 {"tn", m.counts.tn},
                 {"pi", m.scores.pi},
                 {"si", m.scores.si},
                 {"dsc", m.scores.dsc}});
  }
  out.json = j.dump(2);
  return out;
}

}  // namespace steel
