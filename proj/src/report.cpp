#include "maghelm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace maghelm::report {

const char* to_string(Format f) {
  switch (f) {
    case Format::csv: return "csv";
    case Format::json: return "json";
    case Format::svg: return "svg";
  }
  return "?";
}

Format format_from_string(const std::string& s) {
  for (auto f : {Format::csv, Format::json, Format::svg})
    if (s == to_string(f)) return f;
  throw Error("unknown format: " + s);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void canonical_sort(std::vector<Row>& rows) {
  auto key = [](const Row& r) {
    const auto& p = r.report.params;
    return std::make_tuple(r.report.kind, p.lambda, p.epsilon, (int)p.sign, p.d, p.r_min, p.r_max, p.mode_cutoff,
                           r.origin.mesh_nodes, r.origin.solver, r.report.extras, r.report.lhs, r.report.rhs);
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) { return key(a) < key(b); });
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return number(x);
}

std::string emit_csv(const std::vector<Row>& rows) {
  std::set<std::string> extra_keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.report.extras) extra_keys.insert(k);
  std::ostringstream o;
  o << "kind,lambda,epsilon,sign,d,r_min,r_max,mode_cutoff,lhs,rhs,ratio,spec_hash,mesh_nodes,solver,notes";
  for (const auto& k : extra_keys) o << ",extra_" << csv_field(k);
  o << '\n';
  for (const auto& r : rows) {
    const auto& e = r.report;
    const auto& p = e.params;
    o << csv_field(e.kind) << ',' << number(p.lambda) << ',' << number(p.epsilon) << ',' << to_string(p.sign) << ','
      << p.d << ',' << number(p.r_min) << ',' << number(p.r_max) << ',' << p.mode_cutoff << ',' << number(e.lhs)
      << ',' << number(e.rhs) << ',' << number(e.ratio) << ',' << r.origin.spec_hash << ',' << r.origin.mesh_nodes
      << ',' << csv_field(r.origin.solver) << ',' << csv_field(e.notes);
    for (const auto& k : extra_keys) {
      o << ',';
      auto it = e.extras.find(k);
      if (it != e.extras.end()) o << number(it->second);
    }
    o << '\n';
  }
  return o.str();
}

std::string emit_json(const std::vector<Row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& e = r.report;
    const auto& p = e.params;
    nlohmann::json j;
    j["kind"] = e.kind;
    j["lhs"] = finite_or_string(e.lhs);
    j["rhs"] = finite_or_string(e.rhs);
    j["ratio"] = finite_or_string(e.ratio);
    j["notes"] = e.notes;
    j["params"] = {{"d", p.d},           {"lambda", p.lambda}, {"epsilon", p.epsilon},
                   {"sign", to_string(p.sign)}, {"r_min", p.r_min}, {"r_max", p.r_max},
                   {"mode_cutoff", p.mode_cutoff}};
    nlohmann::json ex = nlohmann::json::object();
    for (const auto& [k, v] : e.extras) ex[k] = finite_or_string(v);
    j["extras"] = ex;
    j["spec_hash"] = r.origin.spec_hash;
    j["mesh_nodes"] = r.origin.mesh_nodes;
    j["solver"] = r.origin.solver;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double a, double b) const {
    double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (int e = (int)std::floor(std::log10(lo)); e <= (int)std::ceil(std::log10(hi)); ++e) {
        double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) t.push_back(v);
      }
      if (t.size() < 2) t = {lo, hi};
    } else {
      for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
    }
    return t;
  }
};

Axis make_axis(const std::vector<const Series*>& s, bool log, bool is_x) {
  Axis a;
  a.log = log;
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (auto* p : s)
    for (double v : is_x ? p->x : p->y)
      if (std::isfinite(v) && (!log || v > 0)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(lo <= hi)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (hi == lo) {
    if (log) {
      lo /= 2;
      hi *= 2;
    } else {
      double w = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= w;
      hi += w;
    }
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

std::string xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string svg_plot(const Plot& plot) {
  const double W = 720, H = 460, L = 80, R = 180, T = 40, B = 60;
  std::vector<const Series*> s;
  for (const auto& x : plot.series) s.push_back(&x);
  Axis ax = make_axis(s, plot.logx, true), ay = make_axis(s, plot.logy, false);
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << xml(plot.title) << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    double x = ax.map(t, L, W - R);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(x) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/><text x=\"" << fmt(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << fmt(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    double y = ay.map(t, H - B, T);
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << L << "\" y2=\"" << fmt(y)
      << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
      << fmt(t) << "</text>\n";
  }
  o << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
    << xml(plot.xlabel) << (plot.logx ? " (log)" : "") << "</text>\n";
  o << "<text transform=\"translate(20," << (T + (H - T - B) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml(plot.ylabel) << (plot.logy ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& sr = plot.series[k];
    const char* c = colors[k % 8];
    std::ostringstream pts;
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      double x = sr.x[i], y = sr.y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (ax.log && x <= 0) || (ay.log && y <= 0)) continue;
      pts << fmt(ax.map(x, L, W - R)) << ',' << fmt(ay.map(y, H - B, T)) << ' ';
    }
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    double ly = T + 10 + 18 * k;
    o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/><text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">"
      << xml(sr.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string emit_report(std::vector<Row> rows, Format format) {
  canonical_sort(rows);
  switch (format) {
    case Format::csv: return emit_csv(rows);
    case Format::json: return emit_json(rows);
    case Format::svg: {
      Plot p;
      p.title = "ratio against lambda";
      p.xlabel = "lambda";
      p.ylabel = "lhs / rhs";
      bool pos_x = true, pos_y = true;
      for (const auto& r : rows) {
        if (p.series.empty() || p.series.back().name != r.report.kind) p.series.push_back({r.report.kind, {}, {}});
        p.series.back().x.push_back(r.report.params.lambda);
        p.series.back().y.push_back(r.report.ratio);
        pos_x = pos_x && r.report.params.lambda > 0;
        pos_y = pos_y && r.report.ratio > 0;
      }
      p.logx = pos_x && !rows.empty();
      p.logy = pos_y && !rows.empty();
      return svg_plot(p);
    }
  }
  throw Error("unknown format");
}

}  // namespace maghelm::report
